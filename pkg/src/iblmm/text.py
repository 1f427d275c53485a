"""Text categorization with one IBL mixture per category.

Pipeline: lowercase alphabetic tokens, Porter stems, a corpus-level
vocabulary filter (frequency and length), smoothed term-count vectors,
one fitted mixture per category, then the Bayes rule

    category = argmax_c  log P(c) + log p(x | mixture_c).
"""

import csv
import io
import json
import re
from collections import Counter
from dataclasses import dataclass, field, replace
from functools import lru_cache
from importlib import resources
from pathlib import Path

import numpy as np
from nltk.stem.porter import PorterStemmer

from .evi import FitConfig, fit
from .mixture import IblmmModel, component_log_densities
from .special import log_sum_exp

__all__ = [
    "Corpus",
    "FeatureSpace",
    "Classifier",
    "Evaluation",
    "tokenize_and_stem",
    "build_feature_space",
    "vectorize",
    "vectorize_corpus",
    "train",
    "classify",
    "evaluate",
    "split_halves",
    "run_protocol",
    "load_corpus",
    "load_mini_corpus",
    "make_disjoint_corpus",
]

_TOKEN = re.compile(r"[a-z]+")
_STEMMER = PorterStemmer(mode=PorterStemmer.ORIGINAL_ALGORITHM)


@lru_cache(maxsize=200_000)
def _stem(word):
    return _STEMMER.stem(word)


def tokenize_and_stem(text):
    """Lowercase alphabetic tokens reduced by the original Porter rules.

    Tokens the stemmer reduces to nothing (a lone "s") are dropped.
    """
    stems = (_stem(w) for w in _TOKEN.findall(text.lower()))
    return [t for t in stems if t]


@dataclass
class Corpus:
    """Labelled documents; ``documents`` holds ``(text, label)`` pairs whose
    labels index ``categories``."""

    documents: list
    categories: list

    def __post_init__(self):
        self.documents = [(str(t), int(l)) for t, l in self.documents]
        self.categories = [str(c) for c in self.categories]
        for _, label in self.documents:
            if not 0 <= label < len(self.categories):
                raise ValueError(f"label {label} does not index a category")

    def __len__(self):
        return len(self.documents)

    @property
    def labels(self):
        return np.array([l for _, l in self.documents], dtype=int)

    def subset(self, idx):
        return Corpus([self.documents[i] for i in idx], self.categories)

    def require_categories(self, k=2):
        if len(self.categories) < k:
            raise ValueError(f"need ≥ {k} categories, got {len(self.categories)}")

    @classmethod
    def from_directory(cls, path):
        """One sub-directory per category, one plain-text file per document.
        Categories are ordered by directory name."""
        path = Path(path)
        if not path.is_dir():
            raise FileNotFoundError(f"corpus directory not found: {path}")
        cats = sorted(p.name for p in path.iterdir() if p.is_dir())
        docs = []
        for i, cat in enumerate(cats):
            for f in sorted((path / cat).iterdir()):
                if f.is_file():
                    docs.append((f.read_text(errors="replace"), i))
        return cls(docs, cats)

    @classmethod
    def from_csv(cls, path_or_buffer):
        """CSV with a ``label,text`` header. Categories are ordered by name."""
        if isinstance(path_or_buffer, (str, Path)):
            path = Path(path_or_buffer)
            if not path.exists():
                raise FileNotFoundError(f"corpus file not found: {path}")
            text = path.read_text()
        else:
            text = path_or_buffer.read()
        reader = csv.DictReader(io.StringIO(text))
        if reader.fieldnames is None or not {"label", "text"} <= set(reader.fieldnames):
            raise ValueError("corpus CSV needs a 'label,text' header")
        rows = [(r["label"], r["text"]) for r in reader]
        cats = sorted({lab for lab, _ in rows})
        index = {c: i for i, c in enumerate(cats)}
        return cls([(t, index[lab]) for lab, t in rows], cats)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["label", "text"])
            for t, l in self.documents:
                w.writerow([self.categories[l], t])


def load_corpus(path):
    """Read a corpus from a category directory tree or a ``label,text`` CSV."""
    path = Path(path)
    if path.is_dir():
        return Corpus.from_directory(path)
    return Corpus.from_csv(path)


@dataclass
class FeatureSpace:
    """Sorted stem vocabulary and the vectorization settings."""

    vocabulary: tuple
    min_count: int = 3
    min_length: int = 2
    smoothing: float = 0.5
    max_features: int = None
    index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self.vocabulary = tuple(self.vocabulary)
        if list(self.vocabulary) != sorted(set(self.vocabulary)):
            raise ValueError("vocabulary must be sorted and free of duplicates")
        if not self.smoothing > 0:
            raise ValueError("smoothing must be > 0")
        self.index = {t: i for i, t in enumerate(self.vocabulary)}

    @property
    def dim(self):
        return len(self.vocabulary)

    def to_dict(self):
        return {"vocabulary": list(self.vocabulary), "min_count": self.min_count,
                "min_length": self.min_length, "smoothing": self.smoothing,
                "max_features": self.max_features}

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


def build_feature_space(training, min_count=3, min_length=2, smoothing=0.5,
                        max_features=None):
    """Keep stems seen at least ``min_count`` times in the whole training
    corpus and at least ``min_length`` characters long.

    ``max_features`` optionally keeps only the most frequent stems (ties by
    stem order), which bounds the dimension on large corpora.
    """
    if len(training) == 0:
        raise ValueError("cannot build a vocabulary from an empty corpus")
    counts = Counter()
    for text, _ in training.documents:
        counts.update(tokenize_and_stem(text))
    keep = [t for t, n in counts.items() if n >= min_count and len(t) >= min_length]
    if max_features is not None and len(keep) > max_features:
        keep = sorted(keep, key=lambda t: (-counts[t], t))[:int(max_features)]
    if not keep:
        raise ValueError("vocabulary is empty after frequency/length filtering")
    return FeatureSpace(tuple(sorted(keep)), min_count, min_length, smoothing,
                        max_features)


def vectorize(terms, space):
    """Term counts plus ``space.smoothing``; every entry is > 0."""
    v = np.full(space.dim, float(space.smoothing))
    for t in terms:
        i = space.index.get(t)
        if i is not None:
            v[i] += 1.0
    return v


def vectorize_corpus(corpus, space):
    if len(corpus) == 0:
        return np.empty((0, space.dim))
    return np.vstack([vectorize(tokenize_and_stem(t), space)
                      for t, _ in corpus.documents])


@dataclass
class Classifier:
    """One mixture per category plus the category priors."""

    per_class_models: list
    class_priors: np.ndarray
    categories: list
    adjustments: dict = field(default_factory=dict)

    def __post_init__(self):
        self.class_priors = np.asarray(self.class_priors, dtype=float)
        if len(self.per_class_models) != len(self.categories):
            raise ValueError("need one model per category")
        if abs(self.class_priors.sum() - 1.0) > 1e-12:
            raise ValueError("class priors must sum to 1")
        dims = {m.dim for m in self.per_class_models}
        if len(dims) != 1:
            raise ValueError("per-class models disagree on the feature dimension")

    @property
    def dim(self):
        return self.per_class_models[0].dim

    def to_dict(self):
        return {"categories": self.categories,
                "class_priors": self.class_priors.tolist(),
                "per_class_models": [m.to_dict() for m in self.per_class_models],
                "adjustments": self.adjustments}

    @classmethod
    def from_dict(cls, d):
        return cls([IblmmModel.from_dict(m) for m in d["per_class_models"]],
                   d["class_priors"], d["categories"], d.get("adjustments", {}))


def train(training, space, fit_config=None):
    """Fit one mixture per category on that category's training vectors.

    When a category has fewer documents than ``initial_M``, its fit starts
    from as many components as there are documents; the change is recorded
    in ``Classifier.adjustments``.
    """
    config = FitConfig() if fit_config is None else fit_config
    X = vectorize_corpus(training, space)
    y = training.labels
    n_cat = len(training.categories)
    counts = np.bincount(y, minlength=n_cat)
    if np.any(counts == 0):
        missing = [training.categories[i] for i in np.flatnonzero(counts == 0)]
        raise ValueError(f"no training documents for categories {missing}")
    models, adjustments = [], {}
    for c in range(n_cat):
        Xc = X[y == c]
        m0 = int(config.initial_M)
        if Xc.shape[0] < m0:
            adjustments[training.categories[c]] = {"initial_M": Xc.shape[0],
                                                   "requested": m0}
            m0 = Xc.shape[0]
        cfg = replace(config, initial_M=m0, seed=int(config.seed) * 1000 + c)
        models.append(fit(Xc, cfg).point_model)
    return Classifier(models, counts / counts.sum(), list(training.categories),
                      adjustments)


def _class_log_joint(X, classifier):
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != classifier.dim:
        raise ValueError(f"dimension mismatch: vector has D={X.shape[1]}, "
                         f"classifier expects D={classifier.dim}")
    cols = [np.log(p) + log_sum_exp(component_log_densities(X, m), axis=1)
            for p, m in zip(classifier.class_priors, classifier.per_class_models)]
    return np.column_stack(cols)


def classify(vector, classifier):
    """Return ``(category index, posterior over categories)``.

    Ties go to the lowest category index. A matrix of vectors gives arrays.
    """
    single = np.ndim(vector) == 1
    lj = _class_log_joint(vector, classifier)
    post = np.exp(lj - log_sum_exp(lj, axis=1, keepdims=True))
    post /= post.sum(axis=1, keepdims=True)
    pred = np.argmax(lj, axis=1)
    if single:
        return int(pred[0]), post[0]
    return pred, post


@dataclass
class Evaluation:
    accuracy: float
    confusion: np.ndarray
    categories: list

    def to_dict(self):
        return {"accuracy": self.accuracy, "confusion": self.confusion.tolist(),
                "categories": self.categories}


def evaluate(test, classifier, space):
    """Accuracy and confusion matrix (rows: true, columns: predicted)."""
    if len(test) == 0:
        raise ValueError("empty test set")
    X = vectorize_corpus(test, space)
    pred, _ = classify(X, classifier)
    y = test.labels
    k = len(classifier.categories)
    conf = np.zeros((k, k), dtype=int)
    np.add.at(conf, (y, pred), 1)
    return Evaluation(float(np.mean(pred == y)), conf, list(classifier.categories))


def split_halves(corpus, seed=None):
    """Shuffle each category and cut it in two; returns ``(train, test)``.

    An odd category puts the extra document in the training half.
    """
    rng = np.random.default_rng(seed)
    y = corpus.labels
    tr, te = [], []
    for c in range(len(corpus.categories)):
        idx = rng.permutation(np.flatnonzero(y == c))
        cut = (idx.size + 1) // 2
        tr.extend(idx[:cut].tolist())
        te.extend(idx[cut:].tolist())
    return corpus.subset(sorted(tr)), corpus.subset(sorted(te))


def run_protocol(corpus, splits=30, seed=0, fit_config=None, min_count=3,
                 min_length=2, smoothing=0.5, max_features=None):
    """Repeated random half/half evaluation.

    Each split rebuilds the vocabulary on its training half only.
    """
    corpus.require_categories(2)
    per_split = []
    for k in range(int(splits)):
        split_seed = int(np.random.SeedSequence([seed, k]).generate_state(1)[0])
        tr, te = split_halves(corpus, split_seed)
        space = build_feature_space(tr, min_count, min_length, smoothing, max_features)
        cfg = FitConfig() if fit_config is None else fit_config
        clf = train(tr, space, replace(cfg, seed=split_seed % 1_000_000))
        ev = evaluate(te, clf, space)
        per_split.append({"split": k, "seed": split_seed, "dim": space.dim,
                          "n_train": len(tr), "n_test": len(te),
                          **ev.to_dict()})
    accs = np.array([s["accuracy"] for s in per_split])
    return {"splits": int(splits), "mean_accuracy": float(accs.mean()),
            "std_accuracy": float(accs.std()),
            "accuracies": accs.tolist(), "per_split": per_split,
            "categories": list(corpus.categories)}


def load_mini_corpus():
    """The bundled 4-category corpus with disjoint topic vocabularies."""
    ref = resources.files("iblmm") / "data" / "mini_corpus.csv"
    with resources.as_file(ref) as p:
        return Corpus.from_csv(p)


_TOPICS = {
    "course": "lecture homework syllabus exam assignment tutorial grading "
              "textbook midterm quiz semester lab credit prerequisite".split(),
    "faculty": "professor tenure publication research grant chair dean "
               "biography appointment emeritus award fellow advisor seminar".split(),
    "project": "prototype software release funding milestone collaboration "
               "architecture toolkit dataset benchmark sponsor deliverable "
               "module repository".split(),
    "student": "undergraduate graduate thesis hobby roommate resume internship "
               "dormitory hometown friends vacation music photos games".split(),
}
_FILLER = "the and of to in is for on with page home university computer " \
          "science department information".split()


def make_disjoint_corpus(docs_per_class=50, seed=0, doc_length=(30, 60),
                         topic_share=0.6):
    """Synthesize a corpus whose categories use disjoint topic words.

    Every document mixes topic words of its own category with filler words
    shared by all categories.
    """
    rng = np.random.default_rng(seed)
    cats = sorted(_TOPICS)
    docs = []
    for i, cat in enumerate(cats):
        words = _TOPICS[cat]
        for _ in range(docs_per_class):
            n = int(rng.integers(doc_length[0], doc_length[1] + 1))
            k = rng.binomial(n, topic_share)
            toks = list(rng.choice(words, size=k)) + list(rng.choice(_FILLER, size=n - k))
            rng.shuffle(toks)
            docs.append((" ".join(toks), i))
    return Corpus(docs, cats)


def save_json(obj, path):
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")
