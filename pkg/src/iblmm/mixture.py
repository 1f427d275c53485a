"""Finite mixtures of IBL components, plus their on-disk formats.

Model JSON::

    {"weights": [0.4, 0.6],
     "components": [{"alpha": [12, 24], "u": 8.5, "v": 12.5}, ...]}

Dataset CSV: a header row, one row per observation, ``D`` numeric columns
and optionally a final integer column named ``label``.
"""

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import distribution as ibl
from .distribution import IblParams, check_positive_data
from .special import log_sum_exp

__all__ = [
    "IblmmModel",
    "Dataset",
    "log_likelihood",
    "component_log_densities",
    "component_posteriors",
    "sample_mixture",
    "stratified_counts",
    "load_model",
    "save_model",
    "load_dataset",
    "save_dataset",
]


@dataclass(frozen=True)
class IblmmModel:
    """Mixing weights and IBL components sharing one dimension."""

    weights: np.ndarray
    components: tuple

    def __post_init__(self):
        w = np.atleast_1d(np.asarray(self.weights, dtype=float))
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "components", tuple(self.components))
        self.validate()

    @property
    def n_components(self):
        return len(self.components)

    @property
    def dim(self):
        return self.components[0].dim

    def validate(self):
        w, comps = self.weights, self.components
        if len(comps) < 1:
            raise ValueError("a mixture needs at least one component")
        if w.shape != (len(comps),):
            raise ValueError(f"{w.shape[0]} weights for {len(comps)} components")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise ValueError("mixing weights must be finite and > 0")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValueError(f"mixing weights sum to {w.sum()!r}, not 1")
        for m, c in enumerate(comps):
            try:
                ibl.validate(c)
            except ValueError as exc:
                raise ValueError(f"component {m}: {exc}") from None
            if c.dim != comps[0].dim:
                raise ValueError(f"component {m} has D={c.dim}, "
                                 f"component 0 has D={comps[0].dim}")

    def permuted(self, order):
        order = list(order)
        return IblmmModel(self.weights[order], [self.components[i] for i in order])

    def to_dict(self):
        return {"weights": self.weights.tolist(),
                "components": [c.to_dict() for c in self.components]}

    @classmethod
    def from_dict(cls, d):
        try:
            comps = [IblParams.from_dict(c) for c in d["components"]]
            return cls(d["weights"], comps)
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed model document: {exc!r}") from None


@dataclass
class Dataset:
    """``N x D`` strictly positive observations with optional labels."""

    X: np.ndarray
    labels: np.ndarray = None

    def __post_init__(self):
        self.X = np.atleast_2d(np.asarray(self.X, dtype=float))
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=int)
            if self.labels.shape != (self.X.shape[0],):
                raise ValueError("need exactly one label per row")

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def dim(self):
        return self.X.shape[1]


def component_log_densities(X, model):
    """``(N, M)`` matrix of ``log pi_m + log p(x_n | component m)``."""
    X = check_positive_data(np.atleast_2d(X), model.dim)
    cols = [np.log(w) + ibl.log_pdf(X, c)
            for w, c in zip(model.weights, model.components)]
    return np.column_stack(cols)


def log_likelihood(X, model):
    """Total log-likelihood ``sum_n log sum_m pi_m p(x_n | m)``."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 2 and X.shape[0] == 0:
        return 0.0
    lj = component_log_densities(X, model)
    return float(np.sum(log_sum_exp(lj, axis=1)))


def component_posteriors(x, model):
    """Posterior membership probabilities.

    Returns a length-``M`` simplex for a single vector, or an ``(N, M)``
    matrix of row simplexes for a data matrix.
    """
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    lj = component_log_densities(x, model)
    post = np.exp(lj - log_sum_exp(lj, axis=1, keepdims=True))
    post /= post.sum(axis=1, keepdims=True)
    return post[0] if single else post


def stratified_counts(weights, n):
    """Split ``n`` into per-component counts proportional to ``weights``.

    Largest-remainder rounding, so ``[0.4, 0.6]`` with ``n=500`` gives
    exactly ``[200, 300]``.
    """
    w = np.asarray(weights, dtype=float)
    raw = w * n
    counts = np.floor(raw + 1e-9).astype(int)
    short = n - counts.sum()
    if short > 0:
        order = np.argsort(-(raw - counts), kind="stable")
        counts[order[:short]] += 1
    return counts


def sample_mixture(model, n, seed=None, stratified=False, counts=None):
    """Draw ``n`` labelled observations from ``model``.

    With ``stratified=False`` each label is drawn from ``Categorical(pi)``.
    With ``stratified=True`` the per-component counts are fixed, either to
    ``counts`` or to :func:`stratified_counts` of the weights, and rows come
    out grouped by component. Labels are 0-based.
    """
    model.validate()
    rng = np.random.default_rng(seed)
    if counts is not None or stratified:
        if counts is None:
            counts = stratified_counts(model.weights, int(n))
        counts = np.asarray(counts, dtype=int)
        if counts.shape != (model.n_components,) or np.any(counts < 0):
            raise ValueError("counts must be one non-negative int per component")
        labels = np.repeat(np.arange(model.n_components), counts)
    else:
        if int(n) < 0:
            raise ValueError("n must be >= 0")
        labels = rng.choice(model.n_components, size=int(n), p=model.weights)
    X = np.empty((labels.size, model.dim))
    for m, comp in enumerate(model.components):
        idx = np.flatnonzero(labels == m)
        X[idx] = ibl.sample(comp, idx.size, rng)
    return X, labels


def save_model(model, path):
    Path(path).write_text(json.dumps(model.to_dict(), indent=2) + "\n")


def load_model(path):
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except FileNotFoundError:
        raise FileNotFoundError(f"model file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: invalid JSON ({exc})") from None
    return IblmmModel.from_dict(doc)


def save_dataset(path, X, labels=None):
    """Write a dataset CSV; ``repr``-exact floats keep round trips lossless."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    d = X.shape[1]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        header = [f"x{i + 1}" for i in range(d)]
        if labels is not None:
            header.append("label")
        w.writerow(header)
        for i, row in enumerate(X):
            vals = [repr(float(v)) for v in row]
            if labels is not None:
                vals.append(str(int(labels[i])))
            w.writerow(vals)


def load_dataset(path):
    """Read a dataset CSV written by :func:`save_dataset` (or by hand).

    A final column is treated as labels when its header is ``label``.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"dataset file not found: {path}")
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty file (a header row is required)")
    header = [h.strip().lower() for h in rows[0]]
    has_label = bool(header) and header[-1] == "label"
    body = [r for r in rows[1:] if r]
    try:
        data = np.array([[float(v) for v in r] for r in body], dtype=float)
    except ValueError as exc:
        raise ValueError(f"{path}: non-numeric entry ({exc})") from None
    ncol = len(header)
    if body and data.shape[1] != ncol:
        raise ValueError(f"{path}: rows have {data.shape[1]} columns, header has {ncol}")
    if not body:
        data = np.empty((0, ncol))
    if has_label:
        labels = data[:, -1]
        if not np.all(labels == np.round(labels)):
            raise ValueError(f"{path}: label column must hold integers")
        return Dataset(data[:, :-1], labels.astype(int))
    return Dataset(data)
