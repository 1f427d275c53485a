"""
Categorizing documents
======================

Each category gets its own mixture fitted to smoothed word-count vectors;
a new document goes to the category with the highest posterior. The
bundled corpus has four categories with separate topic vocabularies.
"""

import numpy as np

from iblmm.evi import FitConfig
from iblmm.text import (
    build_feature_space,
    evaluate,
    load_mini_corpus,
    run_protocol,
    split_halves,
    tokenize_and_stem,
    train,
)

corpus = load_mini_corpus()
print(len(corpus), "documents in", corpus.categories)
print("tokens:", tokenize_and_stem(corpus.documents[0][0])[:8])

# %%
# One stratified half for training, the other for testing.
tr, te = split_halves(corpus, seed=0)
space = build_feature_space(tr)
clf = train(tr, space, FitConfig(initial_M=3))
ev = evaluate(te, clf, space)
print(f"{space.dim} features, held-out accuracy {ev.accuracy:.3f}")
print(ev.confusion)

# %%
# Repeated random halves.
rep = run_protocol(corpus, splits=5, seed=0, fit_config=FitConfig(initial_M=3))
print("accuracy per split:", np.round(rep["accuracies"], 3),
      f"mean {rep['mean_accuracy']:.3f}")
