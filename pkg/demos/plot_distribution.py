"""
The inverted Beta-Liouville distribution
========================================

A positive vector ``x`` is split into its total ``S = sum(x)`` and its
proportions ``x / S``. The proportions are Dirichlet, the total follows a
beta-prime law, and the two are independent. This script checks that
picture numerically.
"""

import numpy as np

from iblmm import IblParams, log_pdf, sample

params = IblParams(alpha=[12.0, 24.0], u=18.0, v=5.0)
X = sample(params, 100_000, seed=0)
S = X.sum(axis=1)
Y = X / S[:, None]

# %%
# The total has mean ``u / (v - 1)`` once ``v > 1``.
print(f"E[S]      sample {S.mean():.4f}   exact {params.u / (params.v - 1):.4f}")

# %%
# The proportions average to ``alpha / sum(alpha)``.
print("E[x / S]  sample", np.round(Y.mean(axis=0), 4),
      "  exact", np.round(params.alpha / params.alpha.sum(), 4))

# %%
# Total and proportions are uncorrelated.
print(f"corr(S, y1) = {np.corrcoef(S, Y[:, 0])[0, 1]:+.4f}")

# %%
# The density is evaluated in log space, row by row.
print("log p at three draws:", np.round(log_pdf(X[:3], params), 3))
