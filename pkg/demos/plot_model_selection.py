"""
Choosing the number of components
=================================

Start every fit with far too many components and let the variational
posterior empty the superfluous ones. The weight of an unused component
shrinks toward ``c0 / (N + M c0)``, so the default pruning threshold can
only remove it once ``N`` is large enough; counting components that hold
data (``prune_on="occupancy"``) works at every size.
"""

from collections import Counter

from iblmm import FitConfig
from iblmm.benchmark import run_model_selection, run_recovery, table1_spec

# %%
# Fifteen starting components, five seeded runs per dataset.
for key in "ABCD":
    res = run_recovery(table1_spec(key, runs=5, initial_M=15))
    truth = res.spec.true_model.n_components
    counts = dict(sorted(res.selection_counts.items()))
    print(f"dataset {key}: true M={truth}, surviving counts {counts}")

# %%
# Small samples. Same fits, two ways of counting the survivors.
sel = run_model_selection(table1_spec("A", runs=10), [50, 500], [5, 15])
occ = sel.rescored("occupancy")
for key in sorted(sel.histograms):
    print(f"N={key[0]:>3} M0={key[1]:>2}  weight rule {sel.histograms[key]}  "
          f"occupancy rule {occ.histograms[key]}")

# %%
# Pruning on occupancy inside the fit gives the same picture directly.
direct = run_model_selection(table1_spec("A", runs=10), [50], [15],
                             config=FitConfig(prune_on="occupancy"))
print("N=50 from 15, prune_on='occupancy':",
      dict(Counter(r.surviving for r in direct.records[(50, 15)])))
