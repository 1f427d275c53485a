"""Synthetic parameter-recovery and model-selection experiments.

Four 2-D mixtures (``A``-``D``) with known parameters are sampled with fixed
per-component counts, refitted many times, and the fits are summarized:

* :func:`run_recovery` averages matched parameter estimates over runs,
* :func:`run_model_selection` histograms the number of surviving
  components over a grid of sample sizes and initial component counts,
* :func:`emit_traces` and :func:`write_selection` write plot-ready files.

Every run draws its own seeds from ``(spec.seed, run index)``, so results do
not depend on execution order.
"""

import csv
import json
import time
from collections import Counter
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .distribution import IblParams
from .evi import FitConfig, fit
from .mixture import IblmmModel, sample_mixture, stratified_counts

__all__ = [
    "TABLE1",
    "BenchmarkSpec",
    "RunRecord",
    "RecoveryResult",
    "SelectionResult",
    "table1_spec",
    "match_components",
    "run_recovery",
    "run_model_selection",
    "emit_traces",
    "write_selection",
]

# rows: (alpha_1, alpha_2, u, v, pi, N_m)
TABLE1 = {
    "A": [(12.0, 24.0, 8.5, 12.5, 0.4, 200),
          (21.0, 15.0, 18.0, 5.0, 0.6, 300)],
    "B": [(12.0, 24.0, 8.5, 12.5, 0.2, 120),
          (21.0, 15.0, 18.0, 5.0, 0.3, 180),
          (18.5, 8.0, 4.0, 16.5, 0.5, 300)],
    "C": [(12.0, 21.0, 8.5, 12.5, 0.1, 80),
          (21.0, 35.0, 18.0, 5.0, 0.2, 160),
          (32.0, 28.0, 4.0, 16.5, 0.3, 240),
          (2.0, 18.0, 24.0, 8.0, 0.4, 320)],
    "D": [(21.0, 6.0, 18.0, 24.0, 0.1, 100),
          (2.0, 28.0, 8.0, 15.0, 0.2, 200),
          (18.0, 68.0, 24.0, 16.0, 0.25, 250),
          (76.0, 8.0, 4.0, 18.0, 0.3, 300),
          (2.0, 4.0, 4.0, 12.0, 0.15, 150)],
}


@dataclass
class BenchmarkSpec:
    dataset_id: str
    true_model: IblmmModel
    per_component_counts: np.ndarray
    runs: int = 20
    initial_M: int = None
    seed: int = 0

    def __post_init__(self):
        self.per_component_counts = np.asarray(self.per_component_counts, dtype=int)
        if self.initial_M is None:
            self.initial_M = 2 * self.true_model.n_components
        self.validate()

    def validate(self):
        self.true_model.validate()
        if self.per_component_counts.shape != (self.true_model.n_components,):
            raise ValueError("need one count per true component")
        if np.any(self.per_component_counts <= 0):
            raise ValueError("per-component counts must be positive")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.initial_M < 1:
            raise ValueError("initial_M must be >= 1")

    @property
    def n(self):
        return int(self.per_component_counts.sum())


def table1_spec(dataset_id, runs=20, initial_M=None, seed=0):
    """Benchmark spec for one of the published datasets ``A``-``D``."""
    key = str(dataset_id).upper()
    if key not in TABLE1:
        raise ValueError(f"unknown dataset id {dataset_id!r}; "
                         f"expected one of {sorted(TABLE1)}")
    rows = TABLE1[key]
    model = IblmmModel([r[4] for r in rows],
                       [IblParams(r[0:2], r[2], r[3]) for r in rows])
    return BenchmarkSpec(key, model, [r[5] for r in rows], runs=runs,
                         initial_M=initial_M, seed=seed)


def _derived_seed(*key):
    return int(np.random.SeedSequence(list(key)).generate_state(1)[0])


def _params_matrix(model):
    return np.array([[*c.alpha, c.u, c.v] for c in model.components])


def match_components(true_model, est_model):
    """Greedily pair true and estimated components.

    The cost of a pair is the summed relative error over ``(alpha, u, v)``;
    the cheapest remaining pair is fixed first. Returns ``{true: est}``,
    which is partial when fewer components were estimated than exist.
    """
    T = _params_matrix(true_model)
    E = _params_matrix(est_model)
    cost = (np.abs(E[None, :, :] - T[:, None, :]) / T[:, None, :]).sum(axis=2)
    pairs = {}
    for _ in range(min(cost.shape)):
        i, j = np.unravel_index(np.argmin(cost), cost.shape)
        pairs[int(i)] = int(j)
        cost[i, :] = np.inf
        cost[:, j] = np.inf
    return pairs


@dataclass
class RunRecord:
    run: int
    data_seed: int
    fit_seed: int
    n: int
    initial_M: int
    surviving: int = None
    converged: bool = None
    iterations: int = None
    error: str = None
    weights_before_pruning: list = None
    occupancy_before_pruning: list = None
    elbo_trace: np.ndarray = field(default=None, repr=False)
    estimate: IblmmModel = field(default=None, repr=False)
    # wall-clock time; not serialized so that outputs stay byte-stable
    seconds: float = field(default=None, repr=False)

    def to_dict(self):
        return {
            "run": self.run, "data_seed": self.data_seed,
            "fit_seed": self.fit_seed, "n": self.n,
            "initial_M": self.initial_M, "surviving": self.surviving,
            "converged": self.converged, "iterations": self.iterations,
            "error": self.error,
            "weights_before_pruning": self.weights_before_pruning,
            "occupancy_before_pruning": self.occupancy_before_pruning,
            "estimate": None if self.estimate is None else self.estimate.to_dict(),
        }


def _one_run(spec, k, counts, initial_M, config, data_key, fit_key, callback=None):
    data_seed = _derived_seed(*data_key)
    fit_seed = _derived_seed(*fit_key)
    rec = RunRecord(k, data_seed, fit_seed, int(counts.sum()), initial_M)
    X, _ = sample_mixture(spec.true_model, None, seed=data_seed, counts=counts)
    cfg = replace(config, initial_M=initial_M, seed=fit_seed)
    t0 = time.perf_counter()
    try:
        rep = fit(X, cfg, callback=callback)
    except (ArithmeticError, ValueError) as exc:
        rec.error = f"{type(exc).__name__}: {exc}"
        return rec
    finally:
        rec.seconds = time.perf_counter() - t0
    rec.surviving = rep.surviving_components
    rec.converged = rep.converged
    rec.iterations = rep.iterations
    rec.weights_before_pruning = [float(w) for w in rep.weights_before_pruning]
    rec.occupancy_before_pruning = [float(w) for w in rep.occupancy_before_pruning]
    rec.elbo_trace = rep.elbo_trace
    rec.estimate = rep.point_model
    return rec


@dataclass
class RecoveryResult:
    """Matched, run-averaged estimates and the surviving-count histogram.

    ``mean_estimates[m]`` averages over converged runs in which true
    component ``m`` found a partner; ``n_matched`` says how many.
    """

    spec: BenchmarkSpec
    mean_estimates: list
    selection_counts: dict
    traces: list
    records: list

    @property
    def n_failed(self):
        return sum(1 for r in self.records if r.error is not None or not r.converged)

    def to_dict(self):
        return {
            "dataset_id": self.spec.dataset_id,
            "runs": self.spec.runs,
            "initial_M": self.spec.initial_M,
            "seed": self.spec.seed,
            "per_component_counts": self.spec.per_component_counts.tolist(),
            "true_model": self.spec.true_model.to_dict(),
            "matching": "greedy, minimal summed relative error over (alpha, u, v)",
            "mean_estimates": self.mean_estimates,
            "selection_counts": {str(k): v for k, v in
                                 sorted(self.selection_counts.items())},
            "failed_runs": self.n_failed,
            "records": [r.to_dict() for r in self.records],
        }


def run_recovery(spec, config=None, n=None, callback=None):
    """Generate, fit and match ``spec.runs`` times.

    Parameters
    ----------
    spec : BenchmarkSpec
    config : FitConfig, optional
        Base fit settings; ``initial_M`` and ``seed`` are overridden per run.
    n : int, optional
        Total sample size, split by the true weights. Defaults to the
        published per-component counts.
    callback : callable, optional
        Forwarded to every :func:`~iblmm.evi.fit` call.
    """
    spec.validate()
    config = FitConfig() if config is None else config
    counts = (spec.per_component_counts if n is None
              else stratified_counts(spec.true_model.weights, int(n)))
    records = [_one_run(spec, k, counts, spec.initial_M, config,
                        (spec.seed, k, 0), (spec.seed, k, 1), callback)
               for k in range(spec.runs)]

    truth = spec.true_model
    acc = [[] for _ in range(truth.n_components)]
    for rec in records:
        if rec.error is not None or not rec.converged:
            continue
        pairs = match_components(truth, rec.estimate)
        for i, j in pairs.items():
            c = rec.estimate.components[j]
            acc[i].append([*c.alpha, c.u, c.v, rec.estimate.weights[j]])
    means = []
    for i, rows in enumerate(acc):
        entry = {"component": i, "n_matched": len(rows)}
        if rows:
            avg = np.mean(rows, axis=0)
            entry.update(alpha=avg[:-3].tolist(), u=float(avg[-3]),
                         v=float(avg[-2]), pi=float(avg[-1]))
        means.append(entry)
    hist = Counter(r.surviving for r in records if r.error is None)
    return RecoveryResult(spec, means, dict(hist),
                          [r.elbo_trace for r in records], records)


def _surviving(rec, rule, threshold):
    w = rec.weights_before_pruning if rule == "weight" else rec.occupancy_before_pruning
    return int(np.sum(np.asarray(w) > threshold))


@dataclass
class SelectionResult:
    """Surviving-component histograms keyed by ``(N, initial_M)``.

    ``rule`` and ``threshold`` are the pruning settings the histograms were
    counted with; :meth:`rescored` recounts the same fits under another rule.
    """

    spec: BenchmarkSpec
    histograms: dict
    records: dict
    rule: str = "weight"
    threshold: float = 1e-5

    def mode(self, n, initial_M):
        h = self.histograms[(n, initial_M)]
        return max(sorted(h), key=lambda m: h[m])

    def spread(self, n, initial_M=None):
        """Standard deviation of the surviving count.

        With ``initial_M=None`` the runs of every initial count at sample
        size ``n`` are pooled, so the value also reflects how much the
        outcome depends on the initialization.
        """
        keys = [k for k in self.histograms if k[0] == n and initial_M in (None, k[1])]
        if not keys:
            raise KeyError((n, initial_M))
        vals = np.concatenate([np.repeat(list(self.histograms[k].keys()),
                                         list(self.histograms[k].values()))
                               for k in keys])
        return float(np.std(vals))

    def rescored(self, rule, threshold=None):
        """Histograms recounted from the stored pre-pruning weights."""
        threshold = self.threshold if threshold is None else threshold
        hists = {key: dict(Counter(_surviving(r, rule, threshold)
                                   for r in cell if r.error is None))
                 for key, cell in self.records.items()}
        return SelectionResult(self.spec, hists, self.records, rule, threshold)

    def to_dict(self):
        cells = []
        for (n, m0), h in sorted(self.histograms.items()):
            cells.append({"n": n, "initial_M": m0,
                          "histogram": {str(k): v for k, v in sorted(h.items())},
                          "mode": self.mode(n, m0),
                          "spread": self.spread(n, m0)})
        sizes = sorted({n for n, _ in self.histograms})
        return {"dataset_id": self.spec.dataset_id, "runs": self.spec.runs,
                "seed": self.spec.seed, "rule": self.rule,
                "threshold": self.threshold, "cells": cells,
                "pooled_spread": {str(n): self.spread(n) for n in sizes}}


def run_model_selection(spec, sample_sizes, initial_Ms, runs=None, config=None,
                        callback=None):
    """Histogram surviving components over ``sample_sizes x initial_Ms``.

    Run ``k`` of a given sample size uses the same data for every initial
    component count, so the cells differ only in initialization.
    """
    spec.validate()
    config = FitConfig() if config is None else config
    runs = spec.runs if runs is None else int(runs)
    hists, recs = {}, {}
    for n in sample_sizes:
        counts = stratified_counts(spec.true_model.weights, int(n))
        for m0 in initial_Ms:
            cell = [_one_run(spec, k, counts, int(m0), config,
                             (spec.seed, int(n), k, 0),
                             (spec.seed, int(n), int(m0), k, 1), callback)
                    for k in range(runs)]
            hists[(int(n), int(m0))] = dict(Counter(
                r.surviving for r in cell if r.error is None))
            recs[(int(n), int(m0))] = cell
    return SelectionResult(spec, hists, recs, config.prune_on, config.prune_threshold)


def _dump_json(obj, path):
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def emit_traces(result, path):
    """Write ``<path>/<id>/run_<k>_trace.csv`` per run and ``recovery.json``.

    Returns the list of written paths.
    """
    if result is None or not result.records:
        raise ValueError("no runs to emit")
    out = Path(path) / result.spec.dataset_id
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for rec in result.records:
        if rec.elbo_trace is None:
            continue
        p = out / f"run_{rec.run}_trace.csv"
        with open(p, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["iteration", "elbo"])
            for i, val in enumerate(rec.elbo_trace):
                w.writerow([i, repr(float(val))])
        written.append(p)
    summary = out / "recovery.json"
    _dump_json(result.to_dict(), summary)
    written.append(summary)
    return written


def write_selection(result, path):
    out = Path(path) / result.spec.dataset_id
    out.mkdir(parents=True, exist_ok=True)
    p = out / "selection.json"
    _dump_json(result.to_dict(), p)
    return p
