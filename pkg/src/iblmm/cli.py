"""Command-line entry point: ``iblmm {fit,sample,bench,text}``.

Settings are layered as command-line flags over an optional config file
(``key = value`` lines, optionally under ``[fit]``/``[text]``/``[bench]``
headers, or a flat JSON object) over built-in defaults. Each command writes
the settings it actually used to ``config.json`` in its output location,
and that file can be passed back with ``--config``.

Exit status: 0 on success, 1 on bad input, 2 when ``fit`` stops at the
iteration limit without converging.
"""

import argparse
import configparser
import json
import logging
import sys
from dataclasses import fields, replace
from pathlib import Path

from . import __version__
from .benchmark import emit_traces, run_model_selection, run_recovery, table1_spec, \
    write_selection
from .evi import FitConfig, default_prior, fit
from .mixture import load_dataset, load_model, sample_mixture, save_dataset, save_model
from .text import (
    build_feature_space,
    evaluate,
    load_corpus,
    run_protocol,
    train,
)

log = logging.getLogger("iblmm")

_FIT_KEYS = ("initial_M", "max_iterations", "elbo_rel_tolerance", "prune_threshold",
             "seed", "expansion", "prune_every_iteration", "prune_on")
_PRIOR_KEYS = tuple(f"prior_{k}" for k in "ghstpqc")
_TEXT_KEYS = {"min_count": int, "min_length": int, "smoothing": float,
              "max_features": int, "splits": int}
_BENCH_KEYS = {"runs": int, "sizes": str, "initial_ms": str}


class CliError(Exception):
    pass


def _dump(obj, path):
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def read_config_file(path):
    """Flat ``{key: value}`` mapping from an ini-style or JSON config file."""
    path = Path(path)
    if not path.exists():
        raise CliError(f"config file not found: {path}")
    text = path.read_text()
    if path.suffix == ".json":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise CliError(f"{path}: invalid JSON ({exc})") from None
        if not isinstance(doc, dict):
            raise CliError(f"{path}: expected a JSON object")
        return dict(doc)
    cp = configparser.ConfigParser()
    cp.optionxform = str
    if not text.lstrip().startswith("["):
        text = "[fit]\n" + text
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise CliError(f"{path}: {exc}") from None
    out = {}
    for section in cp.sections():
        out.update(cp[section])
    return out


def _layered(args, extra_keys):
    """Merge defaults < config file < flags; returns (FitConfig, extras)."""
    file_vals = read_config_file(args.config) if args.config else {}
    file_vals = {("initial_M" if k == "initial_m" else k): v for k, v in file_vals.items()}
    allowed = set(_FIT_KEYS) | set(_PRIOR_KEYS) | set(extra_keys)
    unknown = sorted(set(file_vals) - allowed)
    if unknown:
        raise CliError(f"{args.config}: unknown config keys {unknown}")
    merged = dict(file_vals)
    for key in allowed:
        val = getattr(args, key, None)
        if val is not None:
            merged[key] = val
    fit_part = {k: v for k, v in merged.items() if k in _FIT_KEYS or k in _PRIOR_KEYS}
    extras = {}
    for k, cast in extra_keys.items():
        if k in merged and merged[k] is not None:
            try:
                extras[k] = cast(merged[k])
            except (TypeError, ValueError):
                raise CliError(f"bad value for {k}: {merged[k]!r}") from None
    try:
        cfg = FitConfig.from_mapping(fit_part)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    # spell the prior out so a replayed config.json reproduces reports byte for byte
    prior = default_prior(1, 1, **(cfg.prior if isinstance(cfg.prior, dict) else {}))
    full = {k: float(getattr(prior, k).ravel()[0]) for k in "ghstpqc"}
    return replace(cfg, prior=full), extras


def _resolved_fit(cfg):
    """Flat echo of a FitConfig, with the prior spelled out."""
    d = {f.name: getattr(cfg, f.name) for f in fields(cfg) if f.name != "prior"}
    d.update({f"prior_{k}": v for k, v in cfg.prior.items()})
    return d


def cmd_fit(args):
    cfg, _ = _layered(args, {})
    ds = load_dataset(args.data)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    log.info("fitting %s: N=%d D=%d initial_M=%d", args.data, *ds.X.shape, cfg.initial_M)
    rep = fit(ds.X, cfg)
    _dump(_resolved_fit(cfg), out / "config.json")
    _dump(rep.to_dict(), out / "report.json")
    save_model(rep.point_model, out / "model.json")
    log.info("surviving components: %d (converged=%s, %d iterations)",
             rep.surviving_components, rep.converged, rep.iterations)
    return 0 if rep.converged else 2


def cmd_sample(args):
    if args.n < 0:
        raise CliError("n must be >= 0")
    model = load_model(args.model)
    X, labels = sample_mixture(model, args.n, seed=args.seed, stratified=args.stratified)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_dataset(out, X, labels)
    _dump({"n": args.n, "seed": args.seed, "stratified": bool(args.stratified)},
          out.with_name(out.stem + ".config.json"))
    return 0


def cmd_bench(args):
    cfg, extras = _layered(args, _BENCH_KEYS)
    runs = extras.get("runs", 20)
    explicit_m = args.initial_M is not None or (
        args.config and "initial_M" in _normalized_keys(args.config))
    try:
        spec = table1_spec(args.dataset_id, runs=runs,
                           initial_M=cfg.initial_M if explicit_m else None,
                           seed=cfg.seed)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    out = Path(args.out)
    res = run_recovery(spec, cfg)
    emit_traces(res, out)
    resolved = _resolved_fit(cfg)
    resolved.update(initial_M=spec.initial_M, runs=runs)
    if args.selection:
        sizes = extras.get("sizes", "50,100,200,500")
        m0s = extras.get("initial_ms", "5,10,15")
        try:
            grid = ([int(s) for s in sizes.split(",")], [int(s) for s in m0s.split(",")])
        except ValueError:
            raise CliError(f"bad grid: sizes={sizes!r} initial_ms={m0s!r}") from None
        write_selection(run_model_selection(spec, *grid, config=cfg), out)
        resolved.update(sizes=sizes, initial_ms=m0s)
    _dump(resolved, out / spec.dataset_id / "config.json")
    log.info("dataset %s: surviving histogram %s", spec.dataset_id,
             dict(sorted(res.selection_counts.items())))
    return 0


def _normalized_keys(path):
    return {("initial_M" if k == "initial_m" else k) for k in read_config_file(path)}


def cmd_text(args):
    cfg, extras = _layered(args, _TEXT_KEYS)
    space_kw = {"min_count": extras.get("min_count", 3),
                "min_length": extras.get("min_length", 2),
                "smoothing": extras.get("smoothing", 0.5),
                "max_features": extras.get("max_features")}
    corpus = load_corpus(args.corpus)
    if len(corpus.categories) < 2:
        raise CliError(f"need ≥ 2 categories, found {len(corpus.categories)} "
                       f"in {args.corpus}")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    resolved = _resolved_fit(cfg)
    resolved.update(space_kw)
    if args.test is not None:
        test = load_corpus(args.test)
        index = {c: i for i, c in enumerate(corpus.categories)}
        missing = [c for c in test.categories if c not in index]
        if missing:
            raise CliError(f"test categories {missing} are absent from {args.corpus}")
        test.documents = [(t, index[test.categories[l]]) for t, l in test.documents]
        test.categories = list(corpus.categories)
        space = build_feature_space(corpus, **space_kw)
        clf = train(corpus, space, cfg)
        ev = evaluate(test, clf, space)
        report = {"mode": "train_test", "mean_accuracy": ev.accuracy,
                  "accuracies": [ev.accuracy], "per_split": [ev.to_dict()],
                  "categories": ev.categories, "adjustments": clf.adjustments}
        _dump(space.to_dict(), out / "feature_space.json")
        _dump(clf.to_dict(), out / "classifier.json")
    else:
        splits = extras.get("splits", 30)
        resolved["splits"] = splits
        report = run_protocol(corpus, splits=splits, seed=cfg.seed, fit_config=cfg,
                              **space_kw)
        report["mode"] = "random_halves"
    _dump(resolved, out / "config.json")
    _dump(report, out / "report.json")
    log.info("mean accuracy %.4f", report["mean_accuracy"])
    return 0


def _add_fit_flags(p, initial_m_default_help="15"):
    p.add_argument("--config", help="ini-style or JSON config file")
    p.add_argument("--initial-m", dest="initial_M", type=int,
                   help=f"initial number of components (default {initial_m_default_help})")
    p.add_argument("--seed", type=int, help="random seed (default 0)")
    p.add_argument("--max-iterations", dest="max_iterations", type=int,
                   help="iteration limit (default 500)")
    p.add_argument("--tol", dest="elbo_rel_tolerance", type=float,
                   help="relative ELBO change that stops the fit (default 1e-6)")
    p.add_argument("--prune-threshold", dest="prune_threshold", type=float,
                   help="weight below which components are removed (default 1e-5)")
    p.add_argument("--expansion", choices=("geometric", "mean"),
                   help="where the helping bounds are expanded (default geometric)")
    p.add_argument("--prune-on", dest="prune_on", choices=("weight", "occupancy"),
                   help="expected weight or data share decides pruning (default weight)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="iblmm", description="Inverted Beta-Liouville mixture models.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit a mixture to a dataset CSV")
    p.add_argument("data", help="CSV with columns x1..xD and an optional label column")
    _add_fit_flags(p)
    p.add_argument("--out", default="iblmm-fit", help="output directory")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("sample", help="draw a labelled dataset from a model JSON")
    p.add_argument("model")
    p.add_argument("-n", type=int, required=True, help="number of observations")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--stratified", action="store_true",
                   help="fix per-component counts to the rounded weights")
    p.add_argument("--out", default="samples.csv", help="output CSV path")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("bench", help="synthetic recovery benchmark (A, B, C or D)")
    p.add_argument("dataset_id")
    p.add_argument("--runs", type=int, help="number of runs (default 20)")
    _add_fit_flags(p, "twice the true count")
    p.add_argument("--selection", action="store_true",
                   help="also run the sample-size/initialization grid")
    p.add_argument("--sizes", help="comma-separated sample sizes (default 50,100,200,500)")
    p.add_argument("--initial-ms", dest="initial_ms",
                   help="comma-separated initial component counts (default 5,10,15)")
    p.add_argument("--out", default="iblmm-bench", help="output directory")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("text", help="text categorization")
    p.add_argument("corpus", help="training corpus: category directories or label,text CSV")
    p.add_argument("--test", help="held-out corpus; without it, random half splits are used")
    p.add_argument("--splits", type=int, help="number of random splits (default 30)")
    p.add_argument("--min-count", dest="min_count", type=int)
    p.add_argument("--min-length", dest="min_length", type=int)
    p.add_argument("--smoothing", type=float)
    p.add_argument("--max-features", dest="max_features", type=int)
    _add_fit_flags(p)
    p.add_argument("--out", default="iblmm-text", help="output directory")
    p.set_defaults(func=cmd_text)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (CliError, FileNotFoundError, ValueError, ArithmeticError, OSError) as exc:
        print(f"iblmm {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
