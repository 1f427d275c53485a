"""Extended variational inference (EVI) for the Bayesian IBL mixture.

The intractable expectations of ``log G(sum a)/prod G(a_d)`` and
``log G(u+v)/(G(u)G(v))`` are replaced by tangent lower bounds in log-space
(:func:`helping_R`, :func:`helping_F`). With those in place every factor of
the mean-field posterior has a closed-form update:

* ``q(z_n)`` categorical with responsibilities ``r_n``,
* ``q(alpha_md)``, ``q(u_m)``, ``q(v_m)`` Gamma,
* ``q(pi)`` Dirichlet.

:func:`fit` runs coordinate ascent from a k-means start and finally drops
components whose expected weight has collapsed.

Expansion point
---------------
The tangent bounds are exact at their expansion point. ``expansion="mean"``
expands at the posterior means ``<alpha>``, ``<u>``, ``<v>``.
``expansion="geometric"`` (the default) expands at ``exp<ln alpha>`` etc.
There the correction term vanishes and the helping function equals
``lnG(sum a0) - sum lnG(a0)`` at ``ln a0 = <ln alpha>``. With this choice
the monitored objective did not decrease in any fit we ran, while the mean
expansion drifts downward by about 1e-6 relative near convergence.

When the bounds hold
--------------------
``z -> lnG(e^z + c) - lnG(e^z)`` is convex for ``c >= 1`` and concave for
``c < 1``. The log-Gamma ratios are therefore convex in each log-argument
only while the remaining arguments sum to at least one, and the tangent
bounds hold (by Jensen, factor by factor) to the extent that the posterior
mass sits in that region. Posteriors whose means are all at least one
satisfied them in every Monte Carlo check; with means below one, ``u`` and
``v`` in particular, the "bound" can exceed the true expectation.
"""

import configparser
import json
import logging
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np
from scipy.special import gammaln as _gammaln

from .distribution import IblParams, check_positive_data
from .kmeans import kmeans_init
from .mixture import IblmmModel
from .special import digamma, ln_gamma, log_sum_exp

log = logging.getLogger(__name__)

__all__ = [
    "NumericalError",
    "PriorHyperparams",
    "VariationalPosterior",
    "Moments",
    "DataStats",
    "FitConfig",
    "FitReport",
    "default_prior",
    "data_stats",
    "expansion_point",
    "helping_R",
    "helping_F",
    "log_rho",
    "e_step",
    "update_alpha",
    "update_u",
    "update_v",
    "update_pi",
    "compute_moments",
    "elbo",
    "occupancy",
    "prune",
    "fit",
]

RESPONSIBILITY_FLOOR = 1e-300
EXPANSIONS = ("geometric", "mean")
PRUNE_RULES = ("weight", "occupancy")


class NumericalError(ArithmeticError):
    """A posterior quantity left its valid domain during a fit."""


@dataclass
class PriorHyperparams:
    """Gamma priors on ``alpha`` (g, h), ``u`` (s, t), ``v`` (p, q) and a
    Dirichlet prior on the weights (c). Shapes are ``(M, D)`` and ``(M,)``."""

    g: np.ndarray
    h: np.ndarray
    s: np.ndarray
    t: np.ndarray
    p: np.ndarray
    q: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        for f in fields(self):
            setattr(self, f.name, np.asarray(getattr(self, f.name), dtype=float))
        self.validate()

    @property
    def n_components(self):
        return self.c.shape[0]

    @property
    def dim(self):
        return self.g.shape[1]

    def validate(self):
        M = self.c.shape[0]
        if self.g.ndim != 2 or self.g.shape[0] != M or self.h.shape != self.g.shape:
            raise ValueError("g and h must both be (M, D)")
        for name in "stpq":
            if getattr(self, name).shape != (M,):
                raise ValueError(f"{name} must have shape ({M},)")
        for f in fields(self):
            a = getattr(self, f.name)
            if not np.all(np.isfinite(a)) or np.any(a <= 0):
                raise ValueError(f"prior {f.name} must be finite and > 0")

    def subset(self, keep):
        keep = np.asarray(keep)
        return PriorHyperparams(self.g[keep], self.h[keep], self.s[keep],
                                self.t[keep], self.p[keep], self.q[keep],
                                self.c[keep])


@dataclass
class VariationalPosterior:
    """Hyperparameters of the factorized posterior plus responsibilities."""

    g_star: np.ndarray
    h_star: np.ndarray
    s_star: np.ndarray
    t_star: np.ndarray
    p_star: np.ndarray
    q_star: np.ndarray
    c_star: np.ndarray
    r: np.ndarray

    def __post_init__(self):
        for f in fields(self):
            setattr(self, f.name, np.asarray(getattr(self, f.name), dtype=float))

    @classmethod
    def from_prior(cls, prior, r):
        return cls(prior.g.copy(), prior.h.copy(), prior.s.copy(),
                   prior.t.copy(), prior.p.copy(), prior.q.copy(),
                   prior.c.copy(), np.asarray(r, dtype=float))

    @property
    def n_components(self):
        return self.c_star.shape[0]

    def validate(self, simplex_tol=1e-12):
        for name in ("g_star", "h_star", "s_star", "t_star", "p_star",
                     "q_star", "c_star"):
            a = getattr(self, name)
            if not np.all(np.isfinite(a)) or np.any(a <= 0):
                raise NumericalError(f"posterior {name} must be finite and > 0")
        r = self.r
        if r.shape[0] and (np.any(r < 0)
                           or np.max(np.abs(r.sum(axis=1) - 1.0)) > simplex_tol):
            raise NumericalError("responsibility rows are not simplexes")

    def copy(self):
        return VariationalPosterior(*(np.copy(getattr(self, f.name))
                                      for f in fields(self)))

    def subset(self, keep):
        keep = np.asarray(keep)
        r = self.r[:, keep]
        if r.shape[0]:
            tot = r.sum(axis=1, keepdims=True)
            if np.any(tot <= 0):
                raise NumericalError("an observation lost all its responsibility")
            r = r / tot
        return VariationalPosterior(self.g_star[keep], self.h_star[keep],
                                    self.s_star[keep], self.t_star[keep],
                                    self.p_star[keep], self.q_star[keep],
                                    self.c_star[keep], r)

    def to_dict(self):
        return {f.name: getattr(self, f.name).tolist() for f in fields(self)
                if f.name != "r"}


@dataclass
class Moments:
    """Posterior expectations that the updates and the bound consume."""

    alpha_bar: np.ndarray
    ln_alpha: np.ndarray
    u_bar: np.ndarray
    ln_u: np.ndarray
    v_bar: np.ndarray
    ln_v: np.ndarray
    pi_bar: np.ndarray
    ln_pi: np.ndarray


@dataclass(frozen=True)
class DataStats:
    """Per-observation statistics: ``log x``, ``log S`` and ``log(1+S)``
    with ``S = sum_d x_d``."""

    ln_x: np.ndarray
    ln_s: np.ndarray
    ln_1ps: np.ndarray

    @property
    def n(self):
        return self.ln_x.shape[0]

    @property
    def dim(self):
        return self.ln_x.shape[1]


def data_stats(X):
    if isinstance(X, DataStats):
        return X
    X = np.asarray(X, dtype=float)
    if X.ndim == 2 and X.shape[0] == 0:
        return DataStats(np.empty((0, X.shape[1])), np.empty(0), np.empty(0))
    X = check_positive_data(np.atleast_2d(X))
    S = X.sum(axis=1)
    return DataStats(np.log(X), np.log(S), np.log1p(S))


def default_prior(M, D, g=1.0, h=0.1, s=1.0, t=0.1, p=1.0, q=0.1, c=0.001):
    """Broad prior: ``g = s = p = 1``, ``h = t = q = 0.1``, ``c = 0.001``."""
    if M < 1 or D < 1:
        raise ValueError("M and D must be >= 1")
    return PriorHyperparams(np.full((M, D), g), np.full((M, D), h),
                            np.full(M, s), np.full(M, t), np.full(M, p),
                            np.full(M, q), np.full(M, c))


def compute_moments(posterior):
    """Gamma and Dirichlet expectations of the current posterior."""
    post = posterior
    g, h = post.g_star, post.h_star
    c = post.c_star
    return Moments(
        alpha_bar=g / h,
        ln_alpha=digamma(g) - np.log(h),
        u_bar=post.s_star / post.t_star,
        ln_u=digamma(post.s_star) - np.log(post.t_star),
        v_bar=post.p_star / post.q_star,
        ln_v=digamma(post.p_star) - np.log(post.q_star),
        pi_bar=c / c.sum(),
        ln_pi=digamma(c) - digamma(c.sum()),
    )


def expansion_point(moments, kind="geometric"):
    """Points ``(alpha0, u0, v0)`` at which the helping functions are
    linearized."""
    if kind == "mean":
        return moments.alpha_bar, moments.u_bar, moments.v_bar
    if kind == "geometric":
        return np.exp(moments.ln_alpha), np.exp(moments.ln_u), np.exp(moments.ln_v)
    raise ValueError(f"unknown expansion {kind!r}; choose from {EXPANSIONS}")


def _finite(name, *arrays):
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise ValueError(f"{name}: non-finite moments")


def helping_R(moments, m=None, at=None):
    """Lower bound on ``<ln G(sum_d a_md) - sum_d ln G(a_md)>``.

    Tangent in ``ln alpha`` at ``at`` (default: the posterior means)::

        lnG(sum a0) - sum lnG(a0)
          + sum_d [psi(sum a0) - psi(a0_d)] * a0_d * (<ln a_d> - ln a0_d)

    Returns all ``M`` values, or component ``m`` only. Only a bound while
    ``sum_{j != d} alpha_j >= 1`` carries the posterior mass (see module
    notes).
    """
    a0 = moments.alpha_bar if at is None else np.asarray(at, dtype=float)
    _finite("helping_R", a0, moments.ln_alpha)
    a_sum = a0.sum(axis=1)
    out = (ln_gamma(a_sum) - ln_gamma(a0).sum(axis=1)
           + np.sum((digamma(a_sum)[:, None] - digamma(a0)) * a0
                    * (moments.ln_alpha - np.log(a0)), axis=1))
    return out if m is None else float(out[m])


def helping_F(moments, m=None, at=None):
    """Lower bound on ``<ln G(u+v) - ln G(u) - ln G(v)>``, tangent in
    ``(ln u, ln v)`` at ``at = (u0, v0)`` (default: posterior means).

    Not a bound when ``u`` or ``v`` lies mostly below one.
    """
    if at is None:
        u0, v0 = moments.u_bar, moments.v_bar
    else:
        u0, v0 = (np.asarray(a, dtype=float) for a in at)
    _finite("helping_F", u0, v0, moments.ln_u, moments.ln_v)
    psi_uv = digamma(u0 + v0)
    out = (ln_gamma(u0 + v0) - ln_gamma(u0) - ln_gamma(v0)
           + (psi_uv - digamma(u0)) * u0 * (moments.ln_u - np.log(u0))
           + (psi_uv - digamma(v0)) * v0 * (moments.ln_v - np.log(v0)))
    return out if m is None else float(out[m])


def log_rho(X, moments, helping):
    """Unnormalized log responsibilities ``(N, M)``."""
    st = data_stats(X)
    R, F = (np.asarray(a, dtype=float) for a in helping)
    a_bar = moments.alpha_bar
    return ((moments.ln_pi + R + F)[None, :]
            + st.ln_x @ (a_bar - 1.0).T
            + np.outer(st.ln_s, moments.u_bar - a_bar.sum(axis=1))
            - np.outer(st.ln_1ps, moments.u_bar + moments.v_bar))


def e_step(X, moments, helping):
    """Variational E-step: responsibilities ``r`` of shape ``(N, M)``.

    ``helping`` is the pair ``(R, F)`` of per-component helping-function
    values. Entries below 1e-300 are zeroed and rows renormalized.
    """
    lr = log_rho(X, moments, helping)
    if lr.shape[0] == 0:
        return np.empty_like(lr)
    if np.any(np.isnan(lr)) or np.any(np.all(lr == -np.inf, axis=1)):
        raise NumericalError("log responsibilities blew up")
    r = np.exp(lr - log_sum_exp(lr, axis=1, keepdims=True))
    r[r < RESPONSIBILITY_FLOOR] = 0.0
    r /= r.sum(axis=1, keepdims=True)
    return r


def _positive(name, *arrays):
    for a in arrays:
        if not np.all(np.isfinite(a)) or np.any(a <= 0):
            raise NumericalError(f"{name} produced a non-positive hyperparameter")


def update_alpha(prior, moments, r, X, at=None):
    """Gamma posterior ``(g*, h*)`` of every ``alpha_md``."""
    st = data_stats(X)
    a0 = moments.alpha_bar if at is None else np.asarray(at, dtype=float)
    nk = r.sum(axis=0)
    a_sum = a0.sum(axis=1)
    g_star = prior.g + (digamma(a_sum)[:, None] - digamma(a0)) * a0 * nk[:, None]
    # ln x_nd <= ln S_n, so h* >= h
    h_star = prior.h - r.T @ (st.ln_x - st.ln_s[:, None])
    _positive("update_alpha", g_star, h_star)
    return g_star, h_star


def update_u(prior, moments, r, X, at=None):
    """Gamma posterior ``(s*, t*)`` of every ``u_m``."""
    st = data_stats(X)
    u0, v0 = (moments.u_bar, moments.v_bar) if at is None else at
    nk = r.sum(axis=0)
    s_star = prior.s + (digamma(u0 + v0) - digamma(u0)) * u0 * nk
    t_star = prior.t - r.T @ (st.ln_s - st.ln_1ps)
    _positive("update_u", s_star, t_star)
    return s_star, t_star


def update_v(prior, moments, r, X, at=None):
    """Gamma posterior ``(p*, q*)`` of every ``v_m``."""
    st = data_stats(X)
    u0, v0 = (moments.u_bar, moments.v_bar) if at is None else at
    nk = r.sum(axis=0)
    p_star = prior.p + (digamma(u0 + v0) - digamma(v0)) * v0 * nk
    q_star = prior.q + r.T @ st.ln_1ps
    _positive("update_v", p_star, q_star)
    return p_star, q_star


def update_pi(prior, r):
    """Dirichlet posterior ``c*`` of the mixing weights."""
    return prior.c + np.asarray(r).sum(axis=0)


def _gamma_expected_log(a, b, ln_x, x_bar):
    # <ln Gamma(x | a, b)> given <ln x> and <x>
    return np.sum(a * np.log(b) - _gammaln(a) + (a - 1.0) * ln_x - b * x_bar)


def _dirichlet_cross(c0, ln_pi):
    return _gammaln(c0.sum()) - np.sum(_gammaln(c0)) + np.sum((c0 - 1.0) * ln_pi)


def elbo(X, posterior, moments, prior, at=None):
    """Variational lower bound with both helping functions substituted.

    Includes the prior normalizing constants, so a posterior equal to the
    prior with no data scores exactly 0. ``at`` is ``(alpha0, u0, v0)``;
    the default expands at the posterior means.
    """
    if at is None:
        at = expansion_point(moments, "mean")
    a0, u0, v0 = at
    post, mo = posterior, moments
    r = post.r
    R = helping_R(mo, at=a0)
    F = helping_F(mo, at=(u0, v0))
    expected_joint = (
        np.sum(r * log_rho(X, mo, (R, F)))
        + _gamma_expected_log(prior.g, prior.h, mo.ln_alpha, mo.alpha_bar)
        + _gamma_expected_log(prior.s, prior.t, mo.ln_u, mo.u_bar)
        + _gamma_expected_log(prior.p, prior.q, mo.ln_v, mo.v_bar)
        + _dirichlet_cross(prior.c, mo.ln_pi)
    )
    pos = r > 0
    ln_q_z = np.sum(r[pos] * np.log(r[pos]))
    ln_q_alpha = _gamma_expected_log(post.g_star, post.h_star, mo.ln_alpha, mo.alpha_bar)
    ln_q_u = _gamma_expected_log(post.s_star, post.t_star, mo.ln_u, mo.u_bar)
    ln_q_v = _gamma_expected_log(post.p_star, post.q_star, mo.ln_v, mo.v_bar)
    ln_q_pi = _dirichlet_cross(post.c_star, mo.ln_pi)
    value = float(expected_joint - ln_q_z - ln_q_alpha - ln_q_u - ln_q_v - ln_q_pi)
    if not np.isfinite(value):
        raise NumericalError("lower bound is not finite")
    return value


def occupancy(posterior):
    """Share of the data held by each component, ``sum_n r_nm / N``."""
    n = posterior.r.shape[0]
    return posterior.r.sum(axis=0) / n if n else np.zeros(posterior.n_components)


def prune(posterior, moments, threshold=1e-5, rule="weight"):
    """Drop every component whose weight is ``<= threshold``.

    ``rule="weight"`` compares the expected mixing weight ``<pi_m>``;
    ``rule="occupancy"`` compares :func:`occupancy` instead, which ignores
    the prior pseudo-count ``c_m`` that puts a floor of roughly
    ``c_m / N`` under ``<pi_m>``. Surviving ``c*`` are kept as they are;
    the weights renormalize through the recomputed moments.
    Returns ``(posterior, moments, keep)``.
    """
    if rule not in PRUNE_RULES:
        raise ValueError(f"unknown prune rule {rule!r}; choose from {PRUNE_RULES}")
    weights = moments.pi_bar if rule == "weight" else occupancy(posterior)
    keep = weights > threshold
    if not np.any(keep):
        raise ValueError(f"every component has weight <= {threshold}")
    if np.all(keep):
        return posterior, moments, keep
    post = posterior.subset(keep)
    return post, compute_moments(post), keep


def _float_or_none(v):
    return None if v is None else float(v)


@dataclass
class FitConfig:
    """Settings of :func:`fit`.

    ``prior`` is ``"default"``, a :class:`PriorHyperparams` sized for
    ``initial_M``, or a mapping of scalar overrides such as ``{"c": 0.01}``.
    """

    initial_M: int = 15
    max_iterations: int = 500
    elbo_rel_tolerance: float = 1e-6
    prune_threshold: float = 1e-5
    seed: int = 0
    prior: object = "default"
    prune_every_iteration: bool = False
    expansion: str = "geometric"
    prune_on: str = "weight"

    def __post_init__(self):
        self.validate()

    def validate(self):
        if int(self.initial_M) < 1:
            raise ValueError("initial_M must be >= 1")
        if int(self.max_iterations) < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.elbo_rel_tolerance > 0:
            raise ValueError("elbo_rel_tolerance must be > 0")
        if not 0 < self.prune_threshold < 1:
            raise ValueError("prune_threshold must lie in (0, 1)")
        if self.expansion not in EXPANSIONS:
            raise ValueError(f"expansion must be one of {EXPANSIONS}")
        if self.prune_on not in PRUNE_RULES:
            raise ValueError(f"prune_on must be one of {PRUNE_RULES}")

    def make_prior(self, D):
        if isinstance(self.prior, PriorHyperparams):
            if self.prior.n_components != self.initial_M or self.prior.dim != D:
                raise ValueError("prior shape does not match (initial_M, D)")
            return self.prior
        if self.prior in (None, "default"):
            return default_prior(self.initial_M, D)
        return default_prior(self.initial_M, D, **dict(self.prior))

    def to_dict(self):
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        if isinstance(self.prior, PriorHyperparams):
            d["prior"] = {f.name: getattr(self.prior, f.name).tolist()
                          for f in fields(self.prior)}
        elif isinstance(self.prior, dict):
            d["prior"] = dict(self.prior)
        return d

    _CASTS = {
        "initial_M": int, "initial_m": int, "max_iterations": int,
        "elbo_rel_tolerance": float, "prune_threshold": float, "seed": int,
        "expansion": str, "prune_on": str,
        "prune_every_iteration": lambda s: str(s).strip().lower() in
        ("1", "true", "yes", "on"),
    }
    _PRIOR_KEYS = ("g", "h", "s", "t", "p", "q", "c")

    @classmethod
    def from_mapping(cls, mapping, base=None):
        """Build a config from string or typed key-value pairs; unknown keys
        raise ``ValueError``. Keys ``prior_g`` ... ``prior_c`` set scalar
        prior values."""
        kw = {}
        prior = {}
        for key, raw in mapping.items():
            k = key.strip()
            if k.startswith("prior_") and k[6:] in cls._PRIOR_KEYS:
                prior[k[6:]] = float(raw)
            elif k in cls._CASTS:
                try:
                    kw["initial_M" if k == "initial_m" else k] = cls._CASTS[k](raw)
                except ValueError:
                    raise ValueError(f"bad value for {k}: {raw!r}") from None
            else:
                raise ValueError(f"unknown config key {k!r}")
        if prior:
            kw["prior"] = prior
        return replace(base, **kw) if base is not None else cls(**kw)

    @classmethod
    def from_file(cls, path, base=None):
        """Read ``key = value`` lines (an optional ``[fit]`` header is
        allowed) or a flat JSON object."""
        path = Path(path)
        try:
            text = path.read_text()
        except FileNotFoundError:
            raise FileNotFoundError(f"config file not found: {path}") from None
        if path.suffix == ".json":
            return cls.from_mapping(json.loads(text), base)
        cp = configparser.ConfigParser()
        cp.optionxform = str
        if not text.lstrip().startswith("["):
            text = "[fit]\n" + text
        try:
            cp.read_string(text)
        except configparser.Error as exc:
            raise ValueError(f"{path}: {exc}") from None
        items = {}
        for section in cp.sections():
            items.update(cp[section])
        return cls.from_mapping(items, base)


@dataclass
class FitReport:
    """Outcome of :func:`fit`.

    ``weights_before_pruning`` holds ``<pi>`` at convergence, before the
    small components are annihilated; ``occupancy_before_pruning`` holds
    the matching ``sum_n r_nm / N``.
    """

    elbo_trace: np.ndarray
    iterations: int
    converged: bool
    surviving_components: int
    posterior: VariationalPosterior
    point_model: IblmmModel
    weights_before_pruning: np.ndarray = None
    config: FitConfig = None
    occupancy_before_pruning: np.ndarray = None

    def to_dict(self):
        return {
            "elbo_trace": [float(v) for v in self.elbo_trace],
            "iterations": int(self.iterations),
            "converged": bool(self.converged),
            "surviving_components": int(self.surviving_components),
            "weights_before_pruning": [float(v) for v in self.weights_before_pruning],
            "occupancy_before_pruning": [float(v) for v in self.occupancy_before_pruning],
            "point_model": self.point_model.to_dict(),
            "posterior": self.posterior.to_dict(),
            "config": self.config.to_dict() if self.config is not None else None,
        }


def _point_model(moments):
    comps = [IblParams(a, u, v) for a, u, v in
             zip(moments.alpha_bar, moments.u_bar, moments.v_bar)]
    w = moments.pi_bar / moments.pi_bar.sum()
    return IblmmModel(w, comps)


class _Sweep:
    """Mutable state of one fit: posterior, moments, prior, expansion kind."""

    def __init__(self, stats, prior, r, expansion):
        self.stats = stats
        self.prior = prior
        self.expansion = expansion
        self.post = VariationalPosterior.from_prior(prior, r)
        self.mom = compute_moments(self.post)

    def at(self):
        return expansion_point(self.mom, self.expansion)

    def m_step(self):
        # moments refreshed after every factor so each update sees the
        # newest expansion point
        post, prior, st, r = self.post, self.prior, self.stats, self.post.r
        post.g_star, post.h_star = update_alpha(prior, self.mom, r, st, at=self.at()[0])
        self.mom = compute_moments(post)
        post.s_star, post.t_star = update_u(prior, self.mom, r, st, at=self.at()[1:])
        self.mom = compute_moments(post)
        post.p_star, post.q_star = update_v(prior, self.mom, r, st, at=self.at()[1:])
        self.mom = compute_moments(post)
        post.c_star = update_pi(prior, r)
        self.mom = compute_moments(post)

    def e_step(self):
        a0, u0, v0 = self.at()
        helping = (helping_R(self.mom, at=a0), helping_F(self.mom, at=(u0, v0)))
        self.post.r = e_step(self.stats, self.mom, helping)

    def bound(self):
        return elbo(self.stats, self.post, self.mom, self.prior, at=self.at())

    def prune(self, threshold, rule="weight"):
        self.post, self.mom, keep = prune(self.post, self.mom, threshold, rule)
        if not np.all(keep):
            self.prior = self.prior.subset(keep)
        return keep


def fit(X, config=None, init_resp=None, callback=None):
    """Fit a Bayesian IBL mixture by extended variational inference.

    Parameters
    ----------
    X : array_like of shape (N, D)
        Strictly positive observations.
    config : FitConfig, optional
        Defaults to ``FitConfig()``.
    init_resp : array_like of shape (N, initial_M), optional
        Starting responsibilities. By default they come from
        :func:`~iblmm.kmeans.kmeans_init` with ``config.seed``.
    callback : callable, optional
        Called as ``callback(iteration, elbo, posterior)`` after each sweep.

    Returns
    -------
    FitReport
        ``elbo_trace[0]`` is the bound after the first M-step from the
        initial responsibilities; one more entry follows per E/M sweep.
        Hitting ``max_iterations`` sets ``converged=False``.
    """
    config = FitConfig() if config is None else config
    config.validate()
    X = check_positive_data(np.atleast_2d(np.asarray(X, dtype=float)))
    N, D = X.shape
    M = int(config.initial_M)
    if init_resp is None:
        if N < M:
            raise ValueError(f"need N >= initial_M, got N={N}, initial_M={M}")
        r = kmeans_init(X, M, config.seed)
    else:
        r = np.array(init_resp, dtype=float)
        if r.shape != (N, M):
            raise ValueError(f"init_resp must have shape ({N}, {M})")
    prior = config.make_prior(D)
    state = _Sweep(data_stats(X), prior, r, config.expansion)
    state.m_step()
    trace = [state.bound()]
    converged = False
    it = 0
    for it in range(1, int(config.max_iterations) + 1):
        state.e_step()
        state.m_step()
        state.post.validate()
        trace.append(state.bound())
        if callback is not None:
            callback(it, trace[-1], state.post)
        if config.prune_every_iteration:
            n_before = state.post.n_components
            state.prune(config.prune_threshold, config.prune_on)
            if state.post.n_components != n_before:
                continue
        prev, cur = trace[-2], trace[-1]
        if abs(cur - prev) < config.elbo_rel_tolerance * abs(cur):
            converged = True
            break
    log.debug("fit stopped after %d sweeps (converged=%s)", it, converged)
    weights_before = state.mom.pi_bar.copy()
    occupancy_before = occupancy(state.post)
    state.prune(config.prune_threshold, config.prune_on)
    return FitReport(
        elbo_trace=np.array(trace),
        iterations=it,
        converged=converged,
        surviving_components=state.post.n_components,
        posterior=state.post,
        point_model=_point_model(state.mom),
        weights_before_pruning=weights_before,
        occupancy_before_pruning=occupancy_before,
        config=config,
    )
