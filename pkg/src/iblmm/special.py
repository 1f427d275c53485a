"""Special functions and log-domain reductions used throughout the package.

The heavy lifting is delegated to :mod:`scipy.special`; this module adds the
domain checks the rest of the code relies on, so that a bad argument fails
loudly instead of propagating ``nan`` through a fit.
"""

import numpy as np
from scipy import special as _sp

__all__ = ["ln_gamma", "digamma", "log_sum_exp"]


def _check_positive(a, name):
    a = np.asarray(a, dtype=float)
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name}: argument must be finite")
    if np.any(a <= 0):
        raise ValueError(f"{name}: argument must be > 0, got min {a.min()!r}")
    return a


def _unwrap(out):
    return float(out) if np.ndim(out) == 0 else out


def ln_gamma(a):
    """Natural log of the Gamma function for strictly positive ``a``.

    Accepts scalars or arrays; scalars come back as ``float``.
    """
    return _unwrap(_sp.gammaln(_check_positive(a, "ln_gamma")))


def digamma(a):
    """Digamma function, the derivative of :func:`ln_gamma`, for ``a > 0``."""
    return _unwrap(_sp.digamma(_check_positive(a, "digamma")))


def log_sum_exp(v, axis=None, keepdims=False):
    """Compute ``log(sum(exp(v)))`` with a max shift.

    Parameters
    ----------
    v : array_like
        Finite values or ``-inf``. At least one entry along each reduced
        slice must be finite.
    axis : int, optional
        Axis to reduce over. ``None`` reduces over all entries.
    keepdims : bool
        Keep the reduced axis with length one.

    Raises
    ------
    ValueError
        If a reduced slice is empty, contains ``nan``/``+inf``, or is
        entirely ``-inf``.
    """
    v = np.asarray(v, dtype=float)
    if v.size == 0:
        raise ValueError("log_sum_exp of an empty vector")
    if np.any(np.isnan(v)) or np.any(v == np.inf):
        raise ValueError("log_sum_exp: entries must be finite or -inf")
    vmax = np.max(v, axis=axis, keepdims=True)
    if np.any(vmax == -np.inf):
        raise ValueError("log_sum_exp: all entries are -inf")
    with np.errstate(under="ignore"):
        out = np.log(np.sum(np.exp(v - vmax), axis=axis, keepdims=True)) + vmax
    if not keepdims:
        out = np.squeeze(out, axis=axis) if axis is not None else out.reshape(())
    return _unwrap(out)
