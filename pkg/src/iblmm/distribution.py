"""The inverted Beta-Liouville (IBL) distribution.

For ``x`` in the open positive orthant of R^D, with Liouville shapes
``alpha`` and inverted-Beta shapes ``(u, v)``::

    p(x) = G(sum a) G(u+v) / (G(u) G(v)) * prod_d x_d^(a_d-1) / G(a_d)
           * (sum x)^(u - sum a) * (1 + sum x)^(-(u+v))

Writing ``x = s * y`` with ``s = sum(x)`` and ``y`` on the simplex factors
the density into ``Dirichlet(y | alpha) * BetaPrime(s | u, v)``. The
sampler uses exactly that decomposition.
"""

from dataclasses import dataclass

import numpy as np

from .special import ln_gamma

__all__ = ["IblParams", "validate", "log_pdf", "sample", "check_positive_data"]


@dataclass(frozen=True)
class IblParams:
    """Parameters of one IBL component.

    Attributes
    ----------
    alpha : ndarray of shape (D,)
        Liouville shape parameters, all > 0.
    u, v : float
        Shapes of the inverted-Beta law of ``sum(x)``, both > 0.
    """

    alpha: np.ndarray
    u: float
    v: float

    def __post_init__(self):
        alpha = np.atleast_1d(np.asarray(self.alpha, dtype=float))
        alpha.setflags(write=False)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "u", float(self.u))
        object.__setattr__(self, "v", float(self.v))

    @property
    def dim(self):
        return self.alpha.shape[0]

    def validate(self):
        validate(self)
        return self

    def to_dict(self):
        return {"alpha": self.alpha.tolist(), "u": self.u, "v": self.v}

    @classmethod
    def from_dict(cls, d):
        return cls(alpha=d["alpha"], u=d["u"], v=d["v"])

    def __eq__(self, other):
        if not isinstance(other, IblParams):
            return NotImplemented
        return (np.array_equal(self.alpha, other.alpha)
                and self.u == other.u and self.v == other.v)

    __hash__ = None


def validate(params):
    """Raise ``ValueError`` naming the first violated constraint."""
    alpha = params.alpha
    if alpha.ndim != 1 or alpha.shape[0] < 1:
        raise ValueError("alpha must be a non-empty vector")
    for d, a in enumerate(alpha):
        if not np.isfinite(a):
            raise ValueError(f"alpha[{d}] is not finite")
        if a <= 0:
            raise ValueError(f"alpha[{d}] <= 0")
    for name in ("u", "v"):
        val = getattr(params, name)
        if not np.isfinite(val):
            raise ValueError(f"{name} is not finite")
        if val <= 0:
            raise ValueError(f"{name} <= 0")


def check_positive_data(x, dim=None):
    """Return ``x`` as a float array after checking strict positivity.

    Zeros are rejected rather than clamped because ``log(x)`` is a
    sufficient statistic everywhere downstream.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim not in (1, 2):
        raise ValueError(f"expected a vector or a matrix, got ndim={x.ndim}")
    if dim is not None and x.shape[-1] != dim:
        raise ValueError(f"dimension mismatch: data has D={x.shape[-1]}, "
                         f"model has D={dim}")
    if not np.all(np.isfinite(x)):
        raise ValueError("data contains non-finite values")
    if np.any(x <= 0):
        raise ValueError("data must be strictly positive")
    return x


def log_pdf(x, params):
    """Log density of one vector ``(D,)`` or each row of ``(N, D)``."""
    validate(params)
    x = check_positive_data(x, params.dim)
    alpha, u, v = params.alpha, params.u, params.v
    a_sum = alpha.sum()
    const = (ln_gamma(a_sum) + ln_gamma(u + v) - ln_gamma(u) - ln_gamma(v)
             - np.sum(ln_gamma(alpha)))
    s = x.sum(axis=-1)
    out = (const + np.log(x) @ (alpha - 1.0)
           + (u - a_sum) * np.log(s) - (u + v) * np.log1p(s))
    return float(out) if np.ndim(out) == 0 else out


def sample(params, n, seed=None):
    """Draw ``n`` i.i.d. vectors, returned as an ``(n, D)`` array.

    ``seed`` may be an int, a ``SeedSequence`` or a ``Generator``; the same
    int seed always gives the same matrix.
    """
    validate(params)
    n = int(n)
    if n < 0:
        raise ValueError("n must be >= 0")
    rng = np.random.default_rng(seed)
    g = rng.standard_gamma(params.alpha, size=(n, params.dim))
    y = g / g.sum(axis=1, keepdims=True)
    s = rng.standard_gamma(params.u, size=n) / rng.standard_gamma(params.v, size=n)
    return s[:, None] * y
