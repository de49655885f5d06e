"""Special functions and gamma-distribution primitives.

Digamma/trigamma, the regularized incomplete gamma function and its
inverse, gamma sampling, and stable log-domain addition.  These are the
numeric bedrock for every lattice construction in the package; the
heavy lifting is delegated to scipy.special and numpy's gamma sampler
behind small contract-enforcing wrappers.

All gamma distributions are unit scale throughout the package.
"""

from __future__ import annotations

import numpy as np
from scipy import special as _sp

from .streams import RandomStream

__all__ = [
    "polygamma",
    "digamma",
    "trigamma",
    "gamma_sample",
    "gamma_cdf",
    "gamma_quantile",
    "log_add_exp",
]


def polygamma(order: int, x):
    """Digamma (order 0) or trigamma (order 1) at ``x > 0``.

    Vectorized over ``x``.  Higher orders are intentionally not exposed.
    """
    if order not in (0, 1):
        raise ValueError(f"unsupported polygamma order {order}; only 0 and 1 are provided")
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0) or not np.all(np.isfinite(x)):
        raise ValueError("polygamma requires finite x > 0")
    if order == 0:
        out = _sp.digamma(x)
    else:
        out = _sp.polygamma(1, x)
    return float(out) if out.ndim == 0 else out


def digamma(x):
    return polygamma(0, x)


def trigamma(x):
    return polygamma(1, x)


def gamma_sample(shape: float, rng: RandomStream, size=None):
    """Draw from Gamma(shape) with unit scale; valid for any shape > 0."""
    if shape <= 0:
        raise ValueError(f"gamma shape must be positive, got {shape}")
    return rng.generator.gamma(shape, size=size)


def gamma_cdf(shape: float, x):
    """Regularized lower incomplete gamma P(shape, x)."""
    if shape <= 0:
        raise ValueError(f"gamma shape must be positive, got {shape}")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("gamma_cdf requires x >= 0")
    out = _sp.gammainc(shape, x)
    return float(out) if out.ndim == 0 else out


def gamma_quantile(shape: float, p):
    """Inverse of :func:`gamma_cdf` in its second argument.

    Strictly increasing in ``p`` and, for fixed ``p``, in ``shape``; the
    latter is what makes quantile coupling of boundary weights monotone.
    """
    if shape <= 0:
        raise ValueError(f"gamma shape must be positive, got {shape}")
    p = np.asarray(p, dtype=float)
    if np.any((p <= 0) | (p >= 1)):
        raise ValueError("gamma_quantile requires p in (0, 1)")
    out = _sp.gammaincinv(shape, p)
    return float(out) if out.ndim == 0 else out


def log_add_exp(a, b):
    """log(e^a + e^b) without overflow; -inf is the additive identity."""
    return np.logaddexp(a, b)
