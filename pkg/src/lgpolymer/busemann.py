"""Busemann increment estimation and correctors.

The Busemann increment toward velocity u is the limit of differences of
log partition functions to a far point on the ray nu.  At a finite
horizon the differences are read off one backward grid; the exact
(infinite-horizon) increments of a gamma system are the logs of its
edge weights.  Subtracting the tilt h(u) from the negated increments
yields the corrector, a mean-zero cocycle whose lattice path integral
and rectangle averages are computed here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .free_energy import char_direction, tilt_of_u
from .gamma_system import GammaSystem
from .partition import Direction, E1, E2, WeightConvention, log_partition
from .specfun import digamma

__all__ = [
    "BusemannField",
    "Corrector",
    "busemann_field",
    "busemann_estimate",
    "corrector_from_field",
    "exact_corrector",
    "one_step_normalization",
    "path_integral",
    "corrector_rectangle_average",
    "max_path_integral_on_diagonal",
]


@dataclass(frozen=True)
class BusemannField:
    """Finite-horizon Busemann increments on a window.

    ``b_e1[i, j]`` estimates B((i, j), e1) = log Z_{(i,j),v} - log
    Z_{(i+1,j),v}; similarly ``b_e2`` for the e2 increment.
    """

    u: float
    horizon: int
    b_e1: np.ndarray  # (W1+1, W2+1)
    b_e2: np.ndarray  # (W1+1, W2+1)


@dataclass(frozen=True)
class Corrector:
    """F(x, z) = -B(x, z) - h . z together with its tilt."""

    u: float
    tilt: tuple[float, float]
    f_e1: np.ndarray
    f_e2: np.ndarray


def _target_point(u: float, horizon: int) -> tuple[int, int]:
    return (int(np.floor(horizon * u)), horizon - int(np.floor(horizon * u)))


def busemann_field(weights: np.ndarray, u: float, window: tuple[int, int], horizon: int) -> BusemannField:
    """Estimate both Busemann increments on [0..W1] x [0..W2].

    One backward start-included grid from the ray point at the given
    horizon serves every site of the window.
    """
    if not 0.0 < u < 1.0:
        raise ValueError(f"velocity must lie in (0, 1), got {u}")
    w1, w2 = window
    vi, vj = _target_point(u, horizon)
    if vi <= w1 or vj <= w2:
        raise ValueError(
            f"horizon {horizon} puts the ray point at {(vi, vj)}, "
            f"which does not dominate the window {window}"
        )
    if weights.shape[-2] <= vi or weights.shape[-1] <= vj:
        raise ValueError("weights grid does not cover the ray point")
    grid = log_partition(weights, (vi, vj), WeightConvention.START_INCLUDED, Direction.BACKWARD)
    vals = grid.values
    b_e1 = vals[: w1 + 1, : w2 + 1] - vals[1 : w1 + 2, : w2 + 1]
    b_e2 = vals[: w1 + 1, : w2 + 1] - vals[: w1 + 1, 1 : w2 + 2]
    return BusemannField(u=u, horizon=horizon, b_e1=b_e1, b_e2=b_e2)


def busemann_estimate(
    weights: np.ndarray, u: float, x: tuple[int, int], step: tuple[int, int], horizon: int
) -> float:
    """Single finite-horizon increment log Z_{x,v} - log Z_{x+step,v}."""
    if step == (0, 0):
        return 0.0
    if step not in (E1, E2):
        raise ValueError(f"step must be E1, E2 or (0, 0), got {step}")
    field = busemann_field(weights, u, (x[0] + step[0], x[1] + step[1]), horizon)
    arr = field.b_e1 if step == E1 else field.b_e2
    return float(arr[x[0], x[1]])


def corrector_from_field(field: BusemannField, rho: float) -> Corrector:
    h = tilt_of_u(field.u, rho)
    return Corrector(u=field.u, tilt=h, f_e1=-field.b_e1 - h[0], f_e2=-field.b_e2 - h[1])


def exact_corrector(system: GammaSystem) -> Corrector:
    """Corrector built from a gamma system's own edge weights.

    The system's edge weights are the exact ratio limits for its
    characteristic velocity, so B(x, e1) = -log eta_{x+e1} and
    B(x, e2) = -log zeta_{x+e2} hold with no horizon error, and the
    tilt is (digamma(lam), digamma(rho - lam)).
    """
    p = system.params
    u = char_direction(p.lam, p.rho)[0]
    h = (digamma(p.lam), digamma(p.rho - p.lam))
    b_e1 = -np.log(system.eta[1:, :])  # B((i,j), e1), i in 0..m-1, j in 0..n
    b_e2 = -np.log(system.zeta[:, 1:])
    return Corrector(u=u, tilt=h, f_e1=-b_e1 - h[0], f_e2=-b_e2 - h[1])


def one_step_normalization(corrector: Corrector, weights: np.ndarray) -> np.ndarray:
    """sum_z p(z) exp(g + h.z + F(x, z)) with g = log 2 - log W_x.

    Equals (e^{-B(x,e1)} + e^{-B(x,e2)}) / W_x; identically one when the
    corrector is exact and W is the induced corner-weight field.
    """
    w1 = min(corrector.f_e1.shape[0], corrector.f_e2.shape[0])
    w2 = min(corrector.f_e1.shape[1], corrector.f_e2.shape[1])
    e_hat = np.exp(corrector.f_e1[:w1, :w2] + corrector.tilt[0])
    z_hat = np.exp(corrector.f_e2[:w1, :w2] + corrector.tilt[1])
    return (e_hat + z_hat) / np.asarray(weights)[:w1, :w2]


def path_integral(corrector: Corrector, w1: int, w2: int) -> np.ndarray:
    """f(x) = sum of F along any admissible path 0 -> x, on [0..w1]x[0..w2].

    Computed along row-0 then up columns; the cocycle property makes the
    result path independent up to rounding.
    """
    if (
        corrector.f_e1.shape[0] < w1
        or corrector.f_e2.shape[0] < w1 + 1
        or corrector.f_e2.shape[1] < w2
    ):
        raise ValueError(f"corrector window too small for ({w1}, {w2})")
    f = np.zeros((w1 + 1, w2 + 1))
    f[1:, 0] = np.cumsum(corrector.f_e1[:w1, 0])
    f[:, 1:] = f[:, [0]] + np.cumsum(corrector.f_e2[: w1 + 1, :w2], axis=1)
    return f


def corrector_rectangle_average(corrector: Corrector, steps, n: int) -> float:
    """n^{-r} sum over k in [0, n)^r of f(k_1 z_1 + ... + k_r z_r) / n."""
    steps = [tuple(s) for s in steps]
    if not steps or len(set(steps)) != len(steps) or any(s not in (E1, E2) for s in steps):
        raise ValueError("steps must be a nonempty set of distinct elements of {E1, E2}")
    w1 = (n - 1) if E1 in steps else 0
    w2 = (n - 1) if E2 in steps else 0
    f = path_integral(corrector, w1, w2)
    if len(steps) == 1:
        line = f[: n, 0] if steps[0] == E1 else f[0, : n]
        return float(line.sum() / n**2)
    return float(f[:n, :n].sum() / n**3)


def max_path_integral_on_diagonal(corrector: Corrector, n: int) -> float:
    """max over |x|_1 = n of |f(x)| / n; decays for a genuine corrector."""
    f = path_integral(corrector, n, n)
    idx = np.arange(n + 1)
    return float(np.max(np.abs(f[idx, n - idx])) / n)
