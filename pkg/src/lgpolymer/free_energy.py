"""Closed-form free energies and the tilt/velocity duality.

Velocities live in the open simplex {(u, 1-u) : 0 < u < 1} and are
passed around as the scalar first coordinate ``u``.  For a fixed bulk
shape ``rho`` every velocity has a conjugate boundary parameter
``theta(u)`` in (0, rho), a tilt vector ``h(u)``, and explicit
point-to-point / tilted point-to-line free energies.  The duality
between the two free energies is also solved numerically as a 1-D
minimization for cross-checking the closed forms.
"""

from __future__ import annotations

import numpy as np
from scipy import optimize as _opt
from scipy import special as _sp

from .specfun import digamma, trigamma

__all__ = [
    "theta_of_u",
    "char_direction",
    "tilt_of_u",
    "u_of_tilt",
    "p2p_free_energy",
    "p2l_free_energy",
    "expected_log_partition",
    "duality_minimize",
    "ldp_rate",
]

_EDGE = 1e-12  # relative bracket margin


def _check_interior(u: float) -> float:
    u = float(u)
    if not 0.0 < u < 1.0:
        raise ValueError(f"velocity must lie in the open interval (0, 1), got {u}")
    return u


def _check_rho(rho: float) -> float:
    rho = float(rho)
    if rho <= 0:
        raise ValueError(f"rho must be positive, got {rho}")
    return rho


def theta_of_u(u: float, rho: float) -> float:
    """The unique theta in (0, rho) with u*T(theta) = (1-u)*T(rho-theta).

    Here T is the trigamma function.  theta is strictly increasing in u
    and inverts :func:`char_direction`.
    """
    u = _check_interior(u)
    rho = _check_rho(rho)

    def f(theta: float) -> float:
        return -u * trigamma(theta) + (1.0 - u) * trigamma(rho - theta)

    lo, hi = _EDGE * rho, rho * (1.0 - _EDGE)
    theta = _opt.brentq(f, lo, hi, xtol=1e-15, rtol=8.9e-16, maxiter=200)
    # One Newton polish; f is strictly increasing and smooth.
    fp = -u * float(_sp.polygamma(2, theta)) + (1.0 - u) * float(_sp.polygamma(2, rho - theta))
    if fp != 0.0:
        step = f(theta) / fp
        candidate = theta - step
        if lo < candidate < hi and abs(f(candidate)) <= abs(f(theta)):
            theta = candidate
    return theta


def char_direction(lam: float, rho: float) -> tuple[float, float]:
    """Characteristic velocity of the (lam, rho) boundary system."""
    rho = _check_rho(rho)
    if not 0.0 < lam < rho:
        raise ValueError(f"lam must lie in (0, rho)=(0, {rho}), got {lam}")
    t1 = trigamma(lam)
    t2 = trigamma(rho - lam)
    return (t2 / (t1 + t2), t1 / (t1 + t2))


def tilt_of_u(u: float, rho: float) -> tuple[float, float]:
    """Tilt vector h(u) = (digamma(theta(u)), digamma(rho - theta(u)))."""
    theta = theta_of_u(u, rho)
    return (digamma(theta), digamma(rho - theta))


def _theta_of_tilt_gap(gap: float, rho: float) -> float:
    """Solve digamma(theta) - digamma(rho - theta) = gap for theta."""

    def f(theta: float) -> float:
        return digamma(theta) - digamma(rho - theta) - gap

    lo, hi = _EDGE * rho, rho * (1.0 - _EDGE)
    # f is strictly increasing from -inf to +inf on (0, rho).
    return _opt.brentq(f, lo, hi, xtol=1e-15, rtol=8.9e-16, maxiter=200)


def u_of_tilt(h, rho: float) -> float:
    """Velocity u(h); depends on h only through h1 - h2."""
    rho = _check_rho(rho)
    h1, h2 = (float(h[0]), float(h[1]))
    theta = _theta_of_tilt_gap(h1 - h2, rho)
    t1 = trigamma(theta)
    t2 = trigamma(rho - theta)
    return t2 / (t1 + t2)


def p2p_free_energy(u, rho: float) -> float:
    """Point-to-point free energy density.

    ``u`` may be a scalar in (0, 1), meaning the velocity (u, 1-u), or a
    pair (u1, u2) of positive reals, in which case the value extends by
    homogeneity: value(c * v) = c * value(v).
    """
    rho = _check_rho(rho)
    if np.ndim(u) == 0:
        scale, u1 = 1.0, _check_interior(u)
    else:
        u1, u2 = float(u[0]), float(u[1])
        if u1 <= 0 or u2 <= 0:
            raise ValueError("velocity components must be positive")
        scale = u1 + u2
        u1 = u1 / scale
    theta = theta_of_u(u1, rho)
    return scale * (-u1 * digamma(theta) - (1.0 - u1) * digamma(rho - theta))


def p2l_free_energy(h, rho: float) -> float:
    """Tilted point-to-line free energy: -digamma(rho - theta(u(h))) + h2."""
    rho = _check_rho(rho)
    h1, h2 = (float(h[0]), float(h[1]))
    theta = _theta_of_tilt_gap(h1 - h2, rho)
    return -digamma(rho - theta) + h2


def expected_log_partition(m: int, n: int, lam: float, rho: float) -> float:
    """Mean of log Z from 0 to (m, n) in a (lam, rho) boundary system."""
    rho = _check_rho(rho)
    if not 0.0 < lam < rho:
        raise ValueError(f"lam must lie in (0, rho), got {lam}")
    return -m * digamma(lam) - n * digamma(rho - lam)


def duality_minimize(u: float, rho: float) -> tuple[tuple[float, float], float]:
    """Minimize h -> p2l_free_energy(h) - u . h numerically.

    The objective is constant along 45-degree diagonals of h, so it is
    minimized over the representatives h = (t, 0).  Parameterizing
    t = digamma(theta) - digamma(rho - theta) makes the search interval
    compact; golden-section search then locates the minimizer.  Returns
    ((t*, 0), minimum value).
    """
    u = _check_interior(u)
    rho = _check_rho(rho)

    def objective(theta: float) -> float:
        t = digamma(theta) - digamma(rho - theta)
        return -digamma(rho - theta) - u * t

    lo, hi = 1e-8 * rho, rho * (1.0 - 1e-8)
    res = _opt.minimize_scalar(
        objective, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12}
    )
    theta_star = float(res.x)
    t_star = digamma(theta_star) - digamma(rho - theta_star)
    return (t_star, 0.0), float(objective(theta_star))


def ldp_rate(h, v, rho: float) -> float:
    """Quenched large-deviation rate of the tilted path measure at velocity v.

    Nonnegative, and zero exactly at v = u(h).
    """
    rho = _check_rho(rho)
    h1, h2 = (float(h[0]), float(h[1]))
    if np.ndim(v) == 0:
        v1 = _check_interior(v)
        v_vec = (v1, 1.0 - v1)
    else:
        v_vec = (float(v[0]), float(v[1]))
    return (
        p2l_free_energy(h, rho)
        - (h1 * v_vec[0] + h2 * v_vec[1])
        - p2p_free_energy(v_vec, rho)
    )
