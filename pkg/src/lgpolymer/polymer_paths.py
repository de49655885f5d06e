"""Path sampling, the polymer walk in random environment, and the
zero-temperature lattice (last passage, geodesics, interface).

The walk's transition out of x sends it to x+e1 with probability
eta_{x+e1} / (eta_{x+e1} + zeta_{x+e2}); the denominator is exactly the
induced corner weight at x, so the kernel is automatically normalized.
Quenched point-to-point path measures are sampled backward from the
endpoint through the partition-ratio kernel.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .gamma_system import DiagonalEnvironment, GammaSystem
from .partition import (
    Direction,
    E1,
    E2,
    LogPartitionGrid,
    WeightConvention,
    log_partition,
)
from .streams import RandomStream

__all__ = [
    "LatticePath",
    "LppGrid",
    "sample_quenched_path",
    "sample_quenched_endsteps",
    "rwre_transition",
    "rwre_sample",
    "rwre_step_marginals",
    "rwre_marginal_identity_error",
    "rwre_conditional_identity_error",
    "measure_convergence_check",
    "lpp_grid",
    "lpp_geodesic",
    "competition_interface",
    "degenerate_ij_step",
    "degenerate_ij_chain",
    "walk_deviation_profile",
    "homogeneous_deviation_profile",
    "overlap_fractions",
]


@dataclass(frozen=True)
class LatticePath:
    """An admissible up-right path: a start point and 0/1 step codes
    (0 means an e1 step)."""

    start: tuple[int, int]
    steps: np.ndarray

    def __len__(self) -> int:
        return len(self.steps)

    def points(self) -> np.ndarray:
        """All visited lattice points, shape (len+1, 2)."""
        pts = np.zeros((len(self.steps) + 1, 2), dtype=np.int64)
        pts[0] = self.start
        pts[1:, 0] = self.start[0] + np.cumsum(self.steps == 0)
        pts[1:, 1] = self.start[1] + np.cumsum(self.steps == 1)
        return pts

    def exit_stats(self) -> tuple[int, int]:
        """(t_e1, t_e2): initial run lengths along each boundary ray."""
        s = np.asarray(self.steps)
        t1 = int(np.cumprod(s == 0).sum()) if s.size else 0
        t2 = int(np.cumprod(s == 1).sum()) if s.size else 0
        return t1, t2

    @property
    def end(self) -> tuple[int, int]:
        return (
            self.start[0] + int(np.sum(self.steps == 0)),
            self.start[1] + int(np.sum(self.steps == 1)),
        )


def _backward_logits(grid: LogPartitionGrid, weights: np.ndarray | None):
    """Per-site log masses proportional to the backward kernel.

    For an end-included grid the kernel out of x is proportional to
    Z_{u, x-e_r}; for a start-included grid the predecessor's weight
    divides in.
    """
    vals = grid.values
    if grid.convention is WeightConvention.END_INCLUDED:
        return vals
    if weights is None:
        raise ValueError("start-included grids need the weights to form the kernel")
    return vals - np.log(weights)


def sample_quenched_path(
    grid: LogPartitionGrid, v: tuple[int, int], rng: RandomStream, weights: np.ndarray | None = None
) -> LatticePath:
    """Draw one path from the quenched point-to-point measure.

    ``grid`` must be a forward grid based at the polymer's start; the
    path is generated backward from ``v`` by the two-point kernel and
    returned in forward order.
    """
    if grid.direction is not Direction.FORWARD:
        raise ValueError("quenched sampling needs a forward grid from the start point")
    u = grid.base
    if not (u[0] <= v[0] and u[1] <= v[1]):
        raise ValueError(f"endpoint {v} does not dominate the base {u}")
    if v[0] >= grid.values.shape[-2] or v[1] >= grid.values.shape[-1]:
        raise ValueError(f"endpoint {v} outside the grid")
    logits = _backward_logits(grid, weights)
    gen = rng.generator
    steps_rev = []
    x = list(v)
    while tuple(x) != u:
        if x[0] == u[0]:
            choice = 1
        elif x[1] == u[1]:
            choice = 0
        else:
            l1 = logits[x[0] - 1, x[1]]
            l2 = logits[x[0], x[1] - 1]
            p_e1 = 1.0 / (1.0 + np.exp(l2 - l1))
            choice = 0 if gen.uniform() < p_e1 else 1
        steps_rev.append(choice)
        x[choice] -= 1
    return LatticePath(start=u, steps=np.array(steps_rev[::-1], dtype=np.int8))


def sample_quenched_endsteps(
    grid: LogPartitionGrid,
    v: tuple[int, int],
    rng: RandomStream,
    count: int,
    weights: np.ndarray | None = None,
) -> np.ndarray:
    """Vectorized sampler: ``count`` paths, returned as a (count, L)
    matrix of step codes in forward order."""
    if grid.direction is not Direction.FORWARD:
        raise ValueError("quenched sampling needs a forward grid from the start point")
    u = grid.base
    length = (v[0] - u[0]) + (v[1] - u[1])
    logits = _backward_logits(grid, weights)
    gen = rng.generator
    xi = np.full(count, v[0])
    xj = np.full(count, v[1])
    steps = np.empty((count, length), dtype=np.int8)
    for t in range(length - 1, -1, -1):
        forced_e1 = xj == u[1]
        forced_e2 = xi == u[0]
        l1 = logits[np.maximum(xi - 1, 0), xj]
        l2 = logits[xi, np.maximum(xj - 1, 0)]
        p_e1 = 1.0 / (1.0 + np.exp(l2 - l1))
        p_e1 = np.where(forced_e1, 1.0, np.where(forced_e2, 0.0, p_e1))
        take_e1 = gen.uniform(size=count) < p_e1
        steps[:, t] = np.where(take_e1, 0, 1)
        xi = xi - take_e1
        xj = xj - (~take_e1)
    return steps


# -- the polymer walk in its exact environment --------------------------------


def rwre_transition(system: GammaSystem, x: tuple[int, int]) -> float:
    """P(step = e1) out of site x."""
    i, j = x
    m, n = system.shape
    if not (0 <= i < m and 0 <= j < n):
        raise ValueError(f"site {x} has no forward neighbors inside the system")
    e = system.eta[i + 1, j]
    z = system.zeta[i, j + 1]
    return float(e / (e + z))


def rwre_sample(system: GammaSystem, n_steps: int, rng: RandomStream) -> LatticePath:
    """One walk of ``n_steps`` from the origin."""
    m, n = system.shape
    if n_steps > min(m, n):
        raise ValueError(f"walk of {n_steps} steps may exit the {m}x{n} system")
    gen = rng.generator
    x = [0, 0]
    steps = np.empty(n_steps, dtype=np.int8)
    for t in range(n_steps):
        p = rwre_transition(system, (x[0], x[1]))
        choice = 0 if gen.uniform() < p else 1
        steps[t] = choice
        x[choice] += 1
    return LatticePath(start=(0, 0), steps=steps)


def rwre_step_marginals(system: GammaSystem, depth: int) -> list[np.ndarray]:
    """Quenched laws of the walk position: level k holds P(X_k = (i, k-i))
    for i = 0..k, computed by probability flow through the kernel."""
    m, n = system.shape
    if depth > min(m, n):
        raise ValueError(f"depth {depth} exceeds the system box")
    levels = [np.array([1.0])]
    for k in range(depth):
        cur = levels[-1]
        i = np.arange(k + 1)
        e = system.eta[i + 1, k - i]
        z = system.zeta[i, k - i + 1]
        p_e1 = e / (e + z)
        nxt = np.zeros(k + 2)
        nxt[1:] += cur * p_e1
        nxt[:-1] += cur * (1.0 - p_e1)
        levels.append(nxt)
    return levels


def rwre_marginal_identity_error(system: GammaSystem, depth: int) -> float:
    """Max |P(X_k = x) - Zcheck_{0,x} / Z_{0,x}| over |x|_1 <= depth.

    Zcheck uses the induced corner weights with the start included;
    Z uses the boundary/bulk field with the end included.
    """
    marginals = rwre_step_marginals(system, depth)
    zcheck = log_partition(
        system.xicheck, (0, 0), WeightConvention.START_INCLUDED, Direction.FORWARD
    ).values
    z = log_partition(
        system.mixed_weights(), (0, 0), WeightConvention.END_INCLUDED, Direction.FORWARD
    ).values
    worst = 0.0
    for k in range(1, depth + 1):
        i = np.arange(k + 1)
        ratio = np.exp(zcheck[i, k - i] - z[i, k - i])
        worst = max(worst, float(np.max(np.abs(marginals[k] - ratio))))
    return worst


def rwre_conditional_identity_error(system: GammaSystem, target: tuple[int, int]) -> float:
    """Max over paths to ``target`` of the gap between the conditioned
    walk law and the quenched polymer law in corner weights."""
    k = target[0] + target[1]
    if k > 12:
        raise ValueError("conditional check enumerates paths; keep |target|_1 <= 12")
    marginals = rwre_step_marginals(system, k)
    p_target = marginals[k][target[0]]
    chk = system.xicheck

    zcheck = log_partition(
        chk, (0, 0), WeightConvention.START_INCLUDED, Direction.FORWARD
    ).values
    worst = 0.0
    for combo in itertools.combinations(range(k), target[0]):
        steps = np.ones(k, dtype=np.int8)
        steps[list(combo)] = 0
        path = LatticePath(start=(0, 0), steps=steps)
        pts = path.points()
        walk_prob = 1.0
        for (a, b), s in zip(pts[:-1], steps):
            p = rwre_transition(system, (a, b))
            walk_prob *= p if s == 0 else 1.0 - p
        lhs = walk_prob / p_target
        rhs = np.exp(-np.log(chk[pts[:-1, 0], pts[:-1, 1]]).sum() - zcheck[target])
        worst = max(worst, abs(lhs - rhs))
    return float(worst)


def measure_convergence_check(
    system: GammaSystem, prefix: LatticePath, mn: tuple[int, int]
) -> tuple[float, float]:
    """Compare the point-to-point polymer and the limit walk on a prefix.

    Returns (q, p): q is the quenched polymer probability of the prefix
    for paths to ``mn`` in the induced iid corner-weight field, p is the
    walk probability of the same prefix.  q -> p as mn grows along the
    system's characteristic direction.
    """
    pts = prefix.points()
    m, n = mn
    if np.any(pts[:, 0] > m) or np.any(pts[:, 1] > n):
        raise ValueError("prefix exits the rectangle")
    if m >= system.xicheck.shape[0] or n >= system.xicheck.shape[1]:
        raise ValueError("rectangle must sit strictly inside the corner-weight field")
    if len(prefix) == 0:
        return 1.0, 1.0
    chk = system.xicheck
    back = log_partition(chk, (m, n), WeightConvention.START_INCLUDED, Direction.BACKWARD).values
    log_q = (
        back[pts[-1, 0], pts[-1, 1]]
        - back[0, 0]
        - np.log(chk[pts[:-1, 0], pts[:-1, 1]]).sum()
    )
    p = 1.0
    for (a, b), s in zip(pts[:-1], prefix.steps):
        pr = rwre_transition(system, (a, b))
        p *= pr if s == 0 else 1.0 - pr
    return float(np.exp(log_q)), float(p)


# -- zero temperature ----------------------------------------------------------


@dataclass(frozen=True)
class LppGrid:
    """Last-passage values from a base point; end site's weight counts,
    the base's does not."""

    base: tuple[int, int]
    values: np.ndarray


def lpp_grid(weights: np.ndarray, base: tuple[int, int] = (0, 0)) -> LppGrid:
    """G[v] = max over paths base -> v of the sum of weights at
    x_1 .. x_end.  Supports leading batch axes."""
    w = np.asarray(weights, dtype=float)
    p = w.shape[-2] - base[0]
    q = w.shape[-1] - base[1]
    sub = w[..., base[0] :, base[1] :]
    g = np.full(w.shape[:-2] + (p + 1, q + 1), -np.inf)
    g[..., 1, 1] = 0.0
    for d in range(3, p + q + 2):
        a = np.arange(max(1, d - q), min(p, d - 1) + 1)
        b = d - a
        g[..., a, b] = np.maximum(g[..., a - 1, b], g[..., a, b - 1]) + sub[..., a - 1, b - 1]
    out = np.full(w.shape, np.nan)
    out[..., base[0] :, base[1] :] = g[..., 1:, 1:]
    return LppGrid(base=base, values=out)


def lpp_geodesic(grid: LppGrid, v: tuple[int, int]) -> LatticePath:
    """The maximizing path from the grid's base to v, built backward."""
    u = grid.base
    g = grid.values
    steps_rev = []
    x = list(v)
    while tuple(x) != u:
        if x[0] == u[0]:
            choice = 1
        elif x[1] == u[1]:
            choice = 0
        else:
            choice = 0 if g[x[0] - 1, x[1]] > g[x[0], x[1] - 1] else 1
        steps_rev.append(choice)
        x[choice] -= 1
    return LatticePath(start=u, steps=np.array(steps_rev[::-1], dtype=np.int8))


def competition_interface(grid: LppGrid) -> tuple[LatticePath, int]:
    """The interface path from the base, choosing the smaller G-value at
    each fork; ties resolve to e1 and are counted."""
    g = grid.values
    m, n = g.shape[-2] - 1, g.shape[-1] - 1
    x = list(grid.base)
    steps = []
    ties = 0
    while x[0] + 1 <= m and x[1] + 1 <= n:
        a = g[x[0] + 1, x[1]]
        b = g[x[0], x[1] + 1]
        if a == b:
            ties += 1
        choice = 0 if a <= b else 1
        steps.append(choice)
        x[choice] += 1
    return LatticePath(start=grid.base, steps=np.array(steps, dtype=np.int8)), ties


# -- degenerate increment chain -------------------------------------------------


def degenerate_ij_step(i_in: float, j_in: float) -> tuple[float, float]:
    """One corner of the degenerate induction: ((I - J)^+, (J - I)^+)."""
    return max(i_in - j_in, 0.0), max(j_in - i_in, 0.0)


def degenerate_ij_chain(
    alpha: float,
    beta: float,
    n_steps: int,
    window: int,
    rng: RandomStream,
    burn_in: int = 1000,
    sample_lag: int = 10,
):
    """Run the increment window along the competition interface.

    The state holds exponential increment rows/columns (I on horizontal
    edges, J on vertical ones); the interface steps toward the smaller
    increment, the window shifts, and fresh boundary variables refill
    it.  Returns (e1 frequency, I samples, J samples).
    """
    if alpha <= 0 or beta <= 0:
        raise ValueError("rates must be positive")
    gen = rng.generator
    i_row = gen.exponential(scale=1.0 / alpha, size=window)
    j_col = gen.exponential(scale=1.0 / beta, size=window)
    e1_count = 0
    i_samples, j_samples = [], []
    for t in range(n_steps):
        step_e1 = i_row[0] < j_col[0]
        if step_e1:
            e1_count += 1
            new_j = np.empty(window)
            i_up = i_row[0]
            for k in range(window):
                i_next, j_next = degenerate_ij_step(i_up, j_col[k])
                new_j[k] = j_next
                i_up = i_next
            i_row = np.concatenate([i_row[1:], gen.exponential(scale=1.0 / alpha, size=1)])
            j_col = new_j
        else:
            new_i = np.empty(window)
            j_left = j_col[0]
            for k in range(window):
                i_next, j_next = degenerate_ij_step(i_row[k], j_left)
                new_i[k] = i_next
                j_left = j_next
            j_col = np.concatenate([j_col[1:], gen.exponential(scale=1.0 / beta, size=1)])
            i_row = new_i
        if t >= burn_in and (t - burn_in) % sample_lag == 0:
            i_samples.append(i_row[0])
            j_samples.append(j_col[0])
    return e1_count / n_steps, np.array(i_samples), np.array(j_samples)


# -- fluctuation experiments -----------------------------------------------------


def walk_deviation_profile(
    lam: float,
    rho: float,
    n_list,
    n_walks: int,
    rng: RandomStream,
    u1: float,
) -> np.ndarray:
    """l1 deviations |X_N - N u| for ``n_walks`` walks in one fresh
    environment, recorded at each N of ``n_list``.

    The environment is materialized antidiagonal by antidiagonal; all
    walks ride the same sweep.  Returns an array (len(n_list), n_walks).
    """
    n_list = sorted(int(n) for n in n_list)
    n_max = n_list[-1]
    env = DiagonalEnvironment(lam, rho, max_depth=n_max, rng=rng.substream("weights"))
    walk_gen = rng.substream("walk").generator
    pos = np.zeros(n_walks, dtype=np.int64)
    out = np.empty((len(n_list), n_walks))
    mark = 0
    for t in range(n_max):
        p_e1 = env.step_probabilities(pos)
        pos = pos + (walk_gen.uniform(size=n_walks) < p_e1)
        n_now = t + 1
        if n_now == n_list[mark]:
            out[mark] = 2.0 * np.abs(pos - n_now * u1)
            mark += 1
        if n_now < n_max:
            env.advance()
    return out


def homogeneous_deviation_profile(n_list, n_samples: int, rng: RandomStream) -> np.ndarray:
    """Control case: the symmetric homogeneous walk, same statistic."""
    gen = rng.generator
    out = np.empty((len(n_list), n_samples))
    for k, n in enumerate(sorted(int(v) for v in n_list)):
        b = gen.binomial(n, 0.5, size=n_samples)
        out[k] = 2.0 * np.abs(b - n * 0.5)
    return out


def overlap_fractions(
    system: GammaSystem, n_steps: int, pairs: int, rng: RandomStream
) -> np.ndarray:
    """Fraction of coincident sites for pairs of independent walks in
    one environment."""
    m, n = system.shape
    if n_steps > min(m, n):
        raise ValueError(f"walks of {n_steps} steps may exit the {m}x{n} system")
    gen_a = rng.substream("walk-a").generator
    gen_b = rng.substream("walk-b").generator
    pos_a = np.zeros(pairs, dtype=np.int64)
    pos_b = np.zeros(pairs, dtype=np.int64)
    shared = np.zeros(pairs, dtype=np.int64)
    eta, zeta = system.eta, system.zeta
    for t in range(n_steps):
        j_a = t - pos_a
        e = eta[pos_a + 1, j_a]
        z = zeta[pos_a, j_a + 1]
        pos_a = pos_a + (gen_a.uniform(size=pairs) < e / (e + z))
        j_b = t - pos_b
        e = eta[pos_b + 1, j_b]
        z = zeta[pos_b, j_b + 1]
        pos_b = pos_b + (gen_b.uniform(size=pairs) < e / (e + z))
        shared += pos_a == pos_b
    return shared / n_steps
