"""Log-domain dynamic programming for lattice partition functions.

A partition function here is a sum over up-right lattice paths of
products of reciprocal site weights.  Two inclusion conventions appear:

* ``START_INCLUDED``: the weight at the path's start is included and the
  weight at its end excluded,
* ``END_INCLUDED``: the weight at the end is included, the start excluded.

The two differ per path only by the constant factor W_start / W_end, but
each has identities that are cleanest in its own convention, so both are
first-class.  Grids can be built forward from a fixed start (values for
all endpoints) or backward from a fixed endpoint (values for all
starts).  Everything is computed and stored in the log domain; -inf
encodes an empty path set.

The core sweeps accept arbitrary leading batch dimensions, which the
Monte Carlo experiments use to process many environments at once.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import logsumexp

from .gamma_system import GammaSystem

__all__ = [
    "E1",
    "E2",
    "WeightConvention",
    "Direction",
    "LogPartitionGrid",
    "ExitStats",
    "log_partition",
    "brute_force_partition",
    "ne_boundary_log_grid",
    "ne_boundary_partition",
    "ne_boundary_entry_decomposition",
    "tilted_p2l_log_partition",
    "ratio_weights",
]

E1 = (1, 0)
E2 = (0, 1)


class WeightConvention(Enum):
    START_INCLUDED = "start_included"
    END_INCLUDED = "end_included"


class Direction(Enum):
    FORWARD = "forward"
    BACKWARD = "backward"


@dataclass(frozen=True)
class LogPartitionGrid:
    """Log partition values over a rectangle relative to one base point.

    ``values[..., i, j]`` is log Z between the base and (i, j) (forward:
    base -> (i, j); backward: (i, j) -> base).  Sites not reachable from
    the base hold -inf.  Leading axes of ``values`` are batch axes.
    """

    base: tuple[int, int]
    convention: WeightConvention
    direction: Direction
    values: np.ndarray


@dataclass(frozen=True)
class ExitStats:
    """Numbers of initial steps a path spends on each boundary ray."""

    t_e1: int
    t_e2: int

    def __post_init__(self):
        if min(self.t_e1, self.t_e2) != 0:
            raise ValueError("a path exits at most one boundary ray")


def _core_start_forward(logw: np.ndarray) -> np.ndarray:
    """Forward start-included sweep from the local origin.

    out[..., a, b] = log sum over paths (0,0)->(a,b) of the product of
    reciprocal weights at all sites except (a, b).  Never reads the
    weight at the far corner.
    """
    *batch, p, q = logw.shape
    z = np.full((*batch, p + 1, q + 1), -np.inf)
    c = np.zeros((*batch, p + 1, q + 1))
    c[..., 1:, 1:] = -logw
    z[..., 1, 1] = 0.0
    for d in range(3, p + q + 2):
        a = np.arange(max(1, d - q), min(p, d - 1) + 1)
        b = d - a
        z[..., a, b] = np.logaddexp(
            z[..., a - 1, b] + c[..., a - 1, b], z[..., a, b - 1] + c[..., a, b - 1]
        )
    return z[..., 1:, 1:]


def _core_end_forward(logw: np.ndarray) -> np.ndarray:
    """Forward end-included sweep; never reads the weight at the origin."""
    *batch, p, q = logw.shape
    z = np.full((*batch, p + 1, q + 1), -np.inf)
    z[..., 1, 1] = 0.0
    for d in range(3, p + q + 2):
        a = np.arange(max(1, d - q), min(p, d - 1) + 1)
        b = d - a
        z[..., a, b] = np.logaddexp(z[..., a - 1, b], z[..., a, b - 1]) - logw[..., a - 1, b - 1]
    return z[..., 1:, 1:]


def _reverse(arr: np.ndarray) -> np.ndarray:
    return arr[..., ::-1, ::-1]


def log_partition(
    weights: np.ndarray,
    base: tuple[int, int],
    convention: WeightConvention,
    direction: Direction = Direction.FORWARD,
) -> LogPartitionGrid:
    """Log partition grid for all lattice points on one side of ``base``.

    ``weights`` is a positive array whose last two axes index the
    lattice; leading axes are treated as independent batches.
    """
    weights = np.asarray(weights, dtype=float)
    grid_m, grid_n = weights.shape[-2] - 1, weights.shape[-1] - 1
    bi, bj = base
    if not (0 <= bi <= grid_m and 0 <= bj <= grid_n):
        raise ValueError(f"base {base} outside the {grid_m}x{grid_n} grid")

    values = np.full(weights.shape, -np.inf)
    with np.errstate(divide="ignore"):  # zero-probability guards only
        if direction is Direction.FORWARD:
            logw = np.log(weights[..., bi:, bj:])
            if convention is WeightConvention.START_INCLUDED:
                values[..., bi:, bj:] = _core_start_forward(logw)
            else:
                values[..., bi:, bj:] = _core_end_forward(logw)
        else:
            logw = np.log(weights[..., : bi + 1, : bj + 1])
            if convention is WeightConvention.START_INCLUDED:
                values[..., : bi + 1, : bj + 1] = _reverse(_core_end_forward(_reverse(logw)))
            else:
                values[..., : bi + 1, : bj + 1] = _reverse(_core_start_forward(_reverse(logw)))
    return LogPartitionGrid(base=(bi, bj), convention=convention, direction=direction, values=values)


def _path_step_matrix(dm: int, dn: int) -> np.ndarray:
    """All step sequences from (0,0) to (dm, dn); 1 marks an e1 step."""
    length = dm + dn
    combos = itertools.combinations(range(length), dm)
    steps = np.zeros((0, length), dtype=np.int64)
    rows = [np.array(c, dtype=np.int64) for c in combos]
    if rows:
        steps = np.zeros((len(rows), length), dtype=np.int64)
        for k, pos in enumerate(rows):
            steps[k, pos] = 1
    return steps


def brute_force_partition(
    weights: np.ndarray,
    u: tuple[int, int],
    v: tuple[int, int],
    convention: WeightConvention,
    restriction=None,
) -> float:
    """Exact log partition function by exhaustive path enumeration.

    ``restriction`` optionally filters paths by a predicate on their
    :class:`ExitStats`.  Intended as a test oracle only; refuses paths
    longer than 24 steps.
    """
    weights = np.asarray(weights, dtype=float)
    dm, dn = v[0] - u[0], v[1] - u[1]
    if dm < 0 or dn < 0:
        raise ValueError(f"endpoint {v} does not dominate start {u}")
    length = dm + dn
    if length > 24:
        raise ValueError(f"path length {length} exceeds the enumeration bound of 24")
    if length == 0:
        return 0.0

    steps = _path_step_matrix(dm, dn)
    i = u[0] + np.cumsum(steps, axis=1)
    j = u[1] + np.cumsum(1 - steps, axis=1)
    if convention is WeightConvention.END_INCLUDED:
        sites_i, sites_j = i, j  # x_1 .. x_L
    else:
        sites_i = np.concatenate([np.full((steps.shape[0], 1), u[0]), i[:, :-1]], axis=1)
        sites_j = np.concatenate([np.full((steps.shape[0], 1), u[1]), j[:, :-1]], axis=1)
    path_logs = -np.log(weights[sites_i, sites_j]).sum(axis=1)

    if restriction is not None:
        lead_e1 = np.cumprod(steps, axis=1).sum(axis=1)
        lead_e2 = np.cumprod(1 - steps, axis=1).sum(axis=1)
        keep = np.array(
            [restriction(ExitStats(int(a), int(b))) for a, b in zip(lead_e1, lead_e2)],
            dtype=bool,
        )
        if not keep.any():
            return -np.inf
        path_logs = path_logs[keep]
    return float(logsumexp(path_logs))


def ne_boundary_log_grid(system: GammaSystem, northeast: tuple[int, int] | None = None) -> np.ndarray:
    """log Z of the north-east boundary polymer, for every southwest corner.

    Paths run from (k, l) to ``northeast``; sites strictly inside the
    rectangle carry the induced corner weights, entering the north row
    costs the eta edge weights and the east column the zeta edge
    weights.  Returns an array over (k, l) in [0..m] x [0..n].
    """
    m, n = northeast if northeast is not None else system.shape
    if not (1 <= m <= system.shape[0] and 1 <= n <= system.shape[1]):
        raise ValueError(f"rectangle corner {(m, n)} outside the system")
    g = np.full((m + 1, n + 1), np.nan)
    g[m, n] = 0.0
    log_eta = np.log(system.eta[: m + 1, : n + 1])
    log_zeta = np.log(system.zeta[: m + 1, : n + 1])
    log_chk = np.log(system.xicheck[:m, :n])
    g[m, :n] = -np.cumsum(log_zeta[m, 1:][::-1])[::-1]
    g[:m, n] = -np.cumsum(log_eta[1:, n][::-1])[::-1]
    for d in range(m + n - 1, -1, -1):
        k = np.arange(max(0, d - n + 1), min(m - 1, d) + 1)
        ell = d - k
        g[k, ell] = np.logaddexp(g[k + 1, ell], g[k, ell + 1]) - log_chk[k, ell]
    return g


def ne_boundary_partition(
    system: GammaSystem, southwest: tuple[int, int], northeast: tuple[int, int]
) -> float:
    grid = ne_boundary_log_grid(system, northeast)
    k, ell = southwest
    if not (0 <= k <= northeast[0] and 0 <= ell <= northeast[1]):
        raise ValueError(f"southwest corner {southwest} outside rectangle {northeast}")
    return float(grid[k, ell])


def ne_boundary_entry_decomposition(
    system: GammaSystem, southwest: tuple[int, int], northeast: tuple[int, int]
) -> float:
    """The same quantity as :func:`ne_boundary_partition`, assembled from
    the explicit decomposition over boundary entry points.  Test oracle."""
    k, ell = southwest
    m, n = northeast
    log_eta = np.log(system.eta)
    log_zeta = np.log(system.zeta)
    if k == m and ell == n:
        return 0.0
    if ell == n:
        return float(-np.sum(log_eta[k + 1 : m + 1, n]))
    if k == m:
        return float(-np.sum(log_zeta[m, ell + 1 : n + 1]))

    chk = system.xicheck
    zhat = log_partition(
        chk, (k, ell), WeightConvention.START_INCLUDED, Direction.FORWARD
    ).values
    terms = []
    for i in range(k, m):  # entry onto the north row at (i, n)
        tail = -np.sum(log_eta[i + 1 : m + 1, n])
        terms.append(zhat[i, n - 1] - np.log(chk[i, n - 1]) + tail)
    for j in range(ell, n):  # entry onto the east column at (m, j)
        tail = -np.sum(log_zeta[m, j + 1 : n + 1])
        terms.append(zhat[m - 1, j] - np.log(chk[m - 1, j]) + tail)
    return float(logsumexp(np.array(terms)))


def tilted_p2l_log_partition(
    weights: np.ndarray, h: tuple[float, float], x: tuple[int, int], n_total: int
) -> float:
    """log of the point-to-line partition function from ``x`` to the
    antidiagonal {|v|_1 = n_total}, tilted by exp(h . (v - x))."""
    weights = np.asarray(weights, dtype=float)
    grid_m, grid_n = weights.shape[-2] - 1, weights.shape[-1] - 1
    length = n_total - (x[0] + x[1])
    if length < 0:
        raise ValueError(f"line |v|_1 = {n_total} does not dominate start {x}")
    if length == 0:
        return 0.0
    if x[0] + length > grid_m or x[1] + length > grid_n:
        raise ValueError("weights grid too small for the terminal antidiagonal")
    grid = log_partition(weights, x, WeightConvention.START_INCLUDED, Direction.FORWARD)
    k = np.arange(0, length + 1)
    vi, vj = x[0] + k, x[1] + length - k
    tilt = h[0] * (vi - x[0]) + h[1] * (vj - x[1])
    return float(logsumexp(tilt + grid.values[vi, vj]))


def ratio_weights(grid: LogPartitionGrid, x: tuple[int, int], step: tuple[int, int]) -> float:
    """Ratio Z_{x, base} / Z_{x - step, base} from a backward grid."""
    if grid.direction is not Direction.BACKWARD:
        raise ValueError("ratio weights are defined from a backward grid")
    if step not in (E1, E2):
        raise ValueError(f"step must be E1 or E2, got {step}")
    px, py = x[0] - step[0], x[1] - step[1]
    m, n = grid.values.shape[-2] - 1, grid.values.shape[-1] - 1
    if not (0 <= px and 0 <= py and x[0] <= m and x[1] <= n):
        raise ValueError(f"sites {x} and {(px, py)} must lie inside the grid")
    return float(np.exp(grid.values[..., x[0], x[1]] - grid.values[..., px, py]))
