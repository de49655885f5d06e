"""Gamma systems of lattice weights closed under north-east induction.

A system carries four coupled weight families on an (m, n) rectangle:

* ``xi``       bulk weights on {1..m} x {1..n},
* ``eta``      horizontal edge weights on {1..m} x {0..n},
* ``zeta``     vertical edge weights on {0..m} x {1..n},
* ``xicheck``  induced corner weights on {0..m-1} x {0..n-1},

linked at every interior site by the local corner map

    eta_x  = xi_x * eta_{x-e2} / (eta_{x-e2} + zeta_{x-e1})
    zeta_x = xi_x * zeta_{x-e1} / (eta_{x-e2} + zeta_{x-e1})
    xicheck_{x-e1-e2} = eta_{x-e2} + zeta_{x-e1}.

With independent Gamma(lam) south boundary, Gamma(rho - lam) west
boundary and Gamma(rho) bulk, the induced families keep independent
gamma marginals along every down-right path, which is what all the
distributional checks in this package lean on.

Arrays use natural lattice indexing; entries outside a family's domain
hold NaN.  All randomness is drawn from canonical substreams ("eta0",
"zeta0", "xi") of one root stream, with the bulk consumed one
antidiagonal at a time over the full index range i = 1..d-1.  Values at
a lattice site therefore do not depend on the rectangle dimensions,
so enlarging a box extends the same environment.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .specfun import gamma_quantile
from .streams import RandomStream

__all__ = [
    "ModelParams",
    "GammaSystem",
    "NeReport",
    "corner_map",
    "build_gamma_system",
    "build_coupled_systems",
    "verify_ne",
    "DiagonalEnvironment",
    "dump_csv",
    "load_csv",
]


@dataclass(frozen=True)
class ModelParams:
    """Configuration of one lattice experiment."""

    lam: float
    rho: float
    m: int
    n: int
    seed: int

    def __post_init__(self):
        if not np.isfinite(self.lam) or not np.isfinite(self.rho):
            raise ValueError("shape parameters must be finite")
        if not 0.0 < self.lam < self.rho:
            raise ValueError(f"need 0 < lam < rho, got lam={self.lam}, rho={self.rho}")
        if self.m < 1 or self.n < 1:
            raise ValueError(f"dims must be >= 1, got ({self.m}, {self.n})")


@dataclass(frozen=True)
class GammaSystem:
    params: ModelParams
    xi: np.ndarray  # (m+1, n+1), valid on [1..m, 1..n]
    eta: np.ndarray  # (m+1, n+1), valid on [1..m, 0..n]
    zeta: np.ndarray  # (m+1, n+1), valid on [0..m, 1..n]
    xicheck: np.ndarray  # (m, n), valid on [0..m-1, 0..n-1]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.params.m, self.params.n)

    def mixed_weights(self) -> np.ndarray:
        """Boundary/bulk weight field: eta on the south row, zeta on the
        west column, xi in the bulk.  NaN at the origin, which carries
        no weight in any convention."""
        m, n = self.shape
        w = np.full((m + 1, n + 1), np.nan)
        w[1:, 0] = self.eta[1:, 0]
        w[0, 1:] = self.zeta[0, 1:]
        w[1:, 1:] = self.xi[1:, 1:]
        return w


def corner_map(xi, eta_s, zeta_w):
    """Single-square corner update; accepts scalars or arrays.

    Returns (eta_n, zeta_e, xicheck) with eta_n + zeta_e = xi exactly.
    """
    xi = np.asarray(xi, dtype=float)
    eta_s = np.asarray(eta_s, dtype=float)
    zeta_w = np.asarray(zeta_w, dtype=float)
    if np.any(xi <= 0) or np.any(eta_s <= 0) or np.any(zeta_w <= 0):
        raise ValueError("corner_map requires strictly positive inputs")
    s = eta_s + zeta_w
    eta_n = xi * (eta_s / s)
    zeta_e = xi * (zeta_w / s)
    if eta_n.ndim == 0:
        return float(eta_n), float(zeta_e), float(s)
    return eta_n, zeta_e, s


def _bulk_diagonal(xi_gen: np.random.Generator, rho: float, d: int, m: int, n: int):
    """Bulk draws for antidiagonal d, sliced to the (m, n) box.

    Draws the full range i = 1..d-1 so that site values are independent
    of the box shape, then keeps i in [max(1, d-n), min(m, d-1)].
    Returns (i0, values) where values[k] belongs to site (i0+k, d-i0-k).
    """
    full = xi_gen.gamma(rho, size=d - 1)  # i = 1 .. d-1
    i0 = max(1, d - n)
    i1 = min(m, d - 1)
    return i0, full[i0 - 1 : i1]


def _fill_interior(eta, zeta, xicheck, xi, m, n):
    """Sweep antidiagonals of increasing i+j, applying the corner map."""
    for d in range(2, m + n + 1):
        i = np.arange(max(1, d - n), min(m, d - 1) + 1)
        if i.size == 0:
            continue
        j = d - i
        s = eta[i, j - 1] + zeta[i - 1, j]
        x = xi[i, j]
        eta[i, j] = x * (eta[i, j - 1] / s)
        zeta[i, j] = x * (zeta[i - 1, j] / s)
        xicheck[i - 1, j - 1] = s


def build_gamma_system(params: ModelParams, rng: RandomStream | None = None) -> GammaSystem:
    """Construct a gamma system from independent boundary and bulk draws."""
    if rng is None:
        rng = RandomStream(params.seed)
    m, n = params.m, params.n
    cells = (m + 1) * (n + 1)
    if cells > 200_000_000:
        raise MemoryError(f"system of {m}x{n} exceeds the configured memory budget")

    eta = np.full((m + 1, n + 1), np.nan)
    zeta = np.full((m + 1, n + 1), np.nan)
    xi = np.full((m + 1, n + 1), np.nan)
    xicheck = np.full((m, n), np.nan)

    eta[1:, 0] = rng.substream("eta0").gamma(params.lam, size=m)
    zeta[0, 1:] = rng.substream("zeta0").gamma(params.rho - params.lam, size=n)
    xi_gen = rng.substream("xi").generator
    for d in range(2, m + n + 1):
        i0, vals = _bulk_diagonal(xi_gen, params.rho, d, m, n)
        i = np.arange(i0, i0 + vals.size)
        xi[i, d - i] = vals

    _fill_interior(eta, zeta, xicheck, xi, m, n)
    return GammaSystem(params=params, xi=xi, eta=eta, zeta=zeta, xicheck=xicheck)


def build_coupled_systems(
    lambdas, rho: float, dims: tuple[int, int], rng: RandomStream
) -> list[GammaSystem]:
    """Systems sharing bulk draws, with boundaries quantile-coupled
    through common uniforms.

    For lam1 <= lam2 the coupling gives eta^(1) <= eta^(2) and
    zeta^(1) >= zeta^(2) at every site.
    """
    lambdas = [float(v) for v in lambdas]
    if any(not 0.0 < v < rho for v in lambdas):
        raise ValueError(f"all lambdas must lie in (0, {rho})")
    if any(a > b for a, b in zip(lambdas, lambdas[1:])):
        raise ValueError("lambdas must be sorted ascending")
    m, n = dims

    u_eta = rng.substream("u-eta0").uniform(size=m)
    u_zeta = rng.substream("u-zeta0").uniform(size=n)
    xi = np.full((m + 1, n + 1), np.nan)
    xi_gen = rng.substream("xi").generator
    for d in range(2, m + n + 1):
        i0, vals = _bulk_diagonal(xi_gen, rho, d, m, n)
        i = np.arange(i0, i0 + vals.size)
        xi[i, d - i] = vals

    systems = []
    for lam in lambdas:
        eta = np.full((m + 1, n + 1), np.nan)
        zeta = np.full((m + 1, n + 1), np.nan)
        xicheck = np.full((m, n), np.nan)
        eta[1:, 0] = gamma_quantile(lam, u_eta)
        zeta[0, 1:] = gamma_quantile(rho - lam, u_zeta)
        _fill_interior(eta, zeta, xicheck, xi, m, n)
        params = ModelParams(lam=lam, rho=rho, m=m, n=n, seed=rng.seed)
        systems.append(
            GammaSystem(params=params, xi=xi.copy(), eta=eta, zeta=zeta, xicheck=xicheck)
        )
    return systems


@dataclass(frozen=True)
class NeReport:
    ok: bool
    max_residual: float
    site: tuple[int, int]
    equation: str

    def __str__(self) -> str:
        verdict = "ok" if self.ok else "VIOLATED"
        return (
            f"NE induction {verdict}: max relative residual "
            f"{self.max_residual:.3e} at site {self.site} ({self.equation})"
        )


def verify_ne(system: GammaSystem, tol: float = 1e-12) -> NeReport:
    """Check all three induction equations at every interior site."""
    m, n = system.shape
    eta, zeta, xi = system.eta, system.zeta, system.xi
    s = eta[1:, :-1] + zeta[:-1, 1:]  # eta_{x-e2} + zeta_{x-e1} on [1..m]x[1..n]
    r_eta = np.abs(eta[1:, 1:] - xi[1:, 1:] * eta[1:, :-1] / s) / eta[1:, 1:]
    r_zeta = np.abs(zeta[1:, 1:] - xi[1:, 1:] * zeta[:-1, 1:] / s) / zeta[1:, 1:]
    r_chk = np.abs(system.xicheck - s) / system.xicheck

    worst = (0.0, (1, 1), "eta")
    for res, name, offset in ((r_eta, "eta", 1), (r_zeta, "zeta", 1), (r_chk, "xicheck", 0)):
        flat = np.argmax(res)
        i, j = np.unravel_index(flat, res.shape)
        value = float(res[i, j])
        if value > worst[0]:
            worst = (value, (int(i) + offset, int(j) + offset), name)
    return NeReport(ok=worst[0] <= tol, max_residual=worst[0], site=worst[1], equation=worst[2])


class DiagonalEnvironment:
    """A gamma-system environment materialized one antidiagonal at a time.

    Holds only the (eta, zeta) values on the current antidiagonal, so a
    walk of n steps needs O(n) memory instead of O(n^2).  Uses the same
    canonical substreams as :func:`build_gamma_system`; on the triangle
    {i + j <= max_depth} the values coincide exactly with those of any
    covering rectangular build from the same stream.
    """

    def __init__(self, lam: float, rho: float, max_depth: int, rng: RandomStream):
        if not 0.0 < lam < rho:
            raise ValueError(f"need 0 < lam < rho, got lam={lam}, rho={rho}")
        self.lam = lam
        self.rho = rho
        self.max_depth = int(max_depth)
        self._eta0 = rng.substream("eta0").gamma(lam, size=self.max_depth)  # i = 1..D
        self._zeta0 = rng.substream("zeta0").gamma(rho - lam, size=self.max_depth)
        self._xi_gen = rng.substream("xi").generator
        self.d = 1
        self.eta = np.array([np.nan, self._eta0[0]])
        self.zeta = np.array([self._zeta0[0], np.nan])

    def advance(self) -> int:
        """Move from antidiagonal d to d+1; returns the new depth."""
        d = self.d
        if d + 1 > self.max_depth:
            raise ValueError(f"environment exhausted at depth {self.max_depth}")
        xi = self._xi_gen.gamma(self.rho, size=d)  # sites i = 1..d on diagonal d+1
        s = self.eta[1:] + self.zeta[:-1]
        new_eta = np.empty(d + 2)
        new_zeta = np.empty(d + 2)
        new_eta[0] = np.nan
        new_eta[1 : d + 1] = xi * (self.eta[1:] / s)
        new_eta[d + 1] = self._eta0[d]  # boundary site (d+1, 0)
        new_zeta[0] = self._zeta0[d]  # boundary site (0, d+1)
        new_zeta[1 : d + 1] = xi * (self.zeta[:-1] / s)
        new_zeta[d + 1] = np.nan
        self.eta, self.zeta, self.d = new_eta, new_zeta, d + 1
        return self.d

    def step_probabilities(self, positions) -> np.ndarray:
        """P(step = e1) for walkers sitting on antidiagonal d-1.

        ``positions`` are the walkers' first coordinates i; their sites
        are (i, d-1-i) and the neighbors (i+1, .) and (i, .) live on the
        current antidiagonal d.
        """
        pos = np.asarray(positions)
        e = self.eta[pos + 1]
        z = self.zeta[pos]
        return e / (e + z)


# -- flat-file persistence ---------------------------------------------------


def _write_array(fh, name: str, arr: np.ndarray) -> None:
    fh.write(f"{name},{arr.shape[0]},{arr.shape[1]}\n")
    for row in arr:
        fh.write(",".join(repr(float(v)) for v in row) + "\n")


def dump_csv(system: GammaSystem, path) -> None:
    """Plain-text dump: parameter header, then each array row-major."""
    p = system.params
    with open(path, "w") as fh:
        fh.write("lambda,rho,m,n,seed\n")
        fh.write(f"{p.lam!r},{p.rho!r},{p.m},{p.n},{p.seed}\n")
        _write_array(fh, "xi", system.xi)
        _write_array(fh, "eta", system.eta)
        _write_array(fh, "zeta", system.zeta)
        _write_array(fh, "xicheck", system.xicheck)


def load_csv(path) -> GammaSystem:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        if header != ["lambda", "rho", "m", "n", "seed"]:
            raise ValueError(f"unrecognized dump header: {header}")
        lam, rho, m, n, seed = fh.readline().strip().split(",")
        params = ModelParams(lam=float(lam), rho=float(rho), m=int(m), n=int(n), seed=int(seed))
        arrays = {}
        for _ in range(4):
            name, rows, cols = fh.readline().strip().split(",")
            data = np.array(
                [[float(v) for v in fh.readline().strip().split(",")] for _ in range(int(rows))]
            )
            if data.shape != (int(rows), int(cols)):
                raise ValueError(f"array {name} has wrong shape in dump")
            arrays[name] = data
    return GammaSystem(params=params, **arrays)
