"""The environment as seen from the polymer walk.

The state is an M x M window of independent weights: a Gamma(alpha)
row of horizontal edge weights, a Gamma(beta) column of vertical edge
weights, and a Gamma(alpha+beta+1) block of bulk weights.  One chain
step shifts the window by e1 or e2 (probability proportional to the two
corner edge weights), recomputes the entering edge column/row by
north-east induction, and refills the far side with fresh draws.  This
distribution is stationary for the shifted chain, the step sequence is
the homogeneous (alpha, beta)-walk, and the induced corner weights seen
strictly in the walk's past follow an explicit binomial mixture law,
all of which the checks below exercise.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .specfun import gamma_cdf
from .stats import KsReport, ks_test
from .streams import RandomStream

__all__ = [
    "EnvWindowState",
    "mu_ab_init",
    "ne_window",
    "xicheck_at",
    "env_chain_step",
    "run_env_chain",
    "ChainRunReport",
    "mixture_cdf",
    "xicheck_path_law_check",
    "SizeBiasCase",
    "size_bias_check",
]


@dataclass
class EnvWindowState:
    alpha: float
    beta: float
    eta_row: np.ndarray  # eta_{i,0}, i = 1..M
    zeta_col: np.ndarray  # zeta_{0,j}, j = 1..M
    xi_block: np.ndarray  # xi_{i,j}, i, j = 1..M

    @property
    def rho(self) -> float:
        return self.alpha + self.beta + 1.0

    @property
    def window(self) -> int:
        return self.eta_row.size


def mu_ab_init(alpha: float, beta: float, window: int, rng: RandomStream) -> EnvWindowState:
    """Draw the stationary window state."""
    if alpha <= 0 or beta <= 0:
        raise ValueError("alpha and beta must be positive")
    if window < 1:
        raise ValueError("window must be >= 1")
    rho = alpha + beta + 1.0
    gen = rng.generator
    return EnvWindowState(
        alpha=alpha,
        beta=beta,
        eta_row=gen.gamma(alpha, size=window),
        zeta_col=gen.gamma(beta, size=window),
        xi_block=gen.gamma(rho, size=(window, window)),
    )


def ne_window(state: EnvWindowState) -> tuple[np.ndarray, np.ndarray]:
    """Edge weights on the window interior by north-east induction.

    Returns (eta, zeta) arrays of shape (M+1, M+1) with natural
    indexing: eta[i, j] is valid for i >= 1, zeta[i, j] for j >= 1.
    """
    m = state.window
    eta = np.full((m + 1, m + 1), np.nan)
    zeta = np.full((m + 1, m + 1), np.nan)
    eta[1:, 0] = state.eta_row
    zeta[0, 1:] = state.zeta_col
    for d in range(2, 2 * m + 1):
        i = np.arange(max(1, d - m), min(m, d - 1) + 1)
        j = d - i
        s = eta[i, j - 1] + zeta[i - 1, j]
        x = state.xi_block[i - 1, j - 1]
        eta[i, j] = x * (eta[i, j - 1] / s)
        zeta[i, j] = x * (zeta[i - 1, j] / s)
    return eta, zeta


def xicheck_at(state: EnvWindowState, site: tuple[int, int]) -> float:
    """Induced corner weight eta_{x+e1} + zeta_{x+e2} at a window site."""
    a, b = site
    if a + 1 > state.window or b + 1 > state.window:
        raise ValueError(f"site {site} needs a window larger than {state.window}")
    eta, zeta = ne_window(state)
    return float(eta[a + 1, b] + zeta[a, b + 1])


def env_chain_step(state: EnvWindowState, rng: RandomStream) -> tuple[EnvWindowState, str]:
    """One transition of the environment chain; returns the step taken."""
    m = state.window
    gen = rng.generator
    e_corner = state.eta_row[0]
    z_corner = state.zeta_col[0]
    take_e1 = gen.uniform() < e_corner / (e_corner + z_corner)
    if take_e1:
        # Entering zeta column at i = 1, computed up column 1.
        new_zeta = np.empty(m)
        eta_up = e_corner
        for j in range(m):
            s = eta_up + state.zeta_col[j]
            x = state.xi_block[0, j]
            new_zeta[j] = x * (state.zeta_col[j] / s)
            eta_up = x * (eta_up / s)
        new_state = EnvWindowState(
            alpha=state.alpha,
            beta=state.beta,
            eta_row=np.concatenate([state.eta_row[1:], gen.gamma(state.alpha, size=1)]),
            zeta_col=new_zeta,
            xi_block=np.concatenate(
                [state.xi_block[1:, :], gen.gamma(state.rho, size=(1, m))], axis=0
            ),
        )
        return new_state, "e1"
    new_eta = np.empty(m)
    zeta_right = z_corner
    for i in range(m):
        s = state.eta_row[i] + zeta_right
        x = state.xi_block[i, 0]
        new_eta[i] = x * (state.eta_row[i] / s)
        zeta_right = x * (zeta_right / s)
    new_state = EnvWindowState(
        alpha=state.alpha,
        beta=state.beta,
        eta_row=new_eta,
        zeta_col=np.concatenate([state.zeta_col[1:], gen.gamma(state.beta, size=1)]),
        xi_block=np.concatenate(
            [state.xi_block[:, 1:], gen.gamma(state.rho, size=(m, 1))], axis=1
        ),
    )
    return new_state, "e2"


@dataclass(frozen=True)
class ChainRunReport:
    n_steps: int
    e1_frequency: float
    samples: dict
    ks_reports: dict

    def all_pass(self) -> bool:
        return all(r.passed for r in self.ks_reports.values())


def run_env_chain(
    state: EnvWindowState,
    n_steps: int,
    rng: RandomStream,
    burn_in: int = 1000,
    sample_lag: int = 50,
    level: float = 0.01,
    bonferroni: int | None = None,
) -> ChainRunReport:
    """Drive the chain, recording corner-coordinate samples at a lag.

    KS-tests each sampled coordinate against its stationary marginal.
    ``bonferroni`` divides the level across coordinates (defaults to
    the number of tested coordinates).
    """
    collected = {"eta": [], "zeta": [], "xi": []}
    e1_count = 0
    for t in range(n_steps):
        state, step = env_chain_step(state, rng)
        e1_count += step == "e1"
        if t >= burn_in and (t - burn_in) % sample_lag == 0:
            collected["eta"].append(state.eta_row[0])
            collected["zeta"].append(state.zeta_col[0])
            collected["xi"].append(state.xi_block[0, 0])
    samples = {k: np.sort(np.array(v)) for k, v in collected.items()}
    shapes = {"eta": state.alpha, "zeta": state.beta, "xi": state.rho}
    k = bonferroni if bonferroni is not None else len(shapes)
    # The asymptotic threshold table only carries two levels; a
    # Bonferroni split of 5% across <= 5 coordinates is bounded by 1%.
    adj_level = 0.01 if k > 1 else level
    ks_reports = {
        name: ks_test(samples[name], lambda x, s=shapes[name]: gamma_cdf(s, x), level=adj_level)
        for name in samples
    }
    return ChainRunReport(
        n_steps=n_steps,
        e1_frequency=e1_count / n_steps,
        samples=samples,
        ks_reports=ks_reports,
    )


def mixture_cdf(alpha: float, beta: float, site: tuple[int, int]):
    """CDF of the induced corner weight at a fixed site under the
    stationary window law: a binomial-weighted mixture of Gamma(a+b)
    (if the averaged walk passes through the site) and Gamma(a+b+1)."""
    a, b = site
    k = a + b
    p = alpha / (alpha + beta)
    w = comb(k, a) * p**a * (1.0 - p) ** (k - a)
    s0, s1 = alpha + beta, alpha + beta + 1.0

    def cdf(x):
        return w * gamma_cdf(s0, x) + (1.0 - w) * gamma_cdf(s1, x)

    return cdf


def xicheck_path_law_check(
    alpha: float,
    beta: float,
    sites,
    replicates: int,
    rng: RandomStream,
    level: float = 0.01,
) -> dict[tuple[int, int], KsReport]:
    """KS of the corner weight at each site against its mixture law,
    over independent stationary windows."""
    sites = [tuple(s) for s in sites]
    window = max(max(a, b) + 1 for a, b in sites)
    gen = rng.generator
    rho = alpha + beta + 1.0
    eta = np.full((replicates, window + 1, window + 1), np.nan)
    zeta = np.full((replicates, window + 1, window + 1), np.nan)
    eta[:, 1:, 0] = gen.gamma(alpha, size=(replicates, window))
    zeta[:, 0, 1:] = gen.gamma(beta, size=(replicates, window))
    xi = gen.gamma(rho, size=(replicates, window, window))
    for d in range(2, 2 * window + 1):
        i = np.arange(max(1, d - window), min(window, d - 1) + 1)
        j = d - i
        s = eta[:, i, j - 1] + zeta[:, i - 1, j]
        x = xi[:, i - 1, j - 1]
        eta[:, i, j] = x * (eta[:, i, j - 1] / s)
        zeta[:, i, j] = x * (zeta[:, i - 1, j] / s)
    out = {}
    for a, b in sites:
        vals = np.sort(eta[:, a + 1, b] + zeta[:, a, b + 1])
        out[(a, b)] = ks_test(vals, mixture_cdf(alpha, beta, (a, b)), level=level)
    return out


@dataclass(frozen=True)
class SizeBiasCase:
    name: str
    lhs: float
    rhs: float
    lhs_se: float
    rhs_se: float

    @property
    def deviation_se(self) -> float:
        scale = np.hypot(self.lhs_se, self.rhs_se)
        if scale == 0:
            return 0.0 if self.lhs == self.rhs else np.inf
        return abs(self.lhs - self.rhs) / scale


def _mc(values: np.ndarray) -> tuple[float, float]:
    return float(values.mean()), float(values.std(ddof=1) / np.sqrt(values.size))


def size_bias_check(
    alpha: float, beta: float, n_samples: int, rng: RandomStream
) -> list[SizeBiasCase]:
    """Monte Carlo both sides of the beta size-biasing identity.

    The identity: for independent gamma variables and bounded f, g, h,

      E[ B f(G_rho B) g(G_rho (1-B)) h(G_a + G_b) ]
        = a/(a+b) * E f(G_{a+1}) * E g(G_b) * E h(G_{a+b}),

    with B = G_a / (G_a + G_b) and rho = a + b + 1.  Three (f, g, h)
    choices are evaluated; left and right use independent streams.
    """
    rho = alpha + beta + 1.0
    p = alpha / (alpha + beta)
    clip = lambda x: np.minimum(x, 1.0)

    gl = rng.substream("lhs").generator
    ga = gl.gamma(alpha, size=n_samples)
    gb = gl.gamma(beta, size=n_samples)
    grho = gl.gamma(rho, size=n_samples)
    bfrac = ga / (ga + gb)

    gr = rng.substream("rhs").generator
    g_ap1 = gr.gamma(alpha + 1.0, size=n_samples)
    g_b = gr.gamma(beta, size=n_samples)

    cases = []

    lhs, lhs_se = _mc(bfrac)
    cases.append(SizeBiasCase("constant", lhs, p, lhs_se, 0.0))

    lhs, lhs_se = _mc(bfrac * clip(grho * bfrac))
    r_mean, r_se = _mc(clip(g_ap1))
    cases.append(SizeBiasCase("clipped-f", lhs, p * r_mean, lhs_se, p * r_se))

    lhs, lhs_se = _mc(bfrac * clip(grho * bfrac) * clip(grho * (1.0 - bfrac)))
    f_mean, f_se = _mc(clip(g_ap1))
    g_mean, g_se = _mc(clip(g_b))
    rhs = p * f_mean * g_mean
    rhs_se = p * np.hypot(f_mean * g_se, g_mean * f_se)
    cases.append(SizeBiasCase("clipped-f-and-g", lhs, rhs, lhs_se, float(rhs_se)))
    return cases
