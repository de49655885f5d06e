"""Environment-seen-from-particle chain and its stationary window law."""

import numpy as np
import pytest

from lgpolymer import env_chain as ec
from lgpolymer.specfun import gamma_cdf
from lgpolymer.stats import ks_test
from lgpolymer.streams import RandomStream


class TestInit:
    def test_marginals(self):
        alpha, beta = 0.75, 1.25
        draws = np.sort(
            [ec.mu_ab_init(alpha, beta, 2, RandomStream(1).substream(k)).eta_row[0] for k in range(10_000)]
        )
        report = ks_test(draws, lambda x: gamma_cdf(alpha, x), level=0.01)
        assert report.passed, str(report)

    def test_rho_offset_by_one(self):
        state = ec.mu_ab_init(0.5, 0.7, 3, RandomStream(2))
        assert state.rho == pytest.approx(2.2)

    def test_symmetric_parameters_mirror_marginals(self):
        state = ec.mu_ab_init(0.9, 0.9, 4, RandomStream(3))
        # With alpha = beta the row and column laws coincide by symmetry
        # of the construction; shapes agree, draws differ.
        assert state.eta_row.shape == state.zeta_col.shape

    def test_validation(self):
        with pytest.raises(ValueError):
            ec.mu_ab_init(0.0, 1.0, 3, RandomStream(1))
        with pytest.raises(ValueError):
            ec.mu_ab_init(1.0, 1.0, 0, RandomStream(1))


class TestCornerWeight:
    def test_origin_is_sum_of_corner_edges(self):
        state = ec.mu_ab_init(0.75, 0.75, 3, RandomStream(4))
        assert ec.xicheck_at(state, (0, 0)) == state.eta_row[0] + state.zeta_col[0]

    def test_origin_law_is_gamma_alpha_plus_beta(self):
        alpha, beta = 0.75, 0.75
        gen_stream = RandomStream(5)
        vals = np.sort(
            [
                ec.xicheck_at(ec.mu_ab_init(alpha, beta, 1, gen_stream.substream(k)), (0, 0))
                for k in range(20_000)
            ]
        )
        report = ks_test(vals, lambda x: gamma_cdf(alpha + beta, x), level=0.01)
        assert report.passed, str(report)

    def test_window_bound(self):
        state = ec.mu_ab_init(0.5, 0.5, 2, RandomStream(6))
        with pytest.raises(ValueError):
            ec.xicheck_at(state, (2, 0))


class TestStep:
    def test_step_probability_formula(self):
        # Freeze the corner: with eta = a and zeta = b the e1-rate is a/(a+b).
        alpha = beta = 1.0
        hits = 0
        trials = 40_000
        rng = RandomStream(7)
        for k in range(trials):
            state = ec.mu_ab_init(alpha, beta, 1, RandomStream(1000))
            state.eta_row[0] = 2.0
            state.zeta_col[0] = 1.0
            _, step = ec.env_chain_step(state, rng.substream(k))
            hits += step == "e1"
        p_hat = hits / trials
        se = np.sqrt((2 / 3) * (1 / 3) / trials)
        assert abs(p_hat - 2 / 3) < 4 * se

    def test_step_refreshes_window_shapes(self):
        state = ec.mu_ab_init(0.6, 1.1, 4, RandomStream(8))
        new_state, step = ec.env_chain_step(state, RandomStream(9))
        assert new_state.eta_row.shape == (4,)
        assert new_state.zeta_col.shape == (4,)
        assert new_state.xi_block.shape == (4, 4)
        assert step in ("e1", "e2")

    def test_e1_shift_moves_row(self):
        state = ec.mu_ab_init(0.6, 1.1, 4, RandomStream(10))
        state.eta_row[0] = 1e12  # force the e1 branch
        new_state, step = ec.env_chain_step(state, RandomStream(11))
        assert step == "e1"
        assert np.array_equal(new_state.eta_row[:3], state.eta_row[1:])
        assert np.array_equal(new_state.xi_block[:3], state.xi_block[1:])

    def test_ne_window_matches_direct_recursion(self):
        state = ec.mu_ab_init(0.8, 0.9, 3, RandomStream(12))
        eta, zeta = ec.ne_window(state)
        s = state.eta_row[0] + state.zeta_col[0]
        assert eta[1, 1] == pytest.approx(state.xi_block[0, 0] * state.eta_row[0] / s)
        assert zeta[1, 1] == pytest.approx(state.xi_block[0, 0] * state.zeta_col[0] / s)


class TestRun:
    def test_short_stationary_run(self):
        alpha = beta = 0.75
        state = ec.mu_ab_init(alpha, beta, 4, RandomStream(13))
        report = ec.run_env_chain(state, 20_000, RandomStream(14), burn_in=500, sample_lag=25)
        se = 0.5 / np.sqrt(20_000)
        assert abs(report.e1_frequency - 0.5) < 4 * se
        assert report.all_pass(), {k: str(v) for k, v in report.ks_reports.items()}


class TestMixtureLaw:
    def test_mixture_weight_at_origin_is_one(self):
        cdf = ec.mixture_cdf(0.75, 0.75, (0, 0))
        # Pure Gamma(alpha+beta): matches the plain CDF everywhere.
        x = np.linspace(0.01, 8, 50)
        assert np.allclose(cdf(x), gamma_cdf(1.5, x), atol=1e-14)

    def test_symmetric_single_step_weight_is_half(self):
        alpha = beta = 0.75
        cdf = ec.mixture_cdf(alpha, beta, (1, 0))
        x = np.linspace(0.01, 8, 50)
        expect = 0.5 * gamma_cdf(1.5, x) + 0.5 * gamma_cdf(2.5, x)
        assert np.allclose(cdf(x), expect, atol=1e-14)

    def test_far_site_weight_vanishes(self):
        # A site far off any n-step path: binomial weight ~ 0 for large k.
        cdf = ec.mixture_cdf(0.2, 5.0, (40, 0))
        x = np.linspace(0.01, 8, 20)
        assert np.allclose(cdf(x), gamma_cdf(6.2, x), atol=1e-8)

    def test_path_law_check_passes(self):
        reports = ec.xicheck_path_law_check(
            0.75, 0.75, [(0, 0), (1, 0), (1, 1)], 30_000, RandomStream(15)
        )
        for site, rep in reports.items():
            assert rep.passed, f"{site}: {rep}"


class TestSizeBias:
    def test_three_cases_within_four_se(self):
        cases = ec.size_bias_check(0.9, 1.4, 200_000, RandomStream(16))
        assert len(cases) == 3
        assert cases[0].deviation_se < 3.0, cases[0]
        for case in cases[1:]:
            assert case.deviation_se < 4.0, case

    def test_constant_case_matches_exact_fraction(self):
        case = ec.size_bias_check(2.0, 3.0, 100_000, RandomStream(17))[0]
        assert case.rhs == pytest.approx(0.4)
        assert abs(case.lhs - 0.4) < 5 * case.lhs_se
