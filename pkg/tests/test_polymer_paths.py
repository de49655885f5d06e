"""Quenched path sampling, the environment walk, and zero temperature."""

import numpy as np
import pytest

from lgpolymer import partition as pt
from lgpolymer import polymer_paths as pp
from lgpolymer.gamma_system import ModelParams, build_gamma_system
from lgpolymer.specfun import gamma_cdf
from lgpolymer.stats import ks_test, slope_fit
from lgpolymer.streams import RandomStream

SI = pt.WeightConvention.START_INCLUDED
EI = pt.WeightConvention.END_INCLUDED


def iid_weights(shape, seed, rho=2.0):
    return RandomStream(seed).generator.gamma(rho, size=shape)


@pytest.fixture(scope="module")
def system():
    return build_gamma_system(ModelParams(lam=1.0, rho=2.2, m=30, n=30, seed=3))


class TestLatticePath:
    def test_points_and_end(self):
        path = pp.LatticePath(start=(1, 2), steps=np.array([0, 1, 0], dtype=np.int8))
        pts = path.points()
        assert pts.tolist() == [[1, 2], [2, 2], [2, 3], [3, 3]]
        assert path.end == (3, 3)

    def test_exit_stats(self):
        path = pp.LatticePath(start=(0, 0), steps=np.array([0, 0, 1, 0], dtype=np.int8))
        assert path.exit_stats() == (2, 0)
        path = pp.LatticePath(start=(0, 0), steps=np.array([1, 1, 1], dtype=np.int8))
        assert path.exit_stats() == (0, 3)


class TestQuenchedSampling:
    def test_empty_path(self):
        w = iid_weights((5, 5), 1)
        grid = pt.log_partition(w, (2, 2), EI)
        path = pp.sample_quenched_path(grid, (2, 2), RandomStream(0))
        assert len(path) == 0

    def test_path_frequencies_match_enumeration(self):
        # Every path on a 4x4 square, compared at 4 binomial errors.
        w = iid_weights((5, 5), 2)
        grid = pt.log_partition(w, (0, 0), EI)
        count = 1_000_000
        steps = pp.sample_quenched_endsteps(grid, (4, 4), RandomStream(5), count)
        codes = steps @ (1 << np.arange(8))
        freq = np.bincount(codes, minlength=256) / count

        z = pt.brute_force_partition(w, (0, 0), (4, 4), EI)
        worst = 0.0
        checked = 0
        import itertools

        for positions in itertools.combinations(range(8), 4):
            s = np.zeros(8, dtype=np.int64)
            s[list(positions)] = 1
            path = pp.LatticePath(start=(0, 0), steps=1 - s)
            pts = path.points()[1:]
            logp = -np.log(w[pts[:, 0], pts[:, 1]]).sum() - z
            p = np.exp(logp)
            code = int(((1 - s) << np.arange(8)).sum())
            se = np.sqrt(p * (1 - p) / count)
            worst = max(worst, abs(freq[code] - p) / se)
            checked += 1
        assert checked == 70
        assert worst < 4.0

    def test_start_included_grid_gives_same_measure(self):
        w = iid_weights((5, 5), 3)
        grid_e = pt.log_partition(w, (0, 0), EI)
        grid_s = pt.log_partition(w, (0, 0), SI)
        a = pp.sample_quenched_path(grid_e, (3, 4), RandomStream(9))
        b = pp.sample_quenched_path(grid_s, (3, 4), RandomStream(9), weights=w)
        assert np.array_equal(a.steps, b.steps)

    def test_nesting_by_direct_probability(self):
        # Conditional on passing through a mid box, inner segments follow
        # the inner polymer law; checked by exact enumeration.
        w = iid_weights((7, 7), 4)
        u, z, v_mid, v = (0, 0), (1, 1), (3, 2), (5, 4)
        logz_uz = pt.brute_force_partition(w, u, z, EI)
        logz_mid_v = pt.brute_force_partition(w, v_mid, v, EI)
        logz_uv = pt.brute_force_partition(w, u, v, EI)
        logz_zmid = pt.brute_force_partition(w, z, v_mid, EI)

        # P(path hits z then traverses a fixed segment y to v_mid | hits z and v_mid)
        seg = pp.LatticePath(start=z, steps=np.array([0, 1, 0], dtype=np.int8))
        pts = seg.points()[1:]
        log_w_seg = -np.log(w[pts[:, 0], pts[:, 1]]).sum()
        lhs = np.exp(log_w_seg - logz_zmid)

        # Direct ratio of restricted partition sums in the full box.
        num = logz_uz + log_w_seg + logz_mid_v
        den = logz_uz + logz_zmid + logz_mid_v
        assert np.exp(num - den) == pytest.approx(lhs, rel=1e-12)


class TestRwre:
    def test_transition_formula(self, system):
        p = pp.rwre_transition(system, (2, 3))
        e = system.eta[3, 3]
        z = system.zeta[2, 4]
        assert p == pytest.approx(e / (e + z), rel=1e-15)
        assert p == pytest.approx(2 / 3, abs=0.5)  # sanity: a probability

    def test_transitions_sum_to_one(self, system):
        # The denominator is the corner weight, an exact lattice identity;
        # the two normalized probabilities then sum to 1 up to one ulp.
        for x in [(0, 0), (3, 5), (10, 2)]:
            p1 = pp.rwre_transition(system, x)
            e = system.eta[x[0] + 1, x[1]]
            z = system.zeta[x[0], x[1] + 1]
            assert e + z == system.xicheck[x]
            assert p1 + z / (e + z) == pytest.approx(1.0, abs=1e-15)

    def test_marginal_identity(self, system):
        assert pp.rwre_marginal_identity_error(system, 6) < 1e-12

    def test_conditional_identity(self, system):
        for target in [(3, 3), (4, 2), (1, 5)]:
            assert pp.rwre_conditional_identity_error(system, target) < 1e-12

    def test_walk_stays_in_box_and_is_deterministic(self, system):
        a = pp.rwre_sample(system, 20, RandomStream(1).substream("w"))
        b = pp.rwre_sample(system, 20, RandomStream(1).substream("w"))
        assert np.array_equal(a.steps, b.steps)
        assert a.end[0] + a.end[1] == 20
        with pytest.raises(ValueError):
            pp.rwre_sample(system, 31, RandomStream(2))

    def test_one_step_deviation_closed_form(self, system):
        # E|X_1 - u|_1 has a two-point closed form per environment.
        u1 = 0.37
        p = pp.rwre_transition(system, (0, 0))
        expect = p * 2 * (1 - u1) + (1 - p) * 2 * u1
        profile = pp.walk_deviation_profile(
            1.0, 2.2, [1], 200_000, RandomStream(3), u1
        )
        # Same environment? walk_deviation_profile draws its own; compare
        # against its own first-step kernel instead.
        env_p = None
        from lgpolymer.gamma_system import DiagonalEnvironment

        env = DiagonalEnvironment(1.0, 2.2, 1, RandomStream(3).substream("weights"))
        env_p = float(env.step_probabilities(np.array([0]))[0])
        expect = env_p * 2 * (1 - u1) + (1 - env_p) * 2 * u1
        got = profile[0].mean()
        se = profile[0].std(ddof=1) / np.sqrt(profile.shape[1])
        assert abs(got - expect) < 4 * se


class TestMeasureConvergence:
    def test_empty_prefix(self, system):
        empty = pp.LatticePath(start=(0, 0), steps=np.zeros(0, dtype=np.int8))
        assert pp.measure_convergence_check(system, empty, (20, 20)) == (1.0, 1.0)

    def test_exact_substitution_closes_gap(self, system):
        # Replacing partition ratios by the system's own edge weights
        # reproduces the walk probability exactly.
        prefix = pp.LatticePath(start=(0, 0), steps=np.array([0, 1, 0], dtype=np.int8))
        pts = prefix.points()
        q_exact = 1.0
        for (a, b), s in zip(pts[:-1], prefix.steps):
            tau = system.eta[a + 1, b] if s == 0 else system.zeta[a, b + 1]
            q_exact *= tau / system.xicheck[a, b]
        p = 1.0
        for (a, b), s in zip(pts[:-1], prefix.steps):
            pr = pp.rwre_transition(system, (a, b))
            p *= pr if s == 0 else 1.0 - pr
        assert q_exact == pytest.approx(p, rel=1e-14)

    def test_gap_shrinks_with_size(self):
        # The polymer-vs-walk gap per environment has heavy tails, so the
        # trend statistic is a median over environments of the two
        # one-step prefix gaps; it shrinks as the endpoint recedes along
        # the characteristic direction.
        sizes = [(24, 24), (48, 48), (96, 96)]
        n_env = 60
        gaps = np.zeros((n_env, 3))
        e1_prefix = pp.LatticePath(start=(0, 0), steps=np.array([0], dtype=np.int8))
        e2_prefix = pp.LatticePath(start=(0, 0), steps=np.array([1], dtype=np.int8))
        for k in range(n_env):
            env_sys = build_gamma_system(
                ModelParams(lam=1.0, rho=2.0, m=97, n=97, seed=0),
                rng=RandomStream(8).substream("env", k),
            )
            for s, mn in enumerate(sizes):
                q1, p1 = pp.measure_convergence_check(env_sys, e1_prefix, mn)
                q2, p2 = pp.measure_convergence_check(env_sys, e2_prefix, mn)
                gaps[k, s] = 0.5 * (abs(q1 - p1) + abs(q2 - p2))
        med = np.median(gaps, axis=0)
        assert med[2] < med[0], med


class TestLpp:
    def test_constant_weights(self):
        w = np.full((6, 6), 0.7)
        grid = pp.lpp_grid(w)
        assert grid.values[3, 2] == pytest.approx(5 * 0.7, rel=1e-14)

    def test_geodesic_achieves_value(self):
        w = iid_weights((8, 8), 31)
        grid = pp.lpp_grid(w)
        path = pp.lpp_geodesic(grid, (6, 7))
        pts = path.points()[1:]
        assert w[pts[:, 0], pts[:, 1]].sum() == pytest.approx(grid.values[6, 7], rel=1e-12)

    def test_geodesic_subpath_property(self):
        w = iid_weights((8, 8), 32)
        grid = pp.lpp_grid(w)
        path = pp.lpp_geodesic(grid, (7, 7))
        pts = path.points()
        # Every intermediate point's geodesic is the corresponding prefix.
        mid = pts[7]
        prefix = pp.lpp_geodesic(grid, (int(mid[0]), int(mid[1])))
        assert np.array_equal(prefix.steps, path.steps[:7])

    def test_interface_follows_minimum_rule_with_no_ties(self):
        w = iid_weights((10, 10), 33)
        grid = pp.lpp_grid(w)
        interface, ties = pp.competition_interface(grid)
        assert ties == 0
        x = [0, 0]
        for s in interface.steps:
            a = grid.values[x[0] + 1, x[1]]
            b = grid.values[x[0], x[1] + 1]
            assert (s == 0) == (a < b)
            x[s] += 1

    def test_batched_lpp(self):
        w = RandomStream(34).generator.gamma(2.0, size=(5, 6, 6))
        grid = pp.lpp_grid(w)
        for k in range(5):
            single = pp.lpp_grid(w[k])
            assert np.allclose(grid.values[k], single.values, equal_nan=True, rtol=0, atol=0)


class TestDegenerateChain:
    def test_single_corner_values(self):
        assert pp.degenerate_ij_step(3.0, 1.0) == (2.0, 0.0)
        assert pp.degenerate_ij_step(1.0, 3.0) == (0.0, 2.0)

    def test_interface_step_rule(self):
        # The first step goes toward the strictly smaller increment.
        freq, i_samp, j_samp = pp.degenerate_ij_chain(
            1.0, 1.0, 400, 4, RandomStream(7), burn_in=0, sample_lag=1
        )
        assert 0.3 < freq < 0.7

    def test_stationary_marginals(self):
        alpha, beta = 0.8, 1.3
        freq, i_samp, j_samp = pp.degenerate_ij_chain(
            alpha, beta, 30_000, 4, RandomStream(11), burn_in=1000, sample_lag=10
        )
        ri = ks_test(np.sort(i_samp), lambda x: 1 - np.exp(-alpha * x), level=0.01)
        rj = ks_test(np.sort(j_samp), lambda x: 1 - np.exp(-beta * x), level=0.01)
        assert ri.passed, str(ri)
        assert rj.passed, str(rj)


class TestDeviationProfiles:
    def test_homogeneous_control_slope_near_half(self):
        n_list = [64, 128, 256, 512, 1024]
        prof = pp.homogeneous_deviation_profile(n_list, 4000, RandomStream(21))
        fit = slope_fit(np.log(n_list), np.log(prof.mean(axis=1)))
        assert 0.42 < fit.slope < 0.58

    def test_profile_shape_and_growth(self):
        # Growth of the mean deviation holds averaged over environments,
        # not pathwise in a single one.
        acc = np.zeros(2)
        for k in range(30):
            prof = pp.walk_deviation_profile(
                1.0, 2.0, [16, 64], 20, RandomStream(22).substream("env", k), 0.5
            )
            assert prof.shape == (2, 20)
            acc += prof.mean(axis=1)
        assert acc[1] > acc[0]


class TestOverlap:
    def test_identical_streams_full_overlap(self, system):
        a = pp.rwre_sample(system, 15, RandomStream(5).substream("x"))
        b = pp.rwre_sample(system, 15, RandomStream(5).substream("x"))
        assert np.array_equal(a.steps, b.steps)

    def test_homogeneous_overlap_decays(self):
        # Control: independent symmetric walks collide at rate ~ 1/sqrt(t).
        gen = RandomStream(6).generator
        n, pairs = 400, 300
        steps_a = gen.integers(0, 2, size=(pairs, n))
        steps_b = gen.integers(0, 2, size=(pairs, n))
        pos_a = np.cumsum(steps_a, axis=1)
        pos_b = np.cumsum(steps_b, axis=1)
        first = (pos_a[:, :50] == pos_b[:, :50]).mean()
        last = (pos_a[:, -50:] == pos_b[:, -50:]).mean()
        assert last < first

    def test_stationary_overlap_is_positive(self, system):
        frac = pp.overlap_fractions(system, 30, 300, RandomStream(9))
        assert frac.shape == (300,)
        assert 0.0 < frac.mean() <= 1.0
