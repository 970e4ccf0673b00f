import numpy as np
import pytest
import scipy.linalg

from graphsplines import (
    DecayProfile,
    LaplacianKind,
    build_graph,
    bulk_ratio,
    cycle_cover_constant,
    cycle_graph,
    decay_profile,
    decay_scale,
    decompose_graph,
    fill_distance,
    fit_exponential_decay,
    graph_metrics,
    laplacian,
    lattice_graph,
    ml_cover_constant,
    random_connected_graph,
    zeros_bound_ratio,
    zeros_lemma_check,
)
from graphsplines.diagnostics import random_known_unknown_graph
from graphsplines.errors import (
    DegenerateDenominator,
    HypothesisViolated,
    InsufficientData,
    NotACycle,
    TooFewNodes,
)


class TestDecayProfile:
    def test_indicator_function(self):
        g = cycle_graph(8)
        p = decay_profile(np.eye(8)[0], g, 0, 1.0)
        assert p.envelopes[0] == 1.0
        assert np.all(p.envelopes[1:] == 0.0)

    def test_constant_function(self):
        g = cycle_graph(8)
        p = decay_profile(np.ones(8), g, 0, 1.0)
        assert np.all(p.envelopes == 1.0)
        assert np.all(np.diff(p.distances) > 0)

    def test_every_vertex_in_exactly_one_bin(self):
        g = random_connected_graph(20, np.random.default_rng(1))
        f = np.random.default_rng(2).standard_normal(20)
        p = decay_profile(f, g, 3, 0.7)
        d = g.metric[3]
        counts = sum(int(np.sum(np.floor(d / 0.7 + 0.5) == round(dist / 0.7))) for dist in p.distances)
        assert counts == 20

    def test_lagrange_envelope_decreases_over_reliable_range(self, cycle256_setup):
        g, _, _, nodes, basis = cycle256_setup
        p = decay_profile(basis.columns[:, 0], g, 0, 4.0)
        reliable = p.envelopes > 1e-10
        assert np.all(np.diff(p.envelopes[reliable][1:]) < 0)


class TestFitExponentialDecay:
    def test_exact_log_linear_data_recovered(self):
        d = np.arange(11.0)
        profile = DecayProfile(center=0, distances=d, envelopes=2.0 * np.exp(-0.5 * d))
        fit = fit_exponential_decay(profile)
        assert fit.slope == pytest.approx(-0.5, abs=1e-10)
        assert fit.amplitude == pytest.approx(2.0, rel=1e-10)
        assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
        assert not fit.no_decay

    def test_rate_reparametrized_by_scale(self):
        d = np.arange(6.0)
        profile = DecayProfile(center=0, distances=d, envelopes=np.exp(-0.5 * d))
        scale = decay_scale(2.0, 1.0)  # 1 / 11
        fit = fit_exponential_decay(profile, scale=scale)
        assert fit.rate == pytest.approx(np.exp(-0.5 / scale), rel=1e-10)
        assert 0 < fit.rate < 1

    def test_constant_envelope_flags_no_decay(self):
        profile = DecayProfile(center=0, distances=np.arange(5.0), envelopes=np.ones(5))
        fit = fit_exponential_decay(profile)
        assert fit.no_decay
        assert fit.slope == pytest.approx(0.0, abs=1e-12)

    def test_insufficient_positive_bins(self):
        profile = DecayProfile(center=0, distances=np.arange(4.0), envelopes=np.array([1.0, 0.5, 0.0, 0.0]))
        with pytest.raises(InsufficientData):
            fit_exponential_decay(profile)


class TestBulkRatio:
    def test_below_one_on_cycle(self, cycle256_setup):
        g, s, _, nodes, basis = cycle256_setup
        chi = basis.columns[:, 0]
        h = fill_distance(g, nodes)
        rho_max = graph_metrics(g).rho_max
        r2 = 3 * rho_max + 2 * h + 1
        assert bulk_ratio(chi, s, g, 0, r2, r2 + 8, h, rho_max) < 1.0

    def test_nonincreasing_in_r3(self, cycle256_setup):
        g, s, _, nodes, basis = cycle256_setup
        chi = basis.columns[:, 0]
        h, rho_max = 2.0, 1.0
        r2 = 10.0
        ratios = [bulk_ratio(chi, s, g, 0, r2, r3, h, rho_max) for r3 in (12.0, 16.0, 20.0, 24.0)]
        assert all(b <= a + 1e-12 for a, b in zip(ratios, ratios[1:]))

    def test_degenerate_when_function_has_no_tail(self):
        g = cycle_graph(64)
        s = decompose_graph(g, LaplacianKind.NORMALIZED)
        # an indicator at the center: L f is supported within distance 1,
        # so the semi-norm outside radius r1 = 4 vanishes identically
        f = np.eye(64)[0]
        with pytest.raises(DegenerateDenominator):
            bulk_ratio(f, s, g, 0, 10.0, 14.0, 1.0, 1.0)

    def test_inadmissible_radii_rejected(self, cycle256_setup):
        g, s, _, nodes, basis = cycle256_setup
        with pytest.raises(ValueError):
            bulk_ratio(basis.columns[:, 0], s, g, 0, 5.0, 9.0, 2.0, 1.0)


class TestZerosBound:
    def test_two_vertex_bound_is_tight(self):
        g = build_graph([(0, 1, 1.0, 1.0)])
        s = decompose_graph(g, LaplacianKind.UNNORMALIZED)
        assert zeros_bound_ratio(s, np.array([0.0, 1.0]), 2.0) == pytest.approx(1.0, abs=1e-12)

    def test_zero_function_skipped(self):
        g = build_graph([(0, 1, 1.0, 1.0)])
        s = decompose_graph(g, LaplacianKind.UNNORMALIZED)
        assert zeros_bound_ratio(s, np.zeros(2), 2.0) == 0.0

    def test_random_graphs_never_violate(self):
        rng = np.random.default_rng(21)
        for _ in range(15):
            g = random_connected_graph(int(rng.integers(2, 40)), rng)
            for alpha in (1.0, 2.0, 4.0):
                report = zeros_lemma_check(g, alpha, trials=4, seed=int(rng.integers(2**31)))
                assert report.passed
                assert report.max_ratio <= 1.0 + 1e-9


class TestCycleCoverConstant:
    def test_all_vertices_are_nodes(self):
        # every covering path has a single interior vertex with diagonal 1
        assert cycle_cover_constant(cycle_graph(6), np.arange(6)) == pytest.approx(2.0, rel=1e-12)

    def test_every_other_vertex_against_direct_eigensolve(self):
        g = cycle_graph(8)
        L = laplacian(g, LaplacianKind.NORMALIZED)
        interior = [1, 2, 3]  # interior of the path spanning nodes 0 -> 2 -> 4
        lam = scipy.linalg.eigh(L[np.ix_(interior, interior)], eigvals_only=True)[0]
        expected = 2.0 * (1.0 / lam) ** 2
        assert cycle_cover_constant(g, [0, 2, 4, 6]) == pytest.approx(expected, rel=1e-12)

    def test_rotation_invariance(self):
        g = cycle_graph(12)
        base = cycle_cover_constant(g, [0, 3, 6, 9])
        for shift in (1, 2, 5):
            rotated = cycle_cover_constant(g, (np.array([0, 3, 6, 9]) + shift) % 12)
            assert rotated == pytest.approx(base, rel=1e-12)

    def test_odd_node_count_wraps(self):
        g = cycle_graph(9)
        constant = cycle_cover_constant(g, [0, 3, 6])
        assert np.isfinite(constant) and constant > 0

    def test_two_nodes_allowed(self):
        assert cycle_cover_constant(cycle_graph(6), [0, 3]) > 0

    def test_not_a_cycle(self):
        with pytest.raises(NotACycle):
            cycle_cover_constant(lattice_graph(3, 3), [0, 4])

    def test_too_few_nodes(self):
        with pytest.raises(TooFewNodes):
            cycle_cover_constant(cycle_graph(6), [2])


class TestMLCoverConstant:
    def test_formula_for_max_degree_two(self):
        g = build_graph([(0, 1, 1.0, 1.0), (1, 2, 1.0, 1.0)])
        report = ml_cover_constant(g, known=[0, 2])
        assert report.max_degree == 2
        assert report.formula_bound == 64 * 3**4 * 2**5  # 165888
        assert report.empirical_bound <= report.formula_bound

    def test_unknown_unknown_edge_rejected(self):
        g = build_graph([(0, 1, 1.0, 1.0), (1, 2, 1.0, 1.0)])
        with pytest.raises(HypothesisViolated):
            ml_cover_constant(g, known=[0])

    def test_short_edge_rejected(self):
        g = build_graph([(0, 1, 1.0, 1.0), (1, 2, 4.0, 0.25)])
        with pytest.raises(HypothesisViolated):
            ml_cover_constant(g, known=[0, 2])

    def test_weight_not_inverse_length_rejected(self):
        g = build_graph([(0, 1, 2.0, 1.0), (1, 2, 1.0, 1.0)])
        with pytest.raises(HypothesisViolated):
            ml_cover_constant(g, known=[0, 2])

    def test_star_with_unknown_center(self):
        edges = [(0, i, 1.0, 1.0) for i in range(1, 6)]
        g = build_graph(edges, 6)
        report = ml_cover_constant(g, known=np.arange(1, 6))
        assert report.empirical_bound <= report.formula_bound
        assert report.min_dirichlet > 0

    def test_random_split_graphs_satisfy_bound(self):
        rng = np.random.default_rng(31)
        for _ in range(10):
            g, known = random_known_unknown_graph(int(rng.integers(2, 10)), int(rng.integers(1, 10)), rng)
            report = ml_cover_constant(g, known)
            assert report.empirical_bound <= report.formula_bound
