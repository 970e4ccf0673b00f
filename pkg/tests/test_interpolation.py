import numpy as np
import pytest

from graphsplines import (
    InterpolationProblem,
    LaplacianKind,
    cycle_graph,
    decompose_graph,
    evaluate,
    lagrange_basis,
    local_lagrange,
    native_semi_inner_product,
    pseudo_inverse_power,
    random_connected_graph,
    sobolev_seminorm,
    solve_interpolant,
    truncated_lagrange,
)
from graphsplines.errors import EmptyNeighborhood, InconsistentDimensions, SingularSystem


@pytest.fixture(scope="module")
def cycle4_setup():
    g = cycle_graph(4)
    s = decompose_graph(g, LaplacianKind.NORMALIZED)
    k = pseudo_inverse_power(s, 2.0)
    return g, s, k


def make_setup(n, rng, n_nodes=None, alpha=2.0):
    g = random_connected_graph(n, rng)
    s = decompose_graph(g, LaplacianKind.NORMALIZED)
    k = pseudo_inverse_power(s, alpha)
    if n_nodes is None:
        return g, s, k
    nodes = np.sort(rng.choice(n, size=n_nodes, replace=False))
    return g, s, k, nodes


class TestSolveInterpolant:
    def test_full_node_set_reproduces_data_exactly(self, cycle4_setup):
        g, s, k = cycle4_setup
        data = np.eye(4)[0]
        p = InterpolationProblem(g, s, k, np.arange(4), data)
        assert np.allclose(evaluate(solve_interpolant(p), p), data, atol=1e-10)

    def test_two_node_symmetry_example(self, cycle4_setup):
        g, s, k = cycle4_setup
        p = InterpolationProblem(g, s, k, np.array([0, 2]), np.array([1.0, 0.0]))
        values = evaluate(solve_interpolant(p), p)
        assert np.allclose(values, [1.0, 0.5, 0.0, 0.5], atol=1e-10)

    def test_constant_data_is_pure_kernel_vector(self, cycle4_setup):
        # on a regular 4-cycle the kernel eigenvector is e/2, so constant 1 = 2 * v0
        g, s, k = cycle4_setup
        p = InterpolationProblem(g, s, k, np.array([0, 2]), np.array([1.0, 1.0]))
        i = solve_interpolant(p)
        assert i.constant == pytest.approx(2.0, rel=1e-12)
        assert np.allclose(i.coefficients, 0.0, atol=1e-12)
        assert np.allclose(evaluate(i, p), 1.0, atol=1e-12)

    def test_side_condition_holds(self):
        rng = np.random.default_rng(0)
        for _ in range(5):
            g, s, k, nodes = make_setup(int(rng.integers(5, 40)), rng, n_nodes=4)
            p = InterpolationProblem(g, s, k, nodes, rng.standard_normal(4))
            i = solve_interpolant(p)
            assert abs(i.coefficients @ s.kernel_vector[nodes]) < 1e-9

    def test_node_data_reproduced(self):
        rng = np.random.default_rng(1)
        g, s, k, nodes = make_setup(30, rng, n_nodes=11)
        data = rng.standard_normal(11)
        p = InterpolationProblem(g, s, k, nodes, data)
        values = evaluate(solve_interpolant(p), p)
        assert np.allclose(values[nodes], data, atol=1e-8)

    def test_value_count_mismatch(self, cycle4_setup):
        g, s, k = cycle4_setup
        with pytest.raises(InconsistentDimensions):
            InterpolationProblem(g, s, k, np.array([0, 2]), np.array([1.0]))

    def test_singular_system_on_extreme_smoothness(self):
        # kernel eigenvalue spread ~ lambda_1^-16 drives the pivot ratio under the floor
        g = cycle_graph(64)
        s = decompose_graph(g, LaplacianKind.NORMALIZED)
        k = pseudo_inverse_power(s, 8.0)
        with pytest.raises(SingularSystem):
            lagrange_basis(k, s, g, np.arange(64))


class TestEvaluate:
    def test_pure_constant_term(self, cycle4_setup):
        g, s, k = cycle4_setup
        p = InterpolationProblem(g, s, k, np.arange(4), np.zeros(4))
        from graphsplines import Interpolant

        i = Interpolant(constant=1.0, coefficients=np.zeros(4), alpha=2.0, nodes=np.arange(4))
        assert np.allclose(evaluate(i, p), s.kernel_vector, atol=1e-14)

    def test_cardinal_data_on_all_vertices(self, cycle4_setup):
        g, s, k = cycle4_setup
        p = InterpolationProblem(g, s, k, np.arange(4), np.eye(4)[2])
        assert np.allclose(evaluate(solve_interpolant(p), p), np.eye(4)[2], atol=1e-10)


class TestNativeSemiInnerProduct:
    def test_kernel_vector_orthogonal_to_everything(self):
        rng = np.random.default_rng(2)
        g, s, k = make_setup(12, rng)
        f = rng.standard_normal(12)
        assert native_semi_inner_product(s, s.kernel_vector, f, 2.0) == pytest.approx(0.0, abs=1e-12)

    def test_eigenvector_orthogonality_and_scaling(self):
        s = decompose_graph(cycle_graph(7), LaplacianKind.NORMALIZED)
        assert native_semi_inner_product(s, s.eigenvectors[:, 1], s.eigenvectors[:, 4], 2.0) == pytest.approx(0.0, abs=1e-12)
        for alpha in (1.0, 2.0, 3.0):
            got = native_semi_inner_product(s, s.eigenvectors[:, 3], s.eigenvectors[:, 3], alpha)
            assert got == pytest.approx(s.eigenvalues[3] ** alpha, rel=1e-12)

    def test_consistent_with_seminorm(self):
        rng = np.random.default_rng(3)
        g, s, k = make_setup(15, rng)
        f = rng.standard_normal(15)
        assert native_semi_inner_product(s, f, f, 2.0) == pytest.approx(
            sobolev_seminorm(s, f, 2.0) ** 2, rel=1e-10
        )


class TestLagrangeBasis:
    def test_all_vertices_gives_unit_vectors(self, cycle4_setup):
        g, s, k = cycle4_setup
        basis = lagrange_basis(k, s, g, np.arange(4))
        assert np.allclose(basis.columns, np.eye(4), atol=1e-10)

    def test_cycle4_half_value(self, cycle4_setup):
        g, s, k = cycle4_setup
        basis = lagrange_basis(k, s, g, np.array([0, 2]))
        assert basis.columns[1, 0] == pytest.approx(0.5, abs=1e-10)

    def test_cardinality(self, cycle256_setup):
        _, _, _, nodes, basis = cycle256_setup
        on_nodes = basis.columns[nodes, :]
        assert np.allclose(on_nodes, np.eye(nodes.size), atol=1e-8)

    def test_far_envelope_much_smaller_than_near(self, cycle256_setup):
        # envelope over one node gap (width 4) so node zeros do not mask the level
        g, _, _, nodes, basis = cycle256_setup
        chi = np.abs(basis.columns[:, 0])
        d = g.metric[0]
        far = chi[d >= 64].max()
        near = chi[np.abs(d - 8) <= 2].max()
        assert far < near / 1e3

    def test_partition_of_unity_on_regular_graph(self, cycle256_setup):
        _, _, _, _, basis = cycle256_setup
        total = basis.columns.sum(axis=1)
        assert np.allclose(total, 1.0, atol=1e-8)

    def test_coefficient_symmetry_matches_inner_products(self):
        rng = np.random.default_rng(4)
        g, s, k, nodes = make_setup(25, rng, n_nodes=8)
        basis = lagrange_basis(k, s, g, nodes)
        coeffs = basis.coefficients
        assert np.abs(coeffs - coeffs.T).max() < 1e-8
        for a in range(0, 8, 3):
            for b in range(1, 8, 2):
                ip = native_semi_inner_product(s, basis.columns[:, a], basis.columns[:, b], 2.0)
                assert ip == pytest.approx(coeffs[b, a], abs=1e-8)

    def test_reproduces_expansions_of_the_same_form(self):
        rng = np.random.default_rng(5)
        g, s, k, nodes = make_setup(20, rng, n_nodes=6)
        beta = rng.standard_normal(6)
        u = s.kernel_vector[nodes]
        beta -= (beta @ u) / (u @ u) * u  # admissible coefficients satisfy the side condition
        f = k.matrix[:, nodes] @ beta + 1.7 * s.kernel_vector
        p = InterpolationProblem(g, s, k, nodes, f[nodes])
        assert np.allclose(evaluate(solve_interpolant(p), p), f, atol=1e-8)


class TestMinimalNorm:
    def test_orthogonality_and_minimality(self):
        rng = np.random.default_rng(6)
        g, s, k, nodes = make_setup(30, rng, n_nodes=9)
        p = InterpolationProblem(g, s, k, nodes, rng.standard_normal(9))
        s_fun = evaluate(solve_interpolant(p), p)
        s_norm = sobolev_seminorm(s, s_fun, 2.0)
        for _ in range(20):
            perturbation = rng.standard_normal(30)
            perturbation[nodes] = 0.0
            ip = native_semi_inner_product(s, perturbation, s_fun, 2.0)
            assert abs(ip) < 1e-8 * max(1.0, sobolev_seminorm(s, perturbation, 2.0) * s_norm)
            assert sobolev_seminorm(s, s_fun + perturbation, 2.0) >= s_norm * (1 - 1e-12)


class TestTruncatedLagrange:
    def test_radius_beyond_diameter_is_exact(self, cycle256_setup):
        _, _, _, _, basis = cycle256_setup
        chi = basis.columns[:, 0]
        trunc = truncated_lagrange(basis, 0, 128.0)
        assert np.abs(trunc - chi).max() < 1e-10

    def test_single_kept_coefficient_is_projected_to_zero(self, cycle256_setup):
        g, s, k, nodes, basis = cycle256_setup
        # radius below the node spacing keeps only the center; the projection
        # against a single nonzero entry zeroes it, leaving the constant term
        trunc = truncated_lagrange(basis, 0, 1.0)
        expected = basis.constants[basis.center_index(0)] * s.kernel_vector
        assert np.allclose(trunc, expected, atol=1e-12)

    def test_projection_can_be_disabled(self, cycle256_setup):
        g, s, k, nodes, basis = cycle256_setup
        raw = truncated_lagrange(basis, 0, 1.0, reimpose_side_condition=False)
        j = basis.center_index(0)
        expected = k.matrix[:, [0]] @ basis.coefficients[[j], j] + basis.constants[j] * s.kernel_vector
        assert np.allclose(raw, expected, atol=1e-12)

    def test_truncation_error_against_tail_mass(self, cycle256_setup):
        g, _, k, nodes, basis = cycle256_setup
        chi = basis.columns[:, 0]
        kernel_sup = np.abs(k.matrix).max()
        for radius, recorded in ((16.0, 3.5), (32.0, 3.5e-2), (64.0, 1e-6)):
            trunc = truncated_lagrange(basis, 0, radius)
            dropped = g.metric[0, nodes] > radius
            tail_mass = np.abs(basis.coefficients[dropped, 0]).sum()
            diff = np.abs(trunc - chi).max()
            assert diff <= 10.0 * tail_mass * kernel_sup
            assert diff <= recorded  # regression bound from the dense-solve run


class TestLocalLagrange:
    def test_radius_beyond_diameter_matches_full(self, cycle256_setup):
        g, s, k, nodes, basis = cycle256_setup
        chi = basis.columns[:, 0]
        local = local_lagrange(k, s, g, nodes, 0, 128.0)
        assert np.abs(local - chi).max() < 1e-8

    def test_cardinality_on_neighborhood(self, cycle256_setup):
        g, s, k, nodes, _ = cycle256_setup
        local = local_lagrange(k, s, g, nodes, 0, 24.0)
        inside = nodes[g.metric[0, nodes] <= 24.0]
        expected = (inside == 0).astype(float)
        assert np.allclose(local[inside], expected, atol=1e-8)

    def test_center_must_be_a_node(self, cycle256_setup):
        g, s, k, nodes, _ = cycle256_setup
        with pytest.raises(ValueError):
            local_lagrange(k, s, g, nodes, 1, 4.0)

    def test_config_validates_radius_and_neighborhood(self, cycle256_setup):
        from graphsplines import LocalLagrangeConfig

        g, _, _, nodes, _ = cycle256_setup
        with pytest.raises(ValueError):
            LocalLagrangeConfig(center=0, radius=0.0)
        cfg = LocalLagrangeConfig(center=0, radius=5.0)
        assert 0 in cfg.nodes_within(g, nodes)
        with pytest.raises(EmptyNeighborhood):
            LocalLagrangeConfig(center=1, radius=0.5).nodes_within(g, nodes)
