"""Kernel interpolation with a side condition, and Lagrange-type bases.

The interpolant through data ``F`` on a node set ``V~`` has the form
``C * v0 + sum_{v in V~} beta_v * Phi(., v)`` where ``v0`` is the kernel
eigenvector of the Laplacian and ``Phi`` the pseudo-inverse-power kernel.
The coefficients solve the bordered symmetric system

    [ Phi~   v0~ ] [ beta ]   [ F ]
    [ v0~^T   0  ] [  C   ] = [ 0 ]

with ``Phi~`` the kernel submatrix on the nodes and ``v0~`` the kernel
eigenvector restricted to them; the last row is the side condition that makes
``beta`` orthogonal to ``v0~``. One factorization of the bordered matrix is
reused for all right-hand sides (the Lagrange basis needs one per node).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from .errors import (
    DimensionMismatch,
    EmptyNeighborhood,
    InconsistentDimensions,
    NonPositiveAlpha,
    SingularSystem,
)
from .graphs import WeightedGraph
from .spectral import KernelMatrix, SpectralDecomposition

PIVOT_RATIO_FLOOR = 1e-12


def _block_pivot_magnitudes(d: np.ndarray) -> np.ndarray:
    """Eigenvalue magnitudes of the 1x1 / 2x2 pivot blocks of an LDL^T factor."""
    n = d.shape[0]
    mags = []
    i = 0
    while i < n:
        if i + 1 < n and d[i, i + 1] != 0.0:
            a, b, c = d[i, i], d[i, i + 1], d[i + 1, i + 1]
            disc = np.sqrt(max((a - c) ** 2 + 4 * b * b, 0.0))
            mags.append(abs((a + c + disc) / 2.0))
            mags.append(abs((a + c - disc) / 2.0))
            i += 2
        else:
            mags.append(abs(d[i, i]))
            i += 1
    return np.asarray(mags)


class SymmetricIndefiniteSolver:
    """LDL^T factorization with pivoting, reusable across right-hand sides."""

    def __init__(self, matrix: np.ndarray):
        matrix = np.asarray(matrix, dtype=float)
        self._matrix = matrix
        lu, d, perm = scipy.linalg.ldl(matrix, lower=True)
        pivots = _block_pivot_magnitudes(d)
        largest = pivots.max() if pivots.size else 0.0
        if largest == 0.0 or pivots.min() < PIVOT_RATIO_FLOOR * largest:
            ratio = 0.0 if largest == 0.0 else pivots.min() / largest
            raise SingularSystem(f"pivot ratio {ratio:.3e} below {PIVOT_RATIO_FLOOR:.0e}")
        self._perm = perm
        self._lower = lu[perm, :]
        # d is block diagonal, hence tridiagonal; store it banded for O(n) solves
        n = d.shape[0]
        ab = np.zeros((3, n))
        ab[0, 1:] = np.diagonal(d, 1)
        ab[1, :] = np.diagonal(d)
        ab[2, :-1] = np.diagonal(d, -1)
        self._banded = ab

    def _solve_factored(self, b: np.ndarray) -> np.ndarray:
        bp = b[self._perm]
        y = scipy.linalg.solve_triangular(self._lower, bp, lower=True, unit_diagonal=True)
        z = scipy.linalg.solve_banded((1, 1), self._banded, y)
        w = scipy.linalg.solve_triangular(self._lower.T, z, lower=False, unit_diagonal=True)
        x = np.empty_like(w)
        x[self._perm] = w
        return x

    def solve(self, b: np.ndarray) -> np.ndarray:
        """Solve with one step of iterative refinement."""
        b = np.asarray(b, dtype=float)
        x = self._solve_factored(b)
        x += self._solve_factored(b - self._matrix @ x)
        return x


@dataclass
class InterpolationProblem:
    """Data to interpolate: a graph, its decomposition and kernel, nodes, values."""

    graph: WeightedGraph
    decomposition: SpectralDecomposition
    kernel: KernelMatrix
    nodes: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=int)
        self.values = np.asarray(self.values, dtype=float)
        n = self.graph.n_vertices
        if self.decomposition.n != n or self.kernel.matrix.shape != (n, n):
            raise InconsistentDimensions("graph, decomposition, and kernel sizes differ")
        if self.nodes.size == 0:
            raise InconsistentDimensions("node set is empty")
        if np.unique(self.nodes).size != self.nodes.size:
            raise InconsistentDimensions("node set contains duplicates")
        if self.nodes.min() < 0 or self.nodes.max() >= n:
            raise InconsistentDimensions("node index out of range")
        if self.values.shape[0] != self.nodes.size:
            raise InconsistentDimensions(
                f"{self.values.shape[0]} values for {self.nodes.size} nodes"
            )
        if not np.all(np.isfinite(self.values)):
            raise InconsistentDimensions("values must be finite")


@dataclass
class Interpolant:
    """Solved coefficients: ``constant * v0 + sum_v coefficients[v] * Phi(., v)``."""

    constant: float
    coefficients: np.ndarray
    alpha: float
    nodes: np.ndarray


class _BorderedSystem:
    """Factored bordered kernel system for a fixed node set."""

    def __init__(self, kernel: KernelMatrix, decomposition: SpectralDecomposition, nodes: np.ndarray):
        nodes = np.asarray(nodes, dtype=int)
        m = nodes.size
        A = np.zeros((m + 1, m + 1))
        A[:m, :m] = kernel.matrix[np.ix_(nodes, nodes)]
        A[:m, m] = decomposition.kernel_vector[nodes]
        A[m, :m] = A[:m, m]
        self.nodes = nodes
        self.solver = SymmetricIndefiniteSolver(A)

    def solve(self, values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Return (coefficients, constants) for one or many value columns."""
        values = np.asarray(values, dtype=float)
        single = values.ndim == 1
        cols = values[:, None] if single else values
        sol = self.solver.solve(np.vstack([cols, np.zeros((1, cols.shape[1]))]))
        beta, constant = sol[:-1], sol[-1]
        if single:
            return beta[:, 0], constant[0]
        return beta, constant


def solve_interpolant(p: InterpolationProblem) -> Interpolant:
    """Solve the bordered system for one data vector."""
    system = _BorderedSystem(p.kernel, p.decomposition, p.nodes)
    beta, constant = system.solve(p.values)
    return Interpolant(constant=float(constant), coefficients=beta, alpha=p.kernel.alpha, nodes=p.nodes)


def evaluate(i: Interpolant, p: InterpolationProblem) -> np.ndarray:
    """Evaluate the interpolant on every vertex of the graph."""
    if i.nodes.size != p.nodes.size or np.any(i.nodes != p.nodes):
        raise InconsistentDimensions("interpolant nodes do not match the problem nodes")
    return p.kernel.matrix[:, i.nodes] @ i.coefficients + i.constant * p.decomposition.kernel_vector


def native_semi_inner_product(
    s: SpectralDecomposition, f: np.ndarray, g: np.ndarray, alpha: float
) -> float:
    """Semi-inner product ``<L^(alpha/2) f, L^(alpha/2) g>`` of the kernel's native space."""
    if alpha < 0:
        raise NonPositiveAlpha(f"alpha must be >= 0, got {alpha}")
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    if f.shape[0] != s.n or g.shape[0] != s.n:
        raise DimensionMismatch("function lengths do not match the vertex count")
    if alpha == 0:
        return float(f @ g)
    scale = np.zeros(s.n)
    positive = s.eigenvalues > 0
    scale[positive] = s.eigenvalues[positive] ** alpha
    return float((s.eigenvectors.T @ f) @ (scale * (s.eigenvectors.T @ g)))


@dataclass(frozen=True)
class LocalLagrangeConfig:
    """Center vertex and cutoff radius for localized cardinal solves."""

    center: int
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError(f"radius must be positive, got {self.radius}")

    def nodes_within(self, graph: WeightedGraph, nodes: np.ndarray) -> np.ndarray:
        """Interpolation nodes inside the ball; must contain the center."""
        neighborhood = nodes[graph.metric[self.center, nodes] <= self.radius]
        if neighborhood.size == 0:
            raise EmptyNeighborhood(
                f"no nodes within distance {self.radius} of vertex {self.center}"
            )
        return neighborhood


@dataclass
class LagrangeBasis:
    """Cardinal interpolants for every node, sharing one factorization.

    ``coefficients[:, j]`` are the kernel coefficients of the basis function
    centered at ``nodes[j]``; ``columns[:, j]`` is that function evaluated on
    every vertex. Columns are 1 at their own node and 0 at the others.
    """

    graph: WeightedGraph
    decomposition: SpectralDecomposition
    kernel: KernelMatrix
    nodes: np.ndarray
    coefficients: np.ndarray
    constants: np.ndarray
    columns: np.ndarray

    def center_index(self, center: int) -> int:
        idx = np.flatnonzero(self.nodes == center)
        if idx.size == 0:
            raise ValueError(f"vertex {center} is not an interpolation node")
        return int(idx[0])

    def interpolant(self, center: int) -> Interpolant:
        j = self.center_index(center)
        return Interpolant(
            constant=float(self.constants[j]),
            coefficients=self.coefficients[:, j].copy(),
            alpha=self.kernel.alpha,
            nodes=self.nodes,
        )


def lagrange_basis(
    kernel: KernelMatrix,
    decomposition: SpectralDecomposition,
    graph: WeightedGraph,
    nodes: Sequence[int],
) -> LagrangeBasis:
    """Solve all cardinal problems on ``nodes`` with a single factorization."""
    nodes = np.asarray(nodes, dtype=int)
    if nodes.size == 0:
        raise InconsistentDimensions("node set is empty")
    system = _BorderedSystem(kernel, decomposition, nodes)
    beta, constants = system.solve(np.eye(nodes.size))
    columns = kernel.matrix[:, nodes] @ beta + np.outer(decomposition.kernel_vector, constants)
    return LagrangeBasis(
        graph=graph,
        decomposition=decomposition,
        kernel=kernel,
        nodes=nodes,
        coefficients=beta,
        constants=constants,
        columns=columns,
    )


def truncated_lagrange(
    basis: LagrangeBasis,
    center: int,
    radius: float,
    reimpose_side_condition: bool = True,
) -> np.ndarray:
    """Drop basis coefficients outside the metric ball around the center.

    Coefficients of nodes farther than ``radius`` from ``center`` are removed;
    the kept ones are then projected back onto the hyperplane orthogonal to the
    kernel eigenvector restricted to the kept nodes (minimal-change repair of
    the side condition; disable with ``reimpose_side_condition=False``). The
    constant term is preserved.
    """
    config = LocalLagrangeConfig(center=center, radius=radius)
    j = basis.center_index(center)
    kept_nodes = config.nodes_within(basis.graph, basis.nodes)
    in_ball = np.isin(basis.nodes, kept_nodes)
    beta = basis.coefficients[in_ball, j].copy()
    if reimpose_side_condition:
        u = basis.decomposition.kernel_vector[kept_nodes]
        beta -= (beta @ u) / (u @ u) * u
    return basis.kernel.matrix[:, kept_nodes] @ beta + basis.constants[j] * basis.decomposition.kernel_vector


def local_lagrange(
    kernel: KernelMatrix,
    decomposition: SpectralDecomposition,
    graph: WeightedGraph,
    nodes: Sequence[int],
    center: int,
    radius: float,
) -> np.ndarray:
    """Cardinal interpolant using only the nodes within ``radius`` of the center.

    The small bordered system is solved on the neighborhood nodes, with the
    side condition against the kernel eigenvector restricted to them; the
    result is still evaluated on every vertex since the kernel columns are
    global.
    """
    nodes = np.asarray(nodes, dtype=int)
    if center not in nodes:
        raise ValueError(f"center {center} must be one of the interpolation nodes")
    config = LocalLagrangeConfig(center=center, radius=radius)
    neighborhood = config.nodes_within(graph, nodes)
    system = _BorderedSystem(kernel, decomposition, neighborhood)
    cardinal = (neighborhood == center).astype(float)
    beta, constant = system.solve(cardinal)
    return kernel.matrix[:, neighborhood] @ beta + constant * decomposition.kernel_vector
