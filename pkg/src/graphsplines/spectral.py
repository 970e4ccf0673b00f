"""Graph Laplacians, eigendecompositions, and spectral calculus.

All decay estimates in this package are phrased through powers of a Laplacian
applied via its eigendecomposition: kernel matrices are pseudo-inverse powers,
Sobolev-type semi-norms are ``||L^(alpha/2) f||`` restricted to a vertex set,
and the graph Fourier transform is the change of basis to the eigenvectors.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np
import scipy.linalg

from .errors import (
    DimensionMismatch,
    EigensolverFailure,
    EmptyInterior,
    EmptySubset,
    FullVertexSet,
    IsolatedVertex,
    MultipleZeroEigenvalues,
    NonPositiveAlpha,
)
from .graphs import WeightedGraph


class LaplacianKind(Enum):
    NORMALIZED = "normalized"      # D^{-1/2} (D - A) D^{-1/2}
    UNNORMALIZED = "unnormalized"  # D - A


def laplacian(g: WeightedGraph, kind: LaplacianKind) -> np.ndarray:
    """Dense Laplacian of the given kind; exactly symmetric by construction."""
    A = g.weights
    deg = A.sum(axis=1)
    if np.any(deg <= 0):
        v = int(np.argmax(deg <= 0))
        raise IsolatedVertex(f"vertex {v} has zero weighted degree")
    L = np.diag(deg) - A
    if kind is LaplacianKind.NORMALIZED:
        dinv = 1.0 / np.sqrt(deg)
        # outer(d, d) is exactly symmetric, so L stays exactly symmetric
        L = L * np.outer(dinv, dinv)
    return L


@dataclass
class SpectralDecomposition:
    """Eigenpairs of a Laplacian, validated for a connected graph.

    ``eigenvalues`` are ascending with the zero eigenvalue clamped to exactly
    0.0; ``eigenvectors`` holds orthonormal eigenvectors as columns, each sign
    fixed so its first nonzero entry is positive. ``zero_tolerance`` is the
    rank-decision threshold used to identify the kernel.
    """

    kind: LaplacianKind
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    zero_tolerance: float

    @property
    def n(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def kernel_vector(self) -> np.ndarray:
        """The unit eigenvector of the zero eigenvalue (all entries >= 0)."""
        return self.eigenvectors[:, 0]

    def apply_power(self, f: np.ndarray, power: float) -> np.ndarray:
        """Apply ``L^power`` by spectral calculus.

        Negative powers act as pseudo-inverse powers (the kernel is
        annihilated); ``power == 0`` is the identity.
        """
        f = np.asarray(f, dtype=float)
        if f.shape[0] != self.n:
            raise DimensionMismatch(f"function has length {f.shape[0]}, graph has {self.n} vertices")
        if power == 0:
            return f.copy()
        scale = np.zeros(self.n)
        positive = self.eigenvalues > 0
        scale[positive] = self.eigenvalues[positive] ** power
        coeffs = self.eigenvectors.T @ f
        return self.eigenvectors @ (scale * coeffs)


@dataclass
class KernelMatrix:
    """Pseudo-inverse power of a Laplacian; column k is the spline centered at vertex k."""

    alpha: float
    matrix: np.ndarray


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip each column so its first entry larger than 1e-12 in magnitude is positive."""
    out = vectors.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        nz = np.flatnonzero(np.abs(col) > 1e-12)
        if nz.size and col[nz[0]] < 0:
            out[:, j] = -col
    return out


def eigendecompose(L: np.ndarray, kind: LaplacianKind) -> SpectralDecomposition:
    """Full symmetric eigendecomposition with connectivity and bound checks.

    Raises :class:`MultipleZeroEigenvalues` when the second-smallest eigenvalue
    is below the rank tolerance (the matrix came from a disconnected graph) and
    :class:`EigensolverFailure` when the solver fails or the result does not
    reconstruct the input / violates the normalized upper bound of 2.
    """
    L = np.asarray(L, dtype=float)
    if L.ndim != 2 or L.shape[0] != L.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {L.shape}")
    if not np.allclose(L, L.T, rtol=0, atol=1e-12):
        raise ValueError("matrix is not symmetric")
    n = L.shape[0]

    try:
        w, Q = scipy.linalg.eigh(L)
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise EigensolverFailure(str(exc)) from exc

    lam_max = float(np.abs(w).max())
    zero_tol = n * np.finfo(float).eps * max(lam_max, 1.0)

    if w[0] < -10 * zero_tol:
        raise EigensolverFailure(f"smallest eigenvalue {w[0]} is significantly negative")
    if n > 1 and w[1] <= zero_tol:
        raise MultipleZeroEigenvalues(
            f"second eigenvalue {w[1]} below tolerance {zero_tol}: disconnected input"
        )
    if kind is LaplacianKind.NORMALIZED and w[-1] > 2 + 1e-9:
        raise EigensolverFailure(f"normalized eigenvalue {w[-1]} exceeds the bound 2")

    recon = (Q * w) @ Q.T
    if np.abs(recon - L).max() > max(100 * zero_tol, 1e-10):
        raise EigensolverFailure("eigendecomposition does not reconstruct the input")

    w = w.copy()
    w[0] = 0.0
    return SpectralDecomposition(kind=kind, eigenvalues=w, eigenvectors=_fix_signs(Q), zero_tolerance=zero_tol)


def decompose_graph(g: WeightedGraph, kind: LaplacianKind = LaplacianKind.NORMALIZED) -> SpectralDecomposition:
    return eigendecompose(laplacian(g, kind), kind)


def pseudo_inverse_power(s: SpectralDecomposition, alpha: float) -> KernelMatrix:
    """The matrix ``sum_{k>=1} lambda_k^(-alpha) v_k v_k^T``.

    Symmetric positive semi-definite with the kernel eigenvector annihilated;
    its columns are the splines of smoothness order ``2 * alpha``.
    """
    if alpha <= 0:
        raise NonPositiveAlpha(f"alpha must be positive, got {alpha}")
    inv = np.zeros(s.n)
    positive = s.eigenvalues > 0
    inv[positive] = s.eigenvalues[positive] ** (-alpha)
    M = (s.eigenvectors * inv) @ s.eigenvectors.T
    return KernelMatrix(alpha=float(alpha), matrix=(M + M.T) / 2.0)


def sobolev_seminorm(
    s: SpectralDecomposition,
    f: np.ndarray,
    alpha: float,
    subset: Sequence[int] | None = None,
) -> float:
    """``||(L^(alpha/2) f)`` restricted to ``subset||_2``; subset defaults to all vertices."""
    if alpha < 0:
        raise NonPositiveAlpha(f"alpha must be >= 0, got {alpha}")
    g = s.apply_power(f, alpha / 2.0)
    if subset is None:
        return float(np.linalg.norm(g))
    subset = np.asarray(subset, dtype=int)
    if subset.size == 0:
        raise EmptySubset("semi-norm restriction needs a nonempty vertex set")
    return float(np.linalg.norm(g[subset]))


def graph_fourier(s: SpectralDecomposition, f: np.ndarray) -> np.ndarray:
    """Coefficients of f in the eigenvector basis."""
    f = np.asarray(f, dtype=float)
    if f.shape[0] != s.n:
        raise DimensionMismatch(f"function has length {f.shape[0]}, expected {s.n}")
    return s.eigenvectors.T @ f


def inverse_graph_fourier(s: SpectralDecomposition, coeffs: np.ndarray) -> np.ndarray:
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape[0] != s.n:
        raise DimensionMismatch(f"coefficients have length {coeffs.shape[0]}, expected {s.n}")
    return s.eigenvectors @ coeffs


def dirichlet_eigenvalue(g: WeightedGraph, interior: Sequence[int], kind: LaplacianKind) -> float:
    """Smallest eigenvalue of the Laplacian principal submatrix on ``interior``.

    Positive for any proper nonempty subset of a connected graph.
    """
    interior = np.unique(np.asarray(interior, dtype=int))
    if interior.size == 0:
        raise EmptyInterior("interior vertex set is empty")
    if interior.size >= g.n_vertices:
        raise FullVertexSet("interior must be a proper subset of the vertex set")
    L = laplacian(g, kind)
    sub = L[np.ix_(interior, interior)]
    return float(scipy.linalg.eigh(sub, eigvals_only=True)[0])
