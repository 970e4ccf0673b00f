"""Polyharmonic spline interpolation and Lagrange bases on finite weighted graphs."""

import os as _os

# Cap BLAS parallelism before numpy is imported anywhere in the package.
if "GSK_THREADS" in _os.environ:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        _os.environ.setdefault(_var, _os.environ["GSK_THREADS"])

__version__ = "0.1.0"

from . import errors
from .diagnostics import (
    DecayFit,
    DecayProfile,
    MLCoverReport,
    ZerosLemmaReport,
    bulk_ratio,
    cycle_cover_constant,
    decay_profile,
    decay_scale,
    fit_exponential_decay,
    ml_cover_constant,
    zeros_bound_ratio,
    zeros_lemma_check,
)
from .graphs import (
    GraphMetrics,
    WeightedGraph,
    annulus,
    ball,
    build_graph,
    complement,
    cycle_graph,
    fill_distance,
    graph_metrics,
    knn_graph,
    lattice_graph,
    random_connected_graph,
)
from .interpolation import (
    Interpolant,
    InterpolationProblem,
    LagrangeBasis,
    LocalLagrangeConfig,
    evaluate,
    lagrange_basis,
    local_lagrange,
    native_semi_inner_product,
    solve_interpolant,
    truncated_lagrange,
)
from .ml import (
    CVConfig,
    Dataset,
    RegressionReport,
    cross_validate,
    load_dataset,
    nnr_predict,
    normalize,
    smoothness_experiment,
    spline_regress,
    wendland_bump,
)
from .spectral import (
    KernelMatrix,
    LaplacianKind,
    SpectralDecomposition,
    decompose_graph,
    dirichlet_eigenvalue,
    eigendecompose,
    graph_fourier,
    inverse_graph_fourier,
    laplacian,
    pseudo_inverse_power,
    sobolev_seminorm,
)
