"""Convex mixtures of quantum dynamical maps: ancilla dilations, microscopic
realizations, trace-distance distinguishability, backflow measures, and
system-ancilla information flow on small dense Hilbert spaces."""

from ._version import __version__
from .channels import (
    ChannelFamily,
    DephasingSemigroup,
    DilatedFamily,
    HamiltonianDilationFamily,
    KrausFamily,
    LiouvilleFamily,
    MicroscopicFamily,
    MicroscopicModel,
    MixedFamily,
    MixtureSpec,
    UnitaryFamily,
    choi_matrix,
    dilate,
    microscopic_family,
    mix,
    total_hamiltonian,
    verify_cpt,
)
from .distinguish import (
    DiscriminationResult,
    HelstromEnsemble,
    helstrom_norm,
    monte_carlo_discriminate,
    optimal_measurement,
    p_max,
    trace_distance,
)
from .infoflow import (
    InfoFlowSeries,
    correlation_bound,
    flow_balance_check,
    info_flow,
    info_flow_weighted,
    marginals_lemma_check,
)
from .nonmarkov import (
    NMEstimate,
    SearchConfig,
    TimeGrid,
    default_grid,
    derivative_series,
    distinguishability_series,
    nm_measure,
    nm_measure_optimized,
    nm_measure_unrestricted,
    sigma_series,
    verify_subadditivity,
)
from .qmath import (
    QState,
    TensorLayout,
    hermitian_eig,
    kron,
    partial_trace,
    trace_norm,
    unitary_exp,
)

__all__ = [
    "__version__",
    "ChannelFamily",
    "DephasingSemigroup",
    "DilatedFamily",
    "DiscriminationResult",
    "HamiltonianDilationFamily",
    "HelstromEnsemble",
    "InfoFlowSeries",
    "KrausFamily",
    "LiouvilleFamily",
    "MicroscopicFamily",
    "MicroscopicModel",
    "MixedFamily",
    "MixtureSpec",
    "NMEstimate",
    "QState",
    "SearchConfig",
    "TensorLayout",
    "TimeGrid",
    "UnitaryFamily",
    "choi_matrix",
    "correlation_bound",
    "default_grid",
    "derivative_series",
    "dilate",
    "distinguishability_series",
    "flow_balance_check",
    "helstrom_norm",
    "hermitian_eig",
    "info_flow",
    "info_flow_weighted",
    "kron",
    "marginals_lemma_check",
    "microscopic_family",
    "mix",
    "monte_carlo_discriminate",
    "nm_measure",
    "nm_measure_optimized",
    "nm_measure_unrestricted",
    "optimal_measurement",
    "p_max",
    "partial_trace",
    "sigma_series",
    "total_hamiltonian",
    "trace_distance",
    "trace_norm",
    "unitary_exp",
    "verify_cpt",
    "verify_subadditivity",
]
