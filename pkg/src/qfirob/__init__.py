"""Robustness of quantum-metrology probes against quenched disorder.

Exact per-realization quantum Fisher information, a moment expansion of its
quenched average computed solely from the clean Hamiltonian, seeded Monte
Carlo validation, and closed-form single-qubit plus free-fermion chain
probes.
"""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    DegenerateSigmas,
    DimensionMismatch,
    EmptyGrid,
    InsufficientWindow,
    InvalidSize,
    LengthMismatch,
    MissingThirdOrder,
    NoSignChange,
    NonHermitianInput,
    QfirobError,
    SingularField,
    SingularPoint,
    TooLarge,
    UnsupportedOrder,
    ZeroCleanQfi,
)
from .operators import SpectralDecomposition, eigh, evolve, expectation, hermitian, pure_state, variance
from .probes import (
    DisorderDistribution,
    DisorderRealization,
    DisorderTerm,
    DisorderedProbeSpec,
    central_moment,
    clean_hamiltonian,
    realized_hamiltonian,
    sample_realization,
    with_sigmas,
)
from .qfi import QfigResult, optimal_state, qfi, qfig_exact
from .kernels import KernelTensors, build_kernels
from .expansion import (
    ExpansionTerms,
    RobustnessReport,
    build_expansion,
    optimize_resilience,
    predicted_marker,
    robustness_report,
    tilde_g1,
    tilde_g2,
    tilde_g3,
)
from .montecarlo import McConfig, McSweepResult, crossover_scan, marker_sweep, quenched_qfi
from .single_qubit import (
    SingleQubitParams,
    beta_optima,
    c2_closed_form,
    c2_transverse_total,
    crossover_marker_model,
    crossover_time,
    equator_state,
    select_beta,
    single_qubit_spec,
)
from .kitaev import (
    BdGModel,
    GhzWickExpectations,
    KitaevParams,
    NambuJ,
    build_bdg,
    bond_operators,
    ghz_mean_var,
    ghz_state,
    jw_dense_hamiltonian,
    jw_dmu,
    kitaev_robustness,
    kitaev_spec,
    plane_scan,
    qfig_j,
)
