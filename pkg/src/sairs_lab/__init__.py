"""Numerical laboratory for SAIRS epidemic models.

Closed-form reproduction numbers and equilibria, Jacobian spectra, Lyapunov
and compound-matrix stability certificates, adaptive integration with
simplex guards, and reproducible parameter studies with CSV artifacts.
"""

__version__ = "0.1.0"

from .errors import (
    CertificateParameterError,
    ConfigError,
    DegenerateParameterError,
    DomainError,
    InvalidInputError,
    InvarianceViolationError,
    NoEndemicEquilibriumError,
    SairsError,
    StiffnessError,
    WrongModelError,
)
from .experiments import (
    MU_LIFESPAN_70Y,
    AxisSpec,
    FamilyResult,
    ProbeReport,
    SweepResult,
    SweepSpec,
    family_study,
    measure_persistence,
    persistence_floor,
    probe_conjecture,
    run_family,
    run_sweep,
    sample_interior_state,
    sample_params,
    transmission_sweep_spec,
)
from .integrator import (
    DEFAULT_INITIAL_STATE,
    IntegrationConfig,
    Trajectory,
    guard_simplex,
    integrate,
)
from .model import (
    EquilibriumReport,
    HConstants,
    ModelParams,
    NextGenPair,
    Regime,
    StateFull,
    StateReduced,
    classify_regime,
    dfe,
    endemic_equilibrium,
    equilibrium_report,
    h_constants,
    jacobian_full,
    jacobian_reduced,
    next_gen_pair,
    r0_closed_form,
    rhs_full,
    rhs_reduced,
)
from .stability import (
    GeometricCertificate,
    LyapunovSample,
    SpectrumReport,
    dfe_spectrum,
    ee_spectrum,
    geometric_certificate,
    lyapunov_dfe_novax,
    lyapunov_sair,
    lyapunov_sairs_equal,
    third_additive_compound,
)
