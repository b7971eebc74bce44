"""Certified steady-state spreading for Laplacian-regularised graph designs.

The pipeline: build a graph and covariance model, solve the regularised
design for its smallest generalised eigenpair, diffuse the squared-modulus
profile to its fixed point, and compare the measured spreading against the
closed-form certificate (with its feasibility floor, bend point, and
target-to-mu design rule).
"""

from .certificate import Certificate, bend_point, bound, design_mu, prefactor
from .covariance import (
    CovarianceModel,
    CovarianceSpec,
    build_covariances,
    lambda_ref_general,
    steering_vector,
)
from .design import (
    EUCLIDEAN,
    RS_NORM,
    DesignSolution,
    KktReport,
    initial_profile,
    solve_design,
    verify_kkt,
)
from .diffusion import (
    DiffusionConfig,
    DiffusionResult,
    check_stability,
    spreading,
    steady_state_direct,
    steady_state_iterative,
    trajectory_csv,
)
from .errors import (
    BendPointUndefinedError,
    CertificationAuditError,
    ConfigError,
    DegenerateInputError,
    EdgelessGraphError,
    GraphValidationError,
    InfeasibleTargetError,
    IterationBudgetError,
    RescaleUndefinedError,
    SolverConditioningError,
    SpreadcertError,
    StabilityError,
    StandingAssumptionError,
)
from .graph import (
    Graph,
    GraphSpec,
    build,
    from_adjacency,
    parse_edge_list,
    power_iteration_norm,
    rescale_spectral_norm,
)
from .harness import (
    CertifyVerdict,
    ExperimentConfig,
    MuGrid,
    MuSweepResult,
    RhoGrid,
    RhoSweepResult,
    SweepRecord,
    build_instance,
    certify,
    evaluate_point,
    fit_loglog_slope,
    load_config,
    read_sweep_csv,
    run_mu_sweep,
    run_rho_sweep,
    write_sweep_csv,
)

__version__ = "0.1.0"
