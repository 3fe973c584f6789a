"""Almost-Bayesian linear-quadratic persuasion: coefficient derivation,
spectral trace-program solvers with certified suboptimality, worst-case
inner maximization, and Monte-Carlo ground-truth evaluation."""

from .errors import (
    InfeasibleTrace,
    InputError,
    InvalidMatrix,
    InvalidParameter,
    InvalidRadius,
    InvalidTolerance,
    LinearTermOutsideRange,
    LqPersuasionError,
    NotNonnegativeCost,
    NotPD,
    NotPSD,
    NumericalError,
    NumericalFailure,
    OracleDiverged,
    OutOfRegime,
    SingularCrossTerm,
)
from .evaluator import (
    McEstimate,
    ThresholdTriple,
    mc_true_cost,
    oned_table,
    opening_linear_best,
    opening_table,
    opening_thresholds,
    radius_scan,
    radius_threshold_cost,
    thresholds_1d,
)
from .innermax import (
    InnerMaxProblem,
    gamma_fn,
    penalty_bounds,
    worst_case_penalty,
    worst_case_penalty_batch,
)
from .instance import (
    DerivedCoefficients,
    EllipsoidalHypothesis,
    PriorSpec,
    PriorStats,
    QuadraticForm,
    RawGame,
    decompose_nonneg,
    derive_coefficients,
    hypothesis_affine_distortion,
    hypothesis_costly_update,
    hypothesis_mismatched_prior,
    hypothesis_wasserstein,
    prior_stats,
    upsilon,
)
from .programs import (
    HOracleResult,
    ProgramSolution,
    SignalingCheck,
    SweepRow,
    beta_max_value,
    extract_projection,
    h_eq,
    no_info_optimal,
    pessimistic_noinfo_threshold,
    signaling_profitable,
    solve_bp,
    solve_penalized,
    solve_pop,
    solve_pp,
    solve_spop,
    solve_uop,
    spop_objective,
    sweep,
)
from .spectral import EigenDecomposition, eig_sym, neg_projections, sqrt_psd, sym

__version__ = "0.1.0"
