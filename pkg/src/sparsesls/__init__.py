"""Sparsity-preserving discretization with certified error bounds and
robust distributed controller synthesis."""

from . import bounds, discretize, grid, matexp, sim, sls
from .bounds import (
    BandedProfile,
    DeltaBounds,
    band_extract,
    banded_profile,
    bandwidth,
    delta_norm_bounds,
    empirical_delta,
    iserles_entry_bound,
    truncation_bound,
)
from .discretize import (
    ContinuousPlant,
    DiscretePlant,
    DiscretizationMethod,
    discretize_all,
    project_A,
    project_B,
    support,
    truncate_first_order,
    tustin,
)
from .errors import (
    AllInfeasible,
    BoundInapplicable,
    ContractViolation,
    MatrixFileError,
    SingularPencil,
    SparseSlsError,
    TopologyError,
)
from .matexp import MatrixNorm, expm, matrix_norm, zoh_pair
from .sim import (
    ControllerState,
    Trajectory,
    check_robust_stability,
    closed_loop,
    controller_step,
    impulse_disturbance,
    make_controller,
)
from .sls import (
    DeltaNorm,
    FIRTransfer,
    LocalityConstraint,
    RobustnessBudget,
    SolverOptions,
    SynthesisOutcome,
    SynthesisStatus,
    e1_norm,
    full_locality,
    h2_norm,
    hinf_norm_sampled,
    l1_norm,
    locality_mask,
    robust_bound_e1,
    robust_bound_hinf,
    robust_bound_l1,
    sls_residual,
    synthesize,
    synthesize_bisect,
    synthesize_robust,
)

__version__ = "0.1.0"
