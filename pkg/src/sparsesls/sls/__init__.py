"""FIR closed-loop algebra, system norms, robust bounds, and synthesis."""

from .fir import FIRTransfer, fir_vstack, fir_zeros, sls_residual
from .locality import LocalityConstraint, full_locality, graph_distances, locality_mask
from .norms import e1_norm, h2_norm, hinf_norm_sampled, l1_norm
from .robust import (
    DeltaNorm,
    RobustnessBudget,
    robust_bound_e1,
    robust_bound_hinf,
    robust_bound_l1,
)
from .synthesis import (
    SolverOptions,
    SynthesisOutcome,
    SynthesisStatus,
    synthesize,
    synthesize_bisect,
    synthesize_robust,
)

__all__ = [
    "FIRTransfer",
    "fir_vstack",
    "fir_zeros",
    "sls_residual",
    "LocalityConstraint",
    "full_locality",
    "graph_distances",
    "locality_mask",
    "l1_norm",
    "e1_norm",
    "h2_norm",
    "hinf_norm_sampled",
    "DeltaNorm",
    "RobustnessBudget",
    "robust_bound_l1",
    "robust_bound_e1",
    "robust_bound_hinf",
    "SolverOptions",
    "SynthesisOutcome",
    "SynthesisStatus",
    "synthesize",
    "synthesize_bisect",
    "synthesize_robust",
]
