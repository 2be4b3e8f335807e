"""Upper bounds on the residual induced by additive model error.

When the true model is (A_n + Delta_A, B_n + Delta_B) and the pair
(phi_x, phi_u) satisfies the affine constraint exactly on the nominal
model, the closed-loop residual is [Delta_A Delta_B] [phi_x; phi_u].
Its norm can be capped from scalar bounds on the perturbation blocks:

* L1 cap from inf-norm bounds on Delta_A/Delta_B (with a free split
  parameter alpha),
* E1 cap from 1-norm bounds,
* sampled H-inf cap from 2-norm bounds (with a sqrt split on alpha).
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .fir import fir_vstack
from .norms import e1_norm, hinf_norm_sampled, l1_norm


class DeltaNorm(Enum):
    """Which induced norm measures the closed-loop residual."""

    L1 = "l1"
    E1 = "e1"
    HINF_SAMPLED = "hinf"


@dataclass(frozen=True)
class RobustnessBudget:
    """Scalar perturbation bounds feeding the residual caps.

    ``a_bound`` bounds Delta_A and ``b_bound`` bounds Delta_B, each in the
    matrix norm matching ``norm_kind``: inf-norm for L1, 1-norm for E1,
    2-norm for the sampled H-inf cap.  ``alpha`` splits the budget between
    the state and input channels where the bound uses it.
    """

    norm_kind: DeltaNorm
    a_bound: float
    b_bound: float
    alpha: float = 0.5

    def __post_init__(self):
        if not isinstance(self.norm_kind, DeltaNorm):
            object.__setattr__(self, "norm_kind", DeltaNorm(self.norm_kind))
        if self.a_bound < 0 or self.b_bound < 0:
            raise ValueError("perturbation bounds must be nonnegative")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie strictly in (0, 1), got {self.alpha}")


def robust_bound_l1(phi_x, phi_u, budget):
    """max{ (a/alpha) ||phi_x||_L1, (b/(1-alpha)) ||phi_u||_L1 }."""
    a, b, alpha = budget.a_bound, budget.b_bound, budget.alpha
    return max((a / alpha) * l1_norm(phi_x),
               (b / (1.0 - alpha)) * l1_norm(phi_u))


def robust_bound_e1(phi_x, phi_u, budget):
    """E1 norm of the stacked scaled transfer [a phi_x; b phi_u]."""
    stacked = fir_vstack(phi_x.scaled(budget.a_bound),
                         phi_u.scaled(budget.b_bound))
    return e1_norm(stacked)


def robust_bound_hinf(phi_x, phi_u, budget, grid_points=256):
    """Sampled H-inf norm of [ (a/sqrt(alpha)) phi_x; (b/sqrt(1-alpha)) phi_u ]."""
    a, b, alpha = budget.a_bound, budget.b_bound, budget.alpha
    stacked = fir_vstack(phi_x.scaled(a / np.sqrt(alpha)),
                         phi_u.scaled(b / np.sqrt(1.0 - alpha)))
    return hinf_norm_sampled(stacked, grid_points)
