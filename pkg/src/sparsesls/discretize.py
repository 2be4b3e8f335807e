"""Exact and sparsity-preserving discretizations of continuous-time plants.

Four routes from (Ahat, Bhat_i, tau) to discrete matrices:

* ``zoh``        exact zero-order hold (dense),
* ``truncated``  first-order truncation I + Ahat*tau (sparse by construction),
* ``projected``  the dense ZOH exponential masked onto supp(|Ahat| + I)
                 (sparse, and much closer to the exact ZOH than truncation),
* ``tustin``     bilinear transform (dense; no sparse variant exists).

Support masks are plain boolean ndarrays of the same shape as the matrix
they refer to.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import SingularPencil
from .matexp import as_matrix, expm, zoh_pair


@dataclass(frozen=True)
class ContinuousPlant:
    """Continuous-time model x' = Ahat x + B1hat w + B2hat u."""

    Ahat: np.ndarray
    B1hat: np.ndarray
    B2hat: np.ndarray

    def __post_init__(self):
        A = as_matrix(self.Ahat, "Ahat")
        if A.shape[0] != A.shape[1]:
            raise ValueError("Ahat must be square")
        n = A.shape[0]
        B1 = as_matrix(self.B1hat, "B1hat", min_cols=0)
        B2 = as_matrix(self.B2hat, "B2hat", min_cols=0)
        if B1.shape[0] != n or B2.shape[0] != n:
            raise ValueError("B1hat/B2hat row counts must match Ahat")
        object.__setattr__(self, "Ahat", A)
        object.__setattr__(self, "B1hat", B1)
        object.__setattr__(self, "B2hat", B2)

    @property
    def n(self):
        return self.Ahat.shape[0]


@dataclass(frozen=True)
class DiscretePlant:
    """Discrete-time model x+ = A x + B1 w + B2 u with error output
    z = C1 x + D11 w + D12 u and sample time tau."""

    A: np.ndarray
    B1: np.ndarray
    B2: np.ndarray
    C1: np.ndarray
    D11: np.ndarray
    D12: np.ndarray
    tau: float

    def __post_init__(self):
        A = as_matrix(self.A, "A")
        if A.shape[0] != A.shape[1]:
            raise ValueError("A must be square")
        n = A.shape[0]
        B1 = as_matrix(self.B1, "B1", min_cols=0)
        B2 = as_matrix(self.B2, "B2", min_cols=0)
        C1 = as_matrix(self.C1, "C1")
        D11 = as_matrix(self.D11, "D11", min_cols=0)
        D12 = as_matrix(self.D12, "D12", min_cols=0)
        if B1.shape[0] != n or B2.shape[0] != n or C1.shape[1] != n:
            raise ValueError("A/B1/B2/C1 dimensions disagree")
        p = C1.shape[0]
        if D11.shape != (p, B1.shape[1]) or D12.shape != (p, B2.shape[1]):
            raise ValueError("D11/D12 dimensions disagree with C1/B1/B2")
        if not self.tau > 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        for field, val in (("A", A), ("B1", B1), ("B2", B2), ("C1", C1),
                           ("D11", D11), ("D12", D12)):
            object.__setattr__(self, field, val)

    @property
    def n(self):
        return self.A.shape[0]

    @property
    def n_u(self):
        return self.B2.shape[1]

    @property
    def n_w(self):
        return self.B1.shape[1]


class DiscretizationMethod(Enum):
    ZOH_EXACT = "zoh"
    TRUNCATED = "truncated"
    PROJECTED = "projected"
    TUSTIN = "tustin"


def support(M, zero_tol=0.0):
    """Boolean support mask: True where |M_ij| > zero_tol.

    The default tolerance 0 is the exact nonzero test; pass a small
    positive value for matrices read from text files.
    """
    A = as_matrix(M, min_cols=0)
    if zero_tol < 0:
        raise ValueError("zero_tol must be nonnegative")
    return np.abs(A) > zero_tol


def projection_mask_A(Ahat, zero_tol=0.0):
    """Mask supp(|Ahat| + I) used by the projected discretization."""
    A = as_matrix(Ahat)
    mask = support(A, zero_tol)
    np.fill_diagonal(mask, True)
    return mask


def projection_mask_B(Ahat, Bhat, zero_tol=0.0):
    """Mask supp((|Ahat| + I) * |Bhat|), with the product taken structurally
    (boolean OR/AND) so cancellation cannot thin the pattern."""
    mask_A = projection_mask_A(Ahat, zero_tol)
    mask_B = support(as_matrix(Bhat, "Bhat", min_cols=0), zero_tol)
    return (mask_A.astype(np.uint8) @ mask_B.astype(np.uint8)) > 0


def truncate_first_order(Ahat, tau):
    """First-order sparse approximation I + Ahat*tau of e^{Ahat tau}."""
    A = as_matrix(Ahat)
    if A.shape[0] != A.shape[1]:
        raise ValueError("Ahat must be square")
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    return np.eye(A.shape[0]) + A * tau


def project_A(Ahat, tau):
    """Projected exponential supp(|Ahat| + I) o e^{Ahat tau}."""
    A = as_matrix(Ahat)
    if A.shape[0] != A.shape[1]:
        raise ValueError("Ahat must be square")
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    return np.where(projection_mask_A(A), expm(A * tau), 0.0)


def project_B(Ahat, Bhat, tau):
    """Projected ZOH input matrix supp((|Ahat|+I)|Bhat|) o (int e^{A s} ds B)."""
    A = as_matrix(Ahat)
    B = as_matrix(Bhat, "Bhat", min_cols=0)
    _, B_zoh = zoh_pair(A, B, tau)
    return np.where(projection_mask_B(A, B), B_zoh, 0.0)


def tustin(Ahat, Bhat, tau, pivot_tol=1e-12):
    """Bilinear (Tustin) transform of (Ahat, Bhat).

    Raises SingularPencil when I - (tau/2) Ahat has no usable inverse,
    detected through the magnitude of the LU pivots.
    """
    import scipy.linalg

    A = as_matrix(Ahat)
    if A.shape[0] != A.shape[1]:
        raise ValueError("Ahat must be square")
    B = as_matrix(Bhat, "Bhat", min_cols=0)
    if B.shape[0] != A.shape[0]:
        raise ValueError("Bhat row count must match Ahat")
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    n = A.shape[0]
    pencil = np.eye(n) - (tau / 2.0) * A
    lu, piv = scipy.linalg.lu_factor(pencil, check_finite=False)
    if np.min(np.abs(np.diag(lu))) <= pivot_tol:
        raise SingularPencil(
            f"I - (tau/2) Ahat is singular to tolerance {pivot_tol}")
    Ad = scipy.linalg.lu_solve((lu, piv), np.eye(n) + (tau / 2.0) * A)
    Bd = scipy.linalg.lu_solve((lu, piv), (tau / 2.0) * B)
    return Ad, Bd


def discretize_all(plant, C1, D11, D12, tau, method=DiscretizationMethod.ZOH_EXACT):
    """Assemble a DiscretePlant from a ContinuousPlant by the given method.

    C1/D11/D12 pass through unchanged: the error output is already a
    discrete-time design choice.
    """
    if isinstance(method, str):
        method = DiscretizationMethod(method)
    Ahat, B1hat, B2hat = plant.Ahat, plant.B1hat, plant.B2hat
    if method is DiscretizationMethod.ZOH_EXACT:
        A, B1 = zoh_pair(Ahat, B1hat, tau)
        _, B2 = zoh_pair(Ahat, B2hat, tau)
    elif method is DiscretizationMethod.TRUNCATED:
        A = truncate_first_order(Ahat, tau)
        B1 = tau * B1hat
        B2 = tau * B2hat
    elif method is DiscretizationMethod.PROJECTED:
        A = project_A(Ahat, tau)
        B1 = project_B(Ahat, B1hat, tau)
        B2 = project_B(Ahat, B2hat, tau)
    elif method is DiscretizationMethod.TUSTIN:
        A, B1 = tustin(Ahat, B1hat, tau)
        _, B2 = tustin(Ahat, B2hat, tau)
    else:
        raise ValueError(f"unknown method {method!r}")
    return DiscretePlant(A=A, B1=B1, B2=B2, C1=C1, D11=D11, D12=D12, tau=tau)
