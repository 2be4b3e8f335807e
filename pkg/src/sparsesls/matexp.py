"""Dense matrix exponential, the ZOH integral term, and matrix norms.

Everything here works on plain numpy arrays: a "matrix" is a 2-D float
ndarray with finite entries.  These routines are the numerical bedrock for
the discretization and synthesis layers, so inputs are validated eagerly
and all operations are pure functions.
"""

from enum import Enum

import numpy as np
import scipy.linalg


class MatrixNorm(Enum):
    """Matrix norms used throughout: induced 1/2/inf norms plus max-norm."""

    ONE = "one"
    TWO = "two"
    INF = "inf"
    MAX = "max"


_NORM_ALIASES = {
    "1": MatrixNorm.ONE,
    "one": MatrixNorm.ONE,
    "2": MatrixNorm.TWO,
    "two": MatrixNorm.TWO,
    "inf": MatrixNorm.INF,
    "infinity": MatrixNorm.INF,
    "max": MatrixNorm.MAX,
}


def as_matrix(M, name="matrix", min_cols=1):
    """Coerce to a 2-D float array and reject NaN/Inf entries."""
    A = np.asarray(M, dtype=float)
    if A.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {A.shape}")
    if A.shape[0] < 1 or A.shape[1] < min_cols:
        raise ValueError(f"{name} has invalid shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} contains non-finite entries")
    return A


def _as_square(M, name="matrix"):
    A = as_matrix(M, name)
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"{name} must be square, got shape {A.shape}")
    return A


def matrix_norm(M, kind=MatrixNorm.TWO):
    """Matrix norm of the given kind.

    ONE is the max column abs-sum, INF the max row abs-sum, MAX the largest
    entry magnitude, and TWO the largest singular value.
    """
    A = as_matrix(M)
    if isinstance(kind, str):
        try:
            kind = _NORM_ALIASES[kind.lower()]
        except KeyError:
            raise ValueError(f"unknown norm kind {kind!r}") from None
    if kind is MatrixNorm.ONE:
        return float(np.max(np.sum(np.abs(A), axis=0)))
    if kind is MatrixNorm.INF:
        return float(np.max(np.sum(np.abs(A), axis=1)))
    if kind is MatrixNorm.MAX:
        return float(np.max(np.abs(A)))
    if kind is MatrixNorm.TWO:
        return float(np.linalg.norm(A, 2))
    raise ValueError(f"unknown norm kind {kind!r}")


def expm(M, accuracy=1e-12):
    """Matrix exponential e^M of a square matrix.

    ``accuracy`` is the contract bound: the result E satisfies
    ``||E - e^M||_2 <= accuracy * max(1, ||e^M||_2)``.  The backing
    scaling-and-squaring Pade evaluation is backward stable and lands far
    below any admissible bound; the argument is validated so callers state
    an achievable tolerance.
    """
    A = _as_square(M)
    if not (0.0 < accuracy <= 1e-3):
        raise ValueError(f"accuracy must lie in (0, 1e-3], got {accuracy}")
    return scipy.linalg.expm(A)


def zoh_pair(Ahat, Bhat, tau):
    """Zero-order-hold pair (e^{A tau}, int_0^tau e^{A s} ds * B).

    Computed by exponentiating the augmented block matrix
    ``[[A, B], [0, 0]] * tau`` whose top row blocks are exactly the two
    requested matrices.
    """
    A = _as_square(Ahat, "Ahat")
    B = as_matrix(Bhat, "Bhat", min_cols=0)
    n = A.shape[0]
    if B.shape[0] != n:
        raise ValueError(f"Bhat has {B.shape[0]} rows, expected {n}")
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    m = B.shape[1]
    aug = np.zeros((n + m, n + m))
    aug[:n, :n] = A
    aug[:n, n:] = B
    E = expm(aug * tau)
    return E[:n, :n].copy(), E[:n, n:].copy()
