"""A-priori and empirical error bounds for the sparse discretizations.

Three certified quantities:

* the first-order truncation bound on ||(I + A*tau) - e^{A tau}||_2,
* the entrywise decay bound for the exponential of a banded matrix,
* scalar-computable bounds on the 2/inf/1 norms of the projection residual
  Delta_A = e^{A tau} - proj(e^{A tau}), obtained by summing the entry
  bound over the off-band index pairs.

Plus the empirical counterparts measured from the actual dense matrices.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import BoundInapplicable
from .matexp import MatrixNorm, as_matrix, matrix_norm


@dataclass(frozen=True)
class BandedProfile:
    """Banded-matrix summary: dimension n, bandwidth s, alpha = ||A*tau||_max."""

    n: int
    s: int
    alpha: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if not 0 <= self.s <= self.n - 1:
            raise ValueError(f"bandwidth s={self.s} out of range for n={self.n}")
        if not (np.isfinite(self.alpha) and self.alpha >= 0):
            raise ValueError("alpha must be finite and nonnegative")


@dataclass(frozen=True)
class DeltaBounds:
    """Norm triple for a residual matrix: rho (2-norm), eps (inf-norm),
    nu (1-norm)."""

    rho: float
    eps: float
    nu: float

    def __post_init__(self):
        for name in ("rho", "eps", "nu"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be finite and nonnegative")


def banded_profile(Ahat, tau, zero_tol=0.0):
    """Measure (n, s, alpha) of Ahat at sample time tau."""
    A = as_matrix(Ahat, "Ahat")
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    return BandedProfile(
        n=A.shape[0],
        s=bandwidth(A, zero_tol),
        alpha=matrix_norm(A * tau, MatrixNorm.MAX),
    )


def bandwidth(M, zero_tol=0.0):
    """Smallest s such that all entries with |i - j| >= s + 1 vanish
    (to within zero_tol)."""
    A = as_matrix(M)
    n = A.shape[0]
    if A.shape[1] != n:
        raise ValueError("bandwidth is defined for square matrices")
    i, j = np.indices((n, n))
    offsets = np.abs(i - j)
    nz = np.abs(A) > zero_tol
    if not nz.any():
        return 0
    return int(np.max(offsets[nz]))


def band_extract(M, s):
    """Keep entries with |i - j| <= s, zero the rest."""
    A = as_matrix(M)
    n = A.shape[0]
    if A.shape[1] != n:
        raise ValueError("band_extract is defined for square matrices")
    if not 0 <= s <= n - 1:
        raise ValueError(f"bandwidth s={s} out of range for n={n}")
    i, j = np.indices((n, n))
    return np.where(np.abs(i - j) <= s, A, 0.0)


def truncation_bound(norm2_Ahat, tau):
    """Bound on ||(I + A*tau) - e^{A tau}||_2 for ||A||_2 = norm2_Ahat.

    Valid only while (tau/3)*||A||_2 < 1; outside that region the formula
    is meaningless and BoundInapplicable is raised.
    """
    if norm2_Ahat < 0:
        raise ValueError("norm2_Ahat must be nonnegative")
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    x = tau * norm2_Ahat
    if x >= 3.0:
        raise BoundInapplicable(
            f"truncation bound requires tau*||A||_2 < 3, got {x}")
    return (norm2_Ahat ** 2 * tau ** 2 / 2.0) / (1.0 - x / 3.0)


def _exp_tail(r, x, rel_stop=1e-18):
    """log of sum_{m >= r} x^m / m!, the tail of the exponential series.

    Accumulated forward from the leading term so no subtraction of nearly
    equal quantities occurs; terms are added until the next one falls below
    rel_stop times the running sum.
    """
    if x == 0.0:
        return -math.inf
    log_lead = r * math.log(x) - math.lgamma(r + 1)
    total = 1.0
    term = 1.0
    m = r
    while True:
        term *= x / (m + 1)
        total += term
        m += 1
        if term < rel_stop * total:
            break
    return log_lead + math.log(total)


def iserles_entry_bound(i, j, alpha, s):
    """Decay bound on |[e^{A tau}]_{ij}| for banded A with bandwidth s >= 1
    and alpha = ||A tau||_max, for off-band pairs |i - j| > s.

    Evaluated in log space: the power term (alpha*s/r)^(r/s) and the
    truncated-exponential bracket (computed as a forward series tail) are
    combined as exponents so neither can overflow or cancel.
    """
    if s < 1:
        raise ValueError("bandwidth s must be at least 1")
    r = abs(int(i) - int(j))
    if r <= s:
        raise ValueError(f"entry bound requires |i - j| > s, got |i-j|={r}, s={s}")
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    if alpha == 0.0:
        return 0.0
    x = r / s
    log_power = (r / s) * math.log(alpha * s / r)
    log_bracket = _exp_tail(r, x)
    return math.exp(log_power + log_bracket)


def _entry_bound_by_offset(n, alpha, s):
    """Vector of entry bounds indexed by offset r = 0..n-1 (zero within band)."""
    vals = np.zeros(n)
    for r in range(s + 1, n):
        vals[r] = iserles_entry_bound(0, r, alpha, s)
    return vals


def delta_norm_bounds(n, alpha, s):
    """Scalar-computable upper bounds on the projection-residual norms.

    Returns DeltaBounds with

    * rho: sum of the entry bound over all pairs |i - j| > s  (2-norm bound),
    * eps: max row sum of the entry bound over off-band pairs (inf-norm),
    * nu:  max column sum over off-band pairs                (1-norm).

    Only scalar operations on (r, alpha, s); the entry bound depends on
    (i, j) through r = |i - j| alone, so sums collapse to weighted counts
    per offset.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if s < 1:
        raise ValueError("bandwidth s must be at least 1")
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    if alpha == 0.0 or n <= s + 1:
        return DeltaBounds(0.0, 0.0, 0.0)
    b = _entry_bound_by_offset(n, alpha, s)
    offsets = np.arange(n)
    # Each offset r>0 occurs in 2*(n-r) ordered pairs.
    rho = float(np.sum(2.0 * (n - offsets[s + 1:]) * b[s + 1:]))
    # Row i (1-based) sees offsets 1..i-1 to the left and 1..n-i to the right.
    prefix = np.cumsum(b)  # prefix[m] = sum_{r <= m} b[r]; b[r]=0 for r <= s
    rows = np.arange(1, n + 1)
    row_sums = prefix[rows - 1] + prefix[n - rows]
    eps = float(np.max(row_sums))
    # The entry bound is symmetric in (i, j), so the column variant coincides.
    nu = eps
    return DeltaBounds(rho=rho, eps=eps, nu=nu)


def empirical_delta(A_dense, A_sparse):
    """Residual Delta = A_dense - A_sparse and its (2, inf, 1) norms."""
    Ad = as_matrix(A_dense, "A_dense")
    As = as_matrix(A_sparse, "A_sparse")
    if Ad.shape != As.shape:
        raise ValueError(f"shape mismatch: {Ad.shape} vs {As.shape}")
    Delta = Ad - As
    norms = DeltaBounds(
        rho=matrix_norm(Delta, MatrixNorm.TWO),
        eps=matrix_norm(Delta, MatrixNorm.INF),
        nu=matrix_norm(Delta, MatrixNorm.ONE),
    )
    return Delta, norms
