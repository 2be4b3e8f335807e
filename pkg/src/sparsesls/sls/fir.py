"""Finite-impulse-response transfer matrices and the closed-loop residual.

An FIRTransfer represents the strictly proper transfer matrix
``sum_{k=1}^T G[k] z^{-k}``; taps are 1-indexed through ``tap(k)`` to match
the algebra, and stored contiguously as a (T, p, q) array.
"""

import numpy as np

from ..errors import ContractViolation


class FIRTransfer:
    """Finite sequence of spectral components G[1..T], all of shape (p, q)."""

    __slots__ = ("_taps",)

    def __init__(self, taps):
        arr = np.asarray(taps, dtype=float)
        if arr.ndim != 3:
            raise ValueError(
                f"taps must stack to a (T, p, q) array, got shape {arr.shape}")
        if arr.shape[0] < 1:
            raise ValueError("horizon T must be at least 1")
        if not np.all(np.isfinite(arr)):
            raise ValueError("taps contain non-finite entries")
        self._taps = arr

    @property
    def T(self):
        return self._taps.shape[0]

    @property
    def shape(self):
        return self._taps.shape[1:]

    def tap(self, k):
        """Spectral component G[k], 1-indexed, k in 1..T."""
        if not 1 <= k <= self.T:
            raise IndexError(f"tap index {k} outside 1..{self.T}")
        return self._taps[k - 1]

    def as_array(self):
        """The (T, p, q) tap stack (a copy)."""
        return self._taps.copy()

    def scaled(self, c):
        return FIRTransfer(self._taps * float(c))

    def transpose(self):
        return FIRTransfer(np.transpose(self._taps, (0, 2, 1)))

    def frequency_response(self, grid_points):
        """Responses sum_k G[k] e^{-i k theta_m} at theta_m = 2 pi m / M."""
        if grid_points < 1:
            raise ValueError("grid_points must be positive")
        # Tap index k and k mod M share the same phase on the grid, so
        # folding makes the FFT evaluation exact for any horizon.
        folded = np.zeros((grid_points,) + self.shape)
        np.add.at(folded, np.arange(1, self.T + 1) % grid_points, self._taps)
        return np.fft.fft(folded, axis=0)

    def __eq__(self, other):
        if not isinstance(other, FIRTransfer):
            return NotImplemented
        return self._taps.shape == other._taps.shape and np.array_equal(
            self._taps, other._taps)

    def __repr__(self):
        p, q = self.shape
        return f"FIRTransfer(T={self.T}, shape={p}x{q})"


def fir_zeros(T, p, q):
    return FIRTransfer(np.zeros((T, p, q)))


def fir_vstack(top, bottom):
    """Stack two transfers tap-by-tap: [top; bottom]."""
    if top.T != bottom.T:
        raise ValueError("horizons differ")
    if top.shape[1] != bottom.shape[1]:
        raise ValueError("column counts differ")
    return FIRTransfer(np.concatenate((top.as_array(), bottom.as_array()), axis=1))


def sls_residual(A, B2, phi_x, phi_u):
    """Residual Delta of the closed-loop affine constraint.

    For taps k = 1..T-1: Delta[k] = phi_x[k+1] - A phi_x[k] - B2 phi_u[k],
    and Delta[T] = -A phi_x[T] - B2 phi_u[T].  The k=0 component
    phi_x[1] - I is required to vanish: phi_x[1] must equal the identity to
    within 1e-12, otherwise ContractViolation is raised.
    """
    A = np.asarray(A, dtype=float)
    B2 = np.asarray(B2, dtype=float)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("A must be square")
    if phi_x.shape != (n, n):
        raise ValueError(f"phi_x taps must be {n}x{n}, got {phi_x.shape}")
    if B2.shape[0] != n or phi_u.shape != (B2.shape[1], n):
        raise ValueError("B2/phi_u dimensions disagree with A/phi_x")
    if phi_x.T != phi_u.T:
        raise ValueError("phi_x and phi_u horizons differ")
    first = phi_x.tap(1)
    if np.max(np.abs(first - np.eye(n))) > 1e-12:
        raise ContractViolation("phi_x[1] must equal the identity")
    T = phi_x.T
    X = phi_x.as_array()
    U = phi_u.as_array()
    AX = A @ X        # batched over taps
    B2U = B2 @ U
    delta = np.empty((T, n, n))
    delta[:T - 1] = X[1:] - AX[:T - 1] - B2U[:T - 1]
    delta[T - 1] = -AX[T - 1] - B2U[T - 1]
    return FIRTransfer(delta)
