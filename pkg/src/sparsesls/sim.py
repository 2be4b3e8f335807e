"""Closed-loop execution of FIR controllers and the residual stability test.

The controller realization keeps a ring buffer of reconstructed
disturbances: at each step the incoming state is compared against the
internal prediction, the difference is treated as the newest disturbance,
and the control action is the FIR convolution of phi_u with that buffer.
On the design model this reproduces the synthesized closed-loop maps
exactly; on a mismatched model the deviation is exactly the residual
Delta of the mismatched affine constraint.
"""

from dataclasses import dataclass

import numpy as np

from .sls.fir import FIRTransfer


@dataclass(frozen=True)
class ControllerState:
    """FIR pair plus the rolling disturbance reconstruction buffer."""

    phi_x: FIRTransfer
    phi_u: FIRTransfer
    what_buffer: np.ndarray  # (T, n), most recent first
    xhat: np.ndarray         # predicted state for the next incoming sample

    @property
    def horizon(self):
        return self.phi_x.T


def make_controller(phi_x, phi_u):
    """Fresh controller state with zeroed buffers."""
    if phi_x.T != phi_u.T:
        raise ValueError("phi_x and phi_u horizons differ")
    n = phi_x.shape[1]
    if phi_x.shape[0] != n:
        raise ValueError("phi_x taps must be square")
    if phi_u.shape[1] != n:
        raise ValueError("phi_u column count must match phi_x")
    return ControllerState(
        phi_x=phi_x,
        phi_u=phi_u,
        what_buffer=np.zeros((phi_x.T, n)),
        xhat=np.zeros(n),
    )


def controller_step(state, x_k):
    """One controller update: returns (u_k, next state).

    what_k = x_k - xhat_k;  u_k = sum_t phi_u[t] what_{k-t+1};
    xhat_{k+1} = sum_{t>=2} phi_x[t] what_{k-t+2}.
    """
    x_k = np.asarray(x_k, dtype=float)
    n = state.xhat.shape[0]
    if x_k.shape != (n,):
        raise ValueError(f"state must be a {n}-vector, got shape {x_k.shape}")
    T = state.horizon
    what = x_k - state.xhat
    buf = np.empty_like(state.what_buffer)
    buf[0] = what
    buf[1:] = state.what_buffer[:-1]
    Xtaps = state.phi_x.as_array()
    Utaps = state.phi_u.as_array()
    u = np.einsum("tij,tj->i", Utaps, buf)
    if T > 1:
        xhat_next = np.einsum("tij,tj->i", Xtaps[1:], buf[:-1])
    else:
        xhat_next = np.zeros(n)
    return u, ControllerState(phi_x=state.phi_x, phi_u=state.phi_u,
                              what_buffer=buf, xhat=xhat_next)


@dataclass(frozen=True)
class Trajectory:
    """States x[0..N], inputs u[0..N-1], disturbances w[0..N-1]."""

    states: np.ndarray
    inputs: np.ndarray
    disturbances: np.ndarray

    def __post_init__(self):
        x, u, w = (np.asarray(self.states), np.asarray(self.inputs),
                   np.asarray(self.disturbances))
        if not (x.ndim == u.ndim == w.ndim == 2):
            raise ValueError("trajectory arrays must be 2-D")
        if x.shape[0] != u.shape[0] + 1 or u.shape[0] != w.shape[0]:
            raise ValueError("trajectory lengths disagree")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(u))
                and np.all(np.isfinite(w))):
            raise ValueError("trajectory contains non-finite entries")

    @property
    def steps(self):
        return self.inputs.shape[0]


def closed_loop(plant, controller, w, N=None):
    """Simulate x_{k+1} = A x_k + B1 w_k + B2 u_k from x_0 = 0 with u from
    the FIR controller."""
    A, B1, B2 = plant.A, plant.B1, plant.B2
    n = A.shape[0]
    w = np.asarray(w, dtype=float)
    if w.ndim == 1:
        w = w[:, None]
    if w.shape[1] != B1.shape[1]:
        raise ValueError(
            f"disturbance width {w.shape[1]} does not match B1 ({B1.shape[1]})")
    if N is None:
        N = w.shape[0]
    if N < 1:
        raise ValueError("need at least one step")
    if w.shape[0] < N:
        padded = np.zeros((N, w.shape[1]))
        padded[:w.shape[0]] = w
        w = padded
    else:
        w = w[:N]
    x = np.zeros((N + 1, n))
    u = np.zeros((N, B2.shape[1]))
    state = controller
    for k in range(N):
        u[k], state = controller_step(state, x[k])
        x[k + 1] = A @ x[k] + B1 @ w[k] + B2 @ u[k]
    return Trajectory(states=x, inputs=u, disturbances=w)


def impulse_disturbance(N, n_w, channel, magnitude=1.0):
    """Disturbance sequence with a single impulse at time 0."""
    w = np.zeros((N, n_w))
    w[0, channel] = magnitude
    return w


def companion_matrix(delta):
    """Block companion matrix of e_k = -sum_j Delta[j] e_{k-j}."""
    taps = delta.as_array()
    T, n, m = taps.shape
    if n != m:
        raise ValueError("residual transfer must be square")
    C = np.zeros((n * T, n * T))
    C[:n] = -taps.transpose(1, 0, 2).reshape(n, T * n)
    if T > 1:
        idx = np.arange(n * (T - 1))
        C[n + idx, idx] = 1.0
    return C


def spectral_radius(M, dense_limit=400, tol=1e-10, max_iter=20_000):
    """Spectral radius, by dense eigenvalues up to ``dense_limit`` and by
    normalized power iteration with magnitude tracking above it."""
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    if n <= dense_limit:
        if n == 0:
            return 0.0
        return float(np.max(np.abs(np.linalg.eigvals(M))))
    v = np.ones(n) / np.sqrt(n)
    est = 0.0
    window = []
    for _ in range(max_iter):
        w = M @ v
        growth = float(np.linalg.norm(w))
        if growth == 0.0:
            return 0.0
        v = w / growth
        window.append(growth)
        if len(window) > 50:
            window.pop(0)
            new_est = float(np.exp(np.mean(np.log(window))))
            if abs(new_est - est) <= tol * max(1.0, new_est):
                return new_est
            est = new_est
    return est if est > 0 else float(np.exp(np.mean(np.log(window))))


def check_robust_stability(delta, unit_circle_tol=1e-9):
    """Stability of (I + Delta)^{-1} for a strictly proper square residual.

    Builds the block companion matrix of the error recursion and tests its
    spectral radius against 1; radii within ``unit_circle_tol`` of the
    circle are reported unstable (conservative tie-breaking).
    """
    taps = delta.as_array()
    if taps.shape[1] != taps.shape[2]:
        raise ValueError("residual transfer must be square")
    if not np.any(taps):
        return True, 0.0
    rho = spectral_radius(companion_matrix(delta))
    return rho < 1.0 - unit_circle_tol, rho
