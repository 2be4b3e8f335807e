"""Distributed controller synthesis over FIR closed-loop responses.

The inner problem minimizes the squared H2 cost of [C1 D12] [phi_x; phi_u]
over masked FIR pairs with phi_x[1] = I, subject to a cap on the norm of
the affine-constraint residual Delta.  Structure used throughout:

* the cost, the affine residual and the support masks all decompose by
  disturbance column, so the quadratic step factors into one small
  prefactorized solve per column;
* the residual cap couples columns only through the ball projection
  (rows for the L1 norm, columns for E1, frequencies for sampled H-inf).

A cap of zero turns the ball into the exact affine constraint and is
solved directly per column through a null-space reduction; positive caps
run ADMM between the per-column quadratic step and the ball projection.
The outer quasi-convex search over gamma is a budgeted bisection plus
golden-section scan of the merit cost/(1 - gamma).
"""

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np
import scipy.linalg

from ..errors import AllInfeasible, ContractViolation
from .fir import FIRTransfer, sls_residual
from .norms import e1_norm, hinf_norm_sampled, l1_norm
from .robust import DeltaNorm, RobustnessBudget, robust_bound_e1, robust_bound_l1

__all__ = [
    "SynthesisStatus",
    "SynthesisOutcome",
    "SolverOptions",
    "synthesize",
    "synthesize_bisect",
    "synthesize_robust",
]


class SynthesisStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    SOLVER_LIMIT = "solver_limit"


@dataclass(frozen=True)
class SynthesisOutcome:
    """Result bundle: the FIR pair, its residual, and solver certificates."""

    phi_x: FIRTransfer
    phi_u: FIRTransfer
    delta: FIRTransfer
    gamma: float
    cost: float
    status: SynthesisStatus
    kkt_residual: float
    delta_norm: float
    norm_kind: DeltaNorm
    iterations: int
    certificate: str | None = None
    alpha: float | None = None

    @property
    def feasible(self):
        return self.status is SynthesisStatus.OPTIMAL


@dataclass(frozen=True)
class SolverOptions:
    """Tolerances and iteration budgets for the inner solver.

    The stopping tolerances sit two decades below the Optimal gate on the
    constraint violation because the gate is measured in the cap norm
    (a max of row/column sums) while the ADMM residuals are Frobenius.
    """

    eps_abs: float = 1e-10
    eps_rel: float = 1e-8
    max_iter: int = 50_000
    rho: float = 1.0
    adapt_every: int = 50
    stall_every: int = 100
    stall_window: int = 6
    stall_rel: float = 1e-5
    feas_tol: float = 1e-8
    strict_margin: float = 1e-9
    hinf_grid: int = 64
    hinf_project_iters: int = 15
    optimal_violation: float = 1e-6
    optimal_kkt: float = 1e-6


def _delta_norm_value(delta, kind, grid_points):
    if kind is DeltaNorm.L1:
        return l1_norm(delta)
    if kind is DeltaNorm.E1:
        return e1_norm(delta)
    return hinf_norm_sampled(delta, grid_points)


# ---------------------------------------------------------------------------
# Ball projections


def _project_l1_rows(M, radius):
    """Project each row of a 2-D array onto the l1 ball of the given radius."""
    if radius <= 0.0:
        return np.zeros_like(M)
    a = np.abs(M)
    sums = a.sum(axis=1)
    violating = sums > radius
    if not violating.any():
        return M.copy()
    out = M.copy()
    V = a[violating]
    u = np.sort(V, axis=1)[:, ::-1]
    css = np.cumsum(u, axis=1)
    k = np.arange(1, V.shape[1] + 1)
    cond = u - (css - radius) / k > 0
    rho = V.shape[1] - 1 - np.argmax(cond[:, ::-1], axis=1)
    rows = np.arange(V.shape[0])
    theta = (css[rows, rho] - radius) / (rho + 1)
    out[violating] = np.sign(M[violating]) * np.maximum(V - theta[:, None], 0.0)
    return out


def _project_weighted_l1(v, w, radius):
    """Project a vector onto {x : sum_i w_i |x_i| <= radius}, all w_i > 0."""
    if radius <= 0.0:
        return np.zeros_like(v)
    if np.sum(w * np.abs(v)) <= radius:
        return v.copy()
    # Soft threshold x_i = sign(v_i) max(|v_i| - theta w_i, 0) with theta
    # determined by the active set on the sorted |v_i|/w_i order.
    ratios = np.abs(v) / w
    order = np.argsort(ratios)[::-1]
    aw = (np.abs(v) * w)[order]
    ww = (w * w)[order]
    thetas = (np.cumsum(aw) - radius) / np.cumsum(ww)
    valid = np.flatnonzero(thetas < ratios[order])
    theta = thetas[valid[-1]] if valid.size else thetas[-1]
    theta = max(float(theta), 0.0)
    return np.sign(v) * np.maximum(np.abs(v) - theta * w, 0.0)


def _project_hinf(V, cap, grid_points, iters):
    """Approximate projection onto {Y : sigma_max(Y(theta_m)) <= cap}.

    Alternates spectral clipping per grid frequency with projection back
    onto the subspace of causal real tap sequences, then scales into the
    ball so the returned point is always feasible.
    """
    T, p, q = V.shape
    if cap <= 0.0:
        return np.zeros_like(V)
    M = max(grid_points, 2 * T + 2)
    taps = V.copy()
    idx = np.arange(1, T + 1) % M
    for _ in range(iters):
        folded = np.zeros((M, p, q))
        np.add.at(folded, idx, taps)
        W = np.fft.fft(folded, axis=0)
        U, s, Vt = np.linalg.svd(W, full_matrices=False)
        if np.max(s) <= cap * (1.0 + 1e-12):
            break
        s = np.minimum(s, cap)
        W = U @ (s[..., None] * Vt)
        coeff = np.fft.ifft(W, axis=0)
        taps = np.real(coeff[1:T + 1])
    value = hinf_norm_sampled(FIRTransfer(taps), max(grid_points, 64))
    if value > cap > 0.0:
        taps = taps * (cap / value)
    return taps


def _delta_ball_projection(V, cap, kind, grid_points, iters):
    """Project a residual tensor (T, p, q) onto the cap-ball of the norm."""
    T, p, q = V.shape
    if kind is DeltaNorm.L1:
        rows = V.transpose(1, 0, 2).reshape(p, T * q)
        proj = _project_l1_rows(rows, cap)
        return proj.reshape(p, T, q).transpose(1, 0, 2)
    if kind is DeltaNorm.E1:
        cols = V.transpose(2, 0, 1).reshape(q, T * p)
        proj = _project_l1_rows(cols, cap)
        return proj.reshape(q, T, p).transpose(1, 2, 0)
    return _project_hinf(V, cap, grid_points, iters)


# ---------------------------------------------------------------------------
# Per-column problem data


class _Column:
    """Dense least-squares data for one disturbance column.

    Variable layout: phi_x[2..T] restricted to idx_x, then phi_u[1..T]
    restricted to idx_u.  The residual map only carries the structurally
    reachable rows ``act``.
    """

    __slots__ = ("j", "idx_x", "idx_u", "act", "L", "r0", "G", "g0",
                 "mx", "mu", "dim", "cost_grad_const", "T")

    def __init__(self, j, plant, mask_x, mask_u, T):
        A, B2, C1, D12 = plant.A, plant.B2, plant.C1, plant.D12
        n = A.shape[0]
        self.j = j
        self.T = T
        self.idx_x = np.flatnonzero(mask_x[:, j])
        self.idx_u = np.flatnonzero(mask_u[:, j])
        mx, mu = self.idx_x.size, self.idx_u.size
        self.mx, self.mu = mx, mu
        reach = mask_x[:, j].copy()
        if mx:
            reach |= np.abs(A[:, self.idx_x]).sum(axis=1) > 0
        if mu:
            reach |= np.abs(B2[:, self.idx_u]).sum(axis=1) > 0
        reach[j] = True
        reach |= np.abs(A[:, j]) > 0
        self.act = np.flatnonzero(reach)
        na = self.act.size
        pos = np.full(n, -1, dtype=int)
        pos[self.act] = np.arange(na)
        dim = (T - 1) * mx + T * mu
        self.dim = dim

        A_act = A[self.act][:, self.idx_x] if mx else np.zeros((na, 0))
        B_act = B2[self.act][:, self.idx_u] if mu else np.zeros((na, 0))
        L = np.zeros((T * na, dim))
        r0 = np.zeros(T * na)
        r0[:na] = -A[self.act, j]
        for k in range(1, T + 1):
            rows = slice((k - 1) * na, k * na)
            if k >= 2 and mx:
                L[rows, self.x_cols(k)] -= A_act
            if mu:
                L[rows, self.u_cols(k)] -= B_act
            if k <= T - 1 and mx:
                # + phi_x[k+1] embedded into the active rows
                cols = self.x_cols(k + 1)
                L[rows.start + pos[self.idx_x],
                  cols.start + np.arange(mx)] += 1.0
        self.L = L
        self.r0 = r0

        p = C1.shape[0]
        G = np.zeros((T * p, dim))
        g0 = np.zeros(T * p)
        g0[:p] = C1[:, j]
        Cx = C1[:, self.idx_x] if mx else np.zeros((p, 0))
        Du = D12[:, self.idx_u] if mu else np.zeros((p, 0))
        for k in range(1, T + 1):
            rows = slice((k - 1) * p, k * p)
            if k >= 2 and mx:
                G[rows, self.x_cols(k)] = Cx
            if mu:
                G[rows, self.u_cols(k)] = Du
        self.G = G
        self.g0 = g0
        self.cost_grad_const = -2.0 * (G.T @ g0)

    def x_cols(self, k):
        # phi_x[k], k in 2..T
        return slice((k - 2) * self.mx, (k - 1) * self.mx)

    def u_cols(self, k):
        off = (self.T - 1) * self.mx
        return slice(off + (k - 1) * self.mu, off + k * self.mu)

    def cost_value(self, v):
        resid = self.G @ v + self.g0
        return float(resid @ resid)


def _nullspace(L):
    if L.shape[1] == 0 or L.size == 0:
        return np.eye(L.shape[1])
    _, s, vt = np.linalg.svd(L, full_matrices=True)
    cutoff = s[0] * max(L.shape) * np.finfo(float).eps if s.size else 0.0
    rank = int(np.sum(s > cutoff))
    return vt[rank:].T


def _lstsq(A, b):
    if A.shape[1] == 0:
        return np.zeros(0)
    return np.linalg.lstsq(A, b, rcond=None)[0]


# ---------------------------------------------------------------------------
# Inner solver


class _RawResult:
    __slots__ = ("V", "status", "kkt", "iterations", "certificate", "cap")

    def __init__(self, V, status, kkt, iterations, certificate, cap):
        self.V = V
        self.status = status
        self.kkt = kkt
        self.iterations = iterations
        self.certificate = certificate
        self.cap = cap


class _InnerSolver:
    """Shared state for repeated inner solves on one (plant, locality)."""

    def __init__(self, plant, locality, norm_kind, options, columns=None):
        T = locality.T
        n, n_u = plant.n, plant.n_u
        if locality.n != n or locality.n_u != n_u:
            raise ValueError("locality mask dimensions disagree with the plant")
        if not np.all(np.diag(locality.mask_x)):
            raise ContractViolation(
                "locality mask excludes diagonal entries of phi_x; "
                "phi_x[1] = I is unachievable")
        self.plant = plant
        self.locality = locality
        self.norm_kind = norm_kind
        self.options = options
        self.T = T
        self.n, self.n_u = n, n_u
        self.columns = list(range(n)) if columns is None else list(columns)
        self.cols = [_Column(j, plant, locality.mask_x, locality.mask_u, T)
                     for j in self.columns]
        self.num_vars = sum(c.dim for c in self.cols)
        self._factor_cache = {}
        self.warm = None

    # -- assembly helpers

    def blank_phi(self):
        Px = np.zeros((self.T, self.n, self.n))
        for j in self.columns:
            Px[0, j, j] = 1.0
        Pu = np.zeros((self.T, self.n_u, self.n))
        return Px, Pu

    def scatter(self, V, Px, Pu):
        T = self.T
        for col, v in zip(self.cols, V):
            j = col.j
            for k in range(2, T + 1):
                Px[k - 1][col.idx_x, j] = v[col.x_cols(k)]
            for k in range(1, T + 1):
                Pu[k - 1][col.idx_u, j] = v[col.u_cols(k)]

    def residual(self, Px, Pu):
        A, B2 = self.plant.A, self.plant.B2
        AX = np.matmul(A, Px)
        BU = np.matmul(B2, Pu)
        R = np.empty_like(Px)
        if self.T > 1:
            R[:-1] = Px[1:] - AX[:-1] - BU[:-1]
        R[-1] = -AX[-1] - BU[-1]
        return R

    def _adjoint_masked_sq(self, D):
        """Squared norm of the residual-map adjoint restricted to the
        free (masked) variables."""
        A, B2 = self.plant.A, self.plant.B2
        adj_x = np.zeros_like(D)
        if self.T > 1:
            adj_x[1:] = D[:-1] - np.matmul(A.T, D[1:])
        adj_u = -np.matmul(B2.T, D)
        total = 0.0
        for col in self.cols:
            j = col.j
            if col.mx and self.T > 1:
                block = adj_x[1:, col.idx_x, j]
                total += float(np.sum(block * block))
            block = adj_u[:, col.idx_u, j]
            total += float(np.sum(block * block))
        return total

    # -- exact affine constraint (cap = 0)

    def solve_equality_raw(self):
        opts = self.options
        V = []
        worst_kkt = 0.0
        infeasible_at = None
        for col in self.cols:
            v0 = _lstsq(col.L, -col.r0)
            resid = col.L @ v0 + col.r0 if col.dim else col.r0
            gap = float(np.max(np.abs(resid), initial=0.0))
            scale = 1.0 + float(np.max(np.abs(col.r0), initial=0.0))
            if gap > opts.feas_tol * scale:
                if infeasible_at is None:
                    infeasible_at = (col.j, gap)
                V.append(v0)
                continue
            N = _nullspace(col.L)
            if N.shape[1]:
                z = _lstsq(col.G @ N, -(col.G @ v0 + col.g0))
                v = v0 + N @ z
                grad = 2.0 * col.G.T @ (col.G @ v + col.g0)
                kkt = float(np.linalg.norm(N.T @ grad)
                            / (1.0 + np.linalg.norm(grad)))
            else:
                v = v0
                kkt = 0.0
            worst_kkt = max(worst_kkt, kkt)
            V.append(v)
        if infeasible_at is not None:
            j, gap = infeasible_at
            cert = (f"exact affine constraint unsatisfiable under the masks: "
                    f"column {j} retains residual {gap:.3e}")
            return _RawResult(V, SynthesisStatus.INFEASIBLE, worst_kkt, 0,
                              cert, 0.0)
        return _RawResult(V, SynthesisStatus.OPTIMAL, worst_kkt, 0, None, 0.0)

    # -- ADMM for a positive cap

    def _factors(self, rho):
        if rho not in self._factor_cache:
            factors = []
            for col in self.cols:
                if not col.dim:
                    factors.append(None)
                    continue
                H = 2.0 * col.G.T @ col.G + rho * col.L.T @ col.L
                H[np.diag_indices_from(H)] += 1e-12 * max(1.0, float(np.max(np.diag(H))))
                factors.append(scipy.linalg.cho_factor(H, check_finite=False))
            self._factor_cache[rho] = factors
        return self._factor_cache[rho]

    def solve_admm_raw(self, cap):
        opts = self.options
        T, n = self.T, self.n
        nc = len(self.cols)
        rho = opts.rho
        factors = self._factors(rho)
        if self.warm is not None:
            V = [w.copy() for w in self.warm[0]]
            Y, Uv = self.warm[1].copy(), self.warm[2].copy()
        else:
            V = [np.zeros(c.dim) for c in self.cols]
            Y = np.zeros((T, n, nc))
            Uv = np.zeros_like(Y)
        Px, Pu = self.blank_phi()
        self.scatter(V, Px, Pu)

        stall_hist = []
        status = SynthesisStatus.SOLVER_LIMIT
        certificate = None
        kkt = math.inf
        it = 0
        while it < opts.max_iter:
            it += 1
            Z = Y - Uv
            for c, col in enumerate(self.cols):
                if not col.dim:
                    continue
                z = Z[:, col.act, c].ravel()
                rhs = col.cost_grad_const + rho * (col.L.T @ (z - col.r0))
                V[c] = scipy.linalg.cho_solve(factors[c], rhs,
                                              check_finite=False)
            self.scatter(V, Px, Pu)
            R = self.residual(Px, Pu)[:, :, self.columns]
            Y_old = Y
            Y = _delta_ball_projection(R + Uv, cap, self.norm_kind,
                                       opts.hinf_grid, opts.hinf_project_iters)
            Uv = Uv + R - Y

            r_norm = float(np.linalg.norm(R - Y))
            dY = np.zeros((T, n, n))
            dY[:, :, self.columns] = rho * (Y - Y_old)
            s_norm = math.sqrt(self._adjoint_masked_sq(dY))
            dual_full = np.zeros((T, n, n))
            dual_full[:, :, self.columns] = rho * Uv
            dual_scale = math.sqrt(self._adjoint_masked_sq(dual_full))
            eps_pri = (math.sqrt(Y.size) * opts.eps_abs
                       + opts.eps_rel * max(np.linalg.norm(R), np.linalg.norm(Y)))
            eps_dual = (math.sqrt(max(self.num_vars, 1)) * opts.eps_abs
                        + opts.eps_rel * dual_scale)
            kkt = opts.eps_rel * max(
                r_norm / max(eps_pri, 1e-300),
                s_norm / max(eps_dual, 1e-300))
            if r_norm <= eps_pri and s_norm <= eps_dual:
                status = SynthesisStatus.OPTIMAL
                break

            if it % opts.stall_every == 0:
                stall_hist.append(r_norm)
                if len(stall_hist) > opts.stall_window:
                    stall_hist.pop(0)
                    lo, hi = min(stall_hist), max(stall_hist)
                    mean = sum(stall_hist) / len(stall_hist)
                    if (s_norm <= 10 * eps_dual and mean > 10 * eps_pri
                            and (hi - lo) <= opts.stall_rel * mean):
                        status = SynthesisStatus.INFEASIBLE
                        certificate = (
                            f"primal gap stalled at {mean:.3e}: the cap "
                            f"{cap:.3e} is unreachable under the masks")
                        break
            if it % opts.adapt_every == 0:
                if r_norm > 10.0 * s_norm and rho < 1e6:
                    rho *= 2.0
                    Uv /= 2.0
                    factors = self._factors(rho)
                elif s_norm > 10.0 * r_norm and rho > 1e-6:
                    rho /= 2.0
                    Uv *= 2.0
                    factors = self._factors(rho)

        self.warm = (V, Y, Uv)
        return _RawResult(V, status, kkt, it, certificate, cap)

    def solve_raw(self, gamma):
        cap = max(0.0, gamma - self.options.strict_margin)
        if cap <= 0.0:
            return self.solve_equality_raw()
        return self.solve_admm_raw(cap)

    def outcome(self, raw, gamma):
        Px, Pu = self.blank_phi()
        self.scatter(raw.V, Px, Pu)
        phi_x = FIRTransfer(Px)
        phi_u = FIRTransfer(Pu)
        delta = sls_residual(self.plant.A, self.plant.B2, phi_x, phi_u)
        dnorm = _delta_norm_value(delta, self.norm_kind, self.options.hinf_grid)
        cost = sum(c.cost_value(v) for c, v in zip(self.cols, raw.V))
        status = raw.status
        if status is SynthesisStatus.OPTIMAL:
            violation = max(0.0, dnorm - raw.cap)
            if (violation > self.options.optimal_violation
                    or raw.kkt > self.options.optimal_kkt):
                status = SynthesisStatus.SOLVER_LIMIT
        return SynthesisOutcome(
            phi_x=phi_x, phi_u=phi_u, delta=delta, gamma=gamma, cost=cost,
            status=status, kkt_residual=raw.kkt, delta_norm=dnorm,
            norm_kind=self.norm_kind, iterations=raw.iterations,
            certificate=raw.certificate)

    def solve(self, gamma):
        return self.outcome(self.solve_raw(gamma), gamma)


def _validate_cost(cost):
    if str(cost).lower() != "h2":
        raise ValueError(f"only the H2 cost is supported, got {cost!r}")


def _coerce_norm(norm_kind):
    return DeltaNorm(norm_kind) if isinstance(norm_kind, str) else norm_kind


def synthesize(plant, locality, gamma=0.0, norm_kind=DeltaNorm.L1, cost="h2",
               options=None, columnwise=False):
    """Solve the inner synthesis problem at a fixed residual cap gamma.

    Minimizes the squared H2 norm of [C1 D12] [phi_x; phi_u] over FIR pairs
    supported on the locality masks with phi_x[1] = I, subject to
    ||Delta|| <= gamma in the chosen norm (the strict inequality of the
    outer program is closed by a 1e-9 margin).  gamma = 0 enforces the
    affine constraint exactly.

    ``columnwise=True`` solves one independent subproblem per disturbance
    column, valid for the column-separable E1 norm (and for gamma = 0).
    """
    _validate_cost(cost)
    norm_kind = _coerce_norm(norm_kind)
    if not 0.0 <= gamma < 1.0:
        raise ValueError(f"gamma must lie in [0, 1), got {gamma}")
    options = options or SolverOptions()
    if columnwise and gamma > 0.0 and norm_kind is not DeltaNorm.E1:
        raise ValueError("columnwise synthesis requires the E1 norm")
    if not columnwise:
        solver = _InnerSolver(plant, locality, norm_kind, options)
        return solver.solve(gamma)

    full = _InnerSolver(plant, locality, norm_kind, options)
    V = []
    status = SynthesisStatus.OPTIMAL
    kkt = 0.0
    iters = 0
    certificate = None
    for j in range(plant.n):
        sub = _InnerSolver(plant, locality, norm_kind, options, columns=[j])
        raw = sub.solve_raw(gamma)
        V.append(raw.V[0])
        kkt = max(kkt, raw.kkt)
        iters += raw.iterations
        if raw.status is SynthesisStatus.INFEASIBLE:
            status = SynthesisStatus.INFEASIBLE
            certificate = certificate or raw.certificate
        elif raw.status is SynthesisStatus.SOLVER_LIMIT and (
                status is SynthesisStatus.OPTIMAL):
            status = SynthesisStatus.SOLVER_LIMIT
    cap = max(0.0, gamma - options.strict_margin)
    return full.outcome(_RawResult(V, status, kkt, iters, certificate, cap),
                        gamma)


def synthesize_bisect(plant, locality, norm_kind=DeltaNorm.L1, cost="h2",
                      bisect_tol=1e-2, options=None):
    """Outer search over gamma in [0, 1) for the merit cost/(1 - gamma).

    Runs at most ceil(log2(1/bisect_tol)) inner solves: the first probes
    gamma = 0; when that is infeasible, half the remaining budget bisects
    the feasibility boundary and the rest refines the merit by
    golden-section.  Returns the best outcome found; raises AllInfeasible
    when every probe is infeasible.
    """
    _validate_cost(cost)
    norm_kind = _coerce_norm(norm_kind)
    if not bisect_tol > 0:
        raise ValueError("bisect_tol must be positive")
    options = options or SolverOptions()
    budget = max(1, math.ceil(math.log2(1.0 / min(bisect_tol, 0.5))))
    try:
        solver = _InnerSolver(plant, locality, norm_kind, options)
    except ContractViolation as exc:
        raise AllInfeasible(str(exc)) from exc

    evals = {}
    used = 0

    def evaluate(g):
        nonlocal used
        g = float(g)
        if g not in evals:
            evals[g] = solver.solve(g)
            used += 1
        return evals[g]

    def merit(out):
        if out.status is not SynthesisStatus.OPTIMAL:
            return math.inf
        return out.cost / (1.0 - out.gamma)

    def fallback():
        limits = [o for o in evals.values()
                  if o.status is SynthesisStatus.SOLVER_LIMIT]
        if limits:
            return min(limits, key=lambda o: (o.delta_norm, o.cost))
        raise AllInfeasible(
            "no gamma in [0, 1) admits a feasible synthesis under the masks")

    gamma_hi = 1.0 - min(bisect_tol, 1e-3)

    out0 = evaluate(0.0)
    if out0.status is SynthesisStatus.OPTIMAL:
        lo = 0.0
    else:
        lo, hi_feas = 0.0, None
        probe = 0.5
        while used < budget and hi_feas is None and probe < 1.0:
            if evaluate(probe).status is SynthesisStatus.OPTIMAL:
                hi_feas = probe
            else:
                lo = probe
                probe = (probe + 1.0) / 2.0
        if hi_feas is None:
            return fallback()
        feas_budget = used + max(0, (budget - used + 1) // 2)
        while used < feas_budget and hi_feas - lo > bisect_tol:
            mid = 0.5 * (lo + hi_feas)
            if evaluate(mid).status is SynthesisStatus.OPTIMAL:
                hi_feas = mid
            else:
                lo = mid
        lo = hi_feas

    # Golden-section refinement of the merit over [lo, gamma_hi].
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, max(gamma_hi, lo)
    while used < budget and b - a > bisect_tol:
        x1 = b - invphi * (b - a)
        x2 = a + invphi * (b - a)
        if merit(evaluate(x1)) <= merit(evaluate(x2)):
            b = x2
        else:
            a = x1

    feasible = [o for o in evals.values()
                if o.status is SynthesisStatus.OPTIMAL]
    if not feasible:
        return fallback()
    return min(feasible, key=merit)


# ---------------------------------------------------------------------------
# Robust synthesis against model-error budgets


_DEFAULT_ALPHA_GRID = tuple(round(0.1 * k, 1) for k in range(1, 10))


def synthesize_robust(plant, locality, budget, gamma, cost="h2",
                      alpha_grid=_DEFAULT_ALPHA_GRID, options=None):
    """Synthesis with the residual cap replaced by a model-error bound.

    The nominal affine constraint is enforced exactly and the upper bound
    on the residual induced by perturbations inside the budget balls is
    capped at gamma.  For the L1 budget the split parameter alpha is
    line-searched over ``alpha_grid``; the E1 bound has no split.  The
    sampled H-inf budget has no exact ball projection here and is not
    supported.
    """
    _validate_cost(cost)
    if not isinstance(budget, RobustnessBudget):
        raise TypeError("budget must be a RobustnessBudget")
    if not 0.0 <= gamma < 1.0:
        raise ValueError(f"gamma must lie in [0, 1), got {gamma}")
    options = options or SolverOptions()
    kind = budget.norm_kind
    if kind is DeltaNorm.HINF_SAMPLED:
        raise NotImplementedError(
            "budget-constrained synthesis supports L1 and E1 budgets")
    if kind is DeltaNorm.E1:
        return _solve_budget(plant, locality, budget, gamma, options)
    best = None
    last = None
    for alpha in alpha_grid:
        trial = replace(budget, alpha=float(alpha))
        last = _solve_budget(plant, locality, trial, gamma, options)
        if last.status is SynthesisStatus.OPTIMAL and (
                best is None or last.cost < best.cost):
            best = last
    return best if best is not None else last


def _solve_budget(plant, locality, budget, gamma, options):
    """ADMM over the null space of the exact affine constraint with norm
    balls applied directly to the free taps of phi_x / phi_u."""
    kind = budget.norm_kind
    solver = _InnerSolver(plant, locality, kind, options)
    T, n, n_u = solver.T, solver.n, solver.n_u
    cols = solver.cols

    base = solver.solve_equality_raw()
    if base.status is SynthesisStatus.INFEASIBLE:
        return replace(solver.outcome(base, gamma), alpha=budget.alpha)

    # The fixed identity tap already consumes part of each budget: row i of
    # phi_x carries |I_ii| = 1 under the L1 cap, and column j carries
    # a_bound under the E1 cap.
    if kind is DeltaNorm.L1:
        rx = (gamma * budget.alpha / budget.a_bound - 1.0
              if budget.a_bound > 0 else math.inf)
        ru = (gamma * (1.0 - budget.alpha) / budget.b_bound
              if budget.b_bound > 0 else math.inf)
        if rx < 0:
            return replace(
                solver.outcome(base, gamma), status=SynthesisStatus.INFEASIBLE,
                alpha=budget.alpha,
                certificate=(f"alpha={budget.alpha}: cap {gamma} is below the "
                             f"bound contribution of the fixed identity tap"))
    else:
        col_radius = gamma - budget.a_bound
        if col_radius < 0:
            return replace(
                solver.outcome(base, gamma), status=SynthesisStatus.INFEASIBLE,
                alpha=budget.alpha,
                certificate=(f"cap {gamma} is below the bound contribution of "
                             f"the fixed identity tap"))

    V0, Ns, GNs, grad0 = [], [], [], []
    for col in cols:
        v0 = _lstsq(col.L, -col.r0)
        N = _nullspace(col.L)
        V0.append(v0)
        Ns.append(N)
        GN = col.G @ N
        GNs.append(GN)
        grad0.append(-2.0 * GN.T @ (col.G @ v0 + col.g0))

    rho = options.rho
    factors = [scipy.linalg.cho_factor(
        2.0 * GN.T @ GN + rho * np.eye(GN.shape[1]), check_finite=False)
        if GN.shape[1] else None for GN in GNs]

    Z = [v0.copy() for v0 in V0]
    Y = [v0.copy() for v0 in V0]
    U = [np.zeros(c.dim) for c in cols]

    def project(Vlist):
        if kind is DeltaNorm.L1:
            Px, Pu = solver.blank_phi()
            solver.scatter(Vlist, Px, Pu)
            if math.isfinite(rx):
                X2 = Px[1:].transpose(1, 0, 2).reshape(n, (T - 1) * n)
                X2 = _project_l1_rows(X2, rx)
                Px[1:] = X2.reshape(n, T - 1, n).transpose(1, 0, 2)
            if math.isfinite(ru):
                U2 = Pu.transpose(1, 0, 2).reshape(n_u, T * n)
                U2 = _project_l1_rows(U2, ru)
                Pu = U2.reshape(n_u, T, n).transpose(1, 0, 2)
            out = []
            for col in cols:
                parts = []
                if col.mx:
                    parts.append(Px[1:, col.idx_x, col.j].ravel())
                parts.append(Pu[:, col.idx_u, col.j].ravel())
                out.append(np.concatenate(parts) if parts else np.zeros(0))
            return out
        out = []
        for col, v in zip(cols, Vlist):
            nx = (T - 1) * col.mx
            w = np.concatenate([np.full(nx, budget.a_bound),
                                np.full(v.size - nx, budget.b_bound)])
            keep = w > 0
            proj = v.copy()
            if keep.any():
                proj[keep] = _project_weighted_l1(v[keep], w[keep], col_radius)
            out.append(proj)
        return out

    status = SynthesisStatus.SOLVER_LIMIT
    it = 0
    kkt = math.inf
    size = math.sqrt(max(solver.num_vars, 1))
    while it < options.max_iter:
        it += 1
        for c, col in enumerate(cols):
            if not Ns[c].shape[1]:
                Z[c] = V0[c]
                continue
            target = Y[c] - U[c] - V0[c]
            rhs = grad0[c] + rho * (Ns[c].T @ target)
            z = scipy.linalg.cho_solve(factors[c], rhs, check_finite=False)
            Z[c] = V0[c] + Ns[c] @ z
        Y_new = project([z + u for z, u in zip(Z, U)])
        s_norm = rho * math.sqrt(sum(
            float(np.sum((yn - yo) ** 2)) for yn, yo in zip(Y_new, Y)))
        Y = Y_new
        U = [u + z - y for u, z, y in zip(U, Z, Y)]
        r_norm = math.sqrt(sum(float(np.sum((z - y) ** 2))
                               for z, y in zip(Z, Y)))
        eps_pri = size * options.eps_abs + options.eps_rel * max(
            math.sqrt(sum(float(np.sum(z * z)) for z in Z)),
            math.sqrt(sum(float(np.sum(y * y)) for y in Y)))
        eps_dual = size * options.eps_abs + options.eps_rel * rho * math.sqrt(
            sum(float(np.sum(u * u)) for u in U))
        kkt = options.eps_rel * max(r_norm / max(eps_pri, 1e-300),
                                    s_norm / max(eps_dual, 1e-300))
        if r_norm <= eps_pri and s_norm <= eps_dual:
            status = SynthesisStatus.OPTIMAL
            break

    # Y satisfies the ball constraint exactly; report the outcome at Y.
    raw = _RawResult(Y, status, kkt, it, None, 0.0)
    out = solver.outcome(raw, gamma)
    if kind is DeltaNorm.L1:
        bound = robust_bound_l1(out.phi_x, out.phi_u, budget)
    else:
        bound = robust_bound_e1(out.phi_x, out.phi_u, budget)
    violation = max(0.0, bound - gamma)
    status = out.status
    # The nominal residual of the projected point is not exactly zero; it
    # inherits the ADMM primal gap, which the Optimal gate already polices
    # through delta_norm.
    if status is SynthesisStatus.OPTIMAL and violation > options.optimal_violation:
        status = SynthesisStatus.SOLVER_LIMIT
    return replace(
        out, status=status, alpha=budget.alpha,
        certificate=f"model-error bound {bound:.6e} vs cap {gamma:.6e}")
