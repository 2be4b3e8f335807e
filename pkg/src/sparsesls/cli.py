"""Command-line interface: discretize, bounds, synthesize, simulate.

All figure data is emitted as CSV (plotting happens elsewhere); matrices
are exchanged as Matrix Market files or plain dense text.  Given the same
configuration and seed, every command writes byte-identical outputs.

Exit codes: 0 success, 2 input error, 3 infeasible synthesis,
4 numerical failure.
"""

import argparse
import csv
import sys
import time
from pathlib import Path

import numpy as np

from . import bounds as bnd
from .discretize import (
    DiscretizationMethod,
    discretize_all,
    project_A,
    support,
    truncate_first_order,
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
from .grid import actuator_sites, case57_topology, linearize, load_topology, state_adjacency
from .matexp import expm, matrix_norm
from .sim import check_robust_stability, closed_loop, impulse_disturbance, make_controller
from .sls import DeltaNorm, locality_mask, sls_residual, synthesize, synthesize_bisect
from .sls.locality import graph_distances
from .sls.synthesis import SynthesisStatus, _InnerSolver, SolverOptions

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INFEASIBLE = 3
EXIT_NUMERICAL = 4


# ---------------------------------------------------------------------------
# Matrix file formats


def read_matrix(path):
    """Read a matrix from Matrix Market (coordinate or array) or dense text.

    Matrix Market files are detected by their %%MatrixMarket header;
    anything else is parsed as whitespace-separated rows of reals.
    Coordinate duplicates are summed.
    """
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise MatrixFileError(str(exc), path=path) from exc
    if not lines:
        raise MatrixFileError("empty file", path=path)
    if lines[0].startswith("%%MatrixMarket"):
        return _read_matrix_market(lines, path)
    return _read_dense_text(lines, path)


def _read_matrix_market(lines, path):
    header = lines[0].strip().split()
    if len(header) < 5 or header[1].lower() != "matrix":
        raise MatrixFileError("malformed MatrixMarket header", path=path, line=1)
    fmt, field, symmetry = (header[2].lower(), header[3].lower(),
                            header[4].lower())
    if fmt not in ("coordinate", "array"):
        raise MatrixFileError(f"unsupported format {fmt!r}", path=path, line=1)
    if field not in ("real", "integer", "double", "pattern"):
        raise MatrixFileError(f"unsupported field {field!r}", path=path, line=1)
    if symmetry not in ("general", "symmetric", "skew-symmetric"):
        raise MatrixFileError(f"unsupported symmetry {symmetry!r}", path=path,
                              line=1)
    body = [(no, ln.strip()) for no, ln in enumerate(lines[1:], start=2)
            if ln.strip() and not ln.lstrip().startswith("%")]
    if not body:
        raise MatrixFileError("missing size line", path=path)
    size_no, size_line = body[0]
    parts = size_line.split()
    entries = body[1:]

    if fmt == "coordinate":
        if len(parts) != 3:
            raise MatrixFileError("coordinate size line must be 'rows cols nnz'",
                                  path=path, line=size_no)
        try:
            rows, cols, nnz = (int(p) for p in parts)
        except ValueError:
            raise MatrixFileError("malformed size line", path=path, line=size_no)
        if rows < 1 or cols < 1 or nnz < 0:
            raise MatrixFileError("invalid dimensions", path=path, line=size_no)
        if len(entries) != nnz:
            raise MatrixFileError(
                f"expected {nnz} entries, found {len(entries)}", path=path,
                line=size_no)
        M = np.zeros((rows, cols))
        for no, text in entries:
            toks = text.split()
            want = 2 if field == "pattern" else 3
            if len(toks) != want:
                raise MatrixFileError("malformed coordinate entry", path=path,
                                      line=no)
            try:
                i, j = int(toks[0]), int(toks[1])
                val = 1.0 if field == "pattern" else float(toks[2])
            except ValueError:
                raise MatrixFileError("malformed coordinate entry", path=path,
                                      line=no)
            if not (1 <= i <= rows and 1 <= j <= cols):
                raise MatrixFileError(f"index ({i}, {j}) out of range",
                                      path=path, line=no)
            M[i - 1, j - 1] += val
            if symmetry != "general" and i != j:
                M[j - 1, i - 1] += -val if symmetry == "skew-symmetric" else val
        return M

    if len(parts) != 2:
        raise MatrixFileError("array size line must be 'rows cols'",
                              path=path, line=size_no)
    try:
        rows, cols = int(parts[0]), int(parts[1])
    except ValueError:
        raise MatrixFileError("malformed size line", path=path, line=size_no)
    vals = []
    for no, text in entries:
        for tok in text.split():
            try:
                vals.append(float(tok))
            except ValueError:
                raise MatrixFileError("malformed array value", path=path,
                                      line=no)
    M = np.zeros((rows, cols))
    if symmetry == "general":
        if len(vals) != rows * cols:
            raise MatrixFileError(
                f"expected {rows * cols} values, found {len(vals)}", path=path)
        # Matrix Market array data is column-major.
        M = np.array(vals).reshape((cols, rows)).T
    else:
        if rows != cols:
            raise MatrixFileError("symmetric array must be square", path=path)
        want = rows * (rows + 1) // 2
        if len(vals) != want:
            raise MatrixFileError(
                f"expected {want} lower-triangular values, found {len(vals)}",
                path=path)
        k = 0
        for j in range(cols):
            for i in range(j, rows):
                M[i, j] = vals[k]
                if i != j:
                    M[j, i] = -vals[k] if symmetry == "skew-symmetric" else vals[k]
                k += 1
    return M


def _read_dense_text(lines, path):
    rows = []
    width = None
    for no, raw in enumerate(lines, start=1):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        try:
            row = [float(tok) for tok in text.split()]
        except ValueError:
            raise MatrixFileError("malformed dense row", path=path, line=no)
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise MatrixFileError(
                f"row has {len(row)} entries, expected {width}", path=path,
                line=no)
        rows.append(row)
    if not rows:
        raise MatrixFileError("no numeric data found", path=path)
    return np.array(rows)


def write_matrix(path, M):
    """Write a dense text matrix with 17 significant digits (lossless
    round-trip for doubles)."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    with open(path, "w", encoding="utf-8") as fh:
        for row in M:
            fh.write(" ".join(f"{v:.17g}" for v in row))
            fh.write("\n")


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


# ---------------------------------------------------------------------------
# Config file


def _read_config(path):
    cfg = {}
    with open(path, "r", encoding="utf-8") as fh:
        for no, raw in enumerate(fh, start=1):
            text = raw.split("#", 1)[0].strip()
            if not text:
                continue
            if "=" not in text:
                raise MatrixFileError("expected 'key = value'", path=path,
                                      line=no)
            key, _, value = text.partition("=")
            cfg[key.strip().replace("-", "_")] = value.strip()
    return cfg


_CONFIG_TYPES = {
    "tau": float,
    "horizon": int,
    "locality": int,
    "norm": str,
    "gamma": float,
    "bisect_tol": float,
    "paper_literal": lambda s: s.lower() in ("1", "true", "yes"),
    "seed": int,
    "out": str,
    "zero_tol": float,
    "steps": int,
    "impulse_bus": int,
    "impulse_scale": float,
    "alpha": float,
    "bandwidth": int,
    "sizes": str,
    "inertia": float,
    "damping": float,
    "h_scale": float,
}


def _apply_config(args, parser):
    if not getattr(args, "config", None):
        return args
    cfg = _read_config(args.config)
    given = {a.lstrip("-").replace("-", "_")
             for a in sys.argv[1:] if a.startswith("--")}
    for key, text in cfg.items():
        if key not in _CONFIG_TYPES:
            raise MatrixFileError(f"unknown config key {key!r}",
                                  path=args.config)
        if key in given or not hasattr(args, key):
            continue  # command line wins
        setattr(args, key, _CONFIG_TYPES[key](text))
    return args


# ---------------------------------------------------------------------------
# Shared assembly helpers


def _standard_cost(n, n_u, n_w):
    C1 = np.vstack([np.eye(n), np.zeros((n_u, n))])
    D12 = np.vstack([np.zeros((n, n_u)), np.eye(n_u)])
    D11 = np.zeros((n + n_u, n_w))
    return C1, D11, D12


def _norm_kind(name):
    return {"l1": DeltaNorm.L1, "e1": DeltaNorm.E1,
            "hinf": DeltaNorm.HINF_SAMPLED}[name]


class _System:
    """Continuous model plus the graph data the synthesis pipeline needs."""

    def __init__(self, cplant, adjacency, actuator_map, bus_of_state=None):
        self.cplant = cplant
        self.adjacency = adjacency
        self.actuator_map = actuator_map
        self.bus_of_state = bus_of_state


def _load_system(args):
    """Build the continuous-time system from --case57 or matrix files."""
    if getattr(args, "case57", False) or getattr(args, "topology", None):
        if getattr(args, "topology", None):
            spec = load_topology(args.topology, inertia=args.inertia,
                                 damping=args.damping, default_h=args.h_scale)
        else:
            spec = case57_topology(inertia=args.inertia, damping=args.damping,
                                   h_scale=args.h_scale)
        cplant, index_map, bus_adj = linearize(spec)
        adjacency = state_adjacency(index_map, bus_adj)
        amap = actuator_sites(index_map)
        return _System(cplant, adjacency, amap, index_map.bus_of_state()), spec
    if not getattr(args, "a", None) or not getattr(args, "b2", None):
        raise MatrixFileError(
            "either --case57/--topology or --a and --b2 must be given",
            path=None)
    from .discretize import ContinuousPlant

    Ahat = read_matrix(args.a)
    B2hat = read_matrix(args.b2)
    B1hat = read_matrix(args.b1) if getattr(args, "b1", None) else np.eye(
        Ahat.shape[0])
    cplant = ContinuousPlant(Ahat=Ahat, B1hat=B1hat, B2hat=B2hat)
    adjacency = support(Ahat, args.zero_tol)
    adjacency = adjacency | adjacency.T
    np.fill_diagonal(adjacency, True)
    amap = support(B2hat, args.zero_tol).T
    return _System(cplant, adjacency, amap, None), None


# ---------------------------------------------------------------------------
# Commands


def cmd_discretize(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    Ahat = read_matrix(args.input)
    if Ahat.shape[0] != Ahat.shape[1]:
        raise MatrixFileError("input matrix must be square", path=args.input)
    tau = args.tau
    A_zoh = expm(Ahat * tau)
    A_trunc = truncate_first_order(Ahat, tau)
    A_proj = project_A(Ahat, tau)
    write_matrix(out / "A_zoh.txt", A_zoh)
    write_matrix(out / "A_trunc.txt", A_trunc)
    write_matrix(out / "A_proj.txt", A_proj)

    for name in ("b1", "b2"):
        p = getattr(args, name, None)
        if p:
            Bhat = read_matrix(p)
            from .discretize import project_B
            from .matexp import zoh_pair

            _, B_zoh = zoh_pair(Ahat, Bhat, tau)
            B_proj = project_B(Ahat, Bhat, tau)
            write_matrix(out / f"{name.upper()}_zoh.txt", B_zoh)
            write_matrix(out / f"{name.upper()}_proj.txt", B_proj)
            write_matrix(out / f"{name.upper()}_trunc.txt", tau * Bhat)

    s = bnd.bandwidth(Ahat, args.zero_tol)
    alpha = matrix_norm(Ahat * tau, "max")
    rows = []
    for name, approx in (("projected", A_proj), ("truncated", A_trunc)):
        _, norms = bnd.empirical_delta(A_zoh, approx)
        rows.append([name, norms.rho, norms.eps, norms.nu])
    header = ["method", "delta_2", "delta_inf", "delta_1"]
    bound_rows = []
    if 1 <= s <= Ahat.shape[0] - 2:
        db = bnd.delta_norm_bounds(Ahat.shape[0], alpha, s)
        bound_rows.append(["projected_bound", db.rho, db.eps, db.nu])
    try:
        t4 = bnd.truncation_bound(matrix_norm(Ahat, "two"), tau)
        bound_rows.append(["truncated_bound_2norm", t4, "", ""])
    except BoundInapplicable:
        pass
    write_csv(out / "summary.csv", header, rows + bound_rows)
    write_csv(out / "profile.csv", ["n", "bandwidth", "alpha", "tau"],
              [[Ahat.shape[0], s, alpha, tau]])
    print(f"wrote discretizations and summary to {out}")
    return EXIT_OK


def cmd_bounds(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    sizes = [int(tok) for tok in str(args.sizes).split(",") if tok]
    s = args.bandwidth
    alpha_target = args.alpha
    rng = np.random.default_rng(args.seed)
    rows = []
    for n in sizes:
        Ahat = _random_banded(rng, n, s)
        tau = alpha_target / matrix_norm(Ahat, "max")
        A_dense = expm(Ahat * tau)
        A_proj = project_A(Ahat, tau)
        _, emp = bnd.empirical_delta(A_dense, A_proj)
        if 1 <= s <= n - 2:
            db = bnd.delta_norm_bounds(n, matrix_norm(Ahat * tau, "max"), s)
        else:
            db = bnd.DeltaBounds(0.0, 0.0, 0.0)
        rows.append([n, emp.rho, db.rho, emp.eps, db.eps, emp.nu, db.nu])
    write_csv(out / "bounds_fig2.csv",
              ["n", "empirical_2norm", "bound_2norm", "empirical_infnorm",
               "bound_infnorm", "empirical_1norm", "bound_1norm"], rows)
    print(f"wrote decay-bound comparison for n in {sizes} to {out}")
    return EXIT_OK


def _random_banded(rng, n, s):
    A = rng.uniform(-1.0, 1.0, size=(n, n))
    i, j = np.indices((n, n))
    A[np.abs(i - j) > s] = 0.0
    return A


def _synthesis_inputs(args):
    system, spec = _load_system(args)
    tau = args.tau
    cplant = system.cplant
    n, n_u, n_w = cplant.n, cplant.B2hat.shape[1], cplant.B1hat.shape[1]
    C1, D11, D12 = _standard_cost(n, n_u, n_w)
    sparse_plant = discretize_all(cplant, C1, D11, D12, tau,
                                  DiscretizationMethod.PROJECTED)
    dense_plant = discretize_all(cplant, C1, D11, D12, tau,
                                 DiscretizationMethod.ZOH_EXACT)
    loc = locality_mask(system.adjacency, system.actuator_map,
                        d=args.locality, T=args.horizon)
    return system, sparse_plant, dense_plant, loc


def _run_synthesis(args, sparse_plant, loc):
    kind = _norm_kind(args.norm)
    if args.paper_literal or args.bisect_tol is None:
        return synthesize(sparse_plant, loc, gamma=args.gamma, norm_kind=kind)
    return synthesize_bisect(sparse_plant, loc, norm_kind=kind,
                             bisect_tol=args.bisect_tol)


def _write_outcome(out, outcome, timing_rows=None):
    for k in range(1, outcome.phi_x.T + 1):
        write_matrix(out / f"phi_x_{k}.txt", outcome.phi_x.tap(k))
        write_matrix(out / f"phi_u_{k}.txt", outcome.phi_u.tap(k))
        write_matrix(out / f"delta_{k}.txt", outcome.delta.tap(k))
    write_csv(out / "outcome.csv",
              ["gamma", "cost", "status", "delta_norm", "norm", "kkt_residual",
               "iterations"],
              [[outcome.gamma, outcome.cost, outcome.status.value,
                outcome.delta_norm, outcome.norm_kind.value,
                outcome.kkt_residual, outcome.iterations]])
    if timing_rows:
        write_csv(out / "timing.csv", ["column", "variables", "seconds"],
                  timing_rows)


def cmd_synthesize(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    system, sparse_plant, dense_plant, loc = _synthesis_inputs(args)
    timing_rows = []
    if args.paper_literal or args.bisect_tol is None:
        # Time the per-column equality solves when the cap is exact.
        if args.gamma == 0.0:
            kind = _norm_kind(args.norm)
            for j in range(sparse_plant.n):
                t0 = time.perf_counter()
                sub = _InnerSolver(sparse_plant, loc, kind, SolverOptions(),
                                   columns=[j])
                sub.solve_equality_raw()
                timing_rows.append([j, sub.num_vars,
                                    time.perf_counter() - t0])
    outcome = _run_synthesis(args, sparse_plant, loc)
    _write_outcome(out, outcome, timing_rows)

    if args.sweep:
        rows = []
        for T in _parse_range(args.sweep_horizons):
            for d in _parse_range(args.sweep_localities):
                loc_td = locality_mask(system.adjacency, system.actuator_map,
                                       d=d, T=T)
                res = synthesize(sparse_plant, loc_td, gamma=args.gamma,
                                 norm_kind=_norm_kind(args.norm))
                rows.append([T, d, res.status.value, res.cost,
                             res.delta_norm])
        write_csv(out / "sweep.csv",
                  ["horizon", "locality", "status", "cost", "delta_norm"],
                  rows)
    delta_true = sls_residual(dense_plant.A, dense_plant.B2, outcome.phi_x,
                              outcome.phi_u)
    stable, rho = check_robust_stability(delta_true)
    _, model_err = bnd.empirical_delta(dense_plant.A, sparse_plant.A)
    write_csv(out / "robustness.csv",
              ["spectral_radius", "stable", "model_delta_2", "model_delta_inf",
               "model_delta_1"],
              [[rho, stable, model_err.rho, model_err.eps, model_err.nu]])
    print(f"synthesis {outcome.status.value}: gamma={outcome.gamma} "
          f"cost={outcome.cost:.6g} residual={outcome.delta_norm:.3e} -> {out}")
    if outcome.status is SynthesisStatus.INFEASIBLE:
        return EXIT_INFEASIBLE
    if outcome.status is SynthesisStatus.SOLVER_LIMIT:
        return EXIT_NUMERICAL
    return EXIT_OK


def _parse_range(text):
    if ":" in text:
        lo, hi = text.split(":", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(tok) for tok in text.split(",") if tok]


def cmd_simulate(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    system, sparse_plant, dense_plant, loc = _synthesis_inputs(args)
    outcome = _run_synthesis(args, sparse_plant, loc)
    if outcome.status is SynthesisStatus.INFEASIBLE:
        print("synthesis infeasible; nothing to simulate", file=sys.stderr)
        return EXIT_INFEASIBLE

    n_w = sparse_plant.n_w
    steps = args.steps
    if system.bus_of_state is not None:
        channel = args.impulse_bus - 1
        if not 0 <= channel < n_w:
            raise MatrixFileError(f"impulse bus {args.impulse_bus} out of range",
                                  path=None)
    else:
        channel = min(max(args.impulse_bus - 1, 0), n_w - 1)
    w = impulse_disturbance(steps, n_w, channel, args.impulse_scale)

    runs = (("nominal", sparse_plant), ("dense", dense_plant))
    trajs = {}
    for label, plant in runs:
        ctrl = make_controller(outcome.phi_x, outcome.phi_u)
        trajs[label] = closed_loop(plant, ctrl, w)
        _write_trajectory(out / f"trajectory_{label}.csv", trajs[label],
                          system.bus_of_state)

    delta_true = sls_residual(dense_plant.A, dense_plant.B2, outcome.phi_x,
                              outcome.phi_u)
    stable, rho = check_robust_stability(delta_true)
    peak = float(np.max(np.abs(trajs["dense"].states), initial=0.0))
    tail = float(np.max(np.abs(trajs["dense"].states[-1]), initial=0.0))
    write_csv(out / "stability.csv",
              ["gamma", "cost", "spectral_radius", "stable", "dense_peak",
               "dense_final"],
              [[outcome.gamma, outcome.cost, rho, stable, peak, tail]])
    print(f"simulated {steps} steps (impulse on disturbance channel "
          f"{channel}); spectral radius {rho:.4f} -> {out}")
    return EXIT_OK


def _write_trajectory(path, traj, bus_of_state):
    rows = []
    x = traj.states
    for k in range(x.shape[0]):
        for i in range(x.shape[1]):
            bus = bus_of_state[i] + 1 if bus_of_state is not None else i + 1
            val = x[k, i]
            logmag = np.log10(abs(val)) if val != 0.0 else -np.inf
            rows.append([k, bus, i, val, logmag])
    write_csv(path, ["time", "bus", "state", "value", "log10_abs"], rows)


# ---------------------------------------------------------------------------
# Parser


def build_parser():
    parser = argparse.ArgumentParser(
        prog="sparsesls",
        description=("Sparsity-preserving discretization with certified "
                     "error bounds and distributed controller synthesis."),
        epilog=("Config files hold 'key = value' lines mirroring the long "
                "flags (e.g. 'tau = 0.2'); command-line flags win."))
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="flat key = value config file")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--seed", type=int, default=0, help="random seed")

    def system_flags(p):
        p.add_argument("--case57", action="store_true",
                       help="use the bundled 57-bus network")
        p.add_argument("--topology", help="topology file (see case57.topo)")
        p.add_argument("--a", help="continuous A matrix file")
        p.add_argument("--b1", help="continuous B1 matrix file")
        p.add_argument("--b2", help="continuous B2 matrix file")
        p.add_argument("--inertia", type=float, default=1.0)
        p.add_argument("--damping", type=float, default=1.0)
        p.add_argument("--h-scale", dest="h_scale", type=float, default=1.0)
        p.add_argument("--zero-tol", dest="zero_tol", type=float, default=1e-14,
                       help="support tolerance for matrices read from files")

    def synthesis_flags(p):
        p.add_argument("--tau", type=float, default=0.2, help="sample time")
        p.add_argument("--horizon", type=int, default=5, help="FIR horizon T")
        p.add_argument("--locality", type=int, default=4,
                       help="locality radius d in hops")
        p.add_argument("--norm", choices=("l1", "e1", "hinf"), default="l1",
                       help="norm measuring the residual")
        p.add_argument("--gamma", type=float, default=0.0,
                       help="fixed residual cap (with --paper-literal or "
                            "when --bisect-tol is omitted)")
        p.add_argument("--bisect-tol", dest="bisect_tol", type=float,
                       default=None,
                       help="enable the outer gamma search at this tolerance")
        p.add_argument("--paper-literal", dest="paper_literal",
                       action="store_true",
                       help="minimize the cost at the fixed --gamma instead "
                            "of searching the merit cost/(1-gamma)")

    p = sub.add_parser("discretize", help="write all discretizations of A")
    common(p)
    p.add_argument("--input", required=True, help="continuous A matrix file")
    p.add_argument("--b1", help="continuous B1 matrix file")
    p.add_argument("--b2", help="continuous B2 matrix file")
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--zero-tol", dest="zero_tol", type=float, default=1e-14)
    p.set_defaults(func=cmd_discretize)

    p = sub.add_parser("bounds", help="decay-bound vs empirical comparison")
    common(p)
    p.add_argument("--sizes", default="20,40,60,100,200",
                   help="comma-separated matrix sizes")
    p.add_argument("--bandwidth", type=int, default=4)
    p.add_argument("--alpha", type=float, default=0.5,
                   help="target max-norm of A*tau")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("synthesize", help="design a distributed controller")
    common(p)
    system_flags(p)
    synthesis_flags(p)
    p.add_argument("--sweep", action="store_true",
                   help="emit a (T, d) feasibility sweep")
    p.add_argument("--sweep-horizons", default="3:6")
    p.add_argument("--sweep-localities", default="2:5")
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("simulate", help="closed-loop impulse experiments")
    common(p)
    system_flags(p)
    synthesis_flags(p)
    p.add_argument("--steps", type=int, default=60)
    p.add_argument("--impulse-bus", dest="impulse_bus", type=int, default=3,
                   help="1-based disturbance channel (bus) hit at time 0")
    p.add_argument("--impulse-scale", dest="impulse_scale", type=float,
                   default=1.0)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args = _apply_config(args, parser)
        return args.func(args)
    except (MatrixFileError, TopologyError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (AllInfeasible, ContractViolation) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (SingularPencil, BoundInapplicable, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SparseSlsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
