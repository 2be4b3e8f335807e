"""Linearized swing-equation models of power networks.

Generator buses carry two states (phase angle and frequency) driven by
inertia and damping; pure load buses have no inertia, their frequency is
eliminated algebraically and the phase angle becomes a first-order state.
Uncontrollable loads enter as disturbances, controllable loads as actuation,
both scaled by the same inertia/damping coefficient as the physical row.
"""

from dataclasses import dataclass
from importlib import resources

import numpy as np

from .discretize import ContinuousPlant
from .errors import TopologyError


@dataclass(frozen=True)
class GridSpec:
    """Network description: bus count, generator set, per-bus inertia and
    damping, and symmetric edge sensitivities H[i][j] (0-based buses)."""

    n_bus: int
    generators: tuple
    inertia: np.ndarray
    damping: np.ndarray
    H: np.ndarray

    def __post_init__(self):
        if self.n_bus < 1:
            raise TopologyError("need at least one bus")
        gens = tuple(sorted(set(int(g) for g in self.generators)))
        if any(g < 0 or g >= self.n_bus for g in gens):
            raise TopologyError("generator index out of range")
        M = np.asarray(self.inertia, dtype=float)
        D = np.asarray(self.damping, dtype=float)
        H = np.asarray(self.H, dtype=float)
        if M.shape != (self.n_bus,) or D.shape != (self.n_bus,):
            raise TopologyError("inertia/damping must have one entry per bus")
        if H.shape != (self.n_bus, self.n_bus):
            raise TopologyError("H must be n_bus x n_bus")
        if not np.array_equal(H, H.T):
            raise TopologyError("H must be symmetric")
        if np.any(np.diag(H) != 0):
            raise TopologyError("H must have a zero diagonal")
        if np.any(H < 0):
            raise TopologyError("H entries must be nonnegative")
        if np.any(D <= 0):
            raise TopologyError("damping must be positive at every bus")
        if any(M[g] <= 0 for g in gens):
            raise TopologyError("inertia must be positive at generator buses")
        adj = H > 0
        if not _connected(adj):
            raise TopologyError("the bus graph must be connected")
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "inertia", M)
        object.__setattr__(self, "damping", D)
        object.__setattr__(self, "H", H)

    @property
    def loads(self):
        return tuple(b for b in range(self.n_bus) if b not in set(self.generators))

    @property
    def n_states(self):
        return 2 * len(self.generators) + (self.n_bus - len(self.generators))


@dataclass(frozen=True)
class GridIndexMap:
    """State offsets per bus: theta index always, omega index for
    generators (-1 otherwise); actuator a acts at bus a."""

    theta_index: np.ndarray
    omega_index: np.ndarray
    actuated_state: np.ndarray  # state row receiving u_a, per bus

    @property
    def n_states(self):
        return int(max(self.theta_index.max(), self.omega_index.max()) + 1)

    def bus_of_state(self):
        """Inverse map: bus index per state row."""
        n = self.n_states
        out = np.empty(n, dtype=int)
        for b, t in enumerate(self.theta_index):
            out[t] = b
        for b, o in enumerate(self.omega_index):
            if o >= 0:
                out[o] = b
        return out


def _connected(adj):
    n = adj.shape[0]
    if n == 1:
        return True
    seen = np.zeros(n, dtype=bool)
    stack = [0]
    seen[0] = True
    while stack:
        b = stack.pop()
        for nb in np.flatnonzero(adj[b]):
            if not seen[nb]:
                seen[nb] = True
                stack.append(nb)
    return bool(seen.all())


def linearize(spec):
    """Assemble (ContinuousPlant, GridIndexMap, bus adjacency mask).

    Generator bus i:  theta_i' = omega_i,
                      omega_i' = (-D_i omega_i - sum_j H_ij (theta_i - theta_j)
                                  - d_i - u_i) / M_i.
    Load bus i:       theta_i' = (-sum_j H_ij (theta_i - theta_j)
                                  - d_i - u_i) / D_i.
    """
    n_bus = spec.n_bus
    gens = set(spec.generators)
    theta = np.empty(n_bus, dtype=int)
    omega = np.full(n_bus, -1, dtype=int)
    k = 0
    for b in range(n_bus):
        theta[b] = k
        k += 1
        if b in gens:
            omega[b] = k
            k += 1
    n = k

    A = np.zeros((n, n))
    B1 = np.zeros((n, n_bus))
    B2 = np.zeros((n, n_bus))
    actuated = np.empty(n_bus, dtype=int)
    for b in range(n_bus):
        nbrs = np.flatnonzero(spec.H[b])
        if b in gens:
            A[theta[b], omega[b]] = 1.0
            row = omega[b]
            coeff = 1.0 / spec.inertia[b]
            A[row, omega[b]] -= spec.damping[b] * coeff
        else:
            row = theta[b]
            coeff = 1.0 / spec.damping[b]
        for j in nbrs:
            A[row, theta[b]] -= spec.H[b, j] * coeff
            A[row, theta[j]] += spec.H[b, j] * coeff
        B1[row, b] = -coeff
        B2[row, b] = -coeff
        actuated[b] = row

    adjacency = spec.H > 0
    np.fill_diagonal(adjacency, True)
    index_map = GridIndexMap(theta_index=theta, omega_index=omega,
                             actuated_state=actuated)
    plant = ContinuousPlant(Ahat=A, B1hat=B1, B2hat=B2)
    return plant, index_map, adjacency


def state_adjacency(index_map, bus_adjacency):
    """Lift the bus graph to state space: states interact iff their buses
    are identical or adjacent."""
    bus_of = index_map.bus_of_state()
    adj = np.asarray(bus_adjacency, dtype=bool)
    return adj[np.ix_(bus_of, bus_of)]


def actuator_sites(index_map):
    """Boolean (n_bus, n_states) map marking the state row each actuator
    drives."""
    n = index_map.n_states
    n_bus = index_map.theta_index.shape[0]
    sites = np.zeros((n_bus, n), dtype=bool)
    sites[np.arange(n_bus), index_map.actuated_state] = True
    return sites


def load_topology(path_or_lines, inertia=1.0, damping=1.0, default_h=1.0):
    """Parse the plain-text topology format.

    One edge per line ``i j [H_ij]`` with 1-based bus indices, ``#``
    comments, and a generator list line ``G: i1 i2 ...``.  Buses are
    numbered densely 1..max seen.
    """
    if isinstance(path_or_lines, (list, tuple)):
        lines = list(path_or_lines)
        origin = "<memory>"
    else:
        origin = str(path_or_lines)
        with open(path_or_lines, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    edges = []
    gens = None
    max_bus = 0
    for lineno, raw in enumerate(lines, start=1):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        if text.upper().startswith("G:"):
            try:
                gens = [int(tok) for tok in text[2:].split()]
            except ValueError:
                raise TopologyError(
                    f"{origin}: line {lineno}: malformed generator list")
            if not gens:
                raise TopologyError(
                    f"{origin}: line {lineno}: empty generator list")
            continue
        parts = text.split()
        if len(parts) not in (2, 3):
            raise TopologyError(
                f"{origin}: line {lineno}: expected 'i j [H_ij]'")
        try:
            i, j = int(parts[0]), int(parts[1])
            h = float(parts[2]) if len(parts) == 3 else float(default_h)
        except ValueError:
            raise TopologyError(
                f"{origin}: line {lineno}: malformed edge entry")
        if i < 1 or j < 1:
            raise TopologyError(
                f"{origin}: line {lineno}: bus indices are 1-based")
        if i == j:
            raise TopologyError(
                f"{origin}: line {lineno}: self-loops are not allowed")
        if h <= 0:
            raise TopologyError(
                f"{origin}: line {lineno}: H_ij must be positive")
        edges.append((i - 1, j - 1, h))
        max_bus = max(max_bus, i, j)
    if not edges:
        raise TopologyError(f"{origin}: no edges found")
    if gens is None:
        raise TopologyError(f"{origin}: missing generator list line 'G: ...'")
    n_bus = max_bus
    H = np.zeros((n_bus, n_bus))
    for i, j, h in edges:
        # Parallel branches add their sensitivities.
        H[i, j] += h
        H[j, i] += h
    return GridSpec(
        n_bus=n_bus,
        generators=tuple(g - 1 for g in gens),
        inertia=np.full(n_bus, float(inertia)),
        damping=np.full(n_bus, float(damping)),
        H=H,
    )


def case57_topology(inertia=1.0, damping=1.0, h_scale=1.0):
    """The bundled 57-bus network with 7 generator buses.

    Electrical parameters are synthetic (unit inertia, damping and edge
    sensitivity by default) since the study network publishes none.
    """
    ref = resources.files("sparsesls").joinpath("data/case57.topo")
    with resources.as_file(ref) as path:
        spec = load_topology(path, inertia=inertia, damping=damping,
                             default_h=h_scale)
    return spec
