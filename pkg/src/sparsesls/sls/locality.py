"""Spatial locality constraints for distributed synthesis.

A locality constraint restricts every spectral component of phi_x to node
pairs within d hops of each other on an interaction graph, and every
component of phi_u to (actuator, node) pairs within d hops of the
actuator's site.  The same mask applies to all taps: the FIR horizon
itself is the temporal constraint.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class LocalityConstraint:
    """Support masks for phi_x (n x n) and phi_u (n_u x n), a locality
    radius d, and the FIR horizon T they apply to."""

    mask_x: np.ndarray
    mask_u: np.ndarray
    d: int
    T: int

    def __post_init__(self):
        mx = np.asarray(self.mask_x, dtype=bool)
        mu = np.asarray(self.mask_u, dtype=bool)
        if mx.ndim != 2 or mx.shape[0] != mx.shape[1]:
            raise ValueError("mask_x must be a square boolean matrix")
        if mu.ndim != 2 or mu.shape[1] != mx.shape[0]:
            raise ValueError("mask_u column count must match mask_x")
        if self.T < 1:
            raise ValueError("horizon T must be at least 1")
        object.__setattr__(self, "mask_x", mx)
        object.__setattr__(self, "mask_u", mu)

    @property
    def n(self):
        return self.mask_x.shape[0]

    @property
    def n_u(self):
        return self.mask_u.shape[0]


def full_locality(n, n_u, T):
    """Unconstrained masks (every pair allowed)."""
    return LocalityConstraint(
        mask_x=np.ones((n, n), dtype=bool),
        mask_u=np.ones((n_u, n), dtype=bool),
        d=n,
        T=T,
    )


def graph_distances(adjacency):
    """All-pairs hop distances on a boolean adjacency matrix.

    The diagonal counts as distance 0; unreachable pairs get +inf.
    """
    adj = np.asarray(adjacency, dtype=bool)
    n = adj.shape[0]
    if adj.shape != (n, n):
        raise ValueError("adjacency must be square")
    dist = np.full((n, n), np.inf)
    reach = np.eye(n, dtype=bool)
    dist[reach] = 0.0
    hops = 0
    frontier = reach
    while frontier.any() and hops < n:
        hops += 1
        grown = (frontier.astype(np.uint8) @ adj.astype(np.uint8)) > 0
        frontier = grown & ~reach
        dist[frontier] = hops
        reach |= frontier
    return dist


def locality_mask(adjacency, actuator_map, d, T):
    """Build the d-hop LocalityConstraint from an interaction graph.

    ``adjacency`` must be symmetric with a true diagonal.  ``actuator_map``
    marks, per actuator row, the node(s) the actuator lives at; the
    actuator's distance to a node is the minimum over its sites.
    Disconnected pairs stay masked out.
    """
    adj = np.asarray(adjacency, dtype=bool)
    n = adj.shape[0]
    if adj.shape != (n, n):
        raise ValueError("adjacency must be square")
    if not np.array_equal(adj, adj.T):
        raise ValueError("adjacency must be symmetric")
    if not np.all(np.diag(adj)):
        raise ValueError("adjacency must have a true diagonal")
    amap = np.asarray(actuator_map, dtype=bool)
    if amap.ndim != 2 or amap.shape[1] != n:
        raise ValueError("actuator_map must have one column per node")
    if not amap.any(axis=1).all():
        raise ValueError("every actuator needs at least one site")
    if d < 0:
        raise ValueError("locality radius d must be nonnegative")
    dist = graph_distances(adj)
    mask_x = dist <= d
    # Distance from an actuator to node j: min over the actuator's sites.
    dist_u = np.full((amap.shape[0], n), np.inf)
    for a in range(amap.shape[0]):
        dist_u[a] = np.min(dist[amap[a]], axis=0)
    mask_u = dist_u <= d
    return LocalityConstraint(mask_x=mask_x, mask_u=mask_u, d=d, T=T)
