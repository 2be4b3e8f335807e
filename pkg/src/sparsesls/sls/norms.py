"""System norms of FIR transfer matrices.

The induced l-inf -> l-inf norm (here "L1"), its transpose counterpart
("E1"), the impulse-response H2 norm, and a sampled estimate of the H-inf
norm on an equispaced frequency grid.
"""

import numpy as np


def l1_norm(G):
    """max over rows i of sum_j sum_k |G_ij[k]| (induced l-inf -> l-inf).

    FIR responses make the infinite sum finite; the value is exact.
    """
    taps = G.as_array()
    return float(np.max(np.sum(np.abs(taps), axis=(0, 2))))


def e1_norm(G):
    """l1_norm of the transposed transfer: max over columns of the
    entrywise absolute tap sum."""
    taps = G.as_array()
    return float(np.max(np.sum(np.abs(taps), axis=(0, 1))))


def h2_norm(G):
    """Square root of the total impulse-response energy (Frobenius over
    all spectral components)."""
    taps = G.as_array()
    return float(np.sqrt(np.sum(taps * taps)))


def hinf_norm_sampled(G, grid_points=256):
    """Largest singular value of the frequency response over an equispaced
    grid on the unit circle.

    A lower estimate of the true H-inf norm that converges from below as
    the grid refines; grids nested by powers of two give monotone values.
    """
    if grid_points < 64:
        raise ValueError(f"grid_points must be at least 64, got {grid_points}")
    F = G.frequency_response(grid_points)
    sv = np.linalg.svd(F, compute_uv=False)
    return float(np.max(sv[:, 0]))
