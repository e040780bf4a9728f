"""Shared helpers for the smooth-target mesh refinement checks."""

import numpy as np

from tracezero.ozfield import circle_complex, decompose_field, field_residual_against, greedy_coloring, make_field

SZ = np.diag([1.0, -1.0]).astype(complex)
SX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SY = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)


def smooth_circle_target(theta: float) -> np.ndarray:
    """A fixed smooth, non-PL, trace-zero Hermitian loop."""
    return np.sin(theta) * SZ + np.cos(theta) * SX + np.sin(2 * theta) * SY


def circle_refinement_residual(n_vertices: int, target=smooth_circle_target) -> float:
    """Sample the smooth target at n uniform vertices, decompose the PL
    field, and measure the grid distance back to the smooth target."""
    c = circle_complex(n_vertices)
    angles = [2 * np.pi * v / n_vertices for v in range(n_vertices)]
    fld = make_field(c, [target(t) for t in angles])
    fd = decompose_field(fld, greedy_coloring(c))

    def smooth(idx, w):
        v0, v1 = c.maximal_simplices[idx]
        a0, a1 = angles[v0], angles[v1]
        if v0 == 0 and v1 == n_vertices - 1:  # wrap-around edge
            a0 = 2 * np.pi
        return target(w[0] * a0 + w[1] * a1)

    return field_residual_against(fd, fld, smooth)
