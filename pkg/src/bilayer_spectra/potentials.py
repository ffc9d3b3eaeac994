"""Parametric potential families for the experiment harness.

Three fixed forms covering scalar, non-normal (Jordan-block) and multi-bump
complex potentials.  Amplitudes may be complex; widths are Gaussian e-folding
lengths.
"""

from __future__ import annotations

import numpy as np

from .operators import Grid, PotentialField, polar_factors, scalar_potential

FAMILIES = ("gaussian-scalar", "gaussian-jordan", "two-bump")


def _gauss(grid: Grid, center, width: float) -> np.ndarray:
    x = grid.x_mesh()
    dx = x[..., 0] - center[0]
    dy = x[..., 1] - center[1]
    return np.exp(-(dx * dx + dy * dy) / width ** 2)


def gaussian_scalar(grid: Grid, amplitude: complex, width: float) -> PotentialField:
    """amplitude * exp(-|x|^2/width^2) * Id."""
    return scalar_potential(amplitude * _gauss(grid, (0.0, 0.0), width),
                            family="gaussian-scalar")


def gaussian_jordan(grid: Grid, amplitude: complex, width: float) -> PotentialField:
    """Nilpotent Jordan block amplitude * exp(-|x|^2/width^2) * [[0,1],[0,0]]."""
    g = amplitude * _gauss(grid, (0.0, 0.0), width)
    v = np.zeros(g.shape + (2, 2), dtype=complex)
    v[..., 0, 1] = g
    return polar_factors(v, family="gaussian-jordan")


def two_bump(grid: Grid, amplitude: complex, width: float) -> PotentialField:
    """Two offset bumps: scalar at (-2w, 0) plus i*amplitude*sigma3 at (+2w, 0)."""
    g1 = _gauss(grid, (-2.0 * width, 0.0), width)
    g2 = _gauss(grid, (+2.0 * width, 0.0), width)
    v = np.zeros(g1.shape + (2, 2), dtype=complex)
    v[..., 0, 0] = amplitude * g1 + 1j * amplitude * g2
    v[..., 1, 1] = amplitude * g1 - 1j * amplitude * g2
    return polar_factors(v, family="two-bump")


def build_potential(family: str, grid: Grid, amplitude: complex,
                    width: float) -> PotentialField:
    if family == "gaussian-scalar":
        return gaussian_scalar(grid, amplitude, width)
    if family == "gaussian-jordan":
        return gaussian_jordan(grid, amplitude, width)
    if family == "two-bump":
        return two_bump(grid, amplitude, width)
    raise ValueError(f"unknown potential family {family!r}; expected one of {FAMILIES}")
