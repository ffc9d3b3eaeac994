"""Shared fixtures: traced curves and small grids reused across modules."""

import numpy as np
import pytest

from bilayer_spectra.fermi import ScalarField, trace_level_set, find_degenerate_lambda


def circle_level_field(radius_sq=1.0):
    """|xi|^2 as a ScalarField; its level set at radius_sq is a circle."""
    def value(xi):
        xi = np.asarray(xi, dtype=float)
        return xi[..., 0] ** 2 + xi[..., 1] ** 2

    def gradient(xi):
        return 2.0 * np.asarray(xi, dtype=float)

    def hessian(xi):
        xi = np.asarray(xi, dtype=float)
        return np.broadcast_to(2.0 * np.eye(2), xi.shape[:-1] + (2, 2)).copy()

    return ScalarField(value, gradient, hessian)


@pytest.fixture(scope="session")
def unit_circle_curve():
    return trace_level_set(1.0, field=circle_level_field())


@pytest.fixture(scope="session")
def degenerate_pair():
    return find_degenerate_lambda()


@pytest.fixture(scope="session")
def degenerate_curve(degenerate_pair):
    lam, _ = degenerate_pair
    return trace_level_set(lam)


@pytest.fixture(scope="session")
def curve_eighth():
    return trace_level_set(0.125)


def bump_cutoff(center, rad):
    c = np.asarray(center, dtype=float)

    def chi(pts):
        u = np.linalg.norm(np.asarray(pts, dtype=float) - c, axis=-1) / rad
        out = np.zeros_like(u)
        m = u < 1.0
        out[m] = np.exp(1.0 - 1.0 / (1.0 - u[m] ** 2))
        return out

    return chi
