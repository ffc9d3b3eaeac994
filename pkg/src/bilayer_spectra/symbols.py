"""Scalar and matrix symbols of the bilayer operators.

Everything here is a pure function of the spectral parameter z, the mass m,
or a frequency xi in R^2.  Frequencies may be passed as arrays of shape
(..., 2); matrix-valued results then have shape (..., 2, 2).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

BILAYER = "bilayer-mass"
TRIG = "trig-warp"

_MATRIX_KINDS = (BILAYER, TRIG)


class SpectralPoleError(ValueError):
    """Raised when a quantity with a pole/zero at z = +-m is evaluated there."""


def eval_k(z: complex, m: float) -> complex:
    """Quarter-plane branch of k, the fourth root of z^2 - m^2.

    The branch is fixed by arg(k) in [0, pi/2): take the principal fourth
    root and rotate by i until the argument lands in that quarter plane.
    k(+-m) = 0.
    """
    w = complex(z) ** 2 - float(m) ** 2
    if w == 0:
        return 0.0 + 0.0j
    k = w ** 0.25
    # principal fourth root has arg in (-pi/4, pi/4]; at most one rotation needed
    if k.imag < 0 or (k.imag == 0 and k.real < 0):
        k *= 1j
    if not (0 <= np.angle(k) < np.pi / 2):
        k *= 1j
    return k


def eval_zeta(z: complex, m: float) -> complex:
    """zeta = (z + m) / k(z)^2.  Pole at z = m (for m > 0), zero at z = -m."""
    if z == m or z == -m:
        raise SpectralPoleError(f"zeta undefined at z = {z} with m = {m}")
    k = eval_k(z, m)
    return (complex(z) + m) / (k * k)


@dataclass(frozen=True)
class SpectralPoint:
    """Spectral parameter z with mass m and the derived branch values."""

    z: complex
    m: float
    k: complex
    zeta: Optional[complex]

    @classmethod
    def from_z(cls, z: complex, m: float) -> "SpectralPoint":
        pole = z == m or z == -m
        return cls(z=complex(z), m=float(m), k=eval_k(z, m),
                   zeta=None if pole else eval_zeta(z, m))


def _as_xi(xi) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    if xi.shape[-1] != 2:
        raise ValueError(f"xi must have trailing dimension 2, got shape {xi.shape}")
    return xi


def eval_P(xi) -> np.ndarray:
    """Trigonally warped dispersion polynomial |xi|^4 + 2 Re(xi^3) + |xi|^2."""
    xi = _as_xi(xi)
    x, y = xi[..., 0], xi[..., 1]
    r2 = x * x + y * y
    return r2 * r2 + 2.0 * (x ** 3 - 3.0 * x * y * y) + r2


def eval_P_gradient(xi) -> np.ndarray:
    xi = _as_xi(xi)
    x, y = xi[..., 0], xi[..., 1]
    r2 = x * x + y * y
    gx = 4.0 * x * r2 + 6.0 * (x * x - y * y) + 2.0 * x
    gy = 4.0 * y * r2 - 12.0 * x * y + 2.0 * y
    return np.stack([gx, gy], axis=-1)


def eval_P_hessian(xi) -> np.ndarray:
    xi = _as_xi(xi)
    x, y = xi[..., 0], xi[..., 1]
    hxx = 12.0 * x * x + 4.0 * y * y + 12.0 * x + 2.0
    hyy = 4.0 * x * x + 12.0 * y * y - 12.0 * x + 2.0
    hxy = 8.0 * x * y - 12.0 * y
    h = np.stack([np.stack([hxx, hxy], axis=-1),
                  np.stack([hxy, hyy], axis=-1)], axis=-2)
    return h


def eval_P_derivatives(xi):
    """Exact polynomial gradient and Hessian of P at xi."""
    return eval_P_gradient(xi), eval_P_hessian(xi)


def symbol_matrix(kind: str, xi, m: float = 0.0) -> np.ndarray:
    """Hermitian 2x2 symbol of the free operator at frequency xi.

    bilayer-mass: [[m, conj(w^2)], [w^2, -m]] with w = xi1 + i xi2, so that
    M^2 = (m^2 + |xi|^4) Id.  trig-warp: off-diagonal q = w^2 + conj(w), so
    that M^2 = P(xi) Id.
    """
    xi = _as_xi(xi)
    w = xi[..., 0] + 1j * xi[..., 1]
    out = np.zeros(xi.shape[:-1] + (2, 2), dtype=complex)
    if kind == BILAYER:
        w2 = w * w
        out[..., 0, 0] = m
        out[..., 1, 1] = -m
        out[..., 0, 1] = np.conj(w2)
        out[..., 1, 0] = w2
    elif kind == TRIG:
        q = w * w + np.conj(w)
        out[..., 0, 1] = np.conj(q)
        out[..., 1, 0] = q
    else:
        raise ValueError(f"unknown symbol kind {kind!r}; expected one of {_MATRIX_KINDS}")
    return out


def symbol_square_scalar(kind: str, xi, m: float = 0.0) -> np.ndarray:
    """Scalar s(xi) with M(xi)^2 = s(xi) Id: m^2 + |xi|^4 or P(xi)."""
    xi = _as_xi(xi)
    if kind == BILAYER:
        r2 = xi[..., 0] ** 2 + xi[..., 1] ** 2
        return m * m + r2 * r2
    if kind == TRIG:
        return eval_P(xi)
    raise ValueError(f"unknown symbol kind {kind!r}; expected one of {_MATRIX_KINDS}")


def dispersion(kind: str, xi, m: float = 0.0):
    """Ordered eigenvalue pair (lambda_-, lambda_+) of the symbol at xi."""
    # clamp values like -1e-16 that rounding produces at the conical points
    s = np.sqrt(np.maximum(symbol_square_scalar(kind, xi, m), 0.0))
    return -s, s


@dataclass(frozen=True)
class MultiplierSymbol:
    """Matrix-valued Fourier multiplier: frequency grid -> 2x2 matrices.

    kind is informational ('bilayer-mass', 'trig-warp', 'scalar-cutoff',
    'custom'); eval maps an (..., 2) frequency array to (..., 2, 2) values.
    Scalar multipliers are represented as scalar * Id.
    """

    kind: str
    eval: Callable[[np.ndarray], np.ndarray]
    m: float = 0.0

    @classmethod
    def free(cls, kind: str, m: float = 0.0) -> "MultiplierSymbol":
        return cls(kind=kind, eval=lambda xi: symbol_matrix(kind, xi, m), m=m)

    @classmethod
    def scalar(cls, fn: Callable[[np.ndarray], np.ndarray],
               kind: str = "scalar-cutoff") -> "MultiplierSymbol":
        def ev(xi):
            vals = np.asarray(fn(xi), dtype=complex)
            out = np.zeros(vals.shape + (2, 2), dtype=complex)
            out[..., 0, 0] = vals
            out[..., 1, 1] = vals
            return out
        return cls(kind=kind, eval=ev)

    @classmethod
    def identity(cls) -> "MultiplierSymbol":
        return cls.scalar(lambda xi: np.ones(np.asarray(xi).shape[:-1]), kind="custom")
