"""Closed-form inclusion-region and exponent formulas, plus empirical constants.

Everything here evaluates displayed formulas; no operator data is touched.
Constants C are always supplied by the caller or extracted empirically from
computed ratios, never hard-coded.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .symbols import SpectralPoleError, eval_k, eval_zeta
from .operators import Grid, PotentialField

SADDLE_VALUE = 1.0 / 16.0
PATCH_RADIUS = 1.0 / 64.0


def lq_norm(potential: PotentialField, q: float, grid: Grid) -> float:
    """Riemann sum of the pointwise operator norm to the q-th power.

    Returns the integral itself (the q-th power of the L^q norm).
    """
    if not (1.0 <= q <= 2.0):
        raise ValueError(f"q must lie in [1, 2], got {q}")
    return float(np.sum(potential.op_norm ** q) * grid.cell_area)


def thm1_lhs(z: complex, m: float, q: float) -> float:
    """|k(z)|^{2q-2} / (1 + |zeta| + |zeta|^{-1})^q."""
    if not (1.0 < q <= 1.5):
        raise ValueError(f"q must lie in (1, 3/2], got {q}")
    if z == m or z == -m:
        raise SpectralPoleError(f"lhs has a pole at z = +-m (z={z}, m={m})")
    k = abs(eval_k(z, m))
    zeta = abs(eval_zeta(z, m))
    return k ** (2.0 * q - 2.0) / (1.0 + zeta + 1.0 / zeta) ** q


def lfs_lhs(z: complex, m: float, q: float) -> float:
    """z-dependent factor |z^2-m^2|^{(1-q)/2} (sqrt|..| + sqrt|..| + 1)^q."""
    if not (1.0 < q < 4.0 / 3.0):
        raise ValueError(f"q must lie in (1, 4/3), got {q}")
    if z == m or z == -m:
        raise SpectralPoleError(f"factor has a pole at z = +-m (z={z}, m={m})")
    z = complex(z)
    ratio = abs((z - m) / (z + m))
    core = np.sqrt(ratio) + np.sqrt(1.0 / ratio) + 1.0
    return float(abs(z * z - m * m) ** ((1.0 - q) / 2.0) * core ** q)


def _closed_le(lhs: float, rhs: float) -> bool:
    """Non-strict comparison with a 1e-12 relative slack: regions are closed,
    so exact-boundary points must not fall out through float rounding."""
    return lhs <= rhs + 1e-12 * (1.0 + abs(rhs))


def thm1_region_ii(z: complex, m: float, v1: float, c1: float) -> bool:
    """Membership in {min(|z-m|, |z+m|) <= c1 * m * ||V||_1^2} (closed)."""
    if m <= 0:
        raise ValueError(f"mass must be positive, got {m}")
    return _closed_le(min(abs(z - m), abs(z + m)), c1 * m * v1 ** 2)


def alpha_qrd(q: float, r: float, d: int = 2, epsilon: float = 0.01) -> float:
    """Schatten exponent: 2(d-1-r)q/(d-q) on the high-q branch,
    (2rq + epsilon)/(2rq - d(q-1)) below q = d/(d-r)."""
    if not (1.0 <= q <= 1.0 + r):
        raise ValueError(f"q must lie in [1, 1+r] = [1, {1 + r}], got {q}")
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if q >= d / (d - r):
        return 2.0 * (d - 1.0 - r) * q / (d - q)
    return (2.0 * r * q + epsilon) / (2.0 * r * q - d * (q - 1.0))


def n_q(z: complex, q: float) -> float:
    """Singularity-rate profile with patches at 0 and at the saddle value 1/16.

    |z|^{1/q-1} on {|z| <= 1/64}; upsilon(z) |z - 1/16|^{1/q-1} on
    {|z - 1/16| <= 1/64} with upsilon = 1 for q > 1 and -ln|z - 1/16| at
    q = 1; in between, the max of the two continuous extensions.
    """
    if not (1.0 <= q <= 1.5):
        raise ValueError(f"q must lie in [1, 3/2], got {q}")
    z = complex(z)
    d0 = abs(z)
    d1 = abs(z - SADDLE_VALUE)
    if d0 == 0.0 or d1 == 0.0:
        raise SpectralPoleError(f"n_q has poles at 0 and 1/16; got z = {z}")
    expo = 1.0 / q - 1.0
    f0 = d0 ** expo
    ups = 1.0 if q > 1.0 else -np.log(d1)
    f1 = ups * d1 ** expo
    if d0 <= PATCH_RADIUS:
        return float(f0)
    if d1 <= PATCH_RADIUS:
        return float(f1)
    return float(max(f0, f1))


@dataclass(frozen=True)
class Thm2Membership:
    region_i: bool
    region_ii: bool
    region_iii: Optional[bool]     # None unless v1 > 0 (the q = 1 clause)


def thm2_regions(z: complex, q: float, vq: float, v1: float,
                 c: float) -> Thm2Membership:
    """Membership flags for the three trig-model inclusion regions (closed).

    (i)   |z|^{q-1} <= c (1 + vq)
    (ii)  |z|^{q-1} <= c vq  or  |z - 1/16|^{q-1} <= c vq
    (iii) |z - 1/16| <= exp(-c / v1)          (evaluated only when v1 > 0)
    """
    z = complex(z)
    p = abs(z) ** (q - 1.0)
    p_shift = abs(z - SADDLE_VALUE) ** (q - 1.0)
    reg_i = _closed_le(p, c * (1.0 + vq))
    reg_ii = _closed_le(p, c * vq) or _closed_le(p_shift, c * vq)
    reg_iii = None
    if v1 > 0:
        reg_iii = _closed_le(abs(z - SADDLE_VALUE), float(np.exp(-c / v1)))
    return Thm2Membership(region_i=bool(reg_i), region_ii=bool(reg_ii),
                          region_iii=reg_iii)


@dataclass(frozen=True)
class BoundReport:
    """One (potential, z) row of a bound-verification experiment."""

    theorem: str                  # 'thm1-i' | 'thm1-ii' | 'thm2-i' | ... | 'lfs'
    z: complex
    m: float
    q: float
    lhs: float
    vnorm_q: float                # ||V||_q^q
    ratio: float
    member: Optional[bool] = None

    @classmethod
    def from_lhs(cls, theorem: str, z: complex, m: float, q: float,
                 lhs: float, vnorm_q: float,
                 member: Optional[bool] = None) -> "BoundReport":
        if vnorm_q <= 0:
            raise ValueError("vnorm_q must be positive for a ratio report")
        return cls(theorem=theorem, z=complex(z), m=float(m), q=float(q),
                   lhs=float(lhs), vnorm_q=float(vnorm_q),
                   ratio=float(lhs / vnorm_q), member=member)


def empirical_constant(reports: Sequence[BoundReport]) -> float:
    """Largest lhs/||V||_q^q ratio over the reports: the extracted constant."""
    if not reports:
        raise ValueError("cannot extract a constant from an empty report list")
    return max(r.ratio for r in reports)
