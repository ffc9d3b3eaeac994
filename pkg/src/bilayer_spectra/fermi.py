"""Level-set geometry of the warped dispersion polynomial.

Critical points, predictor-corrector tracing of the level curves
M_lambda = {P(xi) = lambda}, curvature profiles, finite-type order of
curvature vanishing, and the search for the degenerate level where the
curvature vanishes to second order.

All routines accept an optional ScalarField so that perturbed symbols can be
probed with the same machinery; the default field is the warped polynomial.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, List, Optional, Tuple

import numpy as np

from .symbols import eval_P, eval_P_gradient, eval_P_hessian

SADDLE_VALUE = 1.0 / 16.0


class DegenerateLevelError(RuntimeError):
    """Gradient collapsed below threshold while tracing a level curve."""


class CriticalPointSearchError(RuntimeError):
    """Newton search left a deduplicated root with residual above tolerance."""


class FiniteTypeInconclusiveError(RuntimeError):
    """Neither curvature nor its first two arclength derivatives exceed tol."""


class DegenerateNotFoundError(RuntimeError):
    """Joint |kappa| + |dkappa/ds| residual floor exceeded 1e-6 everywhere."""


@dataclass(frozen=True)
class ScalarField:
    """Smooth scalar field on R^2 with exact gradient and Hessian."""

    value: Callable[[np.ndarray], np.ndarray]
    gradient: Callable[[np.ndarray], np.ndarray]
    hessian: Callable[[np.ndarray], np.ndarray]


WARP_FIELD = ScalarField(eval_P, eval_P_gradient, eval_P_hessian)


def perturbed_warp_field(eps: float) -> ScalarField:
    """Warped polynomial plus eps * (xi1^3 - 3 xi1 xi2^2)."""

    def value(xi):
        xi = np.asarray(xi, dtype=float)
        x, y = xi[..., 0], xi[..., 1]
        return eval_P(xi) + eps * (x ** 3 - 3.0 * x * y * y)

    def gradient(xi):
        xi = np.asarray(xi, dtype=float)
        x, y = xi[..., 0], xi[..., 1]
        g = eval_P_gradient(xi).copy()
        g[..., 0] += eps * 3.0 * (x * x - y * y)
        g[..., 1] += eps * (-6.0 * x * y)
        return g

    def hessian(xi):
        xi = np.asarray(xi, dtype=float)
        x, y = xi[..., 0], xi[..., 1]
        h = eval_P_hessian(xi).copy()
        h[..., 0, 0] += eps * 6.0 * x
        h[..., 0, 1] += eps * (-6.0 * y)
        h[..., 1, 0] += eps * (-6.0 * y)
        h[..., 1, 1] += eps * (-6.0 * x)
        return h

    return ScalarField(value, gradient, hessian)


# ---------------------------------------------------------------------------
# critical points
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CriticalPoint:
    location: np.ndarray
    value: float
    kind: str                      # 'minimum' | 'saddle' | 'maximum'
    hessian_eigs: Tuple[float, float]
    grad_norm: float


def find_critical_points(tol: float = 1e-10,
                         field: ScalarField = WARP_FIELD) -> List[CriticalPoint]:
    """Newton search for all critical points, seeded on a polar lattice.

    Seeds: r in {0.25, 0.5, ..., 1.5}, theta in {j pi/6}.  Converged roots are
    deduplicated; a root whose gradient norm still exceeds tol raises.
    """
    if not (0.0 < tol <= 1e-6):
        raise ValueError(f"tol must lie in (0, 1e-6], got {tol}")

    roots = []
    for r in np.arange(0.25, 1.501, 0.25):
        for j in range(12):
            th = j * np.pi / 6.0
            xi = np.array([r * math.cos(th), r * math.sin(th)])
            xi = _newton_critical(xi, field)
            if xi is not None:
                roots.append(xi)

    # deduplicate
    unique: List[np.ndarray] = []
    for xi in roots:
        if all(np.hypot(*(xi - u)) > 1e-6 for u in unique):
            unique.append(xi)

    points = []
    for xi in unique:
        gn = float(np.linalg.norm(field.gradient(xi)))
        if gn > tol:
            raise CriticalPointSearchError(
                f"Newton residual {gn:.3e} above tol {tol:.1e} at {xi}")
        eigs = np.linalg.eigvalsh(field.hessian(xi))
        if eigs[0] > 0:
            kind = "minimum"
        elif eigs[1] < 0:
            kind = "maximum"
        else:
            kind = "saddle"
        points.append(CriticalPoint(location=xi, value=float(field.value(xi)),
                                    kind=kind,
                                    hessian_eigs=(float(eigs[0]), float(eigs[1])),
                                    grad_norm=gn))
    points.sort(key=lambda p: (round(p.value, 10),
                               round(p.location[0], 8), round(p.location[1], 8)))
    return points


def _newton_critical(xi: np.ndarray, field: ScalarField,
                     max_iter: int = 60) -> Optional[np.ndarray]:
    xi = xi.astype(float).copy()
    for _ in range(max_iter):
        g = field.gradient(xi)
        gn = np.linalg.norm(g)
        if gn < 1e-13:
            return xi
        h = field.hessian(xi)
        try:
            step = np.linalg.solve(h, g)
        except np.linalg.LinAlgError:
            step = 0.05 * g / max(gn, 1e-30)
        xi = xi - step
        if np.linalg.norm(xi) > 10.0:
            return None
    return xi if np.linalg.norm(field.gradient(xi)) < 1e-10 else None


# ---------------------------------------------------------------------------
# level curves
# ---------------------------------------------------------------------------

@dataclass
class LevelCurve:
    """Traced level set: closed polyline components with curvature samples.

    Vertices are stored without a duplicated endpoint; the last vertex lies
    within one continuation step of the first.  arclength[i] is the cumulative
    chord length along component i, curvature[i] the signed curvature at each
    vertex (counterclockwise orientation, outward gradient convention).
    """

    lam: float
    components: List[np.ndarray] = dc_field(default_factory=list)
    arclength: List[np.ndarray] = dc_field(default_factory=list)
    curvature: List[np.ndarray] = dc_field(default_factory=list)
    step: float = 0.005

    @property
    def n_components(self) -> int:
        return len(self.components)


def kappa_implicit(xi, field: ScalarField = WARP_FIELD) -> np.ndarray:
    """Signed curvature of the level curve through xi, from the implicit form.

    kappa = (Pyy Px^2 - 2 Pxy Px Py + Pxx Py^2) / |grad P|^3, with the normal
    taken along +grad P.
    """
    xi = np.asarray(xi, dtype=float)
    g = field.gradient(xi)
    h = field.hessian(xi)
    px, py = g[..., 0], g[..., 1]
    num = (h[..., 1, 1] * px * px - 2.0 * h[..., 0, 1] * px * py
           + h[..., 0, 0] * py * py)
    gn = np.hypot(px, py)
    return num / gn ** 3


def _correct_onto_level(xi, lam, field, tol, max_iter=25, grad_floor=1e-8):
    """Newton-correct xi onto {field = lam} along the gradient direction."""
    for _ in range(max_iter):
        f = float(field.value(xi)) - lam
        if abs(f) <= tol:
            return xi
        g = field.gradient(xi)
        g2 = float(g @ g)
        if g2 < grad_floor ** 2:
            raise DegenerateLevelError(
                f"|grad| < {grad_floor:g} while correcting onto level {lam}")
        xi = xi - f * g / g2
    f = float(field.value(xi)) - lam
    if abs(f) > tol:
        raise DegenerateLevelError(
            f"level correction stalled at residual {f:.3e} (level {lam})")
    return xi


def trace_level_set(lam: float, step: float = 0.005,
                    field: ScalarField = WARP_FIELD,
                    scan_n: int = 400) -> LevelCurve:
    """Trace all components of {field = lam} by predictor-corrector continuation.

    Seeds come from sign changes of field - lam along the lines of a
    scan_n x scan_n grid on the seeding box; each seed not yet swallowed by a
    traced component starts a new one.  Tangent steps follow the rotated
    gradient (counterclockwise for outward-increasing fields), each followed
    by Newton correction back onto the level set.
    """
    if not (lam > 0.0):
        raise ValueError(f"lambda must be positive, got {lam}")
    if field is WARP_FIELD and abs(lam - SADDLE_VALUE) <= 1e-9:
        raise ValueError("lambda inside the 1e-9 guard band around the saddle value 1/16")
    if not (0.0 < step <= 0.05):
        raise ValueError(f"step must lie in (0, 0.05], got {step}")

    half = 2.0 if lam <= 4.0 else (2.0 * lam) ** 0.25 + 1.0
    ax = np.linspace(-half, half, scan_n)
    cell = ax[1] - ax[0]
    xx, yy = np.meshgrid(ax, ax, indexing="ij")
    vals = field.value(np.stack([xx, yy], axis=-1)) - lam

    seeds = []
    sx = vals[:-1, :] * vals[1:, :]
    ii, jj = np.nonzero(sx < 0)
    t = vals[ii, jj] / (vals[ii, jj] - vals[ii + 1, jj])
    seeds.append(np.stack([ax[ii] + t * cell, ax[jj]], axis=1))
    sy = vals[:, :-1] * vals[:, 1:]
    ii, jj = np.nonzero(sy < 0)
    t = vals[ii, jj] / (vals[ii, jj] - vals[ii, jj + 1])
    seeds.append(np.stack([ax[ii], ax[jj] + t * cell], axis=1))
    seeds = np.vstack(seeds)

    corr_tol = 1e-12 * (1.0 + abs(lam))
    kill = max(1.5 * cell, 2.0 * step)
    curve = LevelCurve(lam=lam, step=step)
    alive = np.ones(len(seeds), dtype=bool)

    while alive.any():
        start = seeds[np.argmax(alive)]
        verts = _trace_component(start, lam, step, field, corr_tol)
        # retire seeds swallowed by this component
        d2 = np.min(
            ((seeds[alive, None, :] - verts[None, :, :]) ** 2).sum(axis=2), axis=1)
        sub = np.nonzero(alive)[0]
        alive[sub[d2 < kill * kill]] = False

        if _signed_area(verts) < 0:
            verts = verts[::-1].copy()
        seg = np.linalg.norm(np.diff(verts, axis=0), axis=1)
        s = np.concatenate([[0.0], np.cumsum(seg)])
        curve.components.append(verts)
        curve.arclength.append(s)
        curve.curvature.append(np.asarray(kappa_implicit(verts, field)))

    order = sorted(range(curve.n_components),
                   key=lambda i: tuple(np.round(curve.components[i].mean(axis=0), 6)))
    curve.components = [curve.components[i] for i in order]
    curve.arclength = [curve.arclength[i] for i in order]
    curve.curvature = [curve.curvature[i] for i in order]
    return curve


def _trace_component(start, lam, step, field, corr_tol, grad_floor=1e-8):
    x = _correct_onto_level(np.asarray(start, dtype=float), lam, field, corr_tol)
    x0 = x.copy()
    verts = [x.copy()]
    max_steps = int(400.0 / step)  # generous perimeter cap
    for n in range(max_steps):
        g = field.gradient(x)
        gn = np.linalg.norm(g)
        if gn < grad_floor:
            raise DegenerateLevelError(
                f"|grad| = {gn:.2e} below 1e-8 on traced curve at level {lam}")
        tang = np.array([-g[1], g[0]]) / gn
        x = _correct_onto_level(x + step * tang, lam, field, corr_tol)
        if n >= 4 and np.hypot(*(x - x0)) < step:
            # append the closing vertex so first-to-last stays under one step
            if np.hypot(*(x - x0)) > 1e-3 * step:
                verts.append(x.copy())
            break
        verts.append(x.copy())
    else:
        raise DegenerateLevelError(
            f"component at level {lam} failed to close within {max_steps} steps")
    return np.array(verts)


def _signed_area(verts: np.ndarray) -> float:
    x, y = verts[:, 0], verts[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def component_count(lam: float, step: float = 0.005,
                    field: ScalarField = WARP_FIELD) -> int:
    return trace_level_set(lam, step=step, field=field).n_components


def curvature_profile(curve: LevelCurve,
                      field: ScalarField = WARP_FIELD) -> List[np.ndarray]:
    """Recompute the signed curvature samples at every vertex of the curve."""
    out = []
    for verts in curve.components:
        g = field.gradient(verts)
        if np.min(np.hypot(g[:, 0], g[:, 1])) < 1e-8:
            raise DegenerateLevelError("|grad| < 1e-8 on curve; curvature undefined")
        out.append(np.asarray(kappa_implicit(verts, field)))
    return out


# ---------------------------------------------------------------------------
# uniform resampling and finite-type order
# ---------------------------------------------------------------------------

def resample_component(verts: np.ndarray, n: int,
                       s_offset: float = 0.0) -> Tuple[np.ndarray, np.ndarray]:
    """Resample a closed polyline at n uniform arclength parameters.

    Local 4-point Lagrange interpolation in the cumulative chord parameter;
    returns (points (n,2), arclength values (n,)).  The first sample sits at
    chord parameter s_offset.
    """
    m = len(verts)
    closed = np.vstack([verts, verts[:1]])
    seg = np.linalg.norm(np.diff(closed, axis=0), axis=1)
    t = np.concatenate([[0.0], np.cumsum(seg)])
    total = t[-1]
    s_new = (s_offset + np.linspace(0.0, total, n, endpoint=False)) % total
    idx = np.searchsorted(t, s_new, side="right") - 1
    idx = np.clip(idx, 0, m - 1)

    # vectorized Lagrange over the 4 support nodes around each target
    pts = np.zeros((n, 2))
    js = np.stack([(idx - 1) % m, idx % m, (idx + 1) % m, (idx + 2) % m], axis=0)
    # chord parameters of support nodes, unwrapped around the target segment
    tns = np.empty((4, n))
    tns[1] = t[idx]
    tns[2] = t[idx + 1]
    tns[0] = tns[1] - seg[(idx - 1) % m]
    tns[3] = tns[2] + seg[(idx + 1) % m]
    for a in range(4):
        la = np.ones(n)
        for b in range(4):
            if b == a:
                continue
            la *= (s_new - tns[b]) / (tns[a] - tns[b])
        pts += la[:, None] * verts[js[a]]
    return pts, s_new


def _correct_many(pts: np.ndarray, lam: float, field: ScalarField,
                  tol: float, max_iter: int = 25,
                  grad_floor: float = 1e-8) -> np.ndarray:
    """Vectorized Newton correction of a batch of points onto {field = lam}."""
    pts = np.array(pts, dtype=float)
    for _ in range(max_iter):
        f = np.asarray(field.value(pts), dtype=float) - lam
        if np.max(np.abs(f)) <= tol:
            return pts
        g = field.gradient(pts)
        g2 = np.sum(g * g, axis=-1)
        if np.min(g2) < grad_floor ** 2:
            raise DegenerateLevelError("|grad| < 1e-8 while correcting batch")
        pts = pts - (f / g2)[..., None] * g
    if np.max(np.abs(np.asarray(field.value(pts)) - lam)) > tol:
        raise DegenerateLevelError("batch level correction stalled")
    return pts


def _chord_parameter(verts: np.ndarray, q: np.ndarray) -> float:
    """Cumulative chord parameter of the projection of q onto the polyline."""
    m = len(verts)
    closed = np.vstack([verts, verts[:1]])
    seg = np.diff(closed, axis=0)
    seg_len = np.linalg.norm(seg, axis=1)
    t = np.concatenate([[0.0], np.cumsum(seg_len)])
    rel = q[None, :] - verts
    u = np.clip(np.sum(rel * seg, axis=1) / seg_len ** 2, 0.0, 1.0)
    proj = verts + u[:, None] * seg
    d = np.linalg.norm(proj - q[None, :], axis=1)
    j = int(np.argmin(d))
    return float(t[j] + u[j] * seg_len[j])


def _locate_component(curve: LevelCurve, point) -> int:
    point = np.asarray(point, dtype=float)
    dists = [np.min(np.linalg.norm(v - point, axis=1)) for v in curve.components]
    ci = int(np.argmin(dists))
    if dists[ci] > 1.5 * curve.step:
        raise ValueError(
            f"point {point} is {dists[ci]:.3g} from the curve (> 1.5 steps)")
    return ci


def _classify_order(k0, d1, d2, tol):
    if abs(k0) > tol:
        return 2
    if abs(d1) > tol:
        return 3
    if abs(d2) > tol:
        return 4
    raise FiniteTypeInconclusiveError(
        f"|kappa|={abs(k0):.2e}, |kappa'|={abs(d1):.2e}, |kappa''|={abs(d2):.2e} "
        f"all below tol={tol:g}")


def finite_type_order(curve: LevelCurve, point, tol: float = 1e-3,
                      field: ScalarField = WARP_FIELD,
                      resample_spacing: Optional[float] = None) -> int:
    """Smallest k in {2,3,4} with |d^{k-2} kappa / ds^{k-2}| > tol at the point.

    The owning component is resampled uniformly in arclength with the first
    sample anchored at the projection of the query point, every sample is
    Newton-corrected back onto the level set, and the curvature derivatives
    are taken with 5-point arclength stencils centered on the query.
    """
    point = np.asarray(point, dtype=float)
    ci = _locate_component(curve, point)
    verts = curve.components[ci]
    h = resample_spacing if resample_spacing is not None else curve.step
    corr_tol = 1e-12 * (1.0 + abs(curve.lam))
    q = _correct_onto_level(point.copy(), curve.lam, field, corr_tol)
    s0 = _chord_parameter(verts, q)
    total = curve.arclength[ci][-1]
    n = max(64, int(np.ceil(total / h)))
    pts, s = resample_component(verts, n, s_offset=s0)
    pts = _correct_many(pts, curve.lam, field, corr_tol)
    kap = np.asarray(kappa_implicit(pts, field))

    hs = total / n
    km2, km1, k0, kp1, kp2 = (kap[d % n] for d in (-2, -1, 0, 1, 2))
    d1 = (km2 - 8.0 * km1 + 8.0 * kp1 - kp2) / (12.0 * hs)
    d2 = (-km2 + 16.0 * km1 - 30.0 * k0 + 16.0 * kp1 - kp2) / (12.0 * hs * hs)
    return _classify_order(k0, d1, d2, tol)


def finite_type_profile(curve: LevelCurve, component: int = 0, tol: float = 1e-3,
                        field: ScalarField = WARP_FIELD,
                        resample_spacing: Optional[float] = None) -> np.ndarray:
    """Finite-type order at every uniform resample point of one component.

    Vectorized sweep form of finite_type_order; raises if any sample is
    inconclusive up to order 4.
    """
    verts = curve.components[component]
    h = resample_spacing if resample_spacing is not None else curve.step
    total = curve.arclength[component][-1]
    n = max(64, int(np.ceil(total / h)))
    pts, s = resample_component(verts, n)
    corr_tol = 1e-12 * (1.0 + abs(curve.lam))
    pts = _correct_many(pts, curve.lam, field, corr_tol)
    kap = np.asarray(kappa_implicit(pts, field))
    hs = total / n
    km2, km1, kp1, kp2 = (np.roll(kap, -d) for d in (-2, -1, 1, 2))
    d1 = (km2 - 8.0 * km1 + 8.0 * kp1 - kp2) / (12.0 * hs)
    d2 = (-km2 + 16.0 * km1 - 30.0 * kap + 16.0 * kp1 - kp2) / (12.0 * hs * hs)
    orders = np.where(np.abs(kap) > tol, 2,
                      np.where(np.abs(d1) > tol, 3,
                               np.where(np.abs(d2) > tol, 4, 0)))
    if np.any(orders == 0):
        i = int(np.argmax(orders == 0))
        raise FiniteTypeInconclusiveError(
            f"inconclusive at sample {i} (s={s[i]:.4f}) of component {component}")
    return orders


# ---------------------------------------------------------------------------
# degenerate level search
# ---------------------------------------------------------------------------

def _axis_section_roots(lam: float) -> List[float]:
    """Real roots x of P(x, 0) = lam, i.e. (x^2 + x)^2 = lam."""
    roots = []
    r = math.sqrt(lam)
    for sign in (+1.0, -1.0):
        disc = 1.0 + 4.0 * sign * r
        if disc >= 0.0:
            sq = math.sqrt(disc)
            roots.extend([(-1.0 + sq) / 2.0, (-1.0 - sq) / 2.0])
    return sorted(roots)


def _axis_kappa(x: float, field: ScalarField = WARP_FIELD) -> float:
    """Signed curvature of the level curve at the axis point (x, 0).

    On the reflection axis the gradient is axial and Pxy vanishes, so the
    implicit formula reduces to Pyy / |Px|.
    """
    xi = np.array([x, 0.0])
    h = field.hessian(xi)
    g = field.gradient(xi)
    return float(h[1, 1]) / abs(float(g[0]))


def find_degenerate_lambda(n_scan: int = 400) -> Tuple[float, np.ndarray]:
    """Locate the level where curvature vanishes to second order on the axis.

    Scans lambda over (0, 1/16) and (1/16, 1], tracking the signed curvature
    at every axis section point of the level curve; sign changes are bisected
    to machine precision.  By the reflection symmetry xi2 -> -xi2 the first
    arclength derivative of kappa vanishes identically on the axis, so the
    sign change of kappa alone locates the joint zero.
    """
    candidates = []
    for lo, hi in ((1e-6, SADDLE_VALUE - 1e-6), (SADDLE_VALUE + 1e-6, 1.0)):
        lams = np.linspace(lo, hi, n_scan)
        # track curvature per sorted-root index; root count is constant on
        # each side of the saddle value, so indices line up across the scan
        rows = [_axis_section_roots(l) for l in lams]
        counts = {len(r) for r in rows}
        for pos in range(min(counts)):
            ks = np.array([_axis_kappa(r[pos]) for r in rows])
            for i in np.nonzero(np.sign(ks[:-1]) * np.sign(ks[1:]) < 0)[0]:
                lam = _bisect_axis_kappa(lams[i], lams[i + 1], pos)
                x = _axis_section_roots(lam)[pos]
                candidates.append((lam, np.array([x, 0.0])))

    best = None
    for lam, xi in candidates:
        resid = abs(_axis_kappa(xi[0]))
        if best is None or resid < best[0]:
            best = (resid, lam, xi)
    if best is None or best[0] > 1e-6:
        raise DegenerateNotFoundError(
            "no axis point with |kappa| + |dkappa/ds| residual below 1e-6")
    return best[1], best[2]


def _bisect_axis_kappa(lo: float, hi: float, pos: int) -> float:
    flo = _axis_kappa(_axis_section_roots(lo)[pos])
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        fm = _axis_kappa(_axis_section_roots(mid)[pos])
        if fm == 0.0 or (hi - lo) < 1e-15:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def curvature_stability_probe(epsilon: float, lam: float = 0.125,
                              tol: float = 1e-3) -> bool:
    """Perturb the symbol by eps*(xi1^3 - 3 xi1 xi2^2) and retest type 2.

    Picks a maximal-|kappa| vertex of the unperturbed level curve (a robust
    type-2 point), re-traces the perturbed curve, and returns True iff
    finite_type_order still reports 2 there.
    """
    if not (0.0 <= epsilon <= 1e-3):
        raise ValueError(f"epsilon must lie in [0, 1e-3], got {epsilon}")
    base = trace_level_set(lam)
    ci = int(np.argmax([np.max(np.abs(k)) for k in base.curvature]))
    vi = int(np.argmax(np.abs(base.curvature[ci])))
    ref_point = base.components[ci][vi]

    fld = perturbed_warp_field(epsilon)
    pert = trace_level_set(lam, field=fld)
    # nearest perturbed vertex stands in for the reference point
    dists = [np.min(np.linalg.norm(v - ref_point, axis=1)) for v in pert.components]
    cj = int(np.argmin(dists))
    vj = int(np.argmin(np.linalg.norm(pert.components[cj] - ref_point, axis=1)))
    try:
        order = finite_type_order(pert, pert.components[cj][vj], tol=tol, field=fld)
    except FiniteTypeInconclusiveError:
        return False
    return order == 2
