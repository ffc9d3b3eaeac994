"""Periodic spectral discretization of the free operators and perturbations.

Fields live on an N x N grid over the box [-L, L]^2 with periodic boundary
conditions; multipliers act via FFT.  Matrix potentials carry their pointwise
polar factors so Birman-Schwinger operators can be assembled on the numerical
support of the potential.

A spinor field is a complex ndarray of shape (2, N, N).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field as dc_field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .symbols import MultiplierSymbol, symbol_matrix, symbol_square_scalar
from .fermi import find_critical_points

_ALLOWED_N = (16, 32, 64, 128, 256)
_BS_DIM_CAP = 4096
_DENSE_DIM_CAP = 4608


class NearSingularError(RuntimeError):
    """z is within 1e-8 of the free dispersion range on the grid."""


class SupportTooLargeError(RuntimeError):
    """Birman-Schwinger restriction would exceed the dense dimension cap."""


class OperatorSizeError(RuntimeError):
    """Dense assembly would exceed the dimension cap."""


class CutoffOverlapError(RuntimeError):
    """Partition supports collide for the requested delta."""


# ---------------------------------------------------------------------------
# grid and fields
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Grid:
    """Periodic N x N grid on [-L, L]^2 with FFT-ordered frequencies."""

    n: int
    half_width: float

    def __post_init__(self):
        if self.n not in _ALLOWED_N:
            raise ValueError(f"N must be a power of two in {_ALLOWED_N}, got {self.n}")
        if not (4.0 <= self.half_width <= 64.0):
            raise ValueError(f"L must lie in [4, 64], got {self.half_width}")

    @property
    def dx(self) -> float:
        return 2.0 * self.half_width / self.n

    @property
    def cell_area(self) -> float:
        return self.dx ** 2

    @property
    def x_axis(self) -> np.ndarray:
        return (np.arange(self.n) - self.n // 2) * self.dx

    @property
    def xi_axis(self) -> np.ndarray:
        """Frequencies (pi/L) * k for k in FFT order."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.dx)

    def x_mesh(self) -> np.ndarray:
        xx, yy = np.meshgrid(self.x_axis, self.x_axis, indexing="ij")
        return np.stack([xx, yy], axis=-1)

    def xi_mesh(self) -> np.ndarray:
        xx, yy = np.meshgrid(self.xi_axis, self.xi_axis, indexing="ij")
        return np.stack([xx, yy], axis=-1)


def build_grid(n: int, half_width: float) -> Grid:
    return Grid(n=n, half_width=half_width)


def random_spinor(grid: Grid, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return (rng.standard_normal((2, grid.n, grid.n))
            + 1j * rng.standard_normal((2, grid.n, grid.n)))


def field_norm(u: np.ndarray) -> float:
    return float(np.linalg.norm(u))


# ---------------------------------------------------------------------------
# multiplier application and free resolvents
# ---------------------------------------------------------------------------

def _symbol_values(symbol, grid: Grid) -> np.ndarray:
    if isinstance(symbol, MultiplierSymbol):
        return np.asarray(symbol.eval(grid.xi_mesh()), dtype=complex)
    vals = np.asarray(symbol, dtype=complex)
    if vals.shape != (grid.n, grid.n, 2, 2):
        raise ValueError(f"symbol values must have shape (N, N, 2, 2), got {vals.shape}")
    return vals


def apply_multiplier(symbol, u: np.ndarray, grid: Grid) -> np.ndarray:
    """inverse-FFT o (pointwise 2x2 multiply) o FFT."""
    vals = _symbol_values(symbol, grid)
    uhat = np.fft.fft2(u, axes=(-2, -1))
    vhat = np.einsum("xyab,bxy->axy", vals, uhat)
    return np.fft.ifft2(vhat, axes=(-2, -1))


def dispersion_distance(kind: str, z: complex, m: float, grid: Grid) -> float:
    """Distance from z to the free dispersion values on the grid."""
    s = np.sqrt(symbol_square_scalar(kind, grid.xi_mesh(), m))
    return float(min(np.min(np.abs(s - z)), np.min(np.abs(-s - z))))


def free_resolvent_symbol(kind: str, z: complex, m: float, grid: Grid) -> np.ndarray:
    """(M(xi) - z)^{-1} = (M(xi) + z) / (s(xi) - z^2) on the grid."""
    xi = grid.xi_mesh()
    mat = symbol_matrix(kind, xi, m).astype(complex)
    mat[..., 0, 0] += z
    mat[..., 1, 1] += z
    s = symbol_square_scalar(kind, xi, m)
    return mat / (s - z * z)[..., None, None]


def free_resolvent_apply(kind: str, z: complex, m: float, u: np.ndarray,
                         grid: Grid) -> np.ndarray:
    d = dispersion_distance(kind, z, m, grid)
    if d <= 1e-8:
        raise NearSingularError(
            f"z = {z} is {d:.2e} from the grid dispersion range")
    return apply_multiplier(free_resolvent_symbol(kind, z, m, grid), u, grid)


def free_operator_apply(kind: str, m: float, u: np.ndarray, grid: Grid) -> np.ndarray:
    return apply_multiplier(symbol_matrix(kind, grid.xi_mesh(), m), u, grid)


# ---------------------------------------------------------------------------
# potentials and polar factors
# ---------------------------------------------------------------------------

@dataclass
class PotentialField:
    """Pointwise 2x2 potential with its polar-decomposition square roots.

    a = |V|^{1/2} and bfac = U |V|^{1/2} satisfy bfac @ a = V pointwise, with
    U the partial isometry of the polar decomposition (columns belonging to
    singular values below 1e-14 are dropped).
    """

    values: np.ndarray            # (N, N, 2, 2) complex
    family: str = "custom"
    a: np.ndarray = dc_field(init=False)
    bfac: np.ndarray = dc_field(init=False)
    op_norm: np.ndarray = dc_field(init=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.ndim != 4 or v.shape[-2:] != (2, 2) or v.shape[0] != v.shape[1]:
            raise ValueError(f"potential values must be (N, N, 2, 2), got {v.shape}")
        self.values = v
        u, sig, wh = np.linalg.svd(v)
        tiny = sig < 1e-14 * max(float(sig.max()), 1e-300)
        root = np.sqrt(sig)
        root_b = np.where(tiny, 0.0, root)
        w = np.conj(np.swapaxes(wh, -1, -2))
        # a = W sqrt(Sigma) W*,  bfac = U sqrt(Sigma) W*  (partial isometry)
        self.a = np.einsum("...ij,...j,...kj->...ik", w, root, np.conj(w))
        self.bfac = np.einsum("...ij,...j,...kj->...ik", u, root_b, np.conj(w))
        self.op_norm = sig[..., 0]


def polar_factors(values: np.ndarray, family: str = "custom") -> PotentialField:
    return PotentialField(values=values, family=family)


def scalar_potential(g: np.ndarray, family: str = "custom") -> PotentialField:
    """g(x) * Id as a PotentialField; g is an (N, N) complex array."""
    g = np.asarray(g, dtype=complex)
    v = np.zeros(g.shape + (2, 2), dtype=complex)
    v[..., 0, 0] = g
    v[..., 1, 1] = g
    return PotentialField(values=v, family=family)


# ---------------------------------------------------------------------------
# Birman-Schwinger operator on the potential support
# ---------------------------------------------------------------------------

class BirmanSchwinger:
    """K(z) = A (M(D) - z)^{-1} Bfac restricted to the support of V.

    The delta-basis columns of Bfac are z-independent, so their FFTs are
    precomputed once and every z costs one multiplier application per column
    block.  An optional scalar frequency cutoff chi multiplies the resolvent
    symbol (the localized operator A chi(D) R0(z) Bfac).
    """

    def __init__(self, kind: str, m: float, potential: PotentialField,
                 grid: Grid, support_threshold: float = 1e-10,
                 chi: Optional[np.ndarray] = None):
        self.kind = kind
        self.m = float(m)
        self.grid = grid
        self.potential = potential
        vmax = float(potential.op_norm.max())
        mask = potential.op_norm > support_threshold * vmax if vmax > 0 else \
            np.zeros_like(potential.op_norm, dtype=bool)
        self.points = np.argwhere(mask)
        self.dim = 2 * len(self.points)
        if self.dim > _BS_DIM_CAP:
            raise SupportTooLargeError(
                f"support dimension {self.dim} exceeds cap {_BS_DIM_CAP}")
        self.chi = None if chi is None else np.asarray(chi, dtype=complex)
        n = grid.n
        cols = np.zeros((self.dim, 2, n, n), dtype=complex)
        for t, (i, j) in enumerate(self.points):
            cols[2 * t, :, i, j] = potential.bfac[i, j, :, 0]
            cols[2 * t + 1, :, i, j] = potential.bfac[i, j, :, 1]
        self._bhat = np.fft.fft2(cols, axes=(2, 3))

    def matrix(self, z: complex) -> np.ndarray:
        d = dispersion_distance(self.kind, z, self.m, self.grid)
        if d <= 1e-8:
            raise NearSingularError(
                f"z = {z} is {d:.2e} from the grid dispersion range")
        if self.dim == 0:
            return np.zeros((0, 0), dtype=complex)
        rs = free_resolvent_symbol(self.kind, z, self.m, self.grid)
        if self.chi is not None:
            rs = rs * self.chi[..., None, None]
        a = self.potential.a
        ii, jj = self.points[:, 0], self.points[:, 1]
        out = np.empty((self.dim, self.dim), dtype=complex)
        for lo in range(0, self.dim, 512):
            hi = min(lo + 512, self.dim)
            # batched 2x2 matmuls: (x,y,a,b) @ (x,y,b,c) with c the column index
            bh = self._bhat[lo:hi].transpose(2, 3, 1, 0)     # (x,y,b,c)
            what = (rs @ bh).transpose(3, 2, 0, 1)           # (c,a,x,y)
            w = np.fft.ifft2(what, axes=(2, 3))
            aw = a @ w.transpose(2, 3, 1, 0)                 # (x,y,a,c)
            gathered = aw[ii, jj]                            # (S, 2, block)
            out[:, lo:hi] = gathered.reshape(self.dim, hi - lo)
        return out

    def norm(self, z: complex, tol: float = 1e-8, max_iter: int = 500) -> float:
        return power_norm(self.matrix(z), tol=tol, max_iter=max_iter)


def bs_matrix(kind: str, z: complex, m: float, potential: PotentialField,
              grid: Grid, support_threshold: float = 1e-10,
              chi: Optional[np.ndarray] = None) -> np.ndarray:
    return BirmanSchwinger(kind, m, potential, grid,
                           support_threshold=support_threshold,
                           chi=chi).matrix(z)


def power_norm(mat: np.ndarray, tol: float = 1e-8, max_iter: int = 500) -> float:
    """Largest singular value by power iteration on K*K, all-ones start."""
    if mat.size == 0:
        return 0.0
    v = np.ones(mat.shape[1], dtype=complex)
    v /= np.linalg.norm(v)
    sigma = 0.0
    for _ in range(max_iter):
        w = mat @ v
        s = float(np.linalg.norm(w))
        if s == 0.0:
            return 0.0
        v_new = mat.conj().T @ w
        nv = np.linalg.norm(v_new)
        v = v_new / nv
        if abs(s - sigma) <= tol * max(s, 1e-300):
            return s
        sigma = s
    warnings.warn(f"power iteration did not converge to {tol:g} in {max_iter} steps; "
                  f"returning last iterate {sigma:.6e}")
    return sigma


def bs_norm(kind: str, z: complex, m: float, potential: PotentialField,
            grid: Grid, support_threshold: float = 1e-10,
            chi: Optional[np.ndarray] = None, tol: float = 1e-8) -> float:
    if float(potential.op_norm.max()) == 0.0:
        return 0.0
    return BirmanSchwinger(kind, m, potential, grid,
                           support_threshold=support_threshold,
                           chi=chi).norm(z, tol=tol)


def schatten_norm(mat: np.ndarray, alpha: float) -> float:
    """(sum sigma_i^alpha)^{1/alpha} of a dense matrix by full SVD."""
    if alpha < 1.0:
        raise ValueError(f"alpha must be >= 1, got {alpha}")
    if mat.size == 0:
        return 0.0
    sig = np.linalg.svd(mat, compute_uv=False)
    smax = float(sig[0])
    if smax == 0.0:
        return 0.0
    # power in log space so alpha ~ 1e6 cannot overflow
    return smax * float(np.sum((sig / smax) ** alpha)) ** (1.0 / alpha)


# ---------------------------------------------------------------------------
# frequency cutoffs
# ---------------------------------------------------------------------------

def _bump(u: np.ndarray) -> np.ndarray:
    out = np.zeros_like(u)
    inside = np.abs(u) < 1.0
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - u[inside] ** 2))
    return out


def _smoothstep(u: np.ndarray) -> np.ndarray:
    def half(t):
        out = np.zeros_like(t)
        pos = t > 0
        out[pos] = np.exp(-1.0 / t[pos])
        return out
    a = half(u)
    b = half(1.0 - u)
    return a / (a + b)


def frequency_cutoffs(grid: Grid, delta: float,
                      centers: Optional[np.ndarray] = None
                      ) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Smooth partition of unity (chi1, chi2, chi3) on the frequency grid.

    chi1 bumps on balls of radius 2*delta around the critical points (or the
    supplied centers), chi2 ramps up from |xi| = 1/(2 delta) to 1 at
    |xi| >= 1/delta, chi3 is the remainder; the three sum to 1 exactly.
    """
    if not (0.0 < delta <= 0.2):
        raise ValueError(f"delta must lie in (0, 0.2], got {delta}")
    if centers is None:
        centers = np.array([p.location for p in find_critical_points()])
    centers = np.asarray(centers, dtype=float)
    if len(centers) > 1:
        d2 = np.sum((centers[:, None, :] - centers[None, :, :]) ** 2, axis=-1)
        np.fill_diagonal(d2, np.inf)
        min_dist = float(np.sqrt(d2.min()))
        if 4.0 * delta >= min_dist:
            raise CutoffOverlapError(
                f"balls of radius 2*delta={2 * delta:g} collide "
                f"(min center distance {min_dist:.3g})")
    max_c = float(np.max(np.hypot(centers[:, 0], centers[:, 1]))) if len(centers) else 0.0
    if max_c + 2.0 * delta >= 0.5 / delta:
        raise CutoffOverlapError("critical-point balls reach the high-frequency ramp")

    xi = grid.xi_mesh()
    chi1 = np.zeros((grid.n, grid.n))
    for c in centers:
        r = np.hypot(xi[..., 0] - c[0], xi[..., 1] - c[1])
        chi1 += _bump(r / (2.0 * delta))
    chi1 = np.clip(chi1, 0.0, 1.0)
    r = np.hypot(xi[..., 0], xi[..., 1])
    chi2 = _smoothstep((r - 0.5 / delta) / (1.0 / delta - 0.5 / delta))
    chi3 = 1.0 - chi1 - chi2
    return chi1, chi2, chi3


# ---------------------------------------------------------------------------
# dense assembly and eigenvalues
# ---------------------------------------------------------------------------

def assemble_full_operator(kind: str, m: float, potential: Optional[PotentialField],
                           grid: Grid) -> np.ndarray:
    """Dense 2N^2 x 2N^2 matrix of M(D) + V in the (component, x) basis.

    Row/column index is a*N^2 + i*N + j for spinor component a and grid node
    (i, j), matching u.reshape(2*N*N) for a field u of shape (2, N, N).
    """
    n = grid.n
    dim = 2 * n * n
    if dim > _DENSE_DIM_CAP:
        raise OperatorSizeError(f"dense dimension {dim} exceeds cap {_DENSE_DIM_CAP}")
    f1 = np.fft.fft(np.eye(n), axis=0)
    fm = np.kron(f1, f1)
    fm_inv = np.conj(fm) / (n * n)
    msym = symbol_matrix(kind, grid.xi_mesh(), m)
    out = np.zeros((dim, dim), dtype=complex)
    for a in range(2):
        for b in range(2):
            d = msym[..., a, b].ravel()
            block = (fm_inv * d[None, :]) @ fm
            out[a * n * n:(a + 1) * n * n, b * n * n:(b + 1) * n * n] = block
    if potential is not None:
        for a in range(2):
            for b in range(2):
                idx = np.arange(n * n)
                out[a * n * n + idx, b * n * n + idx] += potential.values[..., a, b].ravel()
    return out


@dataclass(frozen=True)
class Eigenvalue:
    z: complex
    residual: float


def eigenvalues_dense(kind: str, m: float, potential: Optional[PotentialField],
                      grid: Grid, window: Optional[Tuple[float, float, float, float]] = None
                      ) -> List[Eigenvalue]:
    """Full nonsymmetric eigendecomposition with per-eigenvalue residuals.

    window = (re_min, re_max, im_min, im_max) filters the reported list.
    """
    mat = assemble_full_operator(kind, m, potential, grid)
    w, vecs = np.linalg.eig(mat)
    if window is not None:
        r0, r1, i0, i1 = window
        keep = ((w.real >= r0) & (w.real <= r1)
                & (w.imag >= i0) & (w.imag <= i1))
    else:
        keep = np.ones(len(w), dtype=bool)
    idx = np.nonzero(keep)[0]
    out = []
    if len(idx):
        sub = vecs[:, idx]
        res = mat @ sub - sub * w[idx][None, :]
        rn = np.linalg.norm(res, axis=0) / np.linalg.norm(sub, axis=0)
        out = [Eigenvalue(z=complex(w[i]), residual=float(r))
               for i, r in zip(idx, rn)]
    out.sort(key=lambda e: (e.z.real, e.z.imag))
    return out


def eigenvalues_bs_scan(kind: str, m: float, potential: PotentialField,
                        grid: Grid, window: Tuple[float, float, float, float],
                        n_re: int = 60, n_im: int = 1,
                        support_threshold: float = 1e-10,
                        coarse_cut: float = 0.5) -> List[Eigenvalue]:
    """Locate eigenvalues as roots of mu(K(z)) = -1 inside the window.

    Coarse grid minima of |mu + 1| seed complex secant refinements; roots are
    accepted when |mu + 1| < 1e-6.  The residual reported is |mu + 1|.
    An empty result is a valid outcome (no eigenvalues in the window).
    """
    op = BirmanSchwinger(kind, m, potential, grid,
                         support_threshold=support_threshold)
    r0, r1, i0, i1 = window
    res = np.linspace(r0, r1, n_re)
    ims = np.linspace(i0, i1, n_im) if n_im > 1 else np.array([0.5 * (i0 + i1)])

    def spectrum(z: complex) -> np.ndarray:
        if not np.isfinite(z) or abs(z) > 1e9:
            raise NearSingularError(f"secant iterate left the domain: z = {z}")
        mat = op.matrix(z)
        if not np.all(np.isfinite(mat)):
            raise NearSingularError(f"non-finite Birman-Schwinger matrix at z = {z}")
        try:
            return np.linalg.eigvals(mat)
        except np.linalg.LinAlgError as exc:
            raise NearSingularError(f"eigensolve failed at z = {z}: {exc}") from exc

    coarse = {}
    mag = np.full((len(ims), len(res)), np.inf)
    for ii, im in enumerate(ims):
        for jj, re in enumerate(res):
            try:
                mu = spectrum(complex(re, im))
            except NearSingularError:
                continue
            coarse[ii, jj] = mu
            mag[ii, jj] = float(np.min(np.abs(mu + 1.0)))

    # every coarse local minimum seeds one secant run per eigenvalue branch
    # near -1; branches are tracked by continuity, which separates roots
    # clustered below the coarse resolution
    seeds = []
    for ii in range(len(ims)):
        for jj in range(len(res)):
            v = mag[ii, jj]
            if v >= coarse_cut or not np.isfinite(v):
                continue
            neigh = [mag[ii, k] for k in (jj - 1, jj + 1) if 0 <= k < len(res)]
            neigh += [mag[k, jj] for k in (ii - 1, ii + 1) if 0 <= k < len(ims)]
            if all(v <= nb for nb in neigh):
                z0 = complex(res[jj], ims[ii])
                mu = coarse[ii, jj]
                for m0 in mu[np.abs(mu + 1.0) < coarse_cut]:
                    seeds.append((z0, complex(m0)))

    h = (res[1] - res[0]) if len(res) > 1 else 1e-4
    roots: List[Eigenvalue] = []

    def try_seed(z0: complex, mu0: complex, step: complex):
        known = [r.z for r in roots]
        root = _secant_bs_root(spectrum, z0, mu0, step, known=known)
        if root is None:
            return None
        z_cur, fmag = root
        if (r0 - h <= z_cur.real <= r1 + h and i0 - h <= z_cur.imag <= i1 + h
                and all(abs(z_cur - r.z) > 1e-7 for r in roots)):
            roots.append(Eigenvalue(z=complex(z_cur), residual=fmag))
            return roots[-1]
        return None

    for z0, mu0 in seeds:
        try_seed(z0, mu0, 0.1 * h)

    # one finer scan around each root: crossings steeper than the coarse
    # spacing (clustered band-edge states) only show up at sub-resolution
    frontier = list(roots)
    for _ in range(2):
        new_roots = []
        for r in frontier:
            offs = np.linspace(-h, h, 25)
            sub_mag = np.full(len(offs), np.inf)
            sub_mu = {}
            spacing = offs[1] - offs[0]
            for si, dz in enumerate(offs):
                if abs(dz) < 0.5 * spacing:
                    continue        # the known root itself samples |mu+1| = 0
                zs = r.z + dz
                if not (r0 <= zs.real <= r1 and i0 - h <= zs.imag <= i1 + h):
                    continue
                try:
                    mu = spectrum(zs)
                except NearSingularError:
                    continue
                sub_mu[si] = mu
                sub_mag[si] = float(np.min(np.abs(mu + 1.0)))
            for si in sub_mu:
                v = sub_mag[si]
                if v >= coarse_cut:
                    continue
                neigh = [sub_mag[k] for k in (si - 1, si + 1) if 0 <= k < len(offs)]
                if any(np.isfinite(nb) and nb < v for nb in neigh):
                    continue
                mu = sub_mu[si]
                m0 = mu[np.argmin(np.abs(mu + 1.0))]
                got = try_seed(r.z + offs[si], complex(m0), 0.01 * h)
                if got is not None:
                    new_roots.append(got)
        if not new_roots:
            break
        frontier = new_roots
    roots.sort(key=lambda e: (e.z.real, e.z.imag))
    return roots


def _secant_bs_root(spectrum, z0: complex, mu0: complex, h: complex,
                    max_iter: int = 60,
                    known: Optional[Sequence[complex]] = None
                    ) -> Optional[Tuple[complex, float]]:
    """Secant iteration on (tracked eigenvalue of K(z)) + 1 = 0.

    Aborts early when the iterate walks into an already-known root.
    """

    def tracked(z: complex, mu_prev: complex) -> complex:
        mu = spectrum(z)
        return complex(mu[np.argmin(np.abs(mu - mu_prev))])

    known = list(known) if known else []
    z_prev, f_prev = z0, mu0 + 1.0
    z_cur = z0 + h
    try:
        mu_cur = tracked(z_cur, mu0)
    except NearSingularError:
        return None
    f_cur = mu_cur + 1.0
    for _ in range(max_iter):
        df = f_cur - f_prev
        if df == 0:
            break
        z_next = z_cur - f_cur * (z_cur - z_prev) / df
        z_prev, f_prev = z_cur, f_cur
        z_cur = z_next
        if any(abs(z_cur - zk) < 1e-9 for zk in known):
            return None
        try:
            mu_cur = tracked(z_cur, mu_cur)
        except NearSingularError:
            return None
        f_cur = mu_cur + 1.0
        if abs(z_cur - z_prev) < 1e-11 and abs(f_cur) < 1e-9:
            break
    if abs(f_cur) < 1e-6:
        return complex(z_cur), abs(f_cur)
    return None


def eigenvalues(kind: str, m: float, potential: Optional[PotentialField],
                grid: Grid, method: str = "dense", **kwargs) -> List[Eigenvalue]:
    if method == "dense":
        return eigenvalues_dense(kind, m, potential, grid,
                                 window=kwargs.get("window"))
    if method == "bs-scan":
        if potential is None:
            raise ValueError("bs-scan requires a potential")
        return eigenvalues_bs_scan(kind, m, potential, grid, **kwargs)
    raise ValueError(f"unknown method {method!r}; expected 'dense' or 'bs-scan'")
