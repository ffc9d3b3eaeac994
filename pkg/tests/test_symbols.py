"""Branch, symbol and dispersion checks against independent oracles."""

import numpy as np
import pytest

from bilayer_spectra.symbols import (BILAYER, TRIG, MultiplierSymbol,
                                     SpectralPoint, SpectralPoleError, eval_k,
                                     eval_P, eval_P_derivatives,
                                     eval_P_gradient, eval_zeta, dispersion,
                                     symbol_matrix, symbol_square_scalar)


def brute_force_branch(z, m):
    """Oracle: try all four fourth roots, keep the one with arg in [0, pi/2)."""
    w = complex(z) ** 2 - m ** 2
    if w == 0:
        return 0.0 + 0.0j
    base = w ** 0.25
    roots = [base * 1j ** j for j in range(4)]
    good = [r for r in roots if 0 <= np.angle(r) < np.pi / 2]
    assert len(good) == 1
    return good[0]


class TestBranch:
    def test_positive_real(self):
        k = eval_k(2.0, 0.0)
        assert abs(k - np.sqrt(2.0)) < 1e-14
        assert np.angle(k) == 0.0

    def test_imaginary_energy(self):
        # fourth roots of -1: oracle picks e^{i pi/4}
        k = eval_k(1j, 0.0)
        assert abs(k - np.exp(1j * np.pi / 4)) < 1e-14
        assert abs(k ** 4 + 1.0) < 1e-14

    def test_integer_case(self):
        assert abs(eval_k(5.0, 3.0) - 2.0) < 1e-14

    def test_k_zero_at_mass(self):
        assert eval_k(3.0, 3.0) == 0.0
        assert eval_k(-3.0, 3.0) == 0.0

    def test_branch_consistency_random(self):
        rng = np.random.default_rng(7)
        for _ in range(10_000):
            z = complex(rng.uniform(-5, 5), rng.uniform(-5, 5))
            m = rng.uniform(0, 4)
            k = eval_k(z, m)
            if k == 0:
                continue
            assert abs(k ** 4 - (z * z - m * m)) <= 1e-12 * max(1.0, abs(z) ** 2)
            assert 0 <= np.angle(k) < np.pi / 2
            assert abs(k - brute_force_branch(z, m)) < 1e-12 * max(1.0, abs(k))

    def test_zeta_integer_case(self):
        assert abs(eval_zeta(5.0, 3.0) - 2.0) < 1e-14

    def test_zeta_unit_modulus_massless(self):
        assert abs(eval_zeta(1j, 0.0) - 1.0) < 1e-14
        rng = np.random.default_rng(11)
        for _ in range(2_000):
            z = complex(rng.uniform(-5, 5), rng.uniform(-5, 5))
            if z == 0:
                continue
            assert abs(abs(eval_zeta(z, 0.0)) - 1.0) < 1e-12

    def test_zeta_vanishes_at_negative_mass(self):
        assert abs(eval_zeta(-2.999, 3.0)) < 0.02

    def test_zeta_pole_raises(self):
        with pytest.raises(SpectralPoleError):
            eval_zeta(3.0, 3.0)
        with pytest.raises(SpectralPoleError):
            eval_zeta(-3.0, 3.0)

    def test_spectral_point(self):
        p = SpectralPoint.from_z(5.0, 3.0)
        assert p.k == 2.0 and p.zeta == 2.0
        assert SpectralPoint.from_z(3.0, 3.0).zeta is None


class TestWarpPolynomial:
    def test_values(self):
        assert abs(eval_P([1.0, 0.0]) - 4.0) < 1e-14
        assert abs(eval_P([-0.5, 0.0]) - 1.0 / 16.0) < 1e-14

    def test_dirac_point(self):
        xi = [np.cos(np.pi / 3), np.sin(np.pi / 3)]
        assert abs(eval_P(xi)) < 1e-14
        assert np.linalg.norm(eval_P_gradient(xi)) < 1e-13

    def test_nonnegative(self):
        rng = np.random.default_rng(3)
        xi = rng.uniform(-3, 3, size=(5000, 2))
        assert np.all(eval_P(xi) >= -1e-14)

    def test_threefold_and_reflection_symmetry(self):
        rng = np.random.default_rng(5)
        xi = rng.uniform(-2, 2, size=(500, 2))
        c, s = np.cos(2 * np.pi / 3), np.sin(2 * np.pi / 3)
        rot = np.array([[c, -s], [s, c]])
        assert np.max(np.abs(eval_P(xi @ rot.T) - eval_P(xi))) < 1e-12 * 50
        refl = xi * np.array([1.0, -1.0])
        assert np.max(np.abs(eval_P(refl) - eval_P(xi))) < 1e-13

    def test_hessian_against_finite_differences(self):
        rng = np.random.default_rng(9)
        h = 1e-5
        for _ in range(100):
            xi = rng.uniform(-2, 2, size=2)
            grad, hess = eval_P_derivatives(xi)
            for a in range(2):
                e = np.zeros(2)
                e[a] = h
                fd_g = (eval_P(xi + e) - eval_P(xi - e)) / (2 * h)
                assert abs(fd_g - grad[a]) < 1e-6
                fd_h = (eval_P_gradient(xi + e) - eval_P_gradient(xi - e)) / (2 * h)
                assert np.max(np.abs(fd_h - hess[a])) < 1e-6


class TestMatrixSymbols:
    def test_zero_frequency_bilayer(self):
        m = symbol_matrix(BILAYER, [0.0, 0.0], m=1.0)
        assert np.allclose(m, np.diag([1.0, -1.0]))

    def test_trig_example(self):
        m = symbol_matrix(TRIG, [1.0, 0.0])
        assert abs(m[1, 0] - 2.0) < 1e-14
        eigs = np.linalg.eigvalsh(m)
        assert np.allclose(eigs, [-2.0, 2.0])

    def test_bilayer_massless_example(self):
        m = symbol_matrix(BILAYER, [1.0, 1.0], m=0.0)
        assert abs(m[1, 0] - 2j) < 1e-14
        assert np.allclose(np.linalg.eigvalsh(m), [-2.0, 2.0])

    @pytest.mark.parametrize("kind,m", [(BILAYER, 0.0), (BILAYER, 2.0), (TRIG, 0.0)])
    def test_hermitian_and_square(self, kind, m):
        rng = np.random.default_rng(13)
        xi = rng.uniform(-3, 3, size=(400, 2))
        mats = symbol_matrix(kind, xi, m)
        assert np.max(np.abs(mats - np.conj(np.swapaxes(mats, -1, -2)))) < 1e-13
        sq = mats @ mats
        s = symbol_square_scalar(kind, xi, m)
        target = s[..., None, None] * np.eye(2)
        assert np.max(np.abs(sq - target) / (1.0 + s)[..., None, None]) <= 1e-12

    def test_dispersion_values(self):
        lo, hi = dispersion(TRIG, [-0.5, 0.0])
        assert abs(lo + 0.25) < 1e-14 and abs(hi - 0.25) < 1e-14
        lo, hi = dispersion(BILAYER, [0.0, 0.0], m=3.0)
        assert (lo, hi) == (-3.0, 3.0)
        lo, hi = dispersion(TRIG, [np.cos(np.pi / 3), np.sin(np.pi / 3)])
        assert abs(lo) < 1e-7 and abs(hi) < 1e-7

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            symbol_matrix("unknown", [0.0, 0.0])

    def test_multiplier_symbol_wrappers(self):
        sym = MultiplierSymbol.free(BILAYER, m=1.0)
        vals = sym.eval(np.zeros((3, 3, 2)))
        assert vals.shape == (3, 3, 2, 2)
        ident = MultiplierSymbol.identity()
        vals = ident.eval(np.zeros((4, 2)))
        assert np.allclose(vals, np.eye(2))
