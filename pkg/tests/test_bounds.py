"""Inclusion-region formula checks, frozen arithmetic oracles."""

import numpy as np
import pytest

from bilayer_spectra.bounds import (BoundReport, alpha_qrd,
                                    empirical_constant, lfs_lhs, lq_norm, n_q,
                                    thm1_lhs, thm1_region_ii, thm2_regions)
from bilayer_spectra.operators import build_grid, scalar_potential
from bilayer_spectra.potentials import gaussian_jordan
from bilayer_spectra.symbols import SpectralPoleError


class TestLqNorm:
    def test_gaussian_integral(self):
        # int exp(-q |x|^2) dx = pi / q; width-1 Gaussian, q = 1
        g = build_grid(64, 16.0)
        x = g.x_mesh()
        pot = scalar_potential(np.exp(-(x[..., 0] ** 2 + x[..., 1] ** 2)))
        assert abs(lq_norm(pot, 1.0, g) - np.pi) < 1e-6

    def test_jordan_block_operator_norm(self):
        g = build_grid(64, 16.0)
        pot = gaussian_jordan(g, 1.0, 1.0)
        assert abs(lq_norm(pot, 1.0, g) - np.pi) < 1e-6

    def test_zero_potential(self):
        g = build_grid(16, 8.0)
        pot = scalar_potential(np.zeros((16, 16)))
        assert lq_norm(pot, 1.5, g) == 0.0

    def test_q_range(self):
        g = build_grid(16, 8.0)
        pot = scalar_potential(np.ones((16, 16)))
        with pytest.raises(ValueError):
            lq_norm(pot, 0.5, g)


class TestThm1Lhs:
    def test_massless_example(self):
        assert abs(thm1_lhs(4.0, 0.0, 1.5) - 2.0 / 3.0 ** 1.5) < 1e-12

    def test_massive_example(self):
        assert abs(thm1_lhs(5.0, 3.0, 1.5) - 2.0 / 3.5 ** 1.5) < 1e-12

    def test_massless_homogeneity(self):
        rng = np.random.default_rng(2)
        for q in (1.25, 1.5):
            for _ in range(50):
                z = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
                if abs(z) < 1e-3:
                    continue
                ratio = thm1_lhs(4 * z, 0.0, q) / thm1_lhs(z, 0.0, q)
                assert abs(ratio - 4.0 ** (q - 1.0)) < 1e-10

    def test_pole(self):
        with pytest.raises(SpectralPoleError):
            thm1_lhs(3.0, 3.0, 1.5)
        with pytest.raises(ValueError):
            thm1_lhs(4.0, 0.0, 1.0)


class TestLfsFactor:
    def test_massless_form(self):
        q = 1.25
        for z in (2.0, 1j, 3.0 - 1.0j):
            want = abs(z) ** (1.0 - q) * 3.0 ** q
            assert abs(lfs_lhs(z, 0.0, q) - want) < 1e-12

    def test_massive_example(self):
        want = 16.0 ** (-1.0 / 8.0) * 3.5 ** 1.25
        assert abs(lfs_lhs(5.0, 3.0, 1.25) - want) < 1e-12

    def test_consistency_with_thm1(self):
        # at m = 0 the product of the two closed forms is exactly 1
        rng = np.random.default_rng(4)
        for _ in range(100):
            z = complex(rng.uniform(-4, 4), rng.uniform(-4, 4))
            if abs(z) < 1e-3:
                continue
            assert abs(thm1_lhs(z, 0.0, 1.25) * lfs_lhs(z, 0.0, 1.25) - 1.0) < 1e-11

    def test_q_range(self):
        with pytest.raises(ValueError):
            lfs_lhs(2.0, 0.0, 1.5)


class TestRegionII:
    def test_center_always_member(self):
        assert thm1_region_ii(1.0, 1.0, 0.3, 1.0)

    def test_origin_not_member_for_weak(self):
        assert not thm1_region_ii(0.0, 1.0, 0.1, 1.0)

    def test_boundary_closed(self):
        m, c1, v1 = 1.0, 1.0, 0.1
        z = m + c1 * m * v1 ** 2
        assert thm1_region_ii(z, m, v1, c1)

    def test_mass_required(self):
        with pytest.raises(ValueError):
            thm1_region_ii(0.0, 0.0, 0.1, 1.0)


class TestAlpha:
    def test_frozen_values(self):
        assert abs(alpha_qrd(1.5, 0.5, 2) - 3.0) < 1e-12
        assert abs(alpha_qrd(1.25, 0.25, 2) - 2.5) < 1e-12
        assert abs(alpha_qrd(1.0, 0.5, 2, 0.01) - 1.01) < 1e-12

    def test_overlap_with_critical_point_exponent(self):
        # on the high-q branch with r = 1/2, d = 2 this equals q(d-1)/(d-q)
        for q in (4.0 / 3.0, 1.4, 1.5):
            assert abs(alpha_qrd(q, 0.5, 2) - q / (2.0 - q)) < 1e-12

    def test_range_errors(self):
        with pytest.raises(ValueError):
            alpha_qrd(2.0, 0.5, 2)
        with pytest.raises(ValueError):
            alpha_qrd(1.2, 0.5, 1)
        with pytest.raises(ValueError):
            alpha_qrd(1.2, 0.5, 2, epsilon=0.0)


class TestNq:
    def test_origin_patch(self):
        assert abs(n_q(1e-3, 1.5) - 10.0) < 1e-12 * 10

    def test_saddle_patch_log(self):
        want = -np.log(1e-4)
        assert abs(n_q(1.0 / 16.0 + 1e-4, 1.0) - want) < 1e-12 * want

    def test_patch_boundary_continuity(self):
        # q = 1 is excluded: the log factor makes the max-form bridge jump at
        # the origin-patch edge, and only the in-patch q = 1 values are pinned
        for q in (1.25, 1.5):
            for base in (1.0 / 64.0, 1.0 / 16.0 - 1.0 / 64.0):
                inside = n_q(base * (1 - 1e-12), q)
                outside = n_q(base * (1 + 1e-12), q)
                assert abs(inside - outside) < 1e-6 * max(1.0, inside)

    def test_bridge_continuous_and_finite(self):
        # dense sample of the region between the two patches
        rng = np.random.default_rng(6)
        pts = []
        while len(pts) < 400:
            z = complex(rng.uniform(-0.2, 0.3), rng.uniform(-0.2, 0.2))
            if abs(z) > 1.0 / 64.0 and abs(z - 1.0 / 16.0) > 1.0 / 64.0:
                pts.append(z)
        for q in (1.25, 1.5):
            vals = np.array([n_q(z, q) for z in pts])
            assert np.all(np.isfinite(vals)) and np.all(vals > 0)
            # continuity: nearby samples give nearby values
            for z in pts[:50]:
                v0 = n_q(z, q)
                v1 = n_q(z + 1e-9, q)
                assert abs(v1 - v0) < 1e-6 * max(1.0, v0)

    def test_poles(self):
        with pytest.raises(SpectralPoleError):
            n_q(0.0, 1.5)
        with pytest.raises(SpectralPoleError):
            n_q(1.0 / 16.0, 1.5)


class TestThm2Regions:
    def test_boundary_closed(self):
        q, vq, c = 1.5, 0.2, 1.0
        z = (c * (1 + vq)) ** (1.0 / (q - 1.0))
        assert thm2_regions(z, q, vq, 0.0, c).region_i

    def test_origin_in_first_lobe(self):
        m = thm2_regions(0.0, 1.5, 0.1, 0.0, 1.0)
        assert m.region_ii

    def test_exponential_radius(self):
        m = thm2_regions(1.0 / 16.0 + 4.0e-5, 1.0, 0.1, 0.1, 1.0)
        assert m.region_iii           # radius e^{-10} ~ 4.54e-5
        m = thm2_regions(1.0 / 16.0 + 5.0e-5, 1.0, 0.1, 0.1, 1.0)
        assert not m.region_iii

    def test_membership_monotone_in_constant(self):
        rng = np.random.default_rng(8)
        for _ in range(200):
            z = complex(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5))
            small = thm2_regions(z, 1.25, 0.3, 0.1, 0.5)
            big = thm2_regions(z, 1.25, 0.3, 0.1, 2.0)
            assert (not small.region_i) or big.region_i
            assert (not small.region_ii) or big.region_ii


class TestEmpiricalConstant:
    def _rep(self, ratio):
        return BoundReport(theorem="thm1-i", z=1.0, m=0.0, q=1.5,
                           lhs=ratio, vnorm_q=1.0, ratio=ratio)

    def test_single(self):
        assert empirical_constant([self._rep(0.3)]) == 0.3

    def test_max_and_monotone_extension(self):
        base = [self._rep(r) for r in (0.1, 0.25, 0.2)]
        c0 = empirical_constant(base)
        assert c0 == 0.25
        assert empirical_constant(base + [self._rep(0.4)]) >= c0

    def test_empty(self):
        with pytest.raises(ValueError):
            empirical_constant([])

    def test_from_lhs_requires_positive_norm(self):
        with pytest.raises(ValueError):
            BoundReport.from_lhs("thm1-i", 1.0, 0.0, 1.5, 1.0, 0.0)
