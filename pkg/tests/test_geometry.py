"""Grating geometry: reflection angles, plane maps, ring crossings."""
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from comettail.errors import EvanescentOrderError, OffRingError
from comettail.geometry import (SMALL_ANGLE_CAP, DetectorSpec, OpticalConfig,
                                PlaneCoord, exact_x, linear_x, reflect_angle,
                                ring_abscissa, translate_exact,
                                translate_linearized)

THETA_R0 = 0.31646850964244383
X_EXACT_785 = 2520.2775702027334
X_LINEAR_785 = 2525.4109336823813
RING_X_785 = 6131.883886702357

# frozen maxima of |linear - exact| over shrinking half-window grids
WINDOW_ERR_FULL = 348.789925149551
WINDOW_ERR_HALF = 89.66548819457694
WINDOW_ERR_QUARTER = 22.741899044624915


class TestOpticalConfig:
    def test_center_reflection_angle_pinned(self, cfg):
        assert cfg.theta_r0_rad == pytest.approx(THETA_R0, rel=1e-12)
        assert math.degrees(cfg.theta_r0_rad) == pytest.approx(18.13, abs=0.01)

    def test_cosines(self, cfg):
        assert cfg.cos_in0 == pytest.approx(0.766044443118978, rel=1e-15)
        assert cfg.cos_r0 == pytest.approx(0.9503403853964022, rel=1e-15)

    def test_no_reflected_order_rejected(self):
        # 1.6 um on a 1200 /mm grating at 40 degrees: arcsin argument 1.28
        with pytest.raises(ValueError):
            OpticalConfig(center_wavelength_um=1.6)

    def test_visibility_bounds(self):
        with pytest.raises(ValueError):
            OpticalConfig(visibility=1.2)
        with pytest.raises(ValueError):
            OpticalConfig(visibility=-0.1)

    def test_angle_domain(self):
        with pytest.raises(ValueError):
            OpticalConfig(incident_angle_rad=0.0)
        with pytest.raises(ValueError):
            OpticalConfig(incident_angle_rad=math.pi / 2)

    def test_fringe_phase_precedence(self):
        c_explicit = OpticalConfig(phase_offset_rad=1.25)
        assert c_explicit.fringe_phase_rad() == 1.25
        c_bright = OpticalConfig(bright_center=True)
        assert c_bright.fringe_phase_rad() == pytest.approx(
            -math.tau * c_bright.delta_opt_um / 0.795, rel=1e-15)
        c_plain = OpticalConfig(bright_center=False)
        assert c_plain.fringe_phase_rad() == 0.0


class TestDetectorSpec:
    def test_default_lattice_centered(self, det):
        x = det.x_coords()
        y = det.y_coords()
        assert x.size == 1024 and y.size == 1024
        assert x[0] == pytest.approx(-13.0 * 1023 / 2)
        assert x[-1] == pytest.approx(+13.0 * 1023 / 2)
        assert np.allclose(x + x[::-1], 0.0, atol=1e-9)
        assert np.allclose(np.diff(x), 13.0)

    def test_half_extent(self, det):
        hx, hy = det.half_extent_um()
        assert hx == pytest.approx(13.0 * 1023 / 2)
        assert hy == hx

    def test_explicit_origin_honored(self):
        d = DetectorSpec(pitch_um=10.0, width_px=4, height_px=4,
                         origin_x_um=0.0, origin_y_um=-5.0)
        assert d.x_coords().tolist() == [0.0, 10.0, 20.0, 30.0]
        assert d.y_coords()[0] == -5.0


class TestReflectAngle:
    def test_zero_wavelength_mirror(self, cfg):
        # lambda = 0 reduces the grating to a mirror: theta_r = -theta_in
        th = 0.3
        assert reflect_angle(cfg, 0.0, th) == pytest.approx(-th, rel=1e-15)

    def test_evanescent_raises(self, cfg):
        # arcsin argument 1.05 away from any propagating order
        lam_bad = cfg.grating_period_um * (1.05
                                           + math.sin(cfg.incident_angle_rad))
        with pytest.raises(EvanescentOrderError):
            reflect_angle(cfg, lam_bad, cfg.incident_angle_rad)

    def test_vectorized_matches_scalar(self, cfg):
        lam = np.array([0.78, 0.79, 0.795])
        out = reflect_angle(cfg, lam, cfg.incident_angle_rad)
        for lam_i, out_i in zip(lam, out):
            assert out_i == reflect_angle(cfg, float(lam_i),
                                          cfg.incident_angle_rad)

    @given(lam=st.floats(min_value=0.0, max_value=1.4),
           theta=st.floats(min_value=0.05, max_value=1.2))
    @settings(max_examples=200, deadline=None)
    def test_grating_equation_residual(self, cfg, lam, theta):
        arg = lam / cfg.grating_period_um - math.sin(theta)
        assume(abs(arg) < 0.999)
        th_r = reflect_angle(cfg, lam, theta)
        resid = math.sin(theta) + math.sin(th_r) - lam / cfg.grating_period_um
        assert abs(resid) < 1e-12


class TestTranslate:
    def test_exact_pinned_785(self, cfg):
        p = translate_exact(cfg, 0.785, PlaneCoord(0.0, 250.0, primed=True))
        assert p.x_um == pytest.approx(X_EXACT_785, rel=1e-12)
        assert p.y_um == 250.0
        assert not p.primed

    def test_linear_pinned_785(self, cfg):
        p = translate_linearized(cfg, 0.785, PlaneCoord(0.0, 0.0, primed=True))
        assert p.x_um == pytest.approx(X_LINEAR_785, rel=1e-12)

    def test_origin_pinned_default(self, cfg):
        p = translate_exact(cfg, cfg.center_wavelength_um,
                            PlaneCoord(0.0, 0.0, primed=True))
        assert abs(p.x_um) < 1e-6

    @given(f_mm=st.floats(min_value=50.0, max_value=1000.0),
           lines=st.floats(min_value=300.0, max_value=2400.0),
           deg=st.floats(min_value=5.0, max_value=80.0),
           lam=st.floats(min_value=0.4, max_value=1.1))
    @settings(max_examples=150, deadline=None)
    def test_origin_pinned_every_config(self, f_mm, lines, deg, lam):
        d_g = 1000.0 / lines
        arg = lam / d_g - math.sin(math.radians(deg))
        assume(abs(arg) < 0.999)
        c = OpticalConfig(focal_length_um=f_mm * 1000.0, grating_period_um=d_g,
                          incident_angle_rad=math.radians(deg),
                          center_wavelength_um=lam)
        p = translate_exact(c, lam, PlaneCoord(0.0, 0.0, primed=True))
        assert abs(p.x_um) < 1e-6

    def test_requires_primed_point(self, cfg):
        with pytest.raises(ValueError):
            translate_exact(cfg, 0.785, PlaneCoord(0.0, 0.0))
        with pytest.raises(ValueError):
            translate_linearized(cfg, 0.785, PlaneCoord(0.0, 0.0))

    def test_linearized_domain_cap(self, cfg):
        xmax = SMALL_ANGLE_CAP * cfg.focal_length_um
        with pytest.raises(ValueError):
            translate_linearized(cfg, 0.785,
                                 PlaneCoord(1.01 * xmax, 0.0, primed=True))

    def test_plus_minus_delta_antisymmetry(self, cfg):
        # at the center wavelength the shift term vanishes and the two
        # outputs differ by exactly -2 delta cos_in0 / cos_r0
        delta = 400.0
        lam = cfg.center_wavelength_um
        xp = translate_linearized(cfg, lam, PlaneCoord(+delta, 0, primed=True))
        xm = translate_linearized(cfg, lam, PlaneCoord(-delta, 0, primed=True))
        expect = -2.0 * delta * cfg.cos_in0 / cfg.cos_r0
        assert xp.x_um - xm.x_um == expect
        # away from center the same difference holds to rounding
        xp = translate_linearized(cfg, 0.78, PlaneCoord(+delta, 0, primed=True))
        xm = translate_linearized(cfg, 0.78, PlaneCoord(-delta, 0, primed=True))
        assert xp.x_um - xm.x_um == pytest.approx(expect, rel=1e-12)

    def test_exact_evanescent_propagates(self, cfg):
        # pushing x' far enough tilts the incident ray past the last order
        with pytest.raises(EvanescentOrderError):
            exact_x(cfg, cfg.center_wavelength_um, 1.6e5)

    def test_nonfinite_coordinate_rejected(self):
        with pytest.raises(ValueError):
            PlaneCoord(math.nan, 0.0)
        with pytest.raises(ValueError):
            PlaneCoord(0.0, math.inf)


class TestLinearizedWindow:
    @staticmethod
    def _max_err(cfg, frac_x, dlam_max, n=201):
        f = cfg.focal_length_um
        xg = np.linspace(-frac_x * f, frac_x * f, n)
        lam = np.linspace(cfg.center_wavelength_um - dlam_max,
                          cfg.center_wavelength_um, n)
        worst = 0.0
        for l in lam:
            e = exact_x(cfg, float(l), xg)
            li = linear_x(cfg, float(l), xg)
            worst = max(worst, float(np.max(np.abs(li - e))))
        return worst

    def test_window_error_bounded_and_pinned(self, cfg):
        worst = self._max_err(cfg, 0.05, 0.03)
        assert worst == pytest.approx(WINDOW_ERR_FULL, rel=1e-9)
        assert worst < 360.0

    def test_error_shrinks_monotonically_with_window(self, cfg):
        full = self._max_err(cfg, 0.05, 0.03)
        half = self._max_err(cfg, 0.025, 0.015)
        quarter = self._max_err(cfg, 0.0125, 0.0075)
        assert half == pytest.approx(WINDOW_ERR_HALF, rel=1e-9)
        assert quarter == pytest.approx(WINDOW_ERR_QUARTER, rel=1e-9)
        assert half < 0.30 * full
        assert quarter < 0.30 * half


class TestRingAbscissa:
    def test_pinned_crossing(self, cfg, tc94):
        assert ring_abscissa(cfg, tc94, 0.785, 0.0) == pytest.approx(
            RING_X_785, rel=1e-12)
        assert ring_abscissa(cfg, tc94, 0.785, 0.0, branch=-1) == pytest.approx(
            -RING_X_785, rel=1e-12)

    def test_branch_symmetry(self, cfg, tc94):
        for y in (0.0, 1000.0, 5000.0):
            plus = ring_abscissa(cfg, tc94, 0.785, y, branch=1)
            minus = ring_abscissa(cfg, tc94, 0.785, y, branch=-1)
            assert plus == -minus
            assert plus >= 0.0

    def test_height_shrinks_abscissa(self, cfg, tc94):
        r0 = ring_abscissa(cfg, tc94, 0.785, 0.0)
        r1 = ring_abscissa(cfg, tc94, 0.785, 3000.0)
        assert r1 < r0
        assert r1 == pytest.approx(math.sqrt(r0 ** 2 - 3000.0 ** 2), rel=1e-12)

    def test_off_ring_height(self, cfg, tc94):
        with pytest.raises(OffRingError):
            ring_abscissa(cfg, tc94, 0.785, 1.01 * RING_X_785)

    def test_above_center_wavelength(self, cfg, tc94):
        with pytest.raises(OffRingError):
            ring_abscissa(cfg, tc94, 0.80, 0.0)

    def test_bad_branch(self, cfg, tc94):
        with pytest.raises(ValueError):
            ring_abscissa(cfg, tc94, 0.785, 0.0, branch=2)

    @given(dlam=st.floats(min_value=1e-4, max_value=0.03),
           frac=st.floats(min_value=0.0, max_value=0.999))
    @settings(max_examples=100, deadline=None)
    def test_crossing_lies_on_ring(self, cfg, tc94, dlam, frac):
        lam = 0.795 - dlam
        r = cfg.focal_length_um * math.sqrt(tc94.theta2(lam))
        y = frac * r
        xp = ring_abscissa(cfg, tc94, lam, y)
        assert math.hypot(xp, y) == pytest.approx(r, rel=1e-9)
