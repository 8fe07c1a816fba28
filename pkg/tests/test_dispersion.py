"""Sellmeier evaluation, the tuning-curve coefficients, and QPM closure.

Reference numbers were frozen from an independent oracle script (plain
Decimal/ mpmath-free arithmetic straight from the published coefficient
tables) and are pinned here to tight tolerances.
"""
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from comettail.constants import C_UM_PER_S, TWO_PI, angular_frequency
from comettail.dispersion import (BUILTIN_SELLMEIER, DispersionModel,
                                  SellmeierSet, TuningCurve, compute_b1,
                                  compute_b2, dn_domega, qpm_mismatch,
                                  refractive_index, tuning_curve)
from comettail.errors import WavelengthRangeError
from comettail.oracle import fd_dn_domega

LAM_P = 0.525
LAM_S0 = 0.795
LAM_I0 = 1.5458333333333334

# frozen oracle values, Fradkin 1999 KTP z
N_S0 = 1.8456074757002208
N_I0 = 1.8161278331825548
N_P = 1.8918514619912807
BETA_S = 2.851532044860996e-17
BETA_I = 2.99891981119916e-17
B1 = 3.167077789960063e-17
B2 = 0.09438979886412523
QPM_BULK = 0.6732695197556363
QPM_934 = 0.0005516067813765568

# frozen oracle values, Kato-Takaoka 2002 KTP z
KATO_N_S0 = 1.845070160185497
KATO_N_I0 = 1.8158692252709179
KATO_B2 = 0.09507919464205145
KATO_QPM_934 = -0.005012957413909613


class TestRefractiveIndex:
    def test_pinned_indices_fradkin(self, fradkin):
        assert refractive_index(fradkin, LAM_S0) == pytest.approx(N_S0, rel=1e-12)
        assert refractive_index(fradkin, LAM_I0) == pytest.approx(N_I0, rel=1e-12)
        assert refractive_index(fradkin, LAM_P) == pytest.approx(N_P, rel=1e-12)

    def test_pinned_indices_kato(self, kato):
        assert refractive_index(kato, LAM_S0) == pytest.approx(KATO_N_S0, rel=1e-12)
        assert refractive_index(kato, LAM_I0) == pytest.approx(KATO_N_I0, rel=1e-12)

    def test_two_sets_agree_loosely(self, fradkin, kato):
        # same crystal axis from two labs; parts-per-thousand agreement
        for lam in (0.525, 0.795, 1.546):
            n1 = refractive_index(fradkin, lam)
            n2 = refractive_index(kato, lam)
            assert abs(n1 - n2) / n1 < 2e-3

    def test_array_evaluation(self, fradkin):
        lam = np.array([0.5, 0.795, 1.5])
        n = refractive_index(fradkin, lam)
        assert n.shape == (3,)
        assert n[1] == pytest.approx(N_S0, rel=1e-12)

    def test_range_enforced(self, fradkin):
        with pytest.raises(WavelengthRangeError):
            refractive_index(fradkin, 0.30)
        with pytest.raises(WavelengthRangeError):
            refractive_index(fradkin, 4.0)
        with pytest.raises(WavelengthRangeError):
            refractive_index(fradkin, np.array([0.795, 9.0]))


class TestDnDomega:
    def test_pinned_betas(self, fradkin):
        assert dn_domega(fradkin, LAM_S0) == pytest.approx(BETA_S, rel=1e-12)
        assert dn_domega(fradkin, LAM_I0) == pytest.approx(BETA_I, rel=1e-12)

    def test_against_finite_difference_grid(self, fradkin):
        # acceptance-grade cross-check on a wavelength grid spanning the range
        lam = np.linspace(0.5, 3.0, 100)
        n_of = lambda l: refractive_index(fradkin, l)
        worst = 0.0
        for l in lam:
            fd = fd_dn_domega(n_of, float(l))
            an = dn_domega(fradkin, float(l))
            worst = max(worst, abs(fd - an) / abs(an))
        assert worst < 1e-6

    def test_beta_positive_normal_dispersion(self, fradkin):
        # dn/dlambda < 0 in the normal regime, so dn/domega > 0
        for lam in (0.5, 0.795, 1.5, 3.0):
            assert dn_domega(fradkin, lam) > 0


class TestModel:
    def test_idler_from_energy_conservation(self, model):
        assert model.lambda_i0_um == pytest.approx(LAM_I0, rel=1e-15)
        resid = 1 / LAM_P - 1 / LAM_S0 - 1 / model.lambda_i0_um
        assert abs(resid) < 1e-15

    def test_signal_must_be_short_daughter(self, fradkin):
        # lambda_s0 = 1.2 um puts the idler below it
        with pytest.raises(ValueError):
            DispersionModel(fradkin, 0.525, 1.2)

    def test_pump_below_signal_required(self, fradkin):
        with pytest.raises(ValueError):
            DispersionModel(fradkin, 0.9, 0.795)


class TestB1B2:
    def test_pinned_b1(self, model):
        assert compute_b1(model) == pytest.approx(B1, rel=1e-12)

    def test_pinned_b2(self, model):
        assert compute_b2(model) == pytest.approx(B2, rel=1e-12)

    def test_b2_matches_nominal_value(self, model):
        # the working value this instrument geometry was designed around
        assert compute_b2(model) == pytest.approx(0.094, rel=0.01)

    def test_kato_b2_close(self, kato):
        m = DispersionModel(kato, LAM_P, LAM_S0)
        assert compute_b2(m) == pytest.approx(KATO_B2, rel=1e-12)
        assert compute_b2(m) == pytest.approx(B2, rel=0.01)

    def test_b2_from_b1_scaling(self, model):
        b1 = compute_b1(model)
        b2 = compute_b2(model)
        assert b2 == pytest.approx(TWO_PI * C_UM_PER_S / LAM_S0 ** 2 * b1,
                                   rel=1e-15)

    def test_dispersionless_medium_gives_zero(self):
        # constant index: beta = 0 and n_s = n_i, so the numerator vanishes
        flat = SellmeierSet(label="constant test medium",
                            lambda_min_um=0.1, lambda_max_um=10.0,
                            constant=2.25)
        m = DispersionModel(flat, LAM_P, LAM_S0)
        assert compute_b1(m) == 0.0
        assert compute_b2(m) == 0.0

    def test_angle_squared_consistency_at_10nm(self, model):
        # theta^2 = b2 dlambda and theta^2 = b1 domega agree to the
        # lambda_s0/lambda factor; both land near 9.4e-4 rad^2
        b1 = compute_b1(model)
        b2 = compute_b2(model)
        dlam = 0.010
        lam = LAM_S0 - dlam
        t2_lam = b2 * dlam
        t2_omega = b1 * (angular_frequency(lam) - angular_frequency(LAM_S0))
        assert t2_lam == pytest.approx(9.4e-4, rel=0.02)
        assert t2_omega == pytest.approx(9.4e-4, rel=0.02)
        assert t2_omega / t2_lam == pytest.approx(LAM_S0 / lam, rel=1e-9)


class TestTuningCurve:
    def test_theta2_at_center_is_zero(self, tc):
        assert tc.theta2(tc.lambda_s0_um) == 0.0

    def test_theta_out_pinned_10nm(self, tc94):
        # sqrt(0.094 * 0.010) = 30.66 mrad
        assert tc94.theta_out(0.785) == pytest.approx(0.030659419433511783,
                                                      rel=1e-12)

    def test_theta_scaling_sqrt(self, tc):
        th1 = tc.theta_out(tc.lambda_s0_um - 0.010)
        th2 = tc.theta_out(tc.lambda_s0_um - 0.020)
        assert th2 / th1 == pytest.approx(math.sqrt(2.0), rel=1e-12)

    def test_rejects_above_center(self, tc):
        with pytest.raises(ValueError):
            tc.theta_out(tc.lambda_s0_um + 0.001)

    def test_from_b2_roundtrip(self):
        t = TuningCurve.from_b2(0.795, 0.094)
        assert t.b2_per_um == pytest.approx(0.094, rel=1e-15)
        back = TWO_PI * C_UM_PER_S / 0.795 ** 2 * t.b1_s
        assert back == pytest.approx(0.094, rel=1e-12)

    def test_inconsistent_pair_rejected(self):
        good = TuningCurve.from_b2(0.795, 0.094)
        with pytest.raises(ValueError):
            TuningCurve(lambda_s0_um=0.795, b1_s=good.b1_s * 1.5,
                        b2_per_um=0.094)

    def test_first_principles_matches_compute(self, model, tc):
        assert tc.b2_per_um == pytest.approx(compute_b2(model), rel=1e-15)
        assert tc.b1_s == pytest.approx(compute_b1(model), rel=1e-15)

    @given(dlam=st.floats(min_value=1e-6, max_value=0.03))
    @settings(max_examples=50, deadline=None)
    def test_theta2_linear_in_dlambda(self, dlam):
        t = TuningCurve.from_b2(0.795, 0.094)
        assert t.theta2(0.795 - dlam) == pytest.approx(0.094 * dlam, rel=1e-12)


class TestQpm:
    def test_pinned_bulk_mismatch(self, model):
        assert qpm_mismatch(model, math.inf) == pytest.approx(QPM_BULK, rel=1e-12)

    def test_pinned_poled_mismatch_recorded(self, model):
        # diagnostic record: the 9.34 um grating leaves less than a
        # thousandth of the poling wavevector unmatched
        dk = qpm_mismatch(model, 9.34)
        assert dk == pytest.approx(QPM_934, rel=1e-12)
        assert abs(dk) / (TWO_PI / 9.34) < 1e-3

    def test_kato_poled_mismatch(self, kato):
        m = DispersionModel(kato, LAM_P, LAM_S0)
        assert qpm_mismatch(m, 9.34) == pytest.approx(KATO_QPM_934, rel=1e-12)

    def test_infinite_period_equals_bulk(self, model):
        assert qpm_mismatch(model, math.inf) == pytest.approx(
            qpm_mismatch(model, 1e18), abs=1e-11)

    def test_doubling_period_shifts_by_pi_over_period(self, model):
        lam_pol = 9.34
        d1 = qpm_mismatch(model, lam_pol)
        d2 = qpm_mismatch(model, 2 * lam_pol)
        assert d2 - d1 == pytest.approx(math.pi / lam_pol, rel=1e-12)


class TestCustomSellmeier:
    def test_pole_term_form_matches_closed_form(self):
        s = SellmeierSet(label="single pole", lambda_min_um=0.4,
                         lambda_max_um=2.0, constant=3.0,
                         pole_terms=((0.05, 0.04),))
        lam = 0.8
        expect = math.sqrt(3.0 + 0.05 / (lam ** 2 - 0.04))
        assert refractive_index(s, lam) == pytest.approx(expect, rel=1e-15)

    def test_one_minus_term_form(self):
        s = SellmeierSet(label="single resonance", lambda_min_um=0.4,
                         lambda_max_um=2.0, constant=2.0,
                         one_minus_terms=((1.2, 0.05),),
                         lambda2_coeff=-0.01)
        lam = 1.1
        expect = math.sqrt(2.0 + 1.2 / (1 - 0.05 / lam ** 2) - 0.01 * lam ** 2)
        assert refractive_index(s, lam) == pytest.approx(expect, rel=1e-15)

    def test_unphysical_index_raises(self):
        s = SellmeierSet(label="bad", lambda_min_um=0.1, lambda_max_um=10.0,
                         constant=0.5)
        with pytest.raises(WavelengthRangeError):
            refractive_index(s, 1.0)
