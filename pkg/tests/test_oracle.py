"""The brute-force checkers themselves, and what they say about the package."""
import numpy as np
import pytest

from comettail.analysis import fit_parabola, ridge_parabola, RidgePoint
from comettail.dispersion import refractive_index
from comettail.oracle import (audit_remap, brute_ridge, fd_dn_domega,
                              make_report, mc_fit_scaling)


class TestBruteRidge:
    def test_vertex_row_matches_analytic(self, cfg, tc):
        coef = ridge_parabola(cfg, tc)
        pts = brute_ridge(cfg, tc, [0.0])
        assert pts.shape == (1, 2)
        assert abs(pts[0, 1] - (-coef.c_um)) <= 1e-3 * coef.c_um
        # the vertex sits near -2.42 mm
        assert pts[0, 1] == pytest.approx(-2420.0, abs=100.0)

    def test_profile_matches_parabola_over_5mm(self, cfg, tc):
        coef = ridge_parabola(cfg, tc)
        y = np.linspace(-5000.0, 5000.0, 81)
        pts = brute_ridge(cfg, tc, y)
        predicted = coef.a_per_um * pts[:, 0] ** 2 - coef.c_um
        assert np.max(np.abs(pts[:, 1] - predicted)) <= 1e-3 * coef.c_um

    def test_symmetric_in_y(self, cfg, tc):
        pts = brute_ridge(cfg, tc, [-3000.0, 3000.0])
        assert pts[0, 1] == pts[1, 1]

    def test_no_wavelengths_left_raises(self, cfg, tc):
        # a height above every ring in the scanned band
        with pytest.raises(ValueError):
            brute_ridge(cfg, tc, [25000.0])


class TestAuditRemap:
    def test_hundred_trials_all_pass(self, cfg, tc):
        reports = audit_remap(cfg, tc, n_trials=100, seed=0)
        assert len(reports) == 100
        assert all(r.passed for r in reports)
        worst = max(abs(r.computed - r.reference) / r.reference
                    for r in reports)
        assert worst < 1e-9

    def test_corrupted_books_fail(self, cfg, tc):
        reports = audit_remap(cfg, tc, n_trials=5, seed=0, corrupt=True)
        assert any(not r.passed for r in reports)

    def test_deterministic_given_seed(self, cfg, tc):
        r1 = audit_remap(cfg, tc, n_trials=3, seed=11)
        r2 = audit_remap(cfg, tc, n_trials=3, seed=11)
        assert [(r.reference, r.computed) for r in r1] \
            == [(r.reference, r.computed) for r in r2]


class TestFdDispersion:
    def test_matches_analytic_beta(self, fradkin):
        from comettail.dispersion import dn_domega
        n_of = lambda lam: refractive_index(fradkin, lam)
        for lam in (0.525, 0.795, 1.546):
            fd = fd_dn_domega(n_of, lam)
            assert fd == pytest.approx(dn_domega(fradkin, lam), rel=1e-6)

    def test_quadratic_function_exact(self):
        # beta of n(lam) = 2 + k lam^2 has a closed form to check against
        k = 0.01
        n_of = lambda lam: 2.0 + k * lam ** 2
        lam = 1.0
        c = 2.99792458e14
        expect = -(lam ** 2) * (2 * k * lam) / (2 * np.pi * c)
        assert fd_dn_domega(n_of, lam) == pytest.approx(expect, rel=1e-7)


class TestMcFitScaling:
    def test_error_bars_calibrated_and_linear(self, cfg, tc):
        coef = ridge_parabola(cfg, tc)
        y = np.arange(-4500.0, 4501.0, 13.0)
        res = mc_fit_scaling(fit_parabola, RidgePoint, coef.a_per_um,
                             coef.c_um, y, (0.5, 5.0), n_trials=300, seed=0)
        emp_a1, emp_c1, rep_a1, rep_c1 = res[0.5]
        emp_a2, emp_c2, rep_a2, rep_c2 = res[5.0]
        # tenfold noise gives tenfold scatter
        assert emp_a2 / emp_a1 == pytest.approx(10.0, rel=0.2)
        assert emp_c2 / emp_c1 == pytest.approx(10.0, rel=0.2)
        # reported standard errors track the empirical scatter
        for emp, rep in ((emp_a1, rep_a1), (emp_c1, rep_c1),
                         (emp_a2, rep_a2), (emp_c2, rep_c2)):
            assert 0.8 < emp / rep < 1.25


class TestMakeReport:
    def test_pass_and_fail_edges(self):
        assert make_report("x", 1.0, 1.0 + 1e-10, 1e-9).passed
        assert not make_report("x", 1.0, 1.0 + 2e-9, 1e-9).passed
