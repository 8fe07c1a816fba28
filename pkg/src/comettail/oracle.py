"""Brute-force checkers for the test suite.

Everything here re-derives its reference numbers by plain scans, finite
differences, or explicit bookkeeping, sharing no arithmetic with the module
it checks: brute_ridge re-transcribes the wavelength-position curve and
minimizes it by grid scan instead of calculus; audit_remap re-sums rasters
around the remap; fd_dn_domega differentiates any index function
numerically. Nothing in the runtime package imports this module; only tests
do. Oracles favor transparency over speed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .pattern import RingProfile, remap_through_grating, render_ring

__all__ = [
    "OracleReport",
    "make_report",
    "brute_ridge",
    "audit_remap",
    "fd_dn_domega",
    "mc_fit_scaling",
]

_C_UM_PER_S = 2.99792458e14


@dataclass(frozen=True)
class OracleReport:
    """One check: |computed - reference| <= tolerance iff passed."""

    name: str
    reference: float
    computed: float
    tolerance: float
    passed: bool


def make_report(name, reference, computed, tolerance) -> OracleReport:
    return OracleReport(name=name, reference=float(reference),
                        computed=float(computed), tolerance=float(tolerance),
                        passed=abs(computed - reference) <= tolerance)


def brute_ridge(cfg, tc, y_grid, n_lambda=100_000, lam_min_um=None):
    """Ridge located by brute scan of the wavelength-position curve.

    For each y the curve x(lambda) is evaluated on an n_lambda-point grid
    (transcribed directly from the ring crossing and the first-order grating
    map, no shared helpers) and the minimizing x is taken. Returns an array
    of (y, x_min) rows.
    """
    f = cfg.focal_length_um
    d_g = cfg.grating_period_um
    th_in0 = cfg.incident_angle_rad
    lam0 = tc.lambda_s0_um
    b2 = tc.b2_per_um
    th_r0 = math.asin(lam0 / d_g - math.sin(th_in0))
    ci = math.cos(th_in0)
    cr = math.cos(th_r0)
    if lam_min_um is None:
        lam_min_um = lam0 - 0.030
    points = []
    for y in np.asarray(y_grid, dtype=float):
        lam_hi = lam0 - y * y / (b2 * f * f)
        if lam_hi <= lam_min_um:
            raise ValueError(f"no ridge wavelengths left at y = {y} um")
        lam = np.linspace(lam_min_um, lam_hi, n_lambda)
        dl = lam0 - lam
        rad = b2 * dl * f * f - y * y
        np.clip(rad, 0.0, None, out=rad)
        x = (f * dl / d_g - ci * np.sqrt(rad)) / cr
        points.append((float(y), float(x.min())))
    return np.array(points)


def audit_remap(cfg, tc, n_trials=100, seed=0, corrupt=False, detector=None,
                rel_tol=1e-9):
    """Energy bookkeeping of the grating remap over randomized rings.

    Each trial renders a ring at a random wavelength with a random profile,
    remaps it, and re-sums both rasters here: input energy must equal output
    energy plus the reported loss within rel_tol relative. corrupt drains a
    little energy from the remapped raster first, as a negative control that
    must report failure. Returns a list of OracleReports.
    """
    rng = np.random.default_rng(seed)
    det = detector
    reports = []
    for k in range(n_trials):
        lam = tc.lambda_s0_um - rng.uniform(0.0005, 0.030)
        width = rng.uniform(0.002, 0.05) * tc.b2_per_um * 0.030
        kind = "gaussian" if rng.uniform() < 0.5 else "sinc2"
        profile = RingProfile(kind=kind, width=width)
        ring = render_ring(cfg, tc, lam, profile, detector=det)
        remapped, loss = remap_through_grating(cfg, lam, ring)
        values = remapped.values
        if corrupt:
            j = int(np.argmax(values.sum(axis=0)))
            values = values.copy()
            values[:, j] *= 0.995
        e_in = float(np.sum(ring.values))
        e_out = float(np.sum(values)) + loss
        reports.append(make_report(f"remap-energy-{k}", e_in, e_out,
                                   rel_tol * e_in))
    return reports


def fd_dn_domega(n_of_lambda, lam_um, rel_step=1e-7):
    """beta = dn/domega by symmetric finite difference, seconds.

    n_of_lambda is any callable lam_um -> n. The step is taken in omega and
    mapped back to wavelengths; no analytic derivative is involved.
    """
    omega = 2.0 * math.pi * _C_UM_PER_S / lam_um
    h = rel_step * omega
    lam_hi = 2.0 * math.pi * _C_UM_PER_S / (omega + h)
    lam_lo = 2.0 * math.pi * _C_UM_PER_S / (omega - h)
    return (n_of_lambda(lam_hi) - n_of_lambda(lam_lo)) / (2.0 * h)


def mc_fit_scaling(fit_fn, point_cls, a_true, c_true, y_grid, noise_sigmas,
                   n_trials=1000, seed=0):
    """Monte Carlo calibration of a parabola-fit routine's error bars.

    For each noise level, n_trials synthetic point sets on x = a y^2 - c
    with gaussian x-noise are fitted by fit_fn; returns a dict mapping the
    noise sigma to (empirical std of a, empirical std of c, mean reported
    sigma_a, mean reported sigma_c), all measured here independently.
    """
    rng = np.random.default_rng(seed)
    y = np.asarray(y_grid, dtype=float)
    x_clean = a_true * y * y - c_true
    results = {}
    for sig in noise_sigmas:
        a_vals, c_vals, ra, rc = [], [], [], []
        for _ in range(n_trials):
            x = x_clean + rng.normal(0.0, sig, size=y.size)
            pts = [point_cls(y_um=float(yy), x_um=float(xx), weight=1.0)
                   for yy, xx in zip(y, x)]
            fit = fit_fn(pts)
            a_vals.append(fit.a_per_um)
            c_vals.append(fit.c_um)
            ra.append(fit.sigma_a)
            rc.append(fit.sigma_c)
        results[sig] = (float(np.std(a_vals)), float(np.std(c_vals)),
                        float(np.mean(ra)), float(np.mean(rc)))
    return results
