"""Ridge analytics: where wavelengths pile up, and how to read b2 back.

Substituting the ring crossing x' = +sqrt(b2 (lambda_s0 - lambda) f^2 - y^2)
into the linearized grating map gives the horizontal coordinate of a
wavelength's ring at height y,

    x(lambda, y) = (f (lambda_s0 - lambda)/d_g
                    - cos theta_in0 * sqrt(b2 (lambda_s0 - lambda) f^2 - y^2))
                   / cos theta_r0.

At each y this has a stationary wavelength where dx/dlambda = 0; many
wavelengths land near that x, forming the bright ridge. Eliminating lambda*
shows the ridge is the parabola x = a y^2 - c with

    a = 1 / (d_g b2 f cos theta_r0),
    c = d_g b2 f cos^2 theta_in0 / (4 cos theta_r0),

so a fitted (a, c) inverts to two independent b2 estimates. The from-c
inversion is far more sensitive to the incident-angle calibration than the
from-a one (relative sensitivities ~1.94/rad vs ~0.26/rad here), which the
uncertainty propagation makes explicit.

Ridge points are extracted per image row as the intensity argmax with
three-point parabolic subpixel refinement, and fitted by weighted linear
least squares in the basis {y^2, 1}.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DegenerateFitError, OffRingError, TooFewPointsError
from .geometry import OpticalConfig, linear_x, ring_abscissa

__all__ = [
    "RidgePoint",
    "RidgeWindow",
    "RidgeFit",
    "RidgeCoefficients",
    "B2Estimate",
    "analytic_x",
    "stationary_wavelength",
    "ridge_parabola",
    "extract_ridge",
    "fit_parabola",
    "b2_from_a",
    "b2_from_c",
    "tuning_curve_samples",
    "analyze_image",
    "column_linewidth_profile",
    "linewidth_asymmetry",
]

MIN_RIDGE_POINTS = 5


@dataclass(frozen=True)
class RidgePoint:
    """One extracted ridge sample: row height, peak position, peak value."""

    y_um: float
    x_um: float
    weight: float
    subpixel: bool = False

    def __post_init__(self):
        if not self.weight > 0:
            raise ValueError("ridge point weight must be positive")


@dataclass(frozen=True)
class RidgeWindow:
    """Extraction limits: row band half-height and relative noise floor."""

    y_abs_max_um: float = 4500.0
    noise_floor_rel: float = 0.05

    def __post_init__(self):
        if self.y_abs_max_um <= 0:
            raise ValueError("window height must be positive")
        if not 0.0 <= self.noise_floor_rel < 1.0:
            raise ValueError("noise floor must lie in [0, 1)")


@dataclass(frozen=True)
class RidgeFit:
    """Weighted least-squares result for x = a y^2 - c."""

    a_per_um: float
    c_um: float
    sigma_a: float
    sigma_c: float
    residual_rms_um: float
    n_points: int


class RidgeCoefficients(NamedTuple):
    """Analytic (a, c) of the ridge parabola; vertex at x = -c."""

    a_per_um: float
    c_um: float


@dataclass(frozen=True)
class B2Estimate:
    """A b2 value with its propagated uncertainty and provenance tag.

    uncertainty combines the fit's statistical error and the
    incident-angle calibration term in quadrature; both components are
    also reported separately.
    """

    value: float
    uncertainty: float
    source: str
    stat_uncertainty: float = 0.0
    angle_uncertainty: float = 0.0

    def __post_init__(self):
        if not self.value > 0:
            raise ValueError("b2 estimate must be positive")
        if self.uncertainty < 0:
            raise ValueError("uncertainty must be non-negative")


def analytic_x(cfg: OpticalConfig, tc, lam, y, branch=1):
    """Ridge-branch horizontal coordinate of wavelength lam at height y, um.

    Composition of the ring crossing with the first-order grating map;
    branch +1 is the branch carrying the stationary point. Raises
    OffRingError when |y| exceeds the ring radius at lam.
    """
    xp = ring_abscissa(cfg, tc, lam, y, branch=branch)
    return linear_x(cfg, lam, xp)


def stationary_wavelength(cfg: OpticalConfig, tc, y):
    """The wavelength whose ring is horizontally stationary at height y, um.

    lambda_s0 - lambda* = (y^2 + (d_g b2 f cos theta_in0 / 2)^2) / (b2 f^2);
    at lambda* the ring-crossing radicand equals d_g b2 f cos theta_in0 / 2.
    """
    b2 = tc.b2_per_um
    f = cfg.focal_length_um
    half = 0.5 * cfg.grating_period_um * b2 * f * cfg.cos_in0
    return tc.lambda_s0_um - (float(y) ** 2 + half ** 2) / (b2 * f ** 2)


def ridge_parabola(cfg: OpticalConfig, tc) -> RidgeCoefficients:
    """Analytic ridge coefficients (a, c); the vertex sits at x = -c."""
    b2 = tc.b2_per_um
    f = cfg.focal_length_um
    d_g = cfg.grating_period_um
    a = 1.0 / (d_g * b2 * f * cfg.cos_r0)
    c = d_g * b2 * f * cfg.cos_in0 ** 2 / (4.0 * cfg.cos_r0)
    return RidgeCoefficients(a_per_um=a, c_um=c)


def extract_ridge(img, window: RidgeWindow = None):
    """Per-row intensity peaks of a comet image as RidgePoints.

    Rows outside |y| <= window.y_abs_max_um or whose peak falls below
    noise_floor_rel times the image maximum are skipped. Peaks interior to
    the row get three-point parabolic subpixel refinement (clamped to half
    a pixel). Raises TooFewPointsError below 5 usable rows.
    """
    if window is None:
        window = RidgeWindow()
    vals = img.values
    vmax = float(vals.max(initial=0.0))
    if vmax <= 0.0:
        raise TooFewPointsError("image carries no signal")
    floor = window.noise_floor_rel * vmax
    x = img.x_coords()
    y = img.y_coords()
    pitch = img.spec.pitch_um
    points = []
    for i in np.nonzero(np.abs(y) <= window.y_abs_max_um)[0]:
        row = vals[i]
        j = int(np.argmax(row))
        peak = float(row[j])
        if peak <= floor:
            continue
        delta = 0.0
        subpixel = False
        if 0 < j < row.size - 1:
            denom = row[j - 1] - 2.0 * peak + row[j + 1]
            if denom < 0.0:
                delta = 0.5 * (row[j - 1] - row[j + 1]) / denom
                delta = float(np.clip(delta, -0.5, 0.5))
                subpixel = True
        points.append(RidgePoint(y_um=float(y[i]), x_um=float(x[j]) + delta * pitch,
                                 weight=peak, subpixel=subpixel))
    if len(points) < MIN_RIDGE_POINTS:
        raise TooFewPointsError(
            f"only {len(points)} usable rows (need {MIN_RIDGE_POINTS})")
    return points


def fit_parabola(points) -> RidgeFit:
    """Weighted linear least squares of x = a y^2 - c over ridge points.

    Weights are the peak intensities. Standard errors come from the
    residual variance through the normal-equations covariance; raises
    DegenerateFitError when all points share one y^2.
    """
    if len(points) < MIN_RIDGE_POINTS:
        raise TooFewPointsError(
            f"need at least {MIN_RIDGE_POINTS} points, got {len(points)}")
    y = np.array([p.y_um for p in points])
    x = np.array([p.x_um for p in points])
    wt = np.array([p.weight for p in points])
    t = y * y
    if np.ptp(t) == 0.0:
        raise DegenerateFitError("all points share the same y^2")
    sw = np.sqrt(wt)
    design = np.column_stack((t, -np.ones_like(t)))
    coef, _, rank, _ = np.linalg.lstsq(design * sw[:, None], x * sw, rcond=None)
    if rank < 2:
        raise DegenerateFitError("design matrix is rank deficient")
    a, c = float(coef[0]), float(coef[1])
    resid = x - (a * t - c)
    n = len(points)
    rss_w = float(np.sum(wt * resid * resid))
    sigma2 = rss_w / (n - 2)
    cov = sigma2 * np.linalg.inv((design * wt[:, None]).T @ design)
    return RidgeFit(a_per_um=a, c_um=c,
                    sigma_a=math.sqrt(max(cov[0, 0], 0.0)),
                    sigma_c=math.sqrt(max(cov[1, 1], 0.0)),
                    residual_rms_um=math.sqrt(rss_w / float(np.sum(wt))),
                    n_points=n)


def _angle_sensitivity(cfg, source):
    # d ln b2 / d theta_in0 for each inversion route
    srm = math.sin(cfg.theta_r0_rad)
    common = srm * cfg.cos_in0 / cfg.cos_r0 ** 2
    if source == "from-a":
        return -common
    return common + 2.0 * math.tan(cfg.incident_angle_rad)


def b2_from_a(cfg: OpticalConfig, a, sigma_a=0.0,
              sigma_theta_in0_rad=0.0) -> B2Estimate:
    """Invert the curvature coefficient: b2 = 1/(d_g a f cos theta_r0)."""
    if not a > 0:
        raise ValueError("curvature coefficient a must be positive")
    value = 1.0 / (cfg.grating_period_um * a * cfg.focal_length_um * cfg.cos_r0)
    stat = value * sigma_a / a
    angle = abs(_angle_sensitivity(cfg, "from-a")) * sigma_theta_in0_rad * value
    return B2Estimate(value=value, uncertainty=math.hypot(stat, angle),
                      source="from-a", stat_uncertainty=stat,
                      angle_uncertainty=angle)


def b2_from_c(cfg: OpticalConfig, c, sigma_c=0.0,
              sigma_theta_in0_rad=0.0) -> B2Estimate:
    """Invert the vertex offset: b2 = 4 c cos theta_r0/(d_g f cos^2 theta_in0).

    Pass the vertex magnitude |c| (the vertex sits at x = -c). This route's
    incident-angle sensitivity is several times the from-a one.
    """
    if not c > 0:
        raise ValueError("vertex magnitude c must be positive")
    value = (4.0 * c * cfg.cos_r0
             / (cfg.grating_period_um * cfg.focal_length_um * cfg.cos_in0 ** 2))
    stat = value * sigma_c / c
    angle = abs(_angle_sensitivity(cfg, "from-c")) * sigma_theta_in0_rad * value
    return B2Estimate(value=value, uncertainty=math.hypot(stat, angle),
                      source="from-c", stat_uncertainty=stat,
                      angle_uncertainty=angle)


def tuning_curve_samples(tc, lam_grid):
    """(lambda, theta_out) pairs over a wavelength grid, for export.

    Every wavelength must satisfy lam <= lambda_s0; offenders raise.
    """
    out = []
    for lam in np.asarray(lam_grid, dtype=float):
        t2 = tc.theta2(lam)
        if t2 < 0:
            raise ValueError(
                f"{lam} um lies above the center wavelength "
                f"{tc.lambda_s0_um} um; no emission angle exists")
        out.append((float(lam), math.sqrt(t2)))
    return out


def analyze_image(img, cfg: OpticalConfig, window: RidgeWindow = None,
                  sigma_theta_in0_rad=0.0):
    """Extract, fit, and invert in one step.

    Returns (RidgeFit, from-a B2Estimate, from-c B2Estimate); the fit's
    standard errors feed the statistical parts of both estimates.
    """
    fit = fit_parabola(extract_ridge(img, window))
    est_a = b2_from_a(cfg, fit.a_per_um, sigma_a=fit.sigma_a,
                      sigma_theta_in0_rad=sigma_theta_in0_rad)
    est_c = b2_from_c(cfg, fit.c_um, sigma_c=fit.sigma_c,
                      sigma_theta_in0_rad=sigma_theta_in0_rad)
    return fit, est_a, est_c


def column_linewidth_profile(lwmap, rel_floor=1e-3):
    """Median spectral width per image column, um.

    Only pixels holding more than rel_floor of the brightest pixel's energy
    contribute; columns with no such pixel give NaN.
    """
    energy = lwmap.energy.values
    sigma = lwmap.sigma_um.values
    floor = rel_floor * float(energy.max(initial=0.0))
    med = np.full(energy.shape[1], np.nan)
    for j in range(energy.shape[1]):
        sel = energy[:, j] > floor
        if np.any(sel):
            med[j] = float(np.median(sigma[sel, j]))
    return lwmap.energy.x_coords(), med


def linewidth_asymmetry(lwmap, cfg: OpticalConfig, tc, window_px=32,
                        rel_floor=1e-3):
    """Median column linewidth at the ridge vertex vs the tail end.

    Returns (vertex_median_um, tail_median_um, ratio); the vertex window is
    centered on the predicted x = -c column, the tail window covers the
    rightmost columns that carry data.
    """
    x, med = column_linewidth_profile(lwmap, rel_floor=rel_floor)
    valid = np.nonzero(np.isfinite(med))[0]
    if valid.size < 2 * window_px:
        raise TooFewPointsError("linewidth map carries too few data columns")
    vertex_x = -ridge_parabola(cfg, tc).c_um
    jv = int(np.argmin(np.abs(x - vertex_x)))
    near_vertex = valid[np.abs(valid - jv) <= window_px // 2]
    if near_vertex.size == 0:
        raise OffRingError("no data columns near the predicted vertex")
    tail = valid[-window_px:]
    vertex_med = float(np.median(med[near_vertex]))
    tail_med = float(np.median(med[tail]))
    return vertex_med, tail_med, vertex_med / tail_med
