"""Detection-plane coordinates and the grating remap.

The signal beam leaves the crystal on a cone, is collimated, reflects off a
blazed grating, and is imaged by a lens of focal length f onto the detection
plane. A point that would have landed at (x', y') without the grating instead
lands at (x, y): the grating changes only the horizontal angle, so y = y',
while x follows from the grating equation

    d_g (sin theta_in + sin theta_r) = lambda.

The incidence angle of the ray through x' is theta_in = theta_in0 - x'/f, and
the detection coordinate is x = -f (theta_r - theta_r0), with theta_r0 the
reflection angle of the center wavelength at the center incidence angle. The
two signs are a single axis-orientation choice, fixed so that the long
red-to-blue dispersion tail of a down-conversion band runs toward positive x
and the bright ridge vertex sits at negative x.

First-order expansion about (lambda_s0, theta_in0) gives the linearized map

    x = (f (lambda_s0 - lambda) / d_g - cos theta_in0 * x') / cos theta_r0,

valid for |x'/f| small; translate_linearized refuses |x'/f| > 0.1 rad, where
only the exact map is meaningful.

Units: um and rad throughout.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EvanescentOrderError, OffRingError

__all__ = [
    "DetectorSpec",
    "OpticalConfig",
    "PlaneCoord",
    "reflect_angle",
    "translate_exact",
    "translate_linearized",
    "exact_x",
    "linear_x",
    "ring_abscissa",
]

SMALL_ANGLE_CAP = 0.1  # rad, |x'/f| limit for the linearized map


@dataclass(frozen=True)
class DetectorSpec:
    """Pixel grid of the camera on the detection plane.

    Pixel (row i, column j) has physical center
    (origin_x_um + j * pitch_um, origin_y_um + i * pitch_um); row index
    increases with y. Origins default to a grid centered on (0, 0).
    """

    pitch_um: float = 13.0
    width_px: int = 1024
    height_px: int = 1024
    origin_x_um: float = None
    origin_y_um: float = None

    def __post_init__(self):
        if self.pitch_um <= 0:
            raise ValueError("pixel pitch must be positive")
        if self.width_px < 1 or self.height_px < 1:
            raise ValueError("detector must have at least one pixel")
        if self.origin_x_um is None:
            object.__setattr__(self, "origin_x_um",
                               -0.5 * self.pitch_um * (self.width_px - 1))
        if self.origin_y_um is None:
            object.__setattr__(self, "origin_y_um",
                               -0.5 * self.pitch_um * (self.height_px - 1))

    def x_coords(self):
        """Physical x of every column center, um."""
        return self.origin_x_um + self.pitch_um * np.arange(self.width_px)

    def y_coords(self):
        """Physical y of every row center, um."""
        return self.origin_y_um + self.pitch_um * np.arange(self.height_px)

    def half_extent_um(self):
        """(max |x|, max |y|) over pixel centers, um."""
        x = self.x_coords()
        y = self.y_coords()
        return max(abs(x[0]), abs(x[-1])), max(abs(y[0]), abs(y[-1]))


@dataclass(frozen=True)
class OpticalConfig:
    """Fixed optical layout: imaging lens, grating, and interferometer.

    delta_opt_um is the full optical path difference between the
    interferometer arms (twice the one-way mirror displacement). When
    phase_offset_rad is None and bright_center is set, the fringe phase is
    chosen so the center wavelength interferes constructively.
    """

    focal_length_um: float = 2.0e5
    grating_period_um: float = 1000.0 / 1200.0
    incident_angle_rad: float = math.radians(40.0)
    center_wavelength_um: float = 0.795
    delta_opt_um: float = 100.0
    visibility: float = 0.9
    bright_center: bool = True
    phase_offset_rad: float = None
    detector: DetectorSpec = field(default_factory=DetectorSpec)
    theta_r0_rad: float = field(init=False)

    def __post_init__(self):
        if self.focal_length_um <= 0 or self.grating_period_um <= 0:
            raise ValueError("focal length and grating period must be positive")
        if not 0.0 < self.incident_angle_rad < 0.5 * math.pi:
            raise ValueError("incident angle must lie in (0, pi/2)")
        if self.center_wavelength_um <= 0:
            raise ValueError("center wavelength must be positive")
        if not 0.0 <= self.visibility <= 1.0:
            raise ValueError("visibility must lie in [0, 1]")
        arg = (self.center_wavelength_um / self.grating_period_um
               - math.sin(self.incident_angle_rad))
        if not -1.0 < arg < 1.0:
            raise ValueError(
                "no reflected order exists for the center wavelength at the "
                f"center incidence angle (arcsin argument {arg:.4f})")
        object.__setattr__(self, "theta_r0_rad", math.asin(arg))

    @property
    def cos_in0(self):
        return math.cos(self.incident_angle_rad)

    @property
    def cos_r0(self):
        return math.cos(self.theta_r0_rad)

    def fringe_phase_rad(self):
        """Effective fringe phase offset phi0.

        An explicit phase_offset_rad wins; otherwise bright_center pins the
        phase at the center wavelength to a maximum, and failing both the
        offset is zero.
        """
        if self.phase_offset_rad is not None:
            return float(self.phase_offset_rad)
        if self.bright_center:
            # w(lambda_s0) = 1 + V requires omega_s0 * Delta/c + phi0 = 0
            return -math.tau * self.delta_opt_um / self.center_wavelength_um
        return 0.0


@dataclass(frozen=True)
class PlaneCoord:
    """A point on the detection plane; primed means pre-grating (x', y')."""

    x_um: float
    y_um: float
    primed: bool = False

    def __post_init__(self):
        if not (math.isfinite(self.x_um) and math.isfinite(self.y_um)):
            raise ValueError("plane coordinates must be finite")


def reflect_angle(cfg: OpticalConfig, lam, theta_in):
    """Reflection angle theta_r from the grating equation, rad.

    lam and theta_in may be scalars or arrays (broadcast together). Raises
    EvanescentOrderError when the arcsin argument leaves (-1, 1) anywhere.
    """
    lam_a = np.asarray(lam, dtype=float)
    arg = lam_a / cfg.grating_period_um - np.sin(np.asarray(theta_in, float))
    if np.any(np.abs(arg) >= 1.0):
        raise EvanescentOrderError(
            f"evanescent order: |lambda/d_g - sin theta_in| >= 1 "
            f"(max {np.max(np.abs(arg)):.4f})")
    out = np.arcsin(arg)
    return float(out) if out.ndim == 0 else out


def exact_x(cfg: OpticalConfig, lam, xprime):
    """Vectorized exact post-grating x for pre-grating abscissa xprime, um."""
    theta_in = cfg.incident_angle_rad - np.asarray(xprime, float) / cfg.focal_length_um
    theta_r = reflect_angle(cfg, lam, theta_in)
    out = -cfg.focal_length_um * (np.asarray(theta_r) - cfg.theta_r0_rad)
    return float(out) if out.ndim == 0 else out


def linear_x(cfg: OpticalConfig, lam, xprime):
    """Vectorized first-order post-grating x, um; no domain checks."""
    f = cfg.focal_length_um
    out = (f * (cfg.center_wavelength_um - np.asarray(lam, float))
           / cfg.grating_period_um
           - cfg.cos_in0 * np.asarray(xprime, float)) / cfg.cos_r0
    return float(out) if out.ndim == 0 else out


def translate_exact(cfg: OpticalConfig, lam, p: PlaneCoord) -> PlaneCoord:
    """Map a pre-grating point through the grating, exact arcsin form.

    y passes through unchanged. Raises EvanescentOrderError if the ray
    through p leaves the grating's reflective domain at this wavelength.
    """
    if not p.primed:
        raise ValueError("translate_exact expects a primed (pre-grating) point")
    return PlaneCoord(exact_x(cfg, lam, p.x_um), p.y_um, primed=False)


def translate_linearized(cfg: OpticalConfig, lam, p: PlaneCoord) -> PlaneCoord:
    """First-order version of translate_exact.

    Only defined for |x'/f| <= 0.1 rad; beyond that the expansion is
    meaningless and only translate_exact should be used.
    """
    if not p.primed:
        raise ValueError("translate_linearized expects a primed point")
    if abs(p.x_um / cfg.focal_length_um) > SMALL_ANGLE_CAP:
        raise ValueError(
            f"|x'/f| = {abs(p.x_um / cfg.focal_length_um):.3f} rad exceeds the "
            f"small-angle domain ({SMALL_ANGLE_CAP} rad); use translate_exact")
    return PlaneCoord(linear_x(cfg, lam, p.x_um), p.y_um, primed=False)


def ring_abscissa(cfg: OpticalConfig, tc, lam, y, branch=1):
    """Pre-grating x' of the monochromatic ring at height y, um.

    The ring of wavelength lam has radius f * theta_out(lam); the two
    horizontal crossings at height y are x' = branch * sqrt(f^2 theta^2 - y^2)
    with branch +1 or -1. Raises OffRingError when lam emits no ring
    (lam > lambda_s0) or |y| exceeds the ring radius.
    """
    if branch not in (1, -1):
        raise ValueError("branch must be +1 or -1")
    t2 = tc.theta2(lam)
    if t2 < 0:
        raise OffRingError(
            f"no ring at {lam} um (above center wavelength "
            f"{tc.lambda_s0_um} um)")
    radicand = cfg.focal_length_um ** 2 * t2 - float(y) ** 2
    if radicand < 0:
        raise OffRingError(
            f"|y| = {abs(y):.1f} um exceeds the ring radius "
            f"{cfg.focal_length_um * math.sqrt(t2):.1f} um at {lam} um")
    return branch * math.sqrt(radicand)
