"""Crystal dispersion and the parabolic tuning-curve coefficients.

A collinear type-0 down-conversion process near degeneracy emits its signal
photons on a cone whose external half-angle theta_out depends on the signal
wavelength through an approximately parabolic tuning curve,

    theta_out**2 = b1 * (omega_s - omega_s0) = -b2 * (lambda_s - lambda_s0),

where b1 (seconds) and b2 (1/um) are fixed by the crystal's refractive index
and its first-order dispersion at the signal and idler center frequencies:

    b1 = 2 n_i0 n_s0 w_i0 (beta_s w_s0 + n_s0 - beta_i w_i0 - n_i0)
         / (w_s0 (w_s0 n_s0 + w_i0 n_i0)),
    b2 = (2 pi c / lambda_s0**2) b1,

with beta = dn/domega evaluated at the respective center frequency. This
module evaluates published Sellmeier sets, their analytic frequency
derivatives, and the (b1, b2) pair, and provides a quasi-phase-matching
mismatch diagnostic for periodically poled crystals.

Sellmeier sets are evaluated strictly inside their published validity range;
out-of-range wavelengths raise instead of extrapolating.

Built-in KTP z-axis sets:

* ``fradkin1999-ktp-z`` -- K. Fradkin, A. Arie, A. Skliar, G. Rosenman,
  Appl. Phys. Lett. 74, 914 (1999). Default.
* ``kato2002-ktp-z`` -- K. Kato, E. Takaoka, Appl. Opt. 41, 5040 (2002).

Units: wavelengths in um, angles in rad, times in s, b2 in 1/um.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import C_UM_PER_S, TWO_PI, angular_frequency
from .errors import WavelengthRangeError

__all__ = [
    "SellmeierSet",
    "DispersionModel",
    "TuningCurve",
    "BUILTIN_SELLMEIER",
    "refractive_index",
    "dn_domega",
    "compute_b1",
    "compute_b2",
    "tuning_curve",
    "qpm_mismatch",
]


@dataclass(frozen=True)
class SellmeierSet:
    """One polarization axis of one crystal, in a generic Sellmeier form.

    n^2(lambda) = constant
                  + sum_k  B_k / (1 - C_k / lambda^2)
                  + sum_k  p_k / (lambda^2 - q_k)
                  + lambda2_coeff * lambda^2

    with lambda in um. The two resonant-term shapes cover the common
    published KTP forms without rewriting anyone's coefficients.

    Attributes
    ----------
    label : provenance string (author-year, axis)
    lambda_min_um, lambda_max_um : validity range; evaluation outside raises
    constant : the constant term
    one_minus_terms : tuple of (B, C) pairs, C in um^2
    pole_terms : tuple of (p, q) pairs, p in um^2, q in um^2
    lambda2_coeff : coefficient of lambda^2, 1/um^2 (usually negative)
    """

    label: str
    lambda_min_um: float
    lambda_max_um: float
    constant: float
    one_minus_terms: tuple = ()
    pole_terms: tuple = ()
    lambda2_coeff: float = 0.0

    def check_range(self, lam):
        lam = np.asarray(lam, dtype=float)
        if np.any(lam < self.lambda_min_um) or np.any(lam > self.lambda_max_um):
            raise WavelengthRangeError(
                f"wavelength {np.min(lam):.4f}..{np.max(lam):.4f} um outside "
                f"validity range [{self.lambda_min_um}, {self.lambda_max_um}] um "
                f"of Sellmeier set '{self.label}'")

    def n_squared(self, lam):
        lam2 = np.asarray(lam, dtype=float) ** 2
        n2 = self.constant + self.lambda2_coeff * lam2
        for b, c in self.one_minus_terms:
            n2 = n2 + b / (1.0 - c / lam2)
        for p, q in self.pole_terms:
            n2 = n2 + p / (lam2 - q)
        return n2

    def dn2_dlambda(self, lam):
        """Analytic d(n^2)/dlambda, 1/um."""
        lam = np.asarray(lam, dtype=float)
        lam2 = lam ** 2
        d = 2.0 * self.lambda2_coeff * lam
        for b, c in self.one_minus_terms:
            # d/dl [ b l^2 / (l^2 - c) ] = -2 b c l / (l^2 - c)^2
            d = d - 2.0 * b * c * lam / (lam2 - c) ** 2
        for p, q in self.pole_terms:
            d = d - 2.0 * p * lam / (lam2 - q) ** 2
        return d


# K. Fradkin, A. Arie, A. Skliar, G. Rosenman, Appl. Phys. Lett. 74, 914 (1999)
_FRADKIN_1999_KTP_Z = SellmeierSet(
    label="Fradkin et al. 1999, KTP n_z",
    lambda_min_um=0.43,
    lambda_max_um=3.54,
    constant=2.12725,
    one_minus_terms=((1.18431, 5.14852e-2), (0.6603, 100.00507)),
    lambda2_coeff=-9.68956e-3,
)

# K. Kato, E. Takaoka, Appl. Opt. 41, 5040 (2002)
_KATO_2002_KTP_Z = SellmeierSet(
    label="Kato & Takaoka 2002, KTP n_z",
    lambda_min_um=0.43,
    lambda_max_um=3.54,
    constant=4.59423,
    pole_terms=((0.06206, 0.04763), (110.80672, 86.12171)),
)

BUILTIN_SELLMEIER = {
    "fradkin1999-ktp-z": _FRADKIN_1999_KTP_Z,
    "kato2002-ktp-z": _KATO_2002_KTP_Z,
}


def refractive_index(sellmeier: SellmeierSet, lam):
    """n(lambda) from the coefficient form; lam in um, scalar or array.

    Raises WavelengthRangeError outside the set's validity range.
    """
    sellmeier.check_range(lam)
    n2 = sellmeier.n_squared(lam)
    if np.any(n2 <= 1.0):
        raise WavelengthRangeError(
            f"Sellmeier set '{sellmeier.label}' gives n^2 <= 1 at {lam} um")
    n = np.sqrt(n2)
    return float(n) if np.isscalar(lam) else n


def dn_domega(sellmeier: SellmeierSet, lam):
    """First-order dispersion beta = dn/domega (seconds) at omega = 2 pi c / lam.

    Uses the analytic wavelength derivative of the Sellmeier form chained
    through omega <-> lambda: dn/domega = -(lambda^2 / 2 pi c) dn/dlambda.
    """
    sellmeier.check_range(lam)
    lam_a = np.asarray(lam, dtype=float)
    n = np.sqrt(sellmeier.n_squared(lam_a))
    dn_dlam = sellmeier.dn2_dlambda(lam_a) / (2.0 * n)
    beta = -(lam_a ** 2) * dn_dlam / (TWO_PI * C_UM_PER_S)
    return float(beta) if np.isscalar(lam) else beta


@dataclass(frozen=True)
class DispersionModel:
    """Crystal axis plus the center wavelengths of the down-conversion process.

    The idler center wavelength is derived from exact energy conservation
    1/lambda_i0 = 1/lambda_p - 1/lambda_s0 and is not an input.
    """

    sellmeier: SellmeierSet
    lambda_p_um: float
    lambda_s0_um: float
    lambda_i0_um: float = field(init=False)

    def __post_init__(self):
        if not 0.0 < self.lambda_p_um < self.lambda_s0_um:
            raise ValueError("need 0 < lambda_p < lambda_s0")
        lam_i0 = 1.0 / (1.0 / self.lambda_p_um - 1.0 / self.lambda_s0_um)
        object.__setattr__(self, "lambda_i0_um", lam_i0)
        if not self.lambda_s0_um < lam_i0:
            raise ValueError("signal must be the short-wavelength daughter "
                             "(lambda_s0 < lambda_i0)")
        resid = abs(1.0 / self.lambda_p_um
                    - 1.0 / self.lambda_s0_um - 1.0 / lam_i0)
        if resid > 1e-12 / self.lambda_p_um:
            raise ValueError("energy conservation violated in lambda_i0")


def compute_b1(model: DispersionModel) -> float:
    """Tuning-curve frequency coefficient b1 (seconds).

    b1 = 2 n_i0 n_s0 w_i0 (beta_s w_s0 + n_s0 - beta_i w_i0 - n_i0)
         / (w_s0 (w_s0 n_s0 + w_i0 n_i0))

    Positive for a normally dispersive crystal with the signal on the
    short-wavelength side of degeneracy.
    """
    w_s0 = angular_frequency(model.lambda_s0_um)
    w_i0 = angular_frequency(model.lambda_i0_um)
    n_s0 = refractive_index(model.sellmeier, model.lambda_s0_um)
    n_i0 = refractive_index(model.sellmeier, model.lambda_i0_um)
    beta_s = dn_domega(model.sellmeier, model.lambda_s0_um)
    beta_i = dn_domega(model.sellmeier, model.lambda_i0_um)
    num = 2.0 * n_i0 * n_s0 * w_i0 * (beta_s * w_s0 + n_s0 - beta_i * w_i0 - n_i0)
    den = w_s0 * (w_s0 * n_s0 + w_i0 * n_i0)
    return num / den


def compute_b2(model: DispersionModel) -> float:
    """Tuning-curve wavelength coefficient b2 = (2 pi c / lambda_s0^2) b1, 1/um."""
    return TWO_PI * C_UM_PER_S / model.lambda_s0_um ** 2 * compute_b1(model)


@dataclass(frozen=True)
class TuningCurve:
    """The (lambda_s0, b1, b2) triple of the parabolic tuning curve.

    Emission exists for lambda_s <= lambda_s0 (b2 > 0 convention); theta2()
    is the squared external emission angle b2 * (lambda_s0 - lambda_s).
    """

    lambda_s0_um: float
    b1_s: float
    b2_per_um: float
    emission_below_center: bool = True

    def __post_init__(self):
        b2_expected = TWO_PI * C_UM_PER_S / self.lambda_s0_um ** 2 * self.b1_s
        scale = max(abs(b2_expected), abs(self.b2_per_um), 1e-300)
        if abs(self.b2_per_um - b2_expected) > 1e-9 * scale:
            raise ValueError(
                f"inconsistent pair: b2={self.b2_per_um} but "
                f"(2 pi c / lambda_s0^2) b1 = {b2_expected}")

    @classmethod
    def from_b2(cls, lambda_s0_um: float, b2_per_um: float) -> "TuningCurve":
        b1 = b2_per_um * lambda_s0_um ** 2 / (TWO_PI * C_UM_PER_S)
        return cls(lambda_s0_um=lambda_s0_um, b1_s=b1, b2_per_um=b2_per_um)

    def theta2(self, lam):
        """Squared emission angle (rad^2) at signal wavelength lam (um)."""
        lam = np.asarray(lam, dtype=float)
        t2 = self.b2_per_um * (self.lambda_s0_um - lam)
        return float(t2) if t2.ndim == 0 else t2

    def theta_out(self, lam):
        """Emission angle (rad); raises for lam > lambda_s0 (no emission)."""
        t2 = np.asarray(self.theta2(lam))
        if np.any(t2 < 0):
            raise ValueError("no emission above the center wavelength "
                             f"(lambda_s0 = {self.lambda_s0_um} um)")
        th = np.sqrt(t2)
        return float(th) if th.ndim == 0 else th


def tuning_curve(model: DispersionModel) -> TuningCurve:
    """TuningCurve computed from first principles for this dispersion model."""
    b1 = compute_b1(model)
    b2 = TWO_PI * C_UM_PER_S / model.lambda_s0_um ** 2 * b1
    return TuningCurve(lambda_s0_um=model.lambda_s0_um, b1_s=b1, b2_per_um=b2)


def qpm_mismatch(model: DispersionModel, poling_period_um: float) -> float:
    """Collinear quasi-phase-matching residual (1/um), diagnostic only.

    dk = 2 pi (n_p/lambda_p - n_s/lambda_s0 - n_i/lambda_i0 - 1/Lambda)

    poling_period_um may be math.inf for the bulk (unpoled) mismatch.
    """
    n_p = refractive_index(model.sellmeier, model.lambda_p_um)
    n_s = refractive_index(model.sellmeier, model.lambda_s0_um)
    n_i = refractive_index(model.sellmeier, model.lambda_i0_um)
    inv_poling = 0.0 if math.isinf(poling_period_um) else 1.0 / poling_period_um
    return TWO_PI * (n_p / model.lambda_p_um
                     - n_s / model.lambda_s0_um
                     - n_i / model.lambda_i0_um
                     - inv_poling)
