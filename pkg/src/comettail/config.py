"""Run configuration: TOML schema, validation, and provenance hashing.

A run is fully described by one TOML file; every key has a default, unknown
keys are rejected by name, and the effective (defaults + file + overrides)
configuration can be dumped back as TOML and is hashed into every report so
outputs can be traced to their exact inputs.

Keys carry their unit in the name (mm, nm, um, deg); internally everything
becomes um and rad. arm_difference_um is the one-way mirror displacement of
the interferometer; the optical path difference is twice that.
"""
from __future__ import annotations

import copy
import hashlib
import json
import math
from dataclasses import dataclass

try:
    import tomllib
except ImportError:
    import tomli as tomllib

from .dispersion import (BUILTIN_SELLMEIER, DispersionModel, SellmeierSet,
                         TuningCurve, tuning_curve)
from .errors import ConfigError
from .geometry import DetectorSpec, OpticalConfig
from .pattern import RingProfile, SpectralBand
from .analysis import RidgeWindow

__all__ = ["RunConfig", "load_config", "default_config_dict", "dump_toml",
           "config_hash"]

_DEFAULTS = {
    "optics": {
        "focal_length_mm": 200.0,
        "grating_lines_per_mm": 1200.0,
        "incident_angle_deg": 40.0,
        "center_wavelength_nm": 795.0,
        "arm_difference_um": 50.0,
        "visibility": 0.9,
        "bright_center": True,
    },
    "detector": {
        "pixel_pitch_um": 13.0,
        "width_px": 1024,
        "height_px": 1024,
    },
    "dispersion": {
        "sellmeier": "fradkin1999-ktp-z",
        "pump_wavelength_nm": 525.0,
        "poling_period_um": 9.34,
    },
    "band": {
        "min_wavelength_nm": 765.0,
        "max_wavelength_nm": 795.0,
        "samples": 2048,
        "weight": "flat",
    },
    "profile": {
        "kind": "gaussian",
        "width_scale": 0.005,
        "cutoff": 6.0,
    },
    "analysis": {
        "row_window_um": 4500.0,
        "noise_floor": 0.05,
        "incident_angle_sigma_deg": 1.0,
    },
    "simulate": {
        "mode": "post",
        "remap": "exact",
    },
    "sweep": {
        "arm_differences_um": [25.0, 50.0, 100.0, 200.0, 400.0],
    },
}

# keys that are legal but have no default (absence has meaning)
_OPTIONAL = {
    ("optics", "phase_offset_rad"),
    ("detector", "origin_x_um"),
    ("detector", "origin_y_um"),
    ("dispersion", "custom"),
    ("band", "weight_center_nm"),
    ("band", "weight_width_nm"),
}

_CUSTOM_REQUIRED = ("label", "lambda_min_um", "lambda_max_um", "constant")
_CUSTOM_OPTIONAL = ("one_minus_terms", "pole_terms", "lambda2_coeff")


def default_config_dict():
    return copy.deepcopy(_DEFAULTS)


def _coerce(section, key, value, template):
    if isinstance(template, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"[{section}] {key} must be a boolean")
        return value
    if isinstance(template, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"[{section}] {key} must be a number")
        return float(value)
    if isinstance(template, int):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"[{section}] {key} must be an integer")
        return value
    if isinstance(template, str):
        if not isinstance(value, str):
            raise ConfigError(f"[{section}] {key} must be a string")
        return value
    if isinstance(template, list):
        if not isinstance(value, list):
            raise ConfigError(f"[{section}] {key} must be a list")
        return [float(v) for v in value]
    raise ConfigError(f"[{section}] {key}: unsupported value type")


def _merge(effective, user):
    for section, content in user.items():
        if section not in _DEFAULTS:
            raise ConfigError(f"unknown config section [{section}]")
        if not isinstance(content, dict):
            raise ConfigError(f"[{section}] must be a table")
        for key, value in content.items():
            if key in _DEFAULTS[section]:
                effective[section][key] = _coerce(
                    section, key, value, _DEFAULTS[section][key])
            elif (section, key) in _OPTIONAL:
                effective[section][key] = _check_optional(section, key, value)
            else:
                raise ConfigError(f"unknown config key {section}.{key}")
    return effective


def _check_optional(section, key, value):
    if key == "custom":
        if not isinstance(value, dict):
            raise ConfigError("[dispersion] custom must be a table")
        for req in _CUSTOM_REQUIRED:
            if req not in value:
                raise ConfigError(f"dispersion.custom needs key {req!r}")
        for k in value:
            if k not in _CUSTOM_REQUIRED + _CUSTOM_OPTIONAL:
                raise ConfigError(f"unknown config key dispersion.custom.{k}")
        return value
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"[{section}] {key} must be a number")
    return float(value)


def _pair_tuple(section_key, raw):
    out = []
    for pair in raw:
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise ConfigError(f"{section_key} entries must be [p, q] pairs")
        out.append((float(pair[0]), float(pair[1])))
    return tuple(out)


def _build_sellmeier(disp):
    name = disp["sellmeier"]
    if name == "custom":
        if "custom" not in disp:
            raise ConfigError(
                "dispersion.sellmeier = 'custom' needs a "
                "[dispersion.custom] table")
        c = disp["custom"]
        try:
            return SellmeierSet(
                label=str(c["label"]),
                lambda_min_um=float(c["lambda_min_um"]),
                lambda_max_um=float(c["lambda_max_um"]),
                constant=float(c["constant"]),
                one_minus_terms=_pair_tuple("dispersion.custom.one_minus_terms",
                                            c.get("one_minus_terms", [])),
                pole_terms=_pair_tuple("dispersion.custom.pole_terms",
                                       c.get("pole_terms", [])),
                lambda2_coeff=float(c.get("lambda2_coeff", 0.0)))
        except (TypeError, ValueError) as e:
            raise ConfigError(f"bad dispersion.custom table: {e}") from e
    try:
        return BUILTIN_SELLMEIER[name]
    except KeyError:
        raise ConfigError(
            f"unknown Sellmeier set {name!r}; built in: "
            f"{', '.join(sorted(BUILTIN_SELLMEIER))}, or 'custom'") from None


@dataclass(frozen=True)
class RunConfig:
    """Validated, unit-converted view of one effective configuration."""

    effective: dict
    optics: OpticalConfig
    sellmeier: SellmeierSet
    model: DispersionModel
    band: SpectralBand
    profile_kind: str
    width_scale: float
    cutoff: float
    window: RidgeWindow
    sigma_theta_rad: float
    simulate_mode: str
    remap: str
    sweep_arms_um: tuple
    poling_period_um: float

    def tuning(self, b2_override=None) -> TuningCurve:
        """The tuning curve: first-principles, or pinned to an injected b2."""
        if b2_override is not None:
            if not b2_override > 0:
                raise ConfigError("b2 override must be positive")
            return TuningCurve.from_b2(self.optics.center_wavelength_um,
                                       b2_override)
        return tuning_curve(self.model)

    def make_profile(self, tc) -> RingProfile:
        depth = tc.b2_per_um * (tc.lambda_s0_um - self.band.lam_min_um)
        if depth <= 0:
            raise ConfigError("band has no depth below the center wavelength")
        return RingProfile(kind=self.profile_kind,
                           width=self.width_scale * depth,
                           cutoff=self.cutoff)

    def hash(self) -> str:
        return config_hash(self.effective)

    def with_arm_difference(self, arm_um) -> "RunConfig":
        """Copy of this config at another one-way arm difference, um."""
        eff = copy.deepcopy(self.effective)
        eff["optics"]["arm_difference_um"] = float(arm_um)
        return _from_effective(eff)


def config_hash(effective) -> str:
    blob = json.dumps(effective, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def _from_effective(eff) -> RunConfig:
    opt = eff["optics"]
    det = eff["detector"]
    disp = eff["dispersion"]
    band = eff["band"]
    prof = eff["profile"]
    ana = eff["analysis"]
    sim = eff["simulate"]
    try:
        detector = DetectorSpec(
            pitch_um=det["pixel_pitch_um"],
            width_px=det["width_px"],
            height_px=det["height_px"],
            origin_x_um=det.get("origin_x_um"),
            origin_y_um=det.get("origin_y_um"))
        optics = OpticalConfig(
            focal_length_um=opt["focal_length_mm"] * 1000.0,
            grating_period_um=1000.0 / opt["grating_lines_per_mm"],
            incident_angle_rad=math.radians(opt["incident_angle_deg"]),
            center_wavelength_um=opt["center_wavelength_nm"] / 1000.0,
            delta_opt_um=2.0 * opt["arm_difference_um"],
            visibility=opt["visibility"],
            bright_center=opt["bright_center"],
            phase_offset_rad=opt.get("phase_offset_rad"),
            detector=detector)
        sellmeier = _build_sellmeier(disp)
        model = DispersionModel(
            sellmeier=sellmeier,
            lambda_p_um=disp["pump_wavelength_nm"] / 1000.0,
            lambda_s0_um=optics.center_wavelength_um)
        spectral = SpectralBand(
            lam_min_um=band["min_wavelength_nm"] / 1000.0,
            lam_max_um=band["max_wavelength_nm"] / 1000.0,
            samples=band["samples"],
            weight=band["weight"],
            weight_center_um=(band["weight_center_nm"] / 1000.0
                              if "weight_center_nm" in band else None),
            weight_width_um=(band["weight_width_nm"] / 1000.0
                             if "weight_width_nm" in band else None))
        window = RidgeWindow(y_abs_max_um=ana["row_window_um"],
                             noise_floor_rel=ana["noise_floor"])
        if sim["mode"] not in ("pre", "post"):
            raise ValueError(f"simulate.mode must be pre|post, got {sim['mode']!r}")
        if sim["remap"] not in ("exact", "linearized"):
            raise ValueError(
                f"simulate.remap must be exact|linearized, got {sim['remap']!r}")
        if prof["kind"] not in ("gaussian", "sinc2"):
            raise ValueError(f"profile.kind must be gaussian|sinc2, "
                             f"got {prof['kind']!r}")
        if not prof["width_scale"] > 0 or not prof["cutoff"] > 0:
            raise ValueError("profile.width_scale and cutoff must be positive")
        if eff["dispersion"]["poling_period_um"] <= 0:
            raise ValueError("poling period must be positive")
    except ValueError as e:
        raise ConfigError(str(e)) from e
    return RunConfig(
        effective=eff,
        optics=optics,
        sellmeier=sellmeier,
        model=model,
        band=spectral,
        profile_kind=prof["kind"],
        width_scale=prof["width_scale"],
        cutoff=prof["cutoff"],
        window=window,
        sigma_theta_rad=math.radians(ana["incident_angle_sigma_deg"]),
        simulate_mode=sim["mode"],
        remap=sim["remap"],
        sweep_arms_um=tuple(eff["sweep"]["arm_differences_um"]),
        poling_period_um=disp["poling_period_um"])


def load_config(path=None, overrides=None) -> RunConfig:
    """Build the effective RunConfig from defaults, a TOML file, overrides.

    overrides is an optional nested {section: {key: value}} dict applied
    after the file (the CLI's flag layer). Unknown keys anywhere raise
    ConfigError naming the offender.
    """
    eff = default_config_dict()
    if path is not None:
        try:
            with open(path, "rb") as fh:
                user = tomllib.load(fh)
        except OSError as e:
            raise ConfigError(f"cannot read config {path}: {e}") from e
        except tomllib.TOMLDecodeError as e:
            raise ConfigError(f"malformed TOML in {path}: {e}") from e
        _merge(eff, user)
    if overrides:
        _merge(eff, overrides)
    return _from_effective(eff)


def _toml_scalar(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return repr(value)
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_toml_scalar(v) for v in value) + "]"
    raise TypeError(f"cannot serialize {value!r}")


def dump_toml(effective) -> str:
    """Serialize an effective config dict back to deterministic TOML."""
    lines = []
    for section in _DEFAULTS:
        sec = effective.get(section, {})
        lines.append(f"[{section}]")
        order = list(_DEFAULTS[section])
        order += [k for k in sorted(sec) if k not in _DEFAULTS[section]]
        sub = []
        for key in order:
            if key not in sec:
                continue
            value = sec[key]
            if isinstance(value, dict):
                sub.append((key, value))
                continue
            lines.append(f"{key} = {_toml_scalar(value)}")
        for key, table in sub:
            lines.append("")
            lines.append(f"[{section}.{key}]")
            for k in table:
                lines.append(f"{k} = {_toml_scalar(table[k])}")
        lines.append("")
    return "\n".join(lines)
