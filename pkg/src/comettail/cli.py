"""Command-line front end.

Five workflows: predict (first-principles coefficients), simulate (render a
ring or comet image), fit (recover b2 from an image), tuning-curve (export
the wavelength-angle curve), sweep (simulate and fit across arm
differences). Every command reads one TOML config (defaults apply when the
flag is absent), stamps outputs with the config hash, and is deterministic:
the same config produces byte-identical files. Exit codes: 0 success, 1
runtime failure, 2 configuration problems.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys

from .analysis import analyze_image, ridge_parabola, tuning_curve_samples
from .config import dump_toml, load_config
from .dispersion import TuningCurve, compute_b1, compute_b2, qpm_mismatch
from .errors import CometTailError, ConfigError
from .image_io import read_image, write_pgm16, write_png8
from .pattern import synthesize

__all__ = ["main"]


def _common_flags(sub):
    sub.add_argument("--config", metavar="PATH",
                     help="TOML config file (defaults used when absent)")
    sub.add_argument("--dump-config", action="store_true",
                     help="print the effective config as TOML and exit")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="comettail",
        description="Forward simulation and ridge-based b2 estimation for "
                    "grating-dispersed down-conversion patterns.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("predict", help="first-principles b1/b2 and ridge "
                                       "coefficients")
    _common_flags(p)
    p.add_argument("--out", metavar="PATH", help="write the JSON report here "
                                                 "instead of stdout")

    p = sub.add_parser("simulate", help="render the ring or comet pattern")
    _common_flags(p)
    p.add_argument("--out", metavar="PATH", required=True,
                   help="output PGM image path")
    p.add_argument("--mode", choices=["pre", "post"],
                   help="pattern stage: pre-grating rings or post-grating "
                        "comet (default from config)")
    p.add_argument("--b2", type=float, metavar="X",
                   help="override the tuning-curve coefficient, 1/um")
    p.add_argument("--png", action="store_true",
                   help="also write an 8-bit PNG preview next to the PGM")
    p.add_argument("--seed", type=int, metavar="N",
                   help="reserved; synthesis is deterministic")

    p = sub.add_parser("fit", help="extract the ridge from an image and "
                                   "estimate b2")
    _common_flags(p)
    p.add_argument("image", metavar="IMAGE", help="PGM or PNG comet image")
    p.add_argument("--out", metavar="PATH",
                   help="write the JSON report here instead of stdout")

    p = sub.add_parser("tuning-curve", help="export (wavelength, angle) "
                                            "samples as CSV")
    _common_flags(p)
    p.add_argument("--b2", type=float, metavar="X",
                   help="plot this b2 instead of the dispersion-derived one")
    p.add_argument("--out", metavar="PATH",
                   help="CSV path (stdout when absent)")

    p = sub.add_parser("sweep", help="simulate and fit across the configured "
                                     "arm differences")
    _common_flags(p)
    p.add_argument("--out-dir", metavar="DIR", required=True,
                   help="directory for the images and the sweep summary")
    p.add_argument("--b2", type=float, metavar="X",
                   help="override the tuning-curve coefficient, 1/um")
    return parser


def _load(args):
    overrides = {}
    if getattr(args, "mode", None):
        overrides = {"simulate": {"mode": args.mode}}
    return load_config(args.config, overrides=overrides or None)


def _emit(report, out_path):
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if out_path:
        with open(out_path, "w", encoding="ascii") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _estimate_dict(est):
    return {
        "value_per_um": est.value,
        "uncertainty_per_um": est.uncertainty,
        "stat_uncertainty_per_um": est.stat_uncertainty,
        "angle_uncertainty_per_um": est.angle_uncertainty,
    }


def _cmd_predict(args):
    rc = _load(args)
    tc = rc.tuning()
    coeff = ridge_parabola(rc.optics, tc)
    qpm = qpm_mismatch(rc.model, rc.poling_period_um)
    report = {
        "b1_s": compute_b1(rc.model),
        "b2_per_um": tc.b2_per_um,
        "theta_r0_deg": math.degrees(rc.optics.theta_r0_rad),
        "ridge_a_per_um": coeff.a_per_um,
        "ridge_c_um": coeff.c_um,
        "vertex_x_um": -coeff.c_um,
        "qpm_mismatch_per_um": qpm,
        "qpm_fraction_of_poling_k": abs(qpm) * rc.poling_period_um / math.tau,
        "signal_wavelength_um": rc.model.lambda_s0_um,
        "idler_wavelength_um": rc.model.lambda_i0_um,
        "sellmeier": rc.sellmeier.label,
        "config_hash": rc.hash(),
    }
    _emit(report, args.out)
    return 0


def _cmd_simulate(args):
    rc = _load(args)
    if args.seed is not None:
        print("note: --seed is reserved; outputs are deterministic",
              file=sys.stderr)
    tc = rc.tuning(args.b2)
    profile = rc.make_profile(tc)
    result = synthesize(rc.optics, tc, rc.band, profile,
                        mode=rc.simulate_mode, remap=rc.remap)
    meta = {
        "command": "simulate",
        "mode": rc.simulate_mode,
        "remap": rc.remap,
        "b2_per_um": tc.b2_per_um,
        "off_grid_loss": result.off_grid_loss,
        "backend": result.backend,
        "config_hash": rc.hash(),
    }
    write_pgm16(args.out, result.image, metadata=meta)
    if args.png:
        write_png8(os.path.splitext(args.out)[0] + ".png", result.image)
    print(f"wrote {args.out} (mode={rc.simulate_mode}, "
          f"backend={result.backend}, off-grid loss={result.off_grid_loss:.3e})")
    return 0


def _write_tuning_csv(path, band, b2_a, b2_c, lam_s0):
    curve_a = tuning_curve_samples(TuningCurve.from_b2(lam_s0, b2_a),
                                   band.wavelengths())
    curve_c = tuning_curve_samples(TuningCurve.from_b2(lam_s0, b2_c),
                                   band.wavelengths())
    with open(path, "w", newline="", encoding="ascii") as fh:
        wr = csv.writer(fh)
        wr.writerow(["lambda_nm", "theta_mrad_from_a", "theta_mrad_from_c"])
        for (lam, ta), (_, tcv) in zip(curve_a, curve_c):
            wr.writerow([repr(lam * 1000.0), repr(ta * 1000.0),
                         repr(tcv * 1000.0)])


def _cmd_fit(args):
    rc = _load(args)
    img, _ = read_image(args.image, detector=rc.optics.detector)
    fit, est_a, est_c = analyze_image(img, rc.optics, rc.window,
                                      sigma_theta_in0_rad=rc.sigma_theta_rad)
    if args.out:
        csv_path = os.path.splitext(args.out)[0] + ".tuning.csv"
    else:
        csv_path = str(args.image) + ".tuning.csv"
    _write_tuning_csv(csv_path, rc.band, est_a.value, est_c.value,
                      rc.optics.center_wavelength_um)
    report = {
        "image": str(args.image),
        "ridge": {
            "a_per_um": fit.a_per_um,
            "c_um": fit.c_um,
            "sigma_a_per_um": fit.sigma_a,
            "sigma_c_um": fit.sigma_c,
            "residual_rms_um": fit.residual_rms_um,
            "n_points": fit.n_points,
        },
        "b2_from_a": _estimate_dict(est_a),
        "b2_from_c": _estimate_dict(est_c),
        "b2_predictive_per_um": compute_b2(rc.model),
        "tuning_csv": csv_path,
        "config_hash": rc.hash(),
    }
    _emit(report, args.out)
    return 0


def _cmd_tuning_curve(args):
    rc = _load(args)
    tc = rc.tuning(args.b2)
    samples = tuning_curve_samples(tc, rc.band.wavelengths())
    rows = [["lambda_nm", "theta_mrad"]]
    rows += [[repr(lam * 1000.0), repr(th * 1000.0)] for lam, th in samples]
    if args.out:
        with open(args.out, "w", newline="", encoding="ascii") as fh:
            csv.writer(fh).writerows(rows)
    else:
        wr = csv.writer(sys.stdout)
        wr.writerows(rows)
    return 0


def _cmd_sweep(args):
    rc = _load(args)
    arms = rc.sweep_arms_um
    if not arms:
        print("warning: sweep list is empty; nothing to do", file=sys.stderr)
        return 0
    os.makedirs(args.out_dir, exist_ok=True)
    rows = []
    for arm in arms:
        rc_arm = rc.with_arm_difference(arm)
        tc = rc_arm.tuning(args.b2)
        profile = rc_arm.make_profile(tc)
        result = synthesize(rc_arm.optics, tc, rc_arm.band, profile,
                            mode="post", remap=rc_arm.remap)
        name = f"comet_arm{arm:g}um.pgm"
        path = os.path.join(args.out_dir, name)
        write_pgm16(path, result.image, metadata={
            "command": "sweep",
            "arm_difference_um": arm,
            "b2_per_um": tc.b2_per_um,
            "off_grid_loss": result.off_grid_loss,
            "backend": result.backend,
            "config_hash": rc_arm.hash(),
        })
        fit, est_a, est_c = analyze_image(result.image, rc_arm.optics,
                                          rc_arm.window,
                                          sigma_theta_in0_rad=rc_arm.sigma_theta_rad)
        rows.append({
            "arm_difference_um": arm,
            "delta_opt_um": rc_arm.optics.delta_opt_um,
            "image": name,
            "a_per_um": fit.a_per_um,
            "c_um": fit.c_um,
            "b2_from_a_per_um": est_a.value,
            "b2_from_c_per_um": est_c.value,
            "n_points": fit.n_points,
        })
        print(f"{name}: a={fit.a_per_um:.6e} c={fit.c_um:.1f} "
              f"b2(a)={est_a.value:.5f} b2(c)={est_c.value:.5f}")
    summary = {"config_hash": rc.hash(), "rows": rows}
    with open(os.path.join(args.out_dir, "sweep_summary.json"), "w",
              encoding="ascii") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    cols = ["arm_difference_um", "delta_opt_um", "image", "a_per_um", "c_um",
            "b2_from_a_per_um", "b2_from_c_per_um", "n_points"]
    with open(os.path.join(args.out_dir, "sweep_summary.csv"), "w",
              newline="", encoding="ascii") as fh:
        wr = csv.writer(fh)
        wr.writerow(cols)
        for row in rows:
            wr.writerow([row[c] if isinstance(row[c], (int, str))
                         else repr(row[c]) for c in cols])
    return 0


_DISPATCH = {
    "predict": _cmd_predict,
    "simulate": _cmd_simulate,
    "fit": _cmd_fit,
    "tuning-curve": _cmd_tuning_curve,
    "sweep": _cmd_sweep,
}


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        if args.dump_config:
            sys.stdout.write(dump_toml(_load(args).effective))
            return 0
        return _DISPATCH[args.command](args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except (CometTailError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"i/o error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
