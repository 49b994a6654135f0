"""Command-line interface: check, spectrum, validate, film.

Exit codes: 0 all checks pass / command succeeded, 1 an assumption check
failed (without --force), 2 usage, I/O or config errors.  All commands
print a JSON report to stdout; file outputs are byte-deterministic for
fixed inputs (no timestamps, fixed float formatting).
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__, ellipticity, schur, spectrum, svg, validate
from .config import Config, ConfigError, emit_config, load_config, parse_config
from .presets import film_config
from .symbols import limiting_matrix
from .spectrum import FIG_WINDOW, Window

STAB_POINTS = (5.0, 10.0, 20.0, 40.0)


def _pair(z: complex) -> list[float]:
    # + 0.0 clears negative zeros, which would survive into the JSON.
    return [float(z.real) + 0.0, float(z.imag) + 0.0]


def _poly_pairs(poly) -> list[list[float]]:
    return [_pair(c) for c in poly.coeffs]


def run_checks(cfg: Config) -> dict:
    """Ellipticity, order condition, stabilization, damping condition.

    The overall verdict covers the assumption gates (determinant margin,
    off-diagonal order condition, stabilization decay); the damping
    condition only decides whether the exceptional set may be reported
    empty without a search, so it never fails the gate.
    """
    T = cfg.operator
    tol = cfg.tolerances
    grid = cfg.grids.sample_grid()
    dn = ellipticity.check_dn_ellipticity(T, grid, margin_tol=tol.margin_tol)
    entry = None
    if dn.case != ellipticity.CASE_BALANCED:
        entry = ellipticity.check_entrywise(T, grid, margin_tol=tol.margin_tol)

    L = limiting_matrix(T)
    pencil = schur.build_pencil(L)
    stab_grid = schur.default_stabilization_grid()
    stab: dict = {"metrics": {}, "pass": False}
    try:
        probe = schur.default_probe(L, stab_grid)
        stab["probe"] = _pair(probe)
        values = []
        for xk in STAB_POINTS:
            values.append(schur.stabilization_metric(
                T, probe, xk, stab_grid, pole_guard=tol.pole_guard,
                pole_tol=tol.pole_tol))
        stab["metrics"] = {f"{xk:g}": v for xk, v in zip(STAB_POINTS, values)}
        nonincreasing = all(values[k + 1] <= values[k] + 1e-300
                            for k in range(len(values) - 1))
        stab["pass"] = nonincreasing and values[-1] <= tol.stab_tol
    except schur.PoleError as err:
        stab["error"] = str(err)

    omega = None
    try:
        omega = schur.omega_condition(T)
    except schur.OmegaTemplateError:
        pass

    overall = dn.passed and stab["pass"]
    report = {
        "pass": overall,
        "kappa": dn.kappa,
        "case": dn.case,
        "dn_margin": dn.dn_margin,
        "entry_margins": (entry.entry_margins if entry else dn.entry_margins),
        "assumption_b_ok": dn.assumption_b_ok,
        "stabilization": stab,
        "omega": omega.to_json_dict() if omega else None,
        "pencil": {"lam_coeff": _poly_pairs(pencil.lam_coeff),
                   "const_coeff": _poly_pairs(pencil.const_coeff)},
    }
    return report


def exceptional_for(cfg: Config, xi_grid: np.ndarray,
                    omega_holds: bool) -> tuple[schur.ExceptionalSet, bool]:
    """Exceptional set over the plot grid.

    When the damping condition holds and the lower-diagonal limit curve is
    purely imaginary on the grid (the situation the condition was made
    for), the intersection search is skipped and the set reported empty.
    """
    L = limiting_matrix(cfg.operator)
    curve_d = L.d.eval_xi(xi_grid)
    skip = omega_holds and float(np.max(np.abs(np.asarray(curve_d).real))) <= 1e-12
    if skip:
        exc = schur.ExceptionalSet(
            xi_grid=np.asarray(xi_grid, dtype=float),
            curve_a=np.asarray(L.a.eval_xi(xi_grid), dtype=complex),
            curve_d=np.asarray(curve_d, dtype=complex))
        return exc, True
    exc = schur.exceptional_sets(L, xi_grid, coarse_tol=cfg.tolerances.coarse_tol,
                                 refine_tol=cfg.tolerances.refine_tol)
    return exc, False


def _spectrum_pipeline(cfg: Config, window: Window, xi_points: int,
                       out_csv: str, out_svg: str, force: bool) -> tuple[int, dict]:
    checks = run_checks(cfg)
    if not checks["pass"] and not force:
        print(json.dumps({"error": "assumption checks failed", "checks": checks},
                         indent=2))
        return 1, checks
    pencil = schur.build_pencil(limiting_matrix(cfg.operator))
    if xi_points % 2 == 0:
        xi_points += 1  # warped grid is antisymmetric around an exact 0 sample
    xi_grid = spectrum.warped_grid(spectrum.adaptive_span(pencil, window), xi_points)
    omega_holds = bool(checks["omega"] and checks["omega"]["holds"])
    exc, skipped_search = exceptional_for(cfg, xi_grid, omega_holds)
    curve = spectrum.trace_spectrum(pencil, exc, xi_grid, window,
                                    root_tol=cfg.tolerances.root_tol,
                                    excl_tol=cfg.tolerances.excl_tol)
    crep = spectrum.curve_invariant_check(curve, pencil)
    comment = None
    if force and not checks["pass"]:
        failed = [name for name, ok in
                  (("ellipticity", checks["dn_margin"] >= cfg.tolerances.margin_tol),
                   ("assumption_b", checks["assumption_b_ok"]),
                   ("stabilization", checks["stabilization"]["pass"]))
                  if not ok]
        comment = "force: failing checks skipped: " + ", ".join(failed)
    with open(out_csv, "w", encoding="utf-8") as fh:
        fh.write(spectrum.curve_to_csv(curve, comment))
    with open(out_svg, "w", encoding="utf-8") as fh:
        fh.write(svg.render_curve_svg(curve, exc, window, comment))
    summary = {
        "checks": checks,
        "window": [window.re_min, window.re_max, window.im_min, window.im_max],
        "xi_points": xi_points,
        "xi_span": float(np.max(np.abs(xi_grid))),
        "lambda_set": [_pair(p.lam) for p in exc.lambda_set],
        "lambda_search_skipped": skipped_search,
        "curve_report": crep.to_json_dict(),
        "out_csv": out_csv,
        "out_svg": out_svg,
    }
    return 0, summary


def cmd_check(args) -> int:
    cfg = load_config(args.config)
    report = run_checks(cfg)
    print(json.dumps(report, indent=2))
    return 0 if report["pass"] else 1


def cmd_spectrum(args) -> int:
    cfg = load_config(args.config)
    window = Window.parse(args.window) if args.window else FIG_WINDOW
    code, summary = _spectrum_pipeline(cfg, window, args.xi_points,
                                       args.out_csv, args.out_svg, args.force)
    if code == 0:
        print(json.dumps(summary, indent=2))
    return code


def cmd_validate(args) -> int:
    cfg = load_config(args.config)
    window = Window.parse(args.window) if args.window else FIG_WINDOW
    pencil = schur.build_pencil(limiting_matrix(cfg.operator))
    report = validate.validate_spectrum(
        cfg.operator, pencil, scheme=args.scheme, half_length=args.L,
        points=args.M, window=window,
        dist_tol=args.dist_tol if args.dist_tol is not None
        else cfg.tolerances.dist_tol,
        qr_tol=cfg.tolerances.qr_tol)
    out = report.to_json_dict()
    if args.out_csv:
        with open(args.out_csv, "w", encoding="utf-8") as fh:
            fh.write("re,im\n")
            for z in report.eigenvalues:
                fh.write(f"{z.real!r},{z.imag!r}\n")
        out["out_csv"] = args.out_csv
    print(json.dumps(out, indent=2))
    return 0


def cmd_film(args) -> int:
    if args.delta <= 0 or args.eta <= 0:
        print("error: delta and eta must be positive", file=sys.stderr)
        return 2
    data = film_config(delta=args.delta, eta=args.eta, c0=args.c0,
                       perturbed=args.perturbed)
    cfg = parse_config(data)
    with open(args.config_out, "w", encoding="utf-8") as fh:
        fh.write(emit_config(cfg))
    window = Window.parse(args.window) if args.window else FIG_WINDOW
    code, summary = _spectrum_pipeline(cfg, window, args.xi_points,
                                       args.out_csv, args.out_svg, args.force)
    if code == 0:
        summary["config_out"] = args.config_out
        print(json.dumps(summary, indent=2))
    return code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="esspec",
        description="Essential spectra of 2x2 mixed-order operator systems "
                    "on the line.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="verify the working assumptions")
    p.add_argument("config")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("spectrum", help="trace the essential-spectrum curve")
    p.add_argument("config")
    _spectrum_flags(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("validate",
                       help="compare discretized eigenvalues to the curve")
    p.add_argument("config")
    p.add_argument("--scheme", choices=[validate.FOURIER, validate.FD],
                   default=validate.FOURIER)
    p.add_argument("--L", type=float, default=20.0,
                   help="half-length of the periodic domain")
    p.add_argument("--M", type=int, default=256,
                   help="grid points per component (even)")
    p.add_argument("--window", default=None,
                   help="re_min,re_max,im_min,im_max")
    p.add_argument("--dist-tol", type=float, default=None)
    p.add_argument("--out-csv", default=None)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("film", help="emit the film preset and trace it")
    p.add_argument("--delta", type=float, default=0.98)
    p.add_argument("--eta", type=float, default=0.01)
    p.add_argument("--c0", type=float, default=1.15)
    p.add_argument("--perturbed", action="store_true")
    p.add_argument("--config-out", default="film.json")
    _spectrum_flags(p)
    p.set_defaults(func=cmd_film)
    return parser


def _spectrum_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--xi-points", type=int, default=2001)
    p.add_argument("--window", default=None,
                   help="re_min,re_max,im_min,im_max")
    p.add_argument("--out-csv", default="spectrum.csv")
    p.add_argument("--out-svg", default="spectrum.svg")
    p.add_argument("--force", action="store_true",
                   help="trace even when assumption checks fail")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"io error: {err}", file=sys.stderr)
        return 2
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
