"""Command-line front end.

Subcommands: simulate | ingest | compensate | invert | pipeline. Exit codes:
0 ok, 2 config or input-file error, 3 spectral feature absent, 4 compensation
out of range, 5 inversion failure, 6 numerical failure.

Every command is deterministic: rerunning with the same inputs (and seed)
produces byte-identical files.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import plots
from .compensation import compensate_phase, estimate_liftoff, extract_features
from .config import RunConfig, load_config
from .errors import ConfigError, FerromuError
from .forward_model import InductanceSpectrum, kernel_peak_alpha, sweep
from .inversion import (
    InversionProblem,
    invert_permeability,
    invert_uncompensated,
    probe_scan,
)
from .io import (
    check_grids_equal,
    read_impedance_csv,
    read_inductance_csv,
    read_phase_csv,
    write_features_json,
    write_inductance_csv,
    write_phase_csv,
    write_report_json,
)
from .spectrum import ImpedanceSweep, despike_median3, find_zero_crossing, phase_of, to_inductance

__all__ = ["main", "apply_noise"]


def apply_noise(spec: InductanceSpectrum, relative_sigma: float, seed: int) -> InductanceSpectrum:
    """Seeded zero-mean Gaussian noise, relative to per-frequency |dL|,
    drawn independently for the real and imaginary parts."""
    rng = np.random.default_rng(seed)
    draws = rng.standard_normal((len(spec.grid), 2))
    scale = relative_sigma * spec.magnitude()
    noisy = (spec.values.real + scale * draws[:, 0]) + 1j * (
        spec.values.imag + scale * draws[:, 1]
    )
    return InductanceSpectrum(spec.grid, noisy)


def _print_zcf(spec: InductanceSpectrum) -> None:
    try:
        crossing = find_zero_crossing(spec)
        fz = crossing.omega1 / (2.0 * np.pi)
        print(f"zero-crossing frequency: {fz:.6g} Hz ({crossing.omega1:.6g} rad/s)")
    except FerromuError:
        print("zero-crossing frequency: none within the grid")


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    spectrum = sweep(cfg.geometry, cfg.plate(), cfg.grid, cfg.quadrature)
    if cfg.noise_sigma is not None:
        seed = cfg.noise_seed if args.seed is None else args.seed
        spectrum = apply_noise(spectrum, cfg.noise_sigma, seed)
    write_inductance_csv(args.out, spectrum)
    print(f"wrote {args.out}")
    _print_zcf(spectrum)
    return 0


def cmd_ingest(args) -> int:
    grid_s, z_sample = read_impedance_csv(args.sample)
    grid_a, z_air = read_impedance_csv(args.air)
    check_grids_equal(args.sample, grid_s, args.air, grid_a)
    spectrum = to_inductance(ImpedanceSweep(grid_s, z_sample, z_air))
    if args.despike:
        spectrum = despike_median3(spectrum)
    write_inductance_csv(args.out, spectrum)
    print(f"wrote {args.out}")
    return 0


def _compensate(spec, reference, cfg: RunConfig | None, diagnostics: bool):
    features = extract_features(spec, reference)
    compensated = compensate_phase(
        phase_of(spec), features.omega1, features.ln_ratio
    )
    liftoff_est = None
    if diagnostics:
        if cfg is None:
            raise ConfigError("--diagnostics needs --config (sensor geometry)")
        alpha0 = kernel_peak_alpha(cfg.geometry, cfg.quadrature)
        liftoff_est = cfg.geometry.lift_off + estimate_liftoff(
            features.ln_ratio, alpha0
        )
    return features, compensated, liftoff_est


def cmd_compensate(args) -> int:
    cfg = load_config(args.config) if args.config else None
    if args.reference is not None:
        reference_path = args.reference
    elif cfg is not None:
        reference_path = cfg.require_reference()
    else:
        raise ConfigError(
            "missing reference sweep: pass --reference or a --config with "
            "compensation.reference_csv"
        )
    spectrum = read_inductance_csv(args.spectrum)
    reference = read_inductance_csv(reference_path)
    features, compensated, liftoff_est = _compensate(
        spectrum, reference, cfg, args.diagnostics
    )
    out = Path(args.out)
    write_phase_csv(out, compensated)
    features_path = out.with_suffix(".features.json")
    write_features_json(features_path, features, liftoff_est)
    print(f"wrote {out} and {features_path}")
    print(
        f"omega1={features.omega1:.6g} rad/s  ln_ratio={features.ln_ratio:.6g}  "
        f"omega0={features.omega0:.6g} rad/s"
    )
    return 0


def _report_row(cfg: RunConfig, result, compensated: bool, liftoff_est_m=None) -> dict:
    true_mu = cfg.relative_permeability
    rel_err = None
    if true_mu is not None:
        rel_err = (result.mu_r - true_mu) / true_mu * 100.0
    return {
        "liftoff_mm": None if liftoff_est_m is None else liftoff_est_m * 1e3,
        "true_mu_r": true_mu,
        "recovered_mu_r": result.mu_r,
        "relative_error_pct": rel_err,
        "residual_deg": result.residual,
        "iterations": result.iterations,
        "converged": result.converged,
        "compensated": compensated,
    }


def _render_fit_figures(outdir: Path, problem: InversionProblem, result, curves) -> None:
    from .forward_model import FrequencyGrid, PlateProperties
    from .spectrum import PhaseSpectrum

    probes, misfits = probe_scan(problem)
    plots.save_misfit_figure(outdir / "misfit_scan.png", probes, misfits, result.mu_r)
    band = problem.band_frequencies()
    model = sweep(
        problem.geometry,
        PlateProperties(problem.conductivity, result.mu_r, thickness=1.0),
        FrequencyGrid(band),
        problem.quadrature,
    )
    curves = dict(curves)
    curves[f"model fit (mu_r={result.mu_r:.1f})"] = phase_of(model)
    plots.save_phase_figure(outdir / "phase.png", curves)


def cmd_invert(args) -> int:
    cfg = load_config(args.config)
    phase = read_phase_csv(args.phase)
    problem = InversionProblem(
        compensated_phase=phase,
        geometry=cfg.geometry,
        conductivity=cfg.conductivity,
        mu_bounds=cfg.mu_bounds,
        fit_band=cfg.fit_band,
        quadrature=cfg.quadrature,
    )
    if args.no_compensation:
        result = invert_uncompensated(phase, problem)
    else:
        result = invert_permeability(problem)
    row = _report_row(cfg, result, compensated=not args.no_compensation)
    out = Path(args.out)
    write_report_json(out, [row])
    if not args.no_plots:
        label = "compensated phase" if not args.no_compensation else "raw phase"
        _render_fit_figures(out.parent, problem, result, {label: phase})
    print(f"wrote {out}")
    print(
        f"recovered mu_r = {result.mu_r:.2f}  residual = {result.residual:.4g} deg  "
        f"converged = {result.converged}"
    )
    return 0


def cmd_pipeline(args) -> int:
    cfg = load_config(args.config)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)

    grid_s, z_sample = read_impedance_csv(args.sample)
    grid_a, z_air = read_impedance_csv(args.air)
    check_grids_equal(args.sample, grid_s, args.air, grid_a)
    spectrum = to_inductance(ImpedanceSweep(grid_s, z_sample, z_air))
    if args.despike:
        spectrum = despike_median3(spectrum)
    write_inductance_csv(outdir / "inductance.csv", spectrum)

    reference_path = args.reference if args.reference else cfg.require_reference()
    reference = read_inductance_csv(reference_path)

    raw_phase = phase_of(spectrum)
    write_phase_csv(outdir / "phase_raw.csv", raw_phase)
    features, compensated, liftoff_est = _compensate(
        spectrum, reference, cfg, args.diagnostics
    )
    write_phase_csv(outdir / "phase_compensated.csv", compensated)
    write_features_json(outdir / "features.json", features, liftoff_est)

    target = raw_phase if args.no_compensation else compensated
    problem = InversionProblem(
        compensated_phase=target,
        geometry=cfg.geometry,
        conductivity=cfg.conductivity,
        mu_bounds=cfg.mu_bounds,
        fit_band=cfg.fit_band,
        quadrature=cfg.quadrature,
    )
    if args.no_compensation:
        result = invert_uncompensated(raw_phase, problem)
    else:
        result = invert_permeability(problem)
    row = _report_row(cfg, result, not args.no_compensation, liftoff_est)
    write_report_json(outdir / "report.json", [row])

    if not args.no_plots:
        plots.save_inductance_figure(
            outdir / "inductance.png",
            {"sample": spectrum, "reference": reference},
        )
        _render_fit_figures(
            outdir,
            problem,
            result,
            {"raw phase": raw_phase, "compensated phase": compensated},
        )

    print(f"wrote report to {outdir / 'report.json'}")
    print(
        f"recovered mu_r = {result.mu_r:.2f}  residual = {result.residual:.4g} deg  "
        f"converged = {result.converged}"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ferromu",
        description="Lift-off compensated permeability measurement from "
        "multi-frequency eddy-current sweeps",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="forward-model a synthetic inductance sweep")
    p.add_argument("--config", required=True, help="JSON run config")
    p.add_argument("--out", required=True, help="output inductance CSV")
    p.add_argument("--seed", type=int, default=None, help="override the noise seed")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("ingest", help="impedance sample+air CSVs -> inductance CSV")
    p.add_argument("sample", help="impedance CSV with the specimen present")
    p.add_argument("--air", required=True, help="impedance CSV in air")
    p.add_argument("--out", required=True, help="output inductance CSV")
    p.add_argument("--despike", action="store_true", help="median-of-3 outlier filter")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("compensate", help="lift-off compensate an inductance sweep")
    p.add_argument("spectrum", help="measured inductance CSV")
    p.add_argument("--reference", help="minimal-lift-off reference inductance CSV")
    p.add_argument("--config", help="JSON run config (reference path, diagnostics)")
    p.add_argument("--out", required=True, help="output phase CSV")
    p.add_argument(
        "--diagnostics",
        action="store_true",
        help="also estimate the lift-off from the sensor kernel peak",
    )
    p.set_defaults(func=cmd_compensate)

    p = sub.add_parser("invert", help="recover permeability from a phase CSV")
    p.add_argument("phase", help="phase CSV (compensated unless --no-compensation)")
    p.add_argument("--config", required=True, help="JSON run config")
    p.add_argument("--out", required=True, help="output report JSON")
    p.add_argument(
        "--no-compensation",
        action="store_true",
        help="treat the input as raw, uncompensated phase",
    )
    p.add_argument("--no-plots", action="store_true", help="skip figure rendering")
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("pipeline", help="ingest -> compensate -> invert, one shot")
    p.add_argument("sample", help="impedance CSV with the specimen present")
    p.add_argument("--air", required=True, help="impedance CSV in air")
    p.add_argument("--reference", help="reference inductance CSV (else from config)")
    p.add_argument("--config", required=True, help="JSON run config")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--despike", action="store_true", help="median-of-3 outlier filter")
    p.add_argument("--diagnostics", action="store_true", help="lift-off estimate")
    p.add_argument(
        "--no-compensation",
        action="store_true",
        help="fit the raw phase instead of the compensated phase",
    )
    p.add_argument("--no-plots", action="store_true", help="skip figure rendering")
    p.set_defaults(func=cmd_pipeline)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FerromuError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
