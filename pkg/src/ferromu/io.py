"""Delimited file formats and JSON records.

CSV schemas are fixed and bit-exact: a mandatory header row, decimal points,
no thousands separators, UTF-8, LF line endings. Floats are written with 17
significant digits so every file round-trips to the exact same doubles.

    impedance:   frequency_hz,re_ohm,im_ohm
    inductance:  frequency_hz,re_h,im_h
    phase:       frequency_hz,theta_deg
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .errors import ConfigError, GridMismatchError
from .forward_model import FrequencyGrid, InductanceSpectrum
from .spectrum import PhaseSpectrum

__all__ = [
    "read_impedance_csv",
    "read_inductance_csv",
    "write_inductance_csv",
    "read_phase_csv",
    "write_phase_csv",
    "write_features_json",
    "write_report_json",
    "check_grids_equal",
]

IMPEDANCE_HEADER = ("frequency_hz", "re_ohm", "im_ohm")
INDUCTANCE_HEADER = ("frequency_hz", "re_h", "im_h")
PHASE_HEADER = ("frequency_hz", "theta_deg")


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _write_rows(path, header, rows):
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _read_rows(path, header):
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            rows = list(reader)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise ConfigError(f"{path}:1: empty file, expected header {','.join(header)}")
    if tuple(rows[0]) != tuple(header):
        raise ConfigError(
            f"{path}:1: bad header {','.join(rows[0])!r}, expected {','.join(header)!r}"
        )
    data = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise ConfigError(
                f"{path}:{lineno}: expected {len(header)} columns, got {len(row)}"
            )
        try:
            data.append([float(v) for v in row])
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: {exc}") from exc
    if not data:
        raise ConfigError(f"{path}: no data rows")
    return data


def _grid_from_column(path, column):
    try:
        return FrequencyGrid(tuple(column))
    except ValueError as exc:
        raise ConfigError(f"{path}: bad frequency column: {exc}") from exc


def read_impedance_csv(path):
    """-> (FrequencyGrid, complex impedance array)."""
    data = _read_rows(path, IMPEDANCE_HEADER)
    grid = _grid_from_column(path, [r[0] for r in data])
    z = np.array([complex(r[1], r[2]) for r in data])
    return grid, z


def read_inductance_csv(path) -> InductanceSpectrum:
    data = _read_rows(path, INDUCTANCE_HEADER)
    grid = _grid_from_column(path, [r[0] for r in data])
    return InductanceSpectrum(grid, np.array([complex(r[1], r[2]) for r in data]))


def write_inductance_csv(path, spec: InductanceSpectrum) -> None:
    rows = zip(spec.grid.frequencies, spec.values.real, spec.values.imag)
    _write_rows(path, INDUCTANCE_HEADER, rows)


def read_phase_csv(path) -> PhaseSpectrum:
    data = _read_rows(path, PHASE_HEADER)
    grid = _grid_from_column(path, [r[0] for r in data])
    return PhaseSpectrum(grid, np.array([r[1] for r in data]))


def write_phase_csv(path, phase: PhaseSpectrum) -> None:
    _write_rows(path, PHASE_HEADER, zip(phase.grid.frequencies, phase.theta_deg))


def check_grids_equal(path_a, grid_a: FrequencyGrid, path_b, grid_b: FrequencyGrid):
    """Exact frequency-column equality; reports the first differing row."""
    fa, fb = grid_a.frequencies, grid_b.frequencies
    if len(fa) != len(fb):
        raise GridMismatchError(
            f"{path_a} has {len(fa)} rows but {path_b} has {len(fb)}"
        )
    for i, (a, b) in enumerate(zip(fa, fb)):
        if a != b:
            raise GridMismatchError(
                f"frequency mismatch at data row {i + 1}: "
                f"{path_a} has {_fmt(a)}, {path_b} has {_fmt(b)}"
            )


def _dump_json(path, payload) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def write_features_json(path, features, liftoff_est_m=None) -> None:
    """Fixed-key record of the compensation features."""
    _dump_json(
        path,
        {
            "omega1_rad_s": features.omega1,
            "delta_l0_h": features.delta_l0,
            "delta_lm_h": features.delta_lm,
            "ln_ratio": features.ln_ratio,
            "omega0_rad_s": features.omega0,
            "liftoff_est_m": liftoff_est_m,
        },
    )


def write_report_json(path, rows) -> None:
    _dump_json(path, {"rows": list(rows)})
