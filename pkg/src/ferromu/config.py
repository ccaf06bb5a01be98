"""Run configuration: JSON file schema, defaults, and unit normalisation.

Config files use bench units (millimetres, MS/m) because that is how sensor
drawings and specimen datasheets are written; everything is converted to SI
exactly once, at load. Any block or key may be omitted and falls back to the
built-in defaults (the reference sensor and the DP600 specimen); unknown keys
are rejected so typos cannot silently revert a value to its default.

The FERRO_QUAD_NODES environment variable, when set, overrides the quadrature
node budget (useful to speed up CI); it wins over both default and file.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError
from .forward_model import (
    FrequencyGrid,
    PlateProperties,
    QuadratureSettings,
    SensorGeometry,
)

__all__ = ["RunConfig", "load_config", "default_config_dict"]

ENV_QUAD_NODES = "FERRO_QUAD_NODES"

_DEFAULTS = {
    "geometry": {
        "r1_mm": 16.0,
        "r2_mm": 17.0,
        "height_mm": 10.5,
        "gap_mm": 15.5,
        "n_turns": 30,
        "lift_off_mm": 0.8,
    },
    "plate": {
        "conductivity_ms_per_m": 4.13,
        "relative_permeability": 222.0,
        "thickness_mm": 7.0,
    },
    "grid": {
        "f_min_hz": 310.0,
        "f_max_hz": 3.0e6,
        "count": 120,
        "spacing": "log",
    },
    "quadrature": {
        "nodes": 2048,
        "alpha_max_scale": 60.0,
    },
    "compensation": {
        "reference_csv": None,
    },
    "inversion": {
        "mu_bounds": [50.0, 500.0],
        "fit_band_hz": None,
    },
    "noise": {
        "relative_sigma": None,
        "seed": 0,
    },
}


def default_config_dict() -> dict:
    """Deep copy of the built-in defaults, in file units."""
    return json.loads(json.dumps(_DEFAULTS))


@dataclass(frozen=True)
class RunConfig:
    """Fully normalised run settings (SI units throughout).

    units_normalized marks that the mm -> m and MS/m -> S/m conversions have
    been applied; RunConfig instances are only ever built that way.
    """

    geometry: SensorGeometry
    conductivity: float  # S/m
    relative_permeability: float | None  # None: unknown (inversion target only)
    thickness: float  # m
    grid: FrequencyGrid
    quadrature: QuadratureSettings
    reference_csv: Path | None
    mu_bounds: tuple
    fit_band: tuple | None
    noise_sigma: float | None
    noise_seed: int
    units_normalized: bool = True

    def plate(self) -> PlateProperties:
        if self.relative_permeability is None:
            raise ConfigError(
                "missing config key: plate.relative_permeability "
                "(required to simulate or to report a true value)"
            )
        return PlateProperties(
            self.conductivity, self.relative_permeability, self.thickness
        )

    def require_reference(self) -> Path:
        if self.reference_csv is None:
            raise ConfigError(
                "missing config key: compensation.reference_csv "
                "(or pass --reference)"
            )
        return self.reference_csv


def _merged(raw: dict, path: str) -> dict:
    """Overlay a raw config dict onto the defaults, rejecting unknown keys."""
    merged = default_config_dict()
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    for block, content in raw.items():
        if block not in merged:
            raise ConfigError(f"{path}: unknown config block '{block}'")
        if not isinstance(content, dict):
            raise ConfigError(f"{path}: block '{block}' must be an object")
        for key, value in content.items():
            if key not in merged[block]:
                raise ConfigError(f"{path}: unknown config key '{block}.{key}'")
            merged[block][key] = value
    return merged


def _number(merged, block, key, path, allow_none=False):
    value = merged[block][key]
    if value is None:
        if allow_none:
            return None
        raise ConfigError(f"{path}: missing config key: {block}.{key}")
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: config key {block}.{key} must be a number")
    return float(value)


def load_config(path) -> RunConfig:
    """Load, validate, and unit-normalise a JSON config file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}") from exc

    merged = _merged(raw, str(path))
    tag = str(path)

    mm = 1e-3
    try:
        geometry = SensorGeometry(
            r1=_number(merged, "geometry", "r1_mm", tag) * mm,
            r2=_number(merged, "geometry", "r2_mm", tag) * mm,
            height=_number(merged, "geometry", "height_mm", tag) * mm,
            gap=_number(merged, "geometry", "gap_mm", tag) * mm,
            n_turns=int(_number(merged, "geometry", "n_turns", tag)),
            lift_off=_number(merged, "geometry", "lift_off_mm", tag) * mm,
        )
    except ValueError as exc:
        raise ConfigError(f"{tag}: bad geometry: {exc}") from exc

    conductivity = _number(merged, "plate", "conductivity_ms_per_m", tag) * 1e6
    mu_r = _number(merged, "plate", "relative_permeability", tag, allow_none=True)
    thickness = _number(merged, "plate", "thickness_mm", tag) * mm
    if conductivity <= 0:
        raise ConfigError(f"{tag}: plate.conductivity_ms_per_m must be positive")
    if thickness <= 0:
        raise ConfigError(f"{tag}: plate.thickness_mm must be positive")
    if mu_r is not None and mu_r < 1.0:
        raise ConfigError(f"{tag}: plate.relative_permeability must be >= 1")

    spacing = merged["grid"]["spacing"]
    if spacing != "log":
        raise ConfigError(f"{tag}: grid.spacing must be 'log', got '{spacing}'")
    count = int(_number(merged, "grid", "count", tag))
    if count < 1:
        raise ConfigError(f"{tag}: grid.count must be >= 1")
    try:
        grid = FrequencyGrid.log_spaced(
            _number(merged, "grid", "f_min_hz", tag),
            _number(merged, "grid", "f_max_hz", tag),
            count,
        )
    except ValueError as exc:
        raise ConfigError(f"{tag}: bad grid: {exc}") from exc

    nodes = int(_number(merged, "quadrature", "nodes", tag))
    env_nodes = os.environ.get(ENV_QUAD_NODES)
    if env_nodes is not None:
        try:
            nodes = int(env_nodes)
        except ValueError as exc:
            raise ConfigError(
                f"environment variable {ENV_QUAD_NODES}={env_nodes!r} is not an integer"
            ) from exc
    try:
        quadrature = QuadratureSettings(
            nodes=nodes,
            alpha_max_scale=_number(merged, "quadrature", "alpha_max_scale", tag),
        )
    except ValueError as exc:
        raise ConfigError(f"{tag}: bad quadrature settings: {exc}") from exc

    reference = merged["compensation"]["reference_csv"]
    reference_path = None
    if reference is not None:
        if not isinstance(reference, str):
            raise ConfigError(f"{tag}: compensation.reference_csv must be a path string")
        reference_path = (path.parent / reference).resolve()
        if not reference_path.is_file():
            raise ConfigError(
                f"{tag}: compensation.reference_csv does not exist: {reference_path}"
            )

    bounds = merged["inversion"]["mu_bounds"]
    if (
        not isinstance(bounds, (list, tuple))
        or len(bounds) != 2
        or any(isinstance(b, bool) or not isinstance(b, (int, float)) for b in bounds)
    ):
        raise ConfigError(f"{tag}: config key inversion.mu_bounds must be [low, high]")
    mu_bounds = (float(bounds[0]), float(bounds[1]))
    if mu_bounds[0] < 1.0 or mu_bounds[1] <= mu_bounds[0]:
        raise ConfigError(f"{tag}: inversion.mu_bounds must satisfy 1 <= low < high")

    band = merged["inversion"]["fit_band_hz"]
    fit_band = None
    if band is not None:
        if not isinstance(band, (list, tuple)) or len(band) != 2:
            raise ConfigError(f"{tag}: config key inversion.fit_band_hz must be [low, high]")
        fit_band = (float(band[0]), float(band[1]))
        if fit_band[0] <= 0 or fit_band[1] <= fit_band[0]:
            raise ConfigError(f"{tag}: inversion.fit_band_hz must satisfy 0 < low < high")

    sigma = _number(merged, "noise", "relative_sigma", tag, allow_none=True)
    if sigma is not None and sigma < 0:
        raise ConfigError(f"{tag}: noise.relative_sigma must be non-negative")
    seed = int(_number(merged, "noise", "seed", tag))

    return RunConfig(
        geometry=geometry,
        conductivity=conductivity,
        relative_permeability=mu_r,
        thickness=thickness,
        grid=grid,
        quadrature=quadrature,
        reference_csv=reference_path,
        mu_bounds=mu_bounds,
        fit_band=fit_band,
        noise_sigma=sigma,
        noise_seed=seed,
    )
