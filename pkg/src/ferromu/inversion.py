"""Permeability recovery by fitting forward-model phase spectra.

The compensated measurement approximates the phase that would have been seen
at the calibration lift-off, so the forward model is evaluated at that
lift-off (the geometry's lift_off field) while the relative permeability is
varied. The objective is the RMS phase misfit in degrees over a fit band that
skips the noisy low-frequency decade and the information-free high-frequency
tail. Conductivity is a known per-specimen input; only mu_r is searched.

The search is derivative free and deterministic: a coarse log-spaced probe
scan brackets the minimum (and surfaces non-unimodal objectives), then a
golden-section refine runs until the bracket is narrower than 0.1 in mu_r.
"""

from __future__ import annotations

import dataclasses
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InversionError
from .forward_model import (
    FrequencyGrid,
    PlateProperties,
    QuadratureSettings,
    SensorGeometry,
    sweep,
)
from .spectrum import PhaseSpectrum, phase_of

__all__ = [
    "InversionProblem",
    "InversionResult",
    "misfit",
    "probe_scan",
    "invert_permeability",
    "invert_uncompensated",
]

_SCAN_PROBES = 16
_MU_TOLERANCE = 0.1
_MAX_GOLDEN_ITERATIONS = 200


def default_fit_band(grid: FrequencyGrid) -> tuple:
    """(10*f_min, f_max/3): clear of instrument noise and of the flat tail."""
    return (10.0 * grid.frequencies[0], grid.frequencies[-1] / 3.0)


@dataclass(frozen=True, eq=False)
class InversionProblem:
    """One permeability fit: target phase, sensor state, and search settings.

    geometry must carry the reference (calibration) lift-off. fit_band is a
    frequency interval in Hz; None selects the default band for the grid.
    """

    compensated_phase: PhaseSpectrum
    geometry: SensorGeometry
    conductivity: float
    mu_bounds: tuple = (50.0, 500.0)
    fit_band: tuple | None = None
    quadrature: QuadratureSettings = QuadratureSettings()

    def __post_init__(self):
        if self.conductivity <= 0.0:
            raise ValueError(f"conductivity must be positive, got {self.conductivity}")
        lo, hi = self.mu_bounds
        if lo < 1.0 or hi <= lo:
            raise ValueError(f"mu bounds must satisfy 1 <= lo < hi, got {self.mu_bounds}")
        if self.fit_band is None:
            object.__setattr__(
                self, "fit_band", default_fit_band(self.compensated_phase.grid)
            )
        f = self.compensated_phase.grid.as_array()
        band_lo, band_hi = self.fit_band
        mask = (f >= band_lo) & (f <= band_hi)
        if not mask.any():
            raise ValueError(
                f"fit band [{band_lo:g}, {band_hi:g}] Hz selects no grid points"
            )
        object.__setattr__(self, "_band_index", np.nonzero(mask)[0])

    def band_frequencies(self) -> tuple:
        grid = self.compensated_phase.grid.frequencies
        return tuple(grid[i] for i in self._band_index)

    def band_target(self) -> np.ndarray:
        return self.compensated_phase.theta_deg[self._band_index]


@dataclass(frozen=True)
class InversionResult:
    mu_r: float
    residual: float  # RMS phase misfit at mu_r, degrees
    iterations: int
    converged: bool


@lru_cache(maxsize=4096)
def _model_phase_band(
    geom: SensorGeometry,
    conductivity: float,
    mu_r: float,
    band: tuple,
    quadrature: QuadratureSettings,
) -> np.ndarray:
    # thickness is metadata the half-space model never reads; any positive
    # placeholder is equivalent here
    plate = PlateProperties(conductivity, mu_r, thickness=1.0)
    spectrum = sweep(geom, plate, FrequencyGrid(band), quadrature)
    theta = phase_of(spectrum).theta_deg
    theta.setflags(write=False)
    return theta


def misfit(mu_r: float, problem: InversionProblem) -> float:
    """RMS phase difference in degrees between model and target over the band."""
    lo, hi = problem.mu_bounds
    if not (lo <= mu_r <= hi):
        raise ValueError(f"mu_r={mu_r:g} outside bounds {problem.mu_bounds}")
    model = _model_phase_band(
        problem.geometry,
        problem.conductivity,
        mu_r,
        problem.band_frequencies(),
        problem.quadrature,
    )
    diff = model - problem.band_target()
    return math.sqrt(float(np.mean(diff * diff)))


def probe_scan(problem: InversionProblem, count: int = _SCAN_PROBES):
    """Misfit at log-spaced probes across the bounds (used for bracketing)."""
    probes = np.geomspace(problem.mu_bounds[0], problem.mu_bounds[1], count)
    values = np.array([misfit(m, problem) for m in probes])
    return probes, values


def invert_permeability(problem: InversionProblem) -> InversionResult:
    """Golden-section minimisation of the phase misfit after a bracketing scan.

    Raises InversionError when the coarse scan finds no interior minimum
    (objective still falling at a bound). A scan with more than one local
    minimum is surfaced as a warning; the global scan minimum is refined.
    """
    probes, values = probe_scan(problem)
    j = int(np.argmin(values))
    if j == 0 or j == len(probes) - 1:
        raise InversionError(
            f"no interior minimum in mu bounds {problem.mu_bounds}: objective "
            f"decreases towards mu_r={probes[j]:.6g} "
            f"(misfit {values[j]:.4g} deg at that bound)"
        )
    interior = values[1:-1]
    n_minima = int(
        np.sum(
            (values[1:-1] < values[:-2]) & (values[1:-1] < values[2:])
        )
    ) if interior.size else 0
    if n_minima > 1:
        warnings.warn(
            f"misfit is not unimodal over the probe scan ({n_minima} local minima); "
            f"refining around the global scan minimum",
            stacklevel=2,
        )

    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = float(probes[j - 1]), float(probes[j + 1])
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = misfit(c, problem), misfit(d, problem)
    iterations = 0
    while (b - a) > _MU_TOLERANCE and iterations < _MAX_GOLDEN_ITERATIONS:
        iterations += 1
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = misfit(c, problem)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = misfit(d, problem)
    mu_r = 0.5 * (a + b)
    return InversionResult(
        mu_r=mu_r,
        residual=misfit(mu_r, problem),
        iterations=iterations,
        converged=(b - a) <= _MU_TOLERANCE,
    )


def invert_uncompensated(
    raw_phase: PhaseSpectrum, problem: InversionProblem
) -> InversionResult:
    """Same machinery on the raw (uncompensated) measured phase.

    Exists to quantify what the compensation buys: run both and compare.
    """
    return invert_permeability(
        dataclasses.replace(problem, compensated_phase=raw_phase)
    )
