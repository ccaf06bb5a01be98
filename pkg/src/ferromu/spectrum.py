"""Impedance-to-inductance conversion, phase convention, zero-crossing feature.

Phase convention (used everywhere in this package): the phase of a spectrum
point is the two-argument angle of -dL,

    theta = atan2(-Im dL, -Re dL)  in degrees.

For a ferrous plate Im(dL) < 0 at every frequency, so theta runs continuously
from near 180 deg at the low-frequency (magnetisation dominated) end, through
exactly 90 deg where Re(dL) crosses zero, down towards 0 deg at the
high-frequency (eddy-current dominated) end. Equivalently theta equals
atan2(sqrt(2*w_z/w), 1 - w_z/w) for the idealised single-mode spectrum with
zero-crossing frequency w_z; a one-argument arctangent of -Re/Im would be the
same thing shifted onto a principal branch with a jump at the zero crossing,
which is why it is not used here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import FeatureAbsentError, GridMismatchError, NumericalError
from .forward_model import FrequencyGrid, InductanceSpectrum, _readonly

__all__ = [
    "ImpedanceSweep",
    "PhaseSpectrum",
    "ZeroCrossing",
    "to_inductance",
    "phase_of",
    "find_zero_crossing",
    "despike_median3",
]


@dataclass(frozen=True, eq=False)
class ImpedanceSweep:
    """Mutual impedance with the specimen present and in air, ohms."""

    grid: FrequencyGrid
    z_sample: np.ndarray
    z_air: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "z_sample", _readonly(self.z_sample, complex))
        object.__setattr__(self, "z_air", _readonly(self.z_air, complex))
        n = len(self.grid)
        if self.z_sample.shape != (n,) or self.z_air.shape != (n,):
            raise GridMismatchError(
                "impedance arrays do not match the frequency grid length"
            )


@dataclass(frozen=True, eq=False)
class PhaseSpectrum:
    """Phase per grid frequency, degrees, under the package convention."""

    grid: FrequencyGrid
    theta_deg: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "theta_deg", _readonly(self.theta_deg, float))
        if self.theta_deg.shape != (len(self.grid),):
            raise ValueError("phase array does not match the frequency grid length")


@dataclass(frozen=True)
class ZeroCrossing:
    """Interpolated zero crossing of Re(dL).

    bracket holds the two adjacent grid frequencies straddling the crossing;
    crossings counts how many sign changes the grid contains (the first is
    used).
    """

    omega1: float  # rad/s
    bracket: tuple
    crossings: int


def to_inductance(sweep: ImpedanceSweep) -> InductanceSpectrum:
    """dL = (Z - Z_air) / (j*omega)."""
    return InductanceSpectrum(
        sweep.grid, (sweep.z_sample - sweep.z_air) / (1j * sweep.grid.angular())
    )


def phase_of(spec: InductanceSpectrum) -> PhaseSpectrum:
    """Phase of -dL in degrees; see the module docstring for the convention."""
    zero = np.nonzero(spec.values == 0)[0]
    if zero.size:
        f = spec.grid.frequencies[zero[0]]
        raise NumericalError(f"phase undefined: dL = 0 at f={f:g} Hz")
    theta = np.degrees(np.arctan2(-spec.values.imag, -spec.values.real))
    return PhaseSpectrum(spec.grid, theta)


def find_zero_crossing(spec: InductanceSpectrum) -> ZeroCrossing:
    """First sign change of Re(dL), scanning upward in frequency.

    The root is interpolated linearly in (log f, Re dL). Raises
    FeatureAbsentError when the real part never changes sign (the caller
    must widen the frequency range).
    """
    re = spec.values.real
    sign = np.where(re > 0.0, 1.0, -1.0)
    change = np.nonzero(sign[:-1] != sign[1:])[0]
    if change.size == 0:
        raise FeatureAbsentError(
            "Re(dL) does not change sign over the grid; no zero-crossing frequency"
        )
    i = int(change[0])
    f_lo, f_hi = spec.grid.frequencies[i], spec.grid.frequencies[i + 1]
    t = re[i] / (re[i] - re[i + 1])
    f_z = math.exp(math.log(f_lo) + t * (math.log(f_hi) - math.log(f_lo)))
    return ZeroCrossing(
        omega1=2.0 * math.pi * f_z, bracket=(f_lo, f_hi), crossings=int(change.size)
    )


def despike_median3(spec: InductanceSpectrum) -> InductanceSpectrum:
    """Median-of-3 filter on Re and Im separately; endpoints pass through.

    Intended for isolated low-frequency outliers in instrument sweeps. Off by
    default everywhere; callers opt in.
    """
    if len(spec.grid) < 3:
        return InductanceSpectrum(spec.grid, spec.values.copy())
    re, im = spec.values.real.copy(), spec.values.imag.copy()
    stack_re = np.stack([re[:-2], re[1:-1], re[2:]])
    stack_im = np.stack([im[:-2], im[1:-1], im[2:]])
    re[1:-1] = np.median(stack_re, axis=0)
    im[1:-1] = np.median(stack_im, axis=0)
    return InductanceSpectrum(spec.grid, re + 1j * im)
