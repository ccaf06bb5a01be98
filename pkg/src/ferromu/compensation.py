"""Lift-off compensation of phase spectra for ferrous plates.

Raising the sensor off the plate does two things to the measured inductance
spectrum: the magnitude shrinks (roughly exp(-2*alpha*delta_l0) through the
axial coupling) and the zero-crossing frequency drops. The correction here
exploits that link. From a calibration sweep at the smallest achievable
lift-off it forms

    ln_ratio = ln(|dL| / |dL_ref|)   at the highest grid frequency,

then maps the measured zero-crossing frequency w1 to a compensated one

    w0 = pi^2 * w1 / (pi^2 + 4 * ln_ratio),

and corrects the whole phase curve with the idealised single-mode phase
template G:

    theta(w) = theta_r(w) - G(w; w1) + G(c*w; w1),   c = 1 + 4*ln_ratio/pi^2.

Because G(c*w; w1) == G(w; w1/c) and w1/c == w0, the correction replaces the
measured zero-crossing by the compensated one while leaving everything else
untouched; with ln_ratio == 0 it is the identity, exactly. The small-angle
derivation behind the pi^2/4 constants breaks down once
pi^2 + 4*ln_ratio <= 0; inputs outside that window are rejected rather than
clamped.

The compensation targets the calibration (reference) lift-off, not a
hypothetical zero lift-off: ln_ratio == 0 must be a fixed point, and that is
only consistent with the reference state. Downstream model fits therefore
evaluate the forward model at the reference lift-off.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CompensationRangeError, GridMismatchError, NumericalError
from .forward_model import InductanceSpectrum
from .spectrum import PhaseSpectrum, find_zero_crossing

__all__ = [
    "CompensationFeatures",
    "magnitude_ratio",
    "compensate_zcf",
    "model_phase",
    "compensate_phase",
    "estimate_liftoff",
    "extract_features",
]

_PI_SQ = math.pi**2


@dataclass(frozen=True)
class CompensationFeatures:
    """Scalar features driving one compensation.

    omega1: measured zero-crossing frequency, rad/s.
    delta_l0 / delta_lm: |dL| of the measured and reference sweeps at the
    common sampling frequency (the highest grid point), henries.
    ln_ratio: ln(delta_l0 / delta_lm); <= 0 whenever the unknown lift-off is
    at or above the reference lift-off.
    omega0: compensated zero-crossing frequency, rad/s.
    """

    omega1: float
    delta_l0: float
    delta_lm: float
    ln_ratio: float
    omega0: float

    def __post_init__(self):
        if self.omega1 <= 0.0:
            raise ValueError(f"omega1 must be positive, got {self.omega1}")
        if self.delta_l0 <= 0.0 or self.delta_lm <= 0.0:
            raise ValueError("magnitude features must be positive")
        if _PI_SQ + 4.0 * self.ln_ratio <= 0.0:
            raise CompensationRangeError(
                f"ln_ratio={self.ln_ratio:g} outside the validity window "
                f"(need pi^2 + 4*ln_ratio > 0)"
            )


def magnitude_ratio(spec: InductanceSpectrum, reference: InductanceSpectrum) -> float:
    """ln of the magnitude ratio at the highest grid frequency.

    The magnitude is sampled where the spectrum has flattened out, at the top
    of the grid; the reference is the minimal-lift-off calibration sweep.
    Both spectra must share the same grid.
    """
    if spec.grid != reference.grid:
        raise GridMismatchError(
            "measured and reference spectra are on different frequency grids"
        )
    delta_l0 = abs(spec.values[-1])
    delta_lm = abs(reference.values[-1])
    if delta_l0 == 0.0 or delta_lm == 0.0:
        f = spec.grid.frequencies[-1]
        raise NumericalError(f"zero |dL| at the sampling frequency {f:g} Hz")
    return math.log(delta_l0 / delta_lm)


def compensate_zcf(omega1: float, ln_ratio: float) -> float:
    """Compensated zero-crossing frequency w0 = pi^2*w1 / (pi^2 + 4*ln_ratio)."""
    denom = _PI_SQ + 4.0 * ln_ratio
    if denom <= 0.0:
        raise CompensationRangeError(
            f"ln_ratio={ln_ratio:g} outside the validity window: the lift-off "
            f"difference is too large for the small-angle correction"
        )
    return _PI_SQ * omega1 / denom


def model_phase(omega, omega_zc):
    """Idealised phase template G for a spectrum with zero crossing omega_zc.

    G = atan2(sqrt(2*w_z/w), 1 - w_z/w) in degrees: continuous, 180 -> 0 as
    omega sweeps up, exactly 90 at omega == omega_zc. Accepts scalars or
    arrays (broadcast).
    """
    omega = np.asarray(omega, dtype=float)
    ratio = np.asarray(omega_zc, dtype=float) / omega
    g = np.degrees(np.arctan2(np.sqrt(2.0 * ratio), 1.0 - ratio))
    if g.ndim == 0:
        return float(g)
    return g


def compensate_phase(
    theta_r: PhaseSpectrum, omega1: float, ln_ratio: float
) -> PhaseSpectrum:
    """Remove the lift-off induced phase shift from a measured phase spectrum.

    Pointwise theta = theta_r - G(w; omega1) + G(c*w; omega1) with
    c = 1 + 4*ln_ratio/pi^2. When ln_ratio == 0 the input values are returned
    unchanged (no arithmetic touches them), making the no-shift case an exact
    fixed point. The additive correction is independent of theta_r, so any
    constant offset in the input convention passes straight through.
    """
    if ln_ratio == 0.0:
        return PhaseSpectrum(theta_r.grid, theta_r.theta_deg.copy())
    scale = 1.0 + 4.0 * ln_ratio / _PI_SQ
    if scale <= 0.0:
        raise CompensationRangeError(
            f"ln_ratio={ln_ratio:g} outside the validity window: the lift-off "
            f"difference is too large for the small-angle correction"
        )
    omega = theta_r.grid.angular()
    correction = model_phase(scale * omega, omega1) - model_phase(omega, omega1)
    return PhaseSpectrum(theta_r.grid, theta_r.theta_deg + correction)


def estimate_liftoff(ln_ratio: float, alpha0: float) -> float:
    """Lift-off increase over the reference sweep implied by ln_ratio, metres.

    Solves the small-angle magnitude model for the lift-off delta,
    delta = (pi^2 - sqrt(pi^4 + 4*pi^2*ln_ratio)) / (4*alpha0); the root with
    the minus sign is the physical one (alpha0*delta << 1). Diagnostic only;
    the compensation itself never uses it.
    """
    if alpha0 <= 0.0:
        raise ValueError(f"alpha0 must be positive, got {alpha0}")
    disc = _PI_SQ**2 + 4.0 * _PI_SQ * ln_ratio
    if disc < 0.0:
        raise CompensationRangeError(
            f"ln_ratio={ln_ratio:g} outside the lift-off estimator's range"
        )
    return (_PI_SQ - math.sqrt(disc)) / (4.0 * alpha0)


def extract_features(
    spec: InductanceSpectrum, reference: InductanceSpectrum
) -> CompensationFeatures:
    """Compute all compensation features of a measured sweep in one pass."""
    crossing = find_zero_crossing(spec)
    ln_ratio = magnitude_ratio(spec, reference)
    omega0 = compensate_zcf(crossing.omega1, ln_ratio)
    return CompensationFeatures(
        omega1=crossing.omega1,
        delta_l0=float(abs(spec.values[-1])),
        delta_lm=float(abs(reference.values[-1])),
        ln_ratio=ln_ratio,
        omega0=omega0,
    )
