"""Analytical eddy-current forward model for an air-cored coil pair above a
ferrous half-space.

The sensor is a pair of identical, coaxial, circular air-cored coils
(transmitter and receiver) held at a lift-off l0 above a conductive plate of
relative permeability mu_r and conductivity sigma. The plate is treated as a
half-space; its recorded thickness is metadata only. The sample-induced change
in mutual inductance is the classic axisymmetric integral over spatial
frequency alpha:

    dL(omega) = K * integral_0^inf  P(alpha)^2 / alpha^6
                                    * A(alpha) * phi(alpha, omega)  d(alpha)

with

    A(alpha)   = (1 - exp(-2*alpha*h)) * exp(-alpha*(G + h + 2*l0))
    phi(alpha) = (mu_r*alpha - a1) / (mu_r*alpha + a1),
                 a1 = sqrt(alpha^2 + 1j*omega*sigma*mu_r*mu0)
    K          = pi * mu0 * N^2 / (h^2 * (r2 - r1)^2)
    P(alpha)   = integral of x*J1(x) over [alpha*r1, alpha*r2]

All lengths are SI metres. The improper alpha integral is truncated at
alpha_max = scale / max(r2, h) (the axial factor decays like
exp(-alpha*(G + h)), so the default scale of 60 puts the discarded tail far
below double precision) and evaluated with a composite Gauss-Legendre rule on
log-spaced panels. Node budget and truncation scale are both configurable so
that convergence is testable by doubling them.

Everything in this module is a pure function of its inputs; there is no
mutable state beyond internal memoisation of geometry kernels, so concurrent
use is safe.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate
from scipy.special import j1

from .errors import NumericalError

__all__ = [
    "MU0",
    "SensorGeometry",
    "PlateProperties",
    "FrequencyGrid",
    "InductanceSpectrum",
    "QuadratureSettings",
    "reflection_coefficient",
    "coil_shape_integral",
    "axial_sensitivity",
    "delta_inductance",
    "sweep",
    "kernel_peak_alpha",
]

MU0 = 4.0e-7 * math.pi  # vacuum permeability, H/m

_GAUSS_ORDER = 16
# Fraction of alpha_max used as lower cutoff of the log-spaced rule. The
# integrand vanishes linearly at alpha -> 0, so the discarded head is
# O(alpha_min^2) of the total.
_ALPHA_MIN_FRACTION = 1e-6
# Relative disagreement between the full-resolution and half-resolution rules
# above which the integral is reported as non-converged.
_CONVERGENCE_RTOL = 1e-3
# Below this magnitude (henries) the signal counts as zero and the relative
# convergence check is skipped.
_ZERO_SIGNAL = 1e-25


@dataclass(frozen=True)
class SensorGeometry:
    """Axisymmetric transmit-receive coil pair, SI metres.

    r1/r2 are the winding's inner/outer radii, height the axial extent of one
    coil, gap the axial spacing between the two coils, lift_off the distance
    from the lower coil to the plate surface.
    """

    r1: float
    r2: float
    height: float
    gap: float
    n_turns: int
    lift_off: float

    def __post_init__(self):
        if not (0.0 < self.r1 < self.r2):
            raise ValueError(f"need 0 < r1 < r2, got r1={self.r1}, r2={self.r2}")
        if self.height <= 0.0:
            raise ValueError(f"coil height must be positive, got {self.height}")
        if self.gap < 0.0:
            raise ValueError(f"coil gap must be non-negative, got {self.gap}")
        if self.lift_off < 0.0:
            raise ValueError(f"lift-off must be non-negative, got {self.lift_off}")
        if self.n_turns < 1:
            raise ValueError(f"turn count must be >= 1, got {self.n_turns}")

    def with_lift_off(self, lift_off: float) -> "SensorGeometry":
        return dataclasses.replace(self, lift_off=lift_off)


@dataclass(frozen=True)
class PlateProperties:
    """Specimen electromagnetic properties.

    thickness is recorded metadata; the half-space model does not use it.
    """

    conductivity: float  # S/m
    relative_permeability: float  # dimensionless
    thickness: float  # m

    def __post_init__(self):
        if self.conductivity <= 0.0:
            raise ValueError(f"conductivity must be positive, got {self.conductivity}")
        if self.relative_permeability < 1.0:
            raise ValueError(
                f"relative permeability must be >= 1, got {self.relative_permeability}"
            )
        if self.thickness <= 0.0:
            raise ValueError(f"thickness must be positive, got {self.thickness}")


@dataclass(frozen=True)
class FrequencyGrid:
    """Strictly increasing grid of positive frequencies, hertz."""

    frequencies: tuple

    def __post_init__(self):
        freqs = tuple(float(f) for f in self.frequencies)
        if len(freqs) == 0:
            raise ValueError("frequency grid is empty")
        if freqs[0] <= 0.0:
            raise ValueError(f"frequencies must be positive, got {freqs[0]}")
        if any(b <= a for a, b in zip(freqs, freqs[1:])):
            raise ValueError("frequencies must be strictly increasing")
        object.__setattr__(self, "frequencies", freqs)

    @classmethod
    def log_spaced(cls, f_min: float, f_max: float, count: int) -> "FrequencyGrid":
        if count == 1:
            return cls((f_min,))
        return cls(tuple(np.geomspace(f_min, f_max, count)))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.frequencies)

    def angular(self) -> np.ndarray:
        """omega = 2*pi*f, rad/s."""
        return 2.0 * math.pi * self.as_array()

    def __len__(self):
        return len(self.frequencies)


def _readonly(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class InductanceSpectrum:
    """Complex sample-induced inductance change per grid frequency, henries."""

    grid: FrequencyGrid
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _readonly(self.values, complex))
        if self.values.shape != (len(self.grid),):
            raise ValueError(
                f"value count {self.values.shape} does not match grid length {len(self.grid)}"
            )

    def magnitude(self) -> np.ndarray:
        return np.abs(self.values)


@dataclass(frozen=True)
class QuadratureSettings:
    """Node budget and truncation for the improper alpha integral.

    nodes is an upper bound on the Gauss point count (panels of 16 points on
    log-spaced intervals). alpha_max_scale sets the truncation
    alpha_max = alpha_max_scale / max(r2, height).
    """

    nodes: int = 2048
    alpha_max_scale: float = 60.0

    def __post_init__(self):
        if self.nodes < 2 * _GAUSS_ORDER:
            raise ValueError(f"node budget must be >= {2 * _GAUSS_ORDER}, got {self.nodes}")
        if self.alpha_max_scale <= 0.0:
            raise ValueError(f"alpha_max_scale must be positive, got {self.alpha_max_scale}")


def reflection_coefficient(alpha, omega, plate: PlateProperties):
    """Half-space reflection coefficient phi(alpha, omega).

    phi = (mu_r*alpha - a1) / (mu_r*alpha + a1) with
    a1 = sqrt(alpha^2 + 1j*omega*sigma*mu_r*mu0) taken on the principal
    branch. |phi| <= 1 for all physical inputs. Accepts scalars or arrays in
    alpha and omega (broadcast together).
    """
    alpha = np.asarray(alpha, dtype=float)
    mu_alpha = plate.relative_permeability * alpha
    a1 = np.sqrt(
        alpha**2
        + 1j * np.asarray(omega, dtype=float) * plate.conductivity
        * plate.relative_permeability * MU0
    )
    phi = (mu_alpha - a1) / (mu_alpha + a1)
    if phi.ndim == 0:
        return complex(phi)
    return phi


def _radial_integral(alpha: float, r1: float, r2: float) -> float:
    lo, hi = alpha * r1, alpha * r2
    result = integrate.quad(
        lambda x: x * j1(x), lo, hi, epsabs=1e-13, epsrel=1e-11, limit=200,
        full_output=True,
    )
    value, abserr = result[0], result[1]
    # QUADPACK may flag roundoff saturation on wide oscillatory intervals even
    # though the achieved bound is excellent; only a genuinely loose bound is
    # a failure.
    if len(result) > 3 and abserr > max(1e-10, 1e-8 * abs(value)):
        raise NumericalError(
            f"coil shape integral did not converge at alpha={alpha:g}: {result[-1]}",
            estimate=value,
            error_bound=abserr,
        )
    return value


def coil_shape_integral(alpha: float, geom: SensorGeometry) -> float:
    """Radial coil window P(alpha): integral of x*J1(x) over [alpha*r1, alpha*r2].

    Evaluated with adaptive quadrature; raises NumericalError if the
    quadrature does not converge for this alpha.
    """
    if alpha <= 0.0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    return _radial_integral(alpha, geom.r1, geom.r2)


def axial_sensitivity(alpha, geom: SensorGeometry):
    """Axial coupling factor A(alpha), strictly positive and strictly
    decreasing in lift-off.

    A = (1 - exp(-2*alpha*h)) * exp(-alpha*(G + h + 2*l0)).
    """
    alpha = np.asarray(alpha, dtype=float)
    a = (1.0 - np.exp(-2.0 * alpha * geom.height)) * np.exp(
        -alpha * (geom.gap + geom.height + 2.0 * geom.lift_off)
    )
    if a.ndim == 0:
        return float(a)
    return a


def _gauss_panels(alpha_min: float, alpha_max: float, panels: int):
    """Composite Gauss-Legendre nodes/weights on log-spaced panels."""
    edges = np.geomspace(alpha_min, alpha_max, panels + 1)
    x, w = np.polynomial.legendre.leggauss(_GAUSS_ORDER)
    lo, hi = edges[:-1], edges[1:]
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


@lru_cache(maxsize=128)
def _radial_profile(r1: float, r2: float, alpha_min: float, alpha_max: float, panels: int):
    """P(alpha) sampled at the quadrature nodes. Cached: it is lift-off free."""
    nodes, _ = _gauss_panels(alpha_min, alpha_max, panels)
    profile = np.array([_radial_integral(a, r1, r2) for a in nodes])
    profile.setflags(write=False)
    return profile


@lru_cache(maxsize=128)
def _geometry_kernel(geom: SensorGeometry, quad: QuadratureSettings, panels: int):
    """alpha nodes and frequency-independent integrand weights for one geometry.

    weights_i = gauss_w_i * K * P(alpha_i)^2 / alpha_i^6 * A(alpha_i);
    the per-frequency integral is then sum(weights * phi(alpha, omega)).
    """
    alpha_max = quad.alpha_max_scale / max(geom.r2, geom.height)
    alpha_min = alpha_max * _ALPHA_MIN_FRACTION
    nodes, w = _gauss_panels(alpha_min, alpha_max, panels)
    profile = _radial_profile(geom.r1, geom.r2, alpha_min, alpha_max, panels)
    scale = math.pi * MU0 * geom.n_turns**2 / (geom.height**2 * (geom.r2 - geom.r1) ** 2)
    weights = w * scale * profile**2 / nodes**6 * axial_sensitivity(nodes, geom)
    nodes = nodes.copy()
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def _kernel_pair(geom: SensorGeometry, quad: QuadratureSettings):
    panels = max(2, quad.nodes // _GAUSS_ORDER)
    fine = _geometry_kernel(geom, quad, panels)
    coarse = _geometry_kernel(geom, quad, max(1, panels // 2))
    return fine, coarse


def _integral_at(kernel, plate: PlateProperties, omega: float) -> complex:
    nodes, weights = kernel
    phi = reflection_coefficient(nodes, omega, plate)
    return complex(np.sum(weights * phi))


def delta_inductance(
    geom: SensorGeometry,
    plate: PlateProperties,
    omega: float,
    quadrature: QuadratureSettings = QuadratureSettings(),
) -> complex:
    """Sample-induced mutual inductance change dL(omega), henries.

    The value is checked against a half-resolution evaluation of the same
    rule; disagreement beyond 0.1 % relative raises NumericalError carrying
    the achieved estimate and error bound.
    """
    if omega <= 0.0:
        raise ValueError(f"omega must be positive, got {omega}")
    fine, coarse = _kernel_pair(geom, quadrature)
    value = _integral_at(fine, plate, omega)
    check = _integral_at(coarse, plate, omega)
    err = abs(value - check)
    if abs(value) > _ZERO_SIGNAL and err > _CONVERGENCE_RTOL * abs(value):
        raise NumericalError(
            f"alpha integral not converged within node budget {quadrature.nodes} "
            f"at omega={omega:g} rad/s (relative change {err / abs(value):.2e})",
            estimate=value,
            error_bound=err,
        )
    return value


def sweep(
    geom: SensorGeometry,
    plate: PlateProperties,
    grid: FrequencyGrid,
    quadrature: QuadratureSettings = QuadratureSettings(),
) -> InductanceSpectrum:
    """dL over a frequency grid.

    Frequencies are evaluated independently, so the result does not depend on
    evaluation order. Numerical failures are re-raised with the offending
    grid index attached.
    """
    values = np.empty(len(grid), dtype=complex)
    for i, f in enumerate(grid.frequencies):
        try:
            values[i] = delta_inductance(geom, plate, 2.0 * math.pi * f, quadrature)
        except NumericalError as exc:
            raise NumericalError(
                f"sweep failed at grid index {i} (f={f:g} Hz): {exc}",
                estimate=exc.estimate,
                error_bound=exc.error_bound,
            ) from exc
    return InductanceSpectrum(grid, values)


def _kernel_value(alpha: float, geom: SensorGeometry) -> float:
    """Lift-off free sensor kernel P(alpha)^2 / alpha^6 * A(alpha)."""
    p = coil_shape_integral(alpha, geom)
    return p * p / alpha**6 * axial_sensitivity(alpha, geom)


def kernel_peak_alpha(
    geom: SensorGeometry,
    quadrature: QuadratureSettings = QuadratureSettings(),
    scan_points: int = 256,
) -> float:
    """Spatial frequency at which the sensor's alpha-domain kernel peaks, 1/m.

    Evaluated with the geometry's lift-off forced to zero: this is the
    sensor constant used by the lift-off estimator diagnostic, never by the
    phase compensation itself. Golden-section search over a log-alpha
    bracket found by a coarse scan.
    """
    base = geom.with_lift_off(0.0)
    alpha_max = quadrature.alpha_max_scale / max(geom.r2, geom.height)
    scan = np.geomspace(alpha_max * 1e-4, alpha_max, scan_points)
    values = np.array([_kernel_value(a, base) for a in scan])
    j = int(np.argmax(values))
    if j == 0 or j == scan_points - 1:
        raise NumericalError(
            f"kernel peak search hit the scan boundary (alpha={scan[j]:g} 1/m)"
        )
    # golden section on log(alpha), maximising
    lo, hi = math.log(scan[j - 1]), math.log(scan[j + 1])
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    c = hi - inv_phi * (hi - lo)
    d = lo + inv_phi * (hi - lo)
    fc = _kernel_value(math.exp(c), base)
    fd = _kernel_value(math.exp(d), base)
    for _ in range(200):
        if hi - lo <= 1e-12:
            break
        if fc > fd:
            hi, d, fd = d, c, fc
            c = hi - inv_phi * (hi - lo)
            fc = _kernel_value(math.exp(c), base)
        else:
            lo, c, fc = c, d, fd
            d = lo + inv_phi * (hi - lo)
            fd = _kernel_value(math.exp(d), base)
    else:
        raise NumericalError("kernel peak search did not converge")
    return math.exp(0.5 * (lo + hi))
