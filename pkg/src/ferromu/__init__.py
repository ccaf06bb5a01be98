"""Lift-off compensated magnetic permeability measurement for ferrous plates.

The package turns multi-frequency eddy-current sweeps into a relative
permeability estimate that is nearly independent of sensor lift-off:

    forward_model  analytical coil-above-half-space inductance dL(omega)
    spectrum       impedance -> inductance, phase convention, zero crossing
    compensation   magnitude-ratio lift-off correction of the phase curve
    inversion      permeability fit against the compensated phase
    cli            simulate | ingest | compensate | invert | pipeline
"""

from .compensation import (
    CompensationFeatures,
    compensate_phase,
    compensate_zcf,
    estimate_liftoff,
    extract_features,
    magnitude_ratio,
    model_phase,
)
from .config import RunConfig, load_config
from .errors import (
    CompensationRangeError,
    ConfigError,
    FeatureAbsentError,
    FerromuError,
    GridMismatchError,
    InversionError,
    NumericalError,
)
from .forward_model import (
    MU0,
    FrequencyGrid,
    InductanceSpectrum,
    PlateProperties,
    QuadratureSettings,
    SensorGeometry,
    axial_sensitivity,
    coil_shape_integral,
    delta_inductance,
    kernel_peak_alpha,
    reflection_coefficient,
    sweep,
)
from .inversion import (
    InversionProblem,
    InversionResult,
    invert_permeability,
    invert_uncompensated,
    misfit,
)
from .spectrum import (
    ImpedanceSweep,
    PhaseSpectrum,
    ZeroCrossing,
    despike_median3,
    find_zero_crossing,
    phase_of,
    to_inductance,
)

__version__ = "0.1.0"
