"""Quantum-correlation observables of counter-propagating twin beams.

A mirrorless optical parametric oscillator (counter-propagating parametric
down-conversion in a poled slab) below threshold, with a co-propagating
single-pass amplifier for comparison.
"""
__version__ = "0.1.0"

from .errors import (
    AboveThreshold,
    BadBracket,
    ConfigError,
    InvalidCoeffs,
    NearThresholdWarning,
    NoCrossing,
    NoSolution,
    NumericalInstability,
    OutOfRange,
    QuadratureFailure,
    TwinBeamError,
)
from .dispersion import (
    G_THRESHOLD,
    InteractionConfig,
    MaterialDispersion,
    Timescales,
    available_materials,
    group_derivatives,
    linearized_mismatch,
    load_material,
    mismatch_functions,
    qpm_poling_period,
    timescales,
    wavenumber,
)
from .gain import BogoliubovCoeffs, SqueezeParams, TwinBeamModel, copro_coefficients, mopo_coefficients, squeeze_params
from .squeeze_algebra import (
    TwoModeSqueezeState,
    cpm_decomposition_check,
    fock_coefficients,
    pair_statistics,
    quadrature_variance,
)
from .spectra import (
    PhaseChoice,
    SpectrumSeries,
    fixed_angle_identity,
    intensity_spectrum,
    squeezing_bandwidth,
    squeezing_spectrum,
)
from .intensity_noise import (
    NoiseReport,
    field_correlations,
    intensity_correlation_difference,
    mean_intensity,
    noise_report,
    photon_number_variance,
    photon_number_variance_time_domain,
    variance_curve,
    variance_spontaneous,
    vminus_near_threshold,
    vminus_spectrum,
    vminus_spontaneous,
)
from .scenario import Scenario, load_scenario
