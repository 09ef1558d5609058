"""Intensity and polarization of partially coherent Hermite-Gaussian beams
propagating through free space and atmospheric turbulence."""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    DegenerateMatrixError,
    DivergentIntegralError,
    IntegrandDefinitionError,
    NumericFailure,
    RealizabilityError,
    UnsupportedOrderError,
)
from .oracle import (
    OracleSettings,
    oracle_axis_factor,
    oracle_csd_element,
    oracle_intensity,
)
from .polarization import (
    CoherenceMatrix2,
    PolarizationResult,
    PolarizationSource,
    coherence_matrix,
    csd_element,
    degree_of_polarization,
    evaluate_polarization,
    source_dop,
)
from .propagation import (
    BeamParams,
    CoherenceSpec,
    Observation,
    PropagationConstants,
    coherence_degree,
    intensity,
    propagation_constants,
    series_s,
    source_csd,
    source_field,
)
from .scenarios import (
    ScenarioConfig,
    SweepSpec,
    calibrate_inner_scale,
    default_config,
    load_config,
    reproduce_figure,
    run_sweep,
)
from .special_math import (
    LogSignedValue,
    binomial,
    gaussian_moment,
    hermite,
    laguerre,
)
from .turbulence import (
    PathKind,
    PathSpec,
    TurbulenceProfile,
    cn2_at_altitude,
    effective_inverse_rho2,
    rho0_horizontal,
    slant_coefficients,
)

__all__ = [name for name in dir() if not name.startswith("_")]
