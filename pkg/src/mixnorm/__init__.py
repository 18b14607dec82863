"""Spectral mixing diagnostics on the torus.

Mix-norms and Sobolev norms of sparse Fourier fields, the baker-type
coefficient maps and the random-phase sine flow, empirical recurrence
classification, decay-rate analytics, and witness observables whose
correlations track a prescribed rate.
"""

from .classification import (
    INCONCLUSIVE,
    RECURRENT,
    TRANSIENT,
    RecurrenceReport,
    altered_baker_oracle,
    classify_recurrence,
    energy_fraction_series,
)
from .dynamics import (
    SystemSpec,
    altered_baker_step,
    baker_step,
    cos1,
    evolve,
    pulsed_diffusion_step,
    sine_flow_period,
)
from .errors import (
    ConventionMismatch,
    DegenerateDenominator,
    DegenerateNorm,
    DimensionMismatch,
    DuplicateWavevector,
    GridTooSmall,
    HorizonExhausted,
    InsufficientHorizon,
    MisalignedSeries,
    MixnormError,
    NegativeDiffusivity,
    NoCandidateTimes,
    NonPositiveValues,
    ParameterConstraintViolated,
    ParseError,
    StateCapExceeded,
    SubsequenceUnavailable,
    WindowTooSmall,
    ZeroModePresent,
)
from .io import read_field, read_series, write_field, write_series
from .rates import (
    RateFunction,
    TimeSeriesReal,
    check_rate_definition,
    cross_q_comparison,
    empirical_limsup,
    fit_decay_rate,
    geometric_mean_rate,
    mixnorm_series,
    rate_from_descriptor,
)
from .spectral import (
    FULL_LATTICE,
    ONE_SIDED,
    FourierField,
    SpectrumSeries,
    WavenumberSet,
    grid_transform,
    inner_product,
    make_field,
    mixnorm,
    project,
    sobolev_norm,
    to_grid,
    to_spectrum,
)
from .witness import (
    WitnessObservable,
    duality_witness,
    shell_decomposition,
    sign_state_witness,
    transient_witness,
    verify_witness,
)

__version__ = "0.1.0"

__all__ = [
    "INCONCLUSIVE",
    "RECURRENT",
    "TRANSIENT",
    "RecurrenceReport",
    "altered_baker_oracle",
    "classify_recurrence",
    "energy_fraction_series",
    "SystemSpec",
    "altered_baker_step",
    "baker_step",
    "cos1",
    "evolve",
    "pulsed_diffusion_step",
    "sine_flow_period",
    "RateFunction",
    "TimeSeriesReal",
    "check_rate_definition",
    "cross_q_comparison",
    "empirical_limsup",
    "fit_decay_rate",
    "geometric_mean_rate",
    "mixnorm_series",
    "rate_from_descriptor",
    "FULL_LATTICE",
    "ONE_SIDED",
    "FourierField",
    "SpectrumSeries",
    "WavenumberSet",
    "grid_transform",
    "inner_product",
    "make_field",
    "mixnorm",
    "project",
    "sobolev_norm",
    "to_grid",
    "to_spectrum",
    "WitnessObservable",
    "duality_witness",
    "shell_decomposition",
    "sign_state_witness",
    "transient_witness",
    "verify_witness",
    "read_field",
    "read_series",
    "write_field",
    "write_series",
    "ConventionMismatch",
    "DegenerateDenominator",
    "DegenerateNorm",
    "DimensionMismatch",
    "DuplicateWavevector",
    "GridTooSmall",
    "HorizonExhausted",
    "InsufficientHorizon",
    "MisalignedSeries",
    "MixnormError",
    "NegativeDiffusivity",
    "NoCandidateTimes",
    "NonPositiveValues",
    "ParameterConstraintViolated",
    "ParseError",
    "StateCapExceeded",
    "SubsequenceUnavailable",
    "WindowTooSmall",
    "ZeroModePresent",
]
