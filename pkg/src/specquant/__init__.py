"""Spectral-distribution quantile estimation and frequency-domain quantile tests."""

from .models import (
    AR1,
    MA1,
    SinusoidAtom,
    SpectralMeasure,
    SpectralModel,
    WhiteNoise,
    describe,
    model_from_dict,
    model_to_dict,
    population_objective,
    spectral_cdf,
    spectral_density,
    spectral_measure,
    true_quantile,
)
from .sample import (
    SimulationPlan,
    TimeSeries,
    derive_seed,
    generate,
    generate_batch,
    load_series,
    save_batch,
    save_series,
)
from .spectral import (
    LagWindow,
    Periodogram,
    autocovariance,
    bartlett_window,
    default_bandwidth,
    default_grid,
    extended_periodogram,
    raw_periodogram,
    save_periodogram,
    smoothed_density,
)
from .quantile import (
    DegenerateSpectrumError,
    QuantileEstimate,
    argmin_crosscheck,
    check_function,
    empirical_objective,
    estimate_raw,
    estimate_smoothed,
)
from .inference import (
    BandVarianceRow,
    LimitDiagnosticReport,
    LimitDiagnosticRow,
    PluginVarianceError,
    RawLimitLaw,
    SigmaEstimate,
    TestResult,
    mc_sigma,
    plugin_sigma_gaussian,
    power_study,
    quantile_test,
    raw_limit_diagnostic,
    tn_variance_diagnostic,
)

__version__ = "0.1.0"
