"""Variable Bandpass Periodic Block Bootstrap with bias assessment."""

from .bias import (
    BiasReport,
    CorrectionMode,
    bias,
    bias_report,
    correct,
    ensemble_means,
    overall_mean,
    periodic_mean,
)
from .resample import (
    BandEstimate,
    BandMode,
    BootstrapEnsemble,
    VbpbbResult,
    ci_band,
    pbb_resample,
    pointwise_mean,
    vbpbb_run,
)
from .series import TimeSeries
from .simulate import (
    EventSpec,
    GammaShifted,
    NoiseSpec,
    Normal,
    ScenarioConfig,
    ScenarioData,
    SineComponent,
    TrendSpec,
    apply_event,
    apply_trend,
    build_scenario,
    generate_noise,
    generate_signal,
    preset,
)
from .spectral import (
    KzftParams,
    PcComponent,
    Spectrum,
    detect_periods,
    extract_pc,
    kzft_demodulate,
    periodogram,
    sum_pc,
)

__version__ = "0.1.0"
