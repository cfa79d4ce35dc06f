"""Behavioral simulator for a slope-scaled current-sensing 2nd-order delta-sigma ADC."""

from .analysis import (
    DynamicRangeError,
    MetricsReport,
    SpectrumReport,
    ToneMetrics,
    cic_response,
    compensate_cic_droop,
    cross_scale_dr,
    decimate_cic,
    dynamic_range,
    fom_schreier,
    inband_noise_power,
    min_detectable_signal,
    psd_estimate,
    psd_slope_db_per_decade,
    sndr_in_band,
)
from .config import (
    Bitstream,
    ConfigError,
    DecimatedRecord,
    ModulatorConfig,
    NanoporeModel,
    NoiseConfig,
    effective_full_scale,
    load_config,
    validate_config,
)
from .modulator import (
    FeedbackDac,
    LoopState,
    ModulatorUnstable,
    cds_effective_gain,
    integrator_leak_pole,
    run,
    slope_scaled_feedback,
    step,
)
from .noise import (
    NoisePsd,
    cds_filter,
    dac_shot_noise_psd,
    flicker_noise_samples,
    input_referred_dac_noise_psd,
    white_noise_samples,
)
from .stimulus import Waveform, coherent_frequency, gen_dc, gen_step, gen_tone, nanopore_filter

__all__ = [
    "Bitstream",
    "cds_effective_gain",
    "cds_filter",
    "cic_response",
    "coherent_frequency",
    "compensate_cic_droop",
    "ConfigError",
    "cross_scale_dr",
    "dac_shot_noise_psd",
    "decimate_cic",
    "DecimatedRecord",
    "dynamic_range",
    "DynamicRangeError",
    "effective_full_scale",
    "FeedbackDac",
    "flicker_noise_samples",
    "fom_schreier",
    "gen_dc",
    "gen_step",
    "gen_tone",
    "inband_noise_power",
    "input_referred_dac_noise_psd",
    "integrator_leak_pole",
    "load_config",
    "LoopState",
    "MetricsReport",
    "min_detectable_signal",
    "ModulatorConfig",
    "ModulatorUnstable",
    "nanopore_filter",
    "NanoporeModel",
    "NoiseConfig",
    "NoisePsd",
    "psd_estimate",
    "psd_slope_db_per_decade",
    "run",
    "slope_scaled_feedback",
    "sndr_in_band",
    "SpectrumReport",
    "step",
    "ToneMetrics",
    "validate_config",
    "Waveform",
    "white_noise_samples",
]

__version__ = "0.1.0"
