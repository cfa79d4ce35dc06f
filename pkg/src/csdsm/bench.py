"""Test-bench helpers: tone runs, amplitude sweeps, noise calibration."""

from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .analysis import SpectrumReport, ToneMetrics, psd_estimate, sndr_in_band
from .config import Bitstream, ModulatorConfig, NanoporeModel, NoiseConfig, validate_config
from .modulator import run
from .stimulus import coherent_frequency, gen_tone

# Noise calibration result for the default ModulatorConfig (10 nA reference,
# alpha 100, CDS on): white level chosen so a -5 dBFS 1.9 kHz tone reads
# 78 dB SNDR in the 4 kHz band. See calibrate_amp_white_psd.
OPERATING_POINT_NOISE = NoiseConfig(
    dac_shot_enabled=False,
    amp_white_psd=2.60e-33,
    flicker_knee_hz=10e3,
    flicker_enabled=True,
    amp_offset_amp=1e-12,
)
CALIBRATION_TARGET_DB = 78.0


@dataclass(frozen=True, eq=False)
class ToneRun:
    bitstream: Bitstream
    spectrum: SpectrumReport
    metrics: ToneMetrics
    f_sig_hz: float
    amp_dbfs: float


def simulate_tone(
    cfg: ModulatorConfig,
    noise: NoiseConfig | None,
    amp_dbfs: float,
    f_hz: float,
    n: int = 1 << 16,
    seed=None,
    coherent: bool = True,
    band_hz: float | None = None,
    window: str = "hann",
    n_fft: int | None = None,
    nanopore: NanoporeModel | None = None,
) -> ToneRun:
    """Drive the modulator with one tone and measure it in ``band_hz``."""
    cfg = validate_config(cfg)
    band = band_hz if band_hz is not None else cfg.band_hz
    w = gen_tone(amp_dbfs, f_hz, cfg.fs_hz, n, cfg.full_scale_amp, coherent=coherent)
    if coherent:
        f_hz = coherent_frequency(f_hz, cfg.fs_hz, n)
    bits = run(w, cfg, noise, seed=seed, nanopore=nanopore)
    if n_fft is None:
        n_fft = 1 << (n.bit_length() - 1)
    spec = psd_estimate(bits.bits, cfg.fs_hz, window, n_fft, band_hz=band)
    return ToneRun(bits, spec, sndr_in_band(spec, f_hz, band), f_hz, amp_dbfs)


def _sweep_point(args):
    cfg, noise, amp, f_hz, n, seed, band = args
    m = simulate_tone(cfg, noise, amp, f_hz, n, seed=seed, band_hz=band).metrics
    return amp, m.sndr_db


def amplitude_sweep(
    cfg: ModulatorConfig,
    noise: NoiseConfig | None,
    amps_dbfs,
    f_hz: float = 1.9e3,
    n: int = 1 << 16,
    seed=0,
    band_hz: float | None = None,
    jobs: int = 1,
) -> list[tuple[float, float]]:
    """SNDR at each amplitude; NaN where no tone is found.

    Point ``i`` uses the ``i``-th child of ``seed``, so results do not depend
    on ``jobs``.
    """
    seeds = np.random.SeedSequence(seed).spawn(len(amps_dbfs))
    tasks = [(cfg, noise, float(a), f_hz, n, s, band_hz) for a, s in zip(amps_dbfs, seeds)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(_sweep_point, tasks))
    return [_sweep_point(t) for t in tasks]


def calibrate_amp_white_psd(
    cfg: ModulatorConfig,
    noise: NoiseConfig,
    target_sndr_db: float = CALIBRATION_TARGET_DB,
    amp_dbfs: float = -5.0,
    f_hz: float = 1.9e3,
    n: int = 1 << 16,
    seeds=(0, 1, 2, 3),
    xtol_db: float = 0.02,
) -> float:
    """Find the amplifier white PSD that puts the tone at ``target_sndr_db``.

    The SNDR averaged (in dB) over ``seeds`` is root-found on ``log10(psd)``,
    bracketed around the level that alone would give the target in a linear
    noise budget.
    """
    cfg = validate_config(cfg)
    sig = 10 ** (amp_dbfs / 10) * cfg.full_scale_amp**2 / 2
    gain = 2.0 if cfg.cds_enabled else 1.0
    guess = sig / 10 ** (target_sndr_db / 10) / cfg.band_hz / gain

    def err(log_psd):
        nz = dataclasses.replace(noise, amp_white_psd=10**log_psd)
        sndr = [simulate_tone(cfg, nz, amp_dbfs, f_hz, n, seed=s).metrics.sndr_db for s in seeds]
        return float(np.mean(sndr)) - target_sndr_db

    g = math.log10(guess)
    lo, hi = g - 1.0, g + 0.5
    root = optimize.brentq(err, lo, hi, xtol=xtol_db / 10)
    return 10**root
