"""Seeded noise sources: DAC shot noise, amplifier white/flicker noise, CDS.

All PSDs are one-sided, in A^2/Hz. A white sequence drawn at rate ``fs``
with one-sided PSD ``S`` has per-sample variance ``S * fs / 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy import constants, signal

from .config import NoiseConfig

ELEMENTARY_CHARGE = constants.e

# Order in which a run-level seed is split among the sources.
SEED_ORDER = ("dac_shot", "amp_white", "flicker")


@dataclass(frozen=True)
class NoisePsd:
    value: float
    kind: Literal["dac_shot", "amp_white", "flicker"]

    def __post_init__(self):
        if not self.value >= 0:
            raise ValueError("PSD must be >= 0")

    def __float__(self):
        return float(self.value)


def split_seed(seed) -> dict[str, np.random.SeedSequence]:
    """Deterministically derive one child seed per source in ``SEED_ORDER``."""
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return dict(zip(SEED_ORDER, ss.spawn(len(SEED_ORDER))))


def dac_shot_noise_psd(i_ref: float, charge: float = ELEMENTARY_CHARGE) -> NoisePsd:
    """Shot noise ``2 q I`` of a DAC reference carrying ``i_ref``."""
    if i_ref < 0:
        raise ValueError("i_ref must be >= 0")
    return NoisePsd(2 * charge * i_ref, "dac_shot")


def input_referred_dac_noise_psd(
    i_ref: float, alpha: float, charge: float = ELEMENTARY_CHARGE
) -> NoisePsd:
    """DAC noise seen at the input after slope scaling by ``alpha``.

    ``i_ref`` is the reference actually flowing in the DAC (already scaled up
    by ``alpha`` relative to the input full scale). The capacitor ratio divides
    its current, and so its noise power, by ``alpha**2``.
    """
    if not alpha > 0:
        raise ValueError("alpha must be > 0")
    return NoisePsd(dac_shot_noise_psd(i_ref, charge).value / alpha**2, "dac_shot")


def white_noise_samples(psd, fs: float, n: int, seed=None) -> np.ndarray:
    """Zero-mean Gaussian samples (A) whose one-sided PSD is ``psd``."""
    if n <= 0:
        raise ValueError("n must be > 0")
    s = float(psd)
    if s < 0:
        raise ValueError("psd must be >= 0")
    if s == 0:
        return np.zeros(n)
    rng = np.random.default_rng(seed)
    return rng.standard_normal(n) * math.sqrt(s * fs / 2)


def flicker_sections(white_psd_at_knee: float, knee_hz: float, fs: float):
    """First-order sections whose summed PSD approximates ``S * knee / f``.

    Poles sit one per decade from ``fs * 1e-6`` up to ``fs``. A Lorentzian of
    corner ``fp`` and plateau ``A`` integrates over log-spaced corners to
    ``pi / 2`` per neper, so plateaus ``A_k = (2 ln 10 / pi) * C / fp_k``
    sum to ``C / f`` with ``C = S * knee``.

    Returns a list of ``(a, g)`` for ``y[n] = a y[n-1] + g w[n]`` driven by
    unit-variance white noise.
    """
    c = white_psd_at_knee * knee_hz
    f_lo = fs * 1e-6
    decades = math.ceil(math.log10(fs / f_lo))
    out = []
    for k in range(decades + 1):
        fp = f_lo * 10**k
        a = math.exp(-2 * math.pi * fp / fs)
        plateau = (2 * math.log(10) / math.pi) * c / fp
        # low-frequency PSD of the AR(1) section: (2/fs) g^2 / (1-a)^2
        g = (1 - a) * math.sqrt(plateau * fs / 2)
        out.append((a, g))
    return out


def flicker_psd_model(f, white_psd_at_knee: float, knee_hz: float, fs: float) -> np.ndarray:
    """Exact one-sided PSD of :func:`flicker_noise_samples` at frequencies ``f``."""
    w = 2 * np.pi * np.asarray(f, dtype=float) / fs
    total = np.zeros_like(w)
    for a, g in flicker_sections(white_psd_at_knee, knee_hz, fs):
        total += (2 / fs) * g**2 / np.abs(1 - a * np.exp(-1j * w)) ** 2
    return total


def flicker_noise_samples(
    white_psd_at_knee: float, knee_hz: float, fs: float, n: int, seed=None
) -> np.ndarray:
    """1/f noise equal to ``white_psd_at_knee`` at ``knee_hz``.

    Built from a sum of decade-spaced first-order filtered white sources,
    each started from its stationary distribution so there is no start-up
    transient. Returns zeros when ``knee_hz`` or the level is 0.
    """
    if n <= 0:
        raise ValueError("n must be > 0")
    if knee_hz >= fs / 2:
        raise ValueError(f"knee_hz={knee_hz} is at or above Nyquist ({fs / 2})")
    if knee_hz == 0 or white_psd_at_knee == 0:
        return np.zeros(n)
    rng = np.random.default_rng(seed)
    out = np.zeros(n)
    for a, g in flicker_sections(white_psd_at_knee, knee_hz, fs):
        w = rng.standard_normal(n)
        y_prev = rng.standard_normal() * g / math.sqrt(1 - a * a)
        y, _ = signal.lfilter([g], [1.0, -a], w, zi=[a * y_prev])
        out += y
    return out


def cds_filter(samples) -> np.ndarray:
    """First difference ``y[n] = x[n] - x[n-1]`` with ``x[-1] = 0``."""
    x = np.asarray(samples, dtype=float)
    if x.size < 2:
        raise ValueError("cds_filter needs at least 2 samples")
    y = x.copy()
    y[1:] -= x[:-1]
    return y


def amplifier_noise(noise: NoiseConfig, fs: float, n: int, cds: bool, seeds=None) -> np.ndarray:
    """Input-referred amplifier current (A) seen by the first integrator per clock.

    The amplifier is observed twice per clock (sample phase, then integrate
    phase), so the trace is built at ``2 * fs``: white noise drawn
    independently per phase, flicker synthesized at the phase rate, plus the
    static offset. With CDS the integrate-phase value has the sample-phase
    value subtracted (:func:`cds_filter` on the phase-rate trace, keeping the
    integrate phases). This cancels the offset exactly, suppresses 1/f noise,
    and doubles the power of the uncorrelated white part. Without CDS the
    integrate-phase values pass through.
    """
    seeds = seeds if seeds is not None else split_seed(None)
    m = 2 * n
    trace = np.full(m, float(noise.amp_offset_amp))
    if noise.amp_white_psd > 0:
        trace += white_noise_samples(noise.amp_white_psd, fs, m, seeds["amp_white"])
    if noise.flicker_enabled and noise.flicker_knee_hz > 0:
        trace += flicker_noise_samples(
            noise.amp_white_psd, noise.flicker_knee_hz, 2 * fs, m, seeds["flicker"]
        )
    if cds:
        trace = cds_filter(trace)
    return trace[1::2]
