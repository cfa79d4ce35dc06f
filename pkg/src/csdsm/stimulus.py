"""Input current waveforms and the nanopore front-end filter."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import signal

from .config import NanoporeModel


@dataclass(frozen=True, eq=False)
class Waveform:
    """Input current samples (A) at ``fs_hz``."""

    samples: np.ndarray
    fs_hz: float

    def __post_init__(self):
        x = np.asarray(self.samples, dtype=float)
        if x.ndim != 1 or x.size == 0:
            raise ValueError("waveform must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(x)):
            raise ValueError("waveform contains non-finite samples")
        object.__setattr__(self, "samples", x)

    def __len__(self):
        return self.samples.size

    @property
    def t(self) -> np.ndarray:
        return np.arange(self.samples.size) / self.fs_hz

    def __add__(self, other: "Waveform") -> "Waveform":
        if other.fs_hz != self.fs_hz:
            raise ValueError("sample rates differ")
        return Waveform(self.samples + other.samples, self.fs_hz)


def coherent_frequency(f_hz: float, fs_hz: float, n: int) -> float:
    """Snap ``f_hz`` to the nearest odd FFT bin ``k * fs / n``.

    An odd bin count keeps the tone from sharing a sub-period with the
    record length, so every sample phase is distinct.
    """
    x = f_hz * n / fs_hz
    lo = 2 * math.floor((x - 1) / 2) + 1
    k = lo if (x - lo) <= (lo + 2 - x) else lo + 2
    k_max = n // 2 - 1
    if k_max % 2 == 0:
        k_max -= 1
    return max(1, min(k, k_max)) * fs_hz / n


def gen_tone(
    amp_dbfs: float,
    f_sig_hz: float,
    fs_hz: float,
    n: int,
    full_scale_amp: float,
    phase_rad: float = 0.0,
    coherent: bool = False,
) -> Waveform:
    """Sine of peak ``full_scale_amp * 10**(amp_dbfs/20)``.

    Sample ``k`` is ``A * sin(2*pi*f*k/fs + phase)``. ``amp_dbfs=-inf`` yields
    an all-zero record. With ``coherent=True`` the frequency is first snapped
    by :func:`coherent_frequency`.
    """
    if n <= 0:
        raise ValueError("n must be > 0")
    if not 0 <= f_sig_hz < fs_hz / 2:
        raise ValueError(f"f_sig_hz={f_sig_hz} aliases at fs={fs_hz} (must be < fs/2)")
    if coherent:
        f_sig_hz = coherent_frequency(f_sig_hz, fs_hz, n)
    if amp_dbfs == -math.inf:
        return Waveform(np.zeros(n), fs_hz)
    amp = full_scale_amp * 10 ** (amp_dbfs / 20)
    k = np.arange(n)
    return Waveform(amp * np.sin(2 * np.pi * f_sig_hz * k / fs_hz + phase_rad), fs_hz)


def gen_dc(level_amp: float, fs_hz: float, n: int) -> Waveform:
    if n <= 0:
        raise ValueError("n must be > 0")
    return Waveform(np.full(n, float(level_amp)), fs_hz)


def gen_step(level_amp: float, fs_hz: float, n: int, start: int = 0) -> Waveform:
    """Zero until sample ``start``, then ``level_amp``."""
    x = np.zeros(n)
    x[start:] = level_amp
    return Waveform(x, fs_hz)


def nanopore_filter(w: Waveform, m: NanoporeModel) -> Waveform:
    """Apply the pore's single-pole low-pass, ``H(s) = 1 / (1 + s*tau)``.

    ``tau = r_pore_ohm * c_mem_farad``, discretized with the bilinear
    transform at the waveform rate (no prewarping). The filter starts in
    steady state with the first sample, so a constant input passes unchanged.
    """
    tau = m.tau_s
    if tau == 0:
        return Waveform(w.samples.copy(), w.fs_hz)
    if tau < 0.1 / w.fs_hz:
        warnings.warn(
            f"nanopore time constant {tau:.3g} s is under 0.1/fs; discretization is coarse",
            RuntimeWarning,
            stacklevel=2,
        )
    b, a = signal.bilinear([1.0], [tau, 1.0], fs=w.fs_hz)
    zi = signal.lfilter_zi(b, a) * w.samples[0]
    y, _ = signal.lfilter(b, a, w.samples, zi=zi)
    return Waveform(y, w.fs_hz)


def nanopore_source(m: NanoporeModel, fs_hz: float, n: int) -> Waveform:
    """Constant pore current ``v_bias / r_pore`` when the model drives the input."""
    return gen_dc(m.source_current_amp, fs_hz, n)
