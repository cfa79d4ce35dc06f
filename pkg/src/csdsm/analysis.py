"""Spectral metrics, CIC decimation and figure-of-merit arithmetic.

Power is expressed relative to a full-scale sine (``FS**2 / 2``), so a tone of
peak ``FS`` integrates to 0 dBFS.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np
from scipy import signal as sps

from .config import Bitstream, DecimatedRecord

# Bins aggregated on each side of a tone, per window.
SIGNAL_SPREAD = {"rect": 0, "hann": 3}
N_HARMONICS = 5
# A tone counts as present when its peak bin clears the median in-band
# noise bin by this factor.
TONE_DETECT_RATIO = 10.0


class DynamicRangeError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SpectrumReport:
    """One-sided averaged periodogram.

    ``psd`` is power per bin in dBFS; bins with zero power read ``-inf``.
    """

    freqs_hz: np.ndarray
    psd: np.ndarray
    n_fft: int
    window: str
    band_hz: float | None
    fs_hz: float
    full_scale: float = 1.0
    n_segments: int = 1

    @property
    def power(self) -> np.ndarray:
        """Linear power per bin relative to a full-scale sine."""
        return 10 ** (self.psd / 10)

    @property
    def bin_hz(self) -> float:
        return self.fs_hz / self.n_fft


@dataclass(frozen=True)
class ToneMetrics:
    sndr_db: float
    snr_db: float
    sfdr_db: float
    signal_dbfs: float
    noise_power: float
    tone_found: bool
    signal_bin: int

    def noise_rms(self, full_scale: float) -> float:
        """In-band noise RMS (excluding harmonics) in the units of ``full_scale``."""
        return full_scale * math.sqrt(self.noise_power / 2)


@dataclass(frozen=True)
class MetricsReport:
    sndr_db: float
    snr_db: float
    sfdr_db: float
    dr_db: float
    fom_db: float
    band_hz: float
    f_conv_hz: float
    power_watt: float

    def __post_init__(self):
        vals = (self.sndr_db, self.snr_db, self.sfdr_db, self.dr_db, self.fom_db)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("metrics must be finite")
        if self.sndr_db > self.snr_db + 0.01:
            raise ValueError("sndr_db cannot exceed snr_db")


def _is_pow2(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def _window(name: str, n: int) -> np.ndarray:
    if name == "hann":
        return sps.get_window("hann", n)  # periodic form
    if name == "rect":
        return np.ones(n)
    raise ValueError(f"unknown window {name!r}")


def psd_estimate(
    x,
    fs: float,
    window: str = "hann",
    n_fft: int | None = None,
    full_scale: float = 1.0,
    band_hz: float | None = None,
) -> SpectrumReport:
    """Averaged one-sided periodogram in dBFS per bin.

    Each segment's bins are scaled by ``1 / (n_fft * sum(w**2))`` (doubled
    away from DC and Nyquist). This is power normalization: bin powers sum to
    the window-weighted mean square, and a coherent full-scale tone reads
    0 dBFS in its bin under the rectangular window. Under Hann the same tone
    spreads over three bins that together sum to 0 dBFS.

    Records longer than ``n_fft`` are split into segments (50 % overlap for
    Hann, none for rect) and averaged.
    """
    x = np.asarray(x, dtype=float)
    if n_fft is None:
        n_fft = 1 << (x.size.bit_length() - 1) if x.size else 0
    if not _is_pow2(n_fft):
        raise ValueError("n_fft must be a power of two")
    if n_fft > x.size:
        raise ValueError(f"n_fft={n_fft} exceeds signal length {x.size}")
    w = _window(window, n_fft)
    hop = n_fft // 2 if window == "hann" else n_fft
    starts = range(0, x.size - n_fft + 1, hop)
    acc = np.zeros(n_fft // 2 + 1)
    for s in starts:
        acc += np.abs(np.fft.rfft(x[s : s + n_fft] * w)) ** 2
    p = acc / (len(starts) * n_fft * np.sum(w * w))
    p[1:-1] *= 2
    with np.errstate(divide="ignore"):
        psd = 10 * np.log10(p / (full_scale**2 / 2))
    freqs = np.fft.rfftfreq(n_fft, 1 / fs)
    return SpectrumReport(freqs, psd, n_fft, window, band_hz, fs, full_scale, len(starts))


def _group(k: int, h: int, kmax: int) -> np.ndarray:
    return np.arange(max(k - h, 0), min(k + h, kmax) + 1)


def sndr_in_band(spec: SpectrumReport, f_sig: float, band: float | None = None) -> ToneMetrics:
    """SNDR, SNR and SFDR of a tone within ``[0, band]``.

    Signal power is the tone bin plus ``SIGNAL_SPREAD[window]`` bins on each
    side; the same spread around DC is excluded. SNR further removes harmonics
    2 to ``N_HARMONICS + 1`` that land in band. SFDR compares the signal with
    the largest spur group of equal width. A tone that does not clear
    ``TONE_DETECT_RATIO`` times the median noise bin yields NaN metrics with
    ``tone_found=False``.
    """
    band = band if band is not None else spec.band_hz
    if band is None:
        raise ValueError("band not given")
    if not 0 < f_sig < band <= spec.fs_hz / 2:
        raise ValueError("need 0 < f_sig < band <= fs/2")
    p = spec.power
    h = SIGNAL_SPREAD[spec.window]
    kb = int(math.floor(band / spec.bin_hz + 1e-9))
    k0 = int(round(f_sig / spec.bin_hz))
    lo, hi = max(k0 - 1, h + 1), min(k0 + 1, kb)
    k_sig = lo + int(np.argmax(p[lo : hi + 1]))

    mask = np.zeros(kb + 1, dtype=bool)
    mask[: h + 1] = True  # DC
    sig_bins = _group(k_sig, h, kb)
    mask[sig_bins] = True
    p_sig = float(p[sig_bins].sum())

    harm = np.zeros(kb + 1, dtype=bool)
    for j in range(2, N_HARMONICS + 2):
        kh = j * k_sig
        if kh - h > kb:
            break
        harm[_group(kh, h, kb)] = True
    harm &= ~mask

    band_p = p[: kb + 1]
    rest = band_p[~mask]
    p_nd = float(rest.sum())
    p_harm = float(band_p[harm].sum())
    p_noise = p_nd - p_harm

    floor = float(np.median(rest)) if rest.size else 0.0
    found = p_sig > 0 and float(p[k_sig]) > TONE_DETECT_RATIO * floor
    if not found:
        nan = float("nan")
        return ToneMetrics(nan, nan, nan, nan, p_noise, False, k_sig)

    masked = np.where(mask, 0.0, band_p)
    spur = np.convolve(masked, np.ones(2 * h + 1), mode="same").max() if masked.size else 0.0

    def ratio(num, den):
        return math.inf if den <= 0 else 10 * math.log10(num / den)

    return ToneMetrics(
        sndr_db=ratio(p_sig, p_nd),
        snr_db=ratio(p_sig, p_noise),
        sfdr_db=ratio(p_sig, spur),
        signal_dbfs=10 * math.log10(p_sig),
        noise_power=p_noise,
        tone_found=True,
        signal_bin=k_sig,
    )


def inband_noise_power(spec: SpectrumReport, band: float, f_lo: float = 0.0) -> float:
    """Total power (full-scale-sine units) in bins ``f_lo < f <= band``, DC spread excluded."""
    h = SIGNAL_SPREAD[spec.window]
    k = np.arange(spec.freqs_hz.size)
    sel = (spec.freqs_hz <= band + 1e-9) & (spec.freqs_hz > f_lo) & (k > h)
    return float(spec.power[sel].sum())


def psd_slope_db_per_decade(spec: SpectrumReport, f_lo: float, f_hi: float, n_bins: int = 20) -> float:
    """Least-squares slope of the PSD over ``[f_lo, f_hi]`` on log-spaced averages."""
    edges = np.logspace(math.log10(f_lo), math.log10(f_hi), n_bins + 1)
    p = spec.power
    fc, lv = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        sel = (spec.freqs_hz >= a) & (spec.freqs_hz < b)
        if sel.any():
            fc.append(math.sqrt(a * b))
            lv.append(10 * math.log10(p[sel].mean()))
    if len(fc) < 2:
        raise ValueError("frequency range too narrow for the resolution")
    return float(np.polyfit(np.log10(fc), lv, 1)[0])


def cic_response(f, r: int, order: int, fs: float) -> np.ndarray:
    """Magnitude of the normalized CIC, ``|sin(pi f r/fs) / (r sin(pi f/fs))|**order``."""
    f = np.asarray(f, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        h = np.sin(np.pi * f * r / fs) / (r * np.sin(np.pi * f / fs))
    h = np.where(f == 0, 1.0, h)
    return np.abs(h) ** order


def compensate_cic_droop(spec: SpectrumReport, r: int, order: int, fs_in: float) -> SpectrumReport:
    """Divide a decimated-record spectrum by the CIC magnitude response.

    In-band SNDR of the compensated spectrum tracks the bitstream's within
    1 dB for bands up to ``0.8 * fs_in / (2 r)`` when the loop is noise
    limited; without compensation the droop hides band-edge noise.
    """
    h = cic_response(spec.freqs_hz, r, order, fs_in)
    with np.errstate(divide="ignore"):
        psd = spec.psd - 20 * np.log10(h)
    return dataclasses.replace(spec, psd=psd)


def decimate_cic(bits, r: int, order: int = 3, fs_hz: float | None = None) -> DecimatedRecord:
    """Cascaded integrator-comb decimator with unity DC gain.

    Output ``m`` is the length-``order*(r-1)+1`` sinc**order kernel applied
    at input index ``m*r + r - 1``, divided by ``r**order``. A
    :class:`Bitstream` is processed in wrapping 64-bit integer arithmetic
    (exact for any length, as with hardware CIC registers); float input goes
    through direct convolution.
    """
    if isinstance(bits, Bitstream):
        x = bits.bits
        fs_hz = bits.fs_hz
    else:
        x = np.asarray(bits)
        if fs_hz is None:
            raise ValueError("fs_hz required for array input")
    if order < 1:
        raise ValueError("order must be >= 1")
    if r < 1 or x.size % r:
        raise ValueError(f"decimation ratio {r} does not divide length {x.size}")
    gain = r**order
    if np.issubdtype(x.dtype, np.integer):
        acc = x.astype(np.int64)
        with np.errstate(over="ignore"):
            for _ in range(order):
                acc = np.cumsum(acc, dtype=np.int64)
            y = acc[r - 1 :: r]
            for _ in range(order):
                y = np.diff(y, prepend=np.int64(0))
        out = y.astype(float) / gain
    else:
        kernel = np.ones(1)
        for _ in range(order):
            kernel = np.convolve(kernel, np.ones(r))
        full = sps.oaconvolve(x.astype(float), kernel)[: x.size]
        out = full[r - 1 :: r] / gain
    return DecimatedRecord(out, fs_hz / r, r, fs_hz)


def dynamic_range(sweep, tol_db: float = 1.5) -> float:
    """Dynamic range from an SNDR-versus-level sweep.

    A line of slope 1 dB/dB is fitted to the linear region and DR is minus its
    dBFS intercept at SNDR = 0, i.e. the mean of ``sndr - amp`` over that
    region. The region is the set of points within ``tol_db`` of the median
    offset, which drops both the compression knee near full scale and any
    floor-limited points at the bottom.

    Parameters
    ----------
    sweep : iterable of (amp_dbfs, sndr_db)
        Non-finite SNDR entries (no tone found) are ignored.
    """
    pts = np.array([(a, s) for a, s in sweep if math.isfinite(a) and math.isfinite(s)], dtype=float)
    if pts.shape[0] < 2:
        raise DynamicRangeError("need at least two finite sweep points")
    pts = pts[np.argsort(pts[:, 0])]
    off = pts[:, 1] - pts[:, 0]
    lin = np.abs(off - np.median(off)) <= tol_db
    if lin.sum() < 2:
        raise DynamicRangeError("no linear region found")
    region = pts[lin]
    if np.any(np.diff(region[:, 1]) <= 0):
        raise DynamicRangeError("SNDR is not monotone over the linear region")
    return float(np.mean(region[:, 1] - region[:, 0]))


def cross_scale_dr(i_max: float, i_min: float) -> float:
    """Dynamic range spanned across reference ranges, ``20 log10(i_max/i_min)``."""
    if not (i_max > 0 and i_min > 0):
        raise ValueError("currents must be > 0")
    return 20 * math.log10(i_max / i_min)


def fom_schreier(dr_db: float, f_conv_hz: float, power_watt: float) -> float:
    """Schreier figure of merit, ``DR + 10 log10(f_conv / 2 / P)``."""
    if not (f_conv_hz > 0 and power_watt > 0):
        raise ValueError("f_conv_hz and power_watt must be > 0")
    return dr_db + 10 * math.log10(f_conv_hz / 2 / power_watt)


def min_detectable_signal(inband_noise_rms: float) -> float:
    """Tone amplitude whose power equals the in-band noise power."""
    if inband_noise_rms < 0:
        raise ValueError("noise must be >= 0")
    return math.sqrt(2) * inband_noise_rms
