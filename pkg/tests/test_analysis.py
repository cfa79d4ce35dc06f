import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import signal

from csdsm.analysis import (
    DynamicRangeError,
    MetricsReport,
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
from csdsm.bench import simulate_tone
from csdsm.config import Bitstream
from csdsm.stimulus import coherent_frequency

FS = 1.024e6
N = 1 << 16


def tone(amp, f, n=N, phase=0.3):
    return amp * np.sin(2 * np.pi * f * np.arange(n) / FS + phase)


def test_full_scale_coherent_tone_rect_reads_0_dbfs():
    f = 101 * FS / N
    spec = psd_estimate(tone(1.0, f), FS, "rect", N)
    assert spec.psd[101] == pytest.approx(0.0, abs=0.01)


def test_full_scale_tone_hann_three_bins_sum_to_0_dbfs():
    f = 101 * FS / N
    spec = psd_estimate(tone(2.5, f), FS, "hann", N, full_scale=2.5)
    assert 10 * np.log10(spec.power[100:103].sum()) == pytest.approx(0.0, abs=0.01)


def test_zero_signal_reads_minus_inf():
    spec = psd_estimate(np.zeros(256), FS, "rect")
    assert np.all(np.isneginf(spec.psd))


@pytest.mark.parametrize("n_fft", [300, 512])
def test_bad_fft_length(n_fft):
    with pytest.raises(ValueError):
        psd_estimate(np.zeros(256), FS, "rect", n_fft)


def test_unknown_window():
    with pytest.raises(ValueError):
        psd_estimate(np.zeros(256), FS, "kaiser")


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), log2n=st.integers(4, 12), scale=st.floats(1e-3, 1e3))
def test_parseval_rect(seed, log2n, scale):
    n = 1 << log2n
    x = scale * np.random.default_rng(seed).standard_normal(n)
    spec = psd_estimate(x, FS, "rect", n)
    # bins are relative to FS^2/2 with FS = 1
    assert spec.power.sum() / 2 == pytest.approx(np.mean(x**2), rel=1e-3)


def test_white_noise_integrates_to_variance_hann():
    sigma = 3e-3
    x = sigma * np.random.default_rng(0).standard_normal(1 << 18)
    spec = psd_estimate(x, FS, "hann", 4096)
    assert spec.n_segments == 2 * (1 << 18) // 4096 - 1
    assert spec.power.sum() / 2 == pytest.approx(sigma**2, rel=0.02)


def test_psd_matches_scipy_periodogram():
    x = np.random.default_rng(1).standard_normal(2048)
    spec = psd_estimate(x, FS, "hann", 2048)
    # power normalization equals density scaling times the bin width
    f, p = signal.periodogram(x, FS, window="hann", scaling="density", detrend=False)
    np.testing.assert_allclose(spec.power[1:-1] / 2, p[1:-1] * FS / 2048, rtol=1e-10)


def test_sndr_tone_80db_above_flat_floor():
    # tone power A^2/2 over white noise sigma^2 spread evenly to fs/2
    amp, band = 0.5, 4e3
    f = coherent_frequency(1.9e3, FS, 1 << 18)
    target = 80.0
    noise_inband = amp**2 / 2 / 10 ** (target / 10)
    sigma = math.sqrt(noise_inband * (FS / 2) / band)
    x = tone(amp, f, 1 << 18) + sigma * np.random.default_rng(2).standard_normal(1 << 18)
    m = sndr_in_band(psd_estimate(x, FS, "hann", 1 << 18), f, band)
    assert m.tone_found
    assert m.sndr_db == pytest.approx(80.0, abs=0.5)


def test_single_harmonic_40db_down():
    f = 21 * FS / N
    x = tone(0.5, f) + tone(0.005, 3 * f, phase=1.0)
    m = sndr_in_band(psd_estimate(x, FS, "rect", N), f, 4e3)
    assert m.sndr_db == pytest.approx(40.0, abs=0.1)
    assert m.sfdr_db == pytest.approx(40.0, abs=0.1)
    assert m.snr_db > 200
    assert m.sndr_db <= m.snr_db


def test_sixth_harmonic_excluded_but_seventh_counts():
    f = 11 * FS / N
    x6 = tone(0.5, f) + tone(0.005, 6 * f)
    x7 = tone(0.5, f) + tone(0.005, 7 * f)
    assert sndr_in_band(psd_estimate(x6, FS, "rect", N), f, 4e3).snr_db > 200
    assert sndr_in_band(psd_estimate(x7, FS, "rect", N), f, 4e3).snr_db == pytest.approx(40, abs=0.1)


def test_no_tone_is_flagged():
    x = np.random.default_rng(3).standard_normal(N)
    m = sndr_in_band(psd_estimate(x, FS, "hann", N), 1.9e3, 4e3)
    assert not m.tone_found
    assert math.isnan(m.sndr_db)


def test_band_preconditions():
    spec = psd_estimate(tone(1, 1e3), FS, "hann", N)
    with pytest.raises(ValueError):
        sndr_in_band(spec, 5e3, 4e3)
    with pytest.raises(ValueError):
        sndr_in_band(spec, 1e3, FS)
    with pytest.raises(ValueError):
        sndr_in_band(spec, 1e3)  # no band recorded


def test_noise_rms_and_mds():
    assert min_detectable_signal(0.0) == 0.0
    assert min_detectable_signal(1e-12) == pytest.approx(1.414e-12, rel=1e-3)
    with pytest.raises(ValueError):
        min_detectable_signal(-1.0)


def test_inband_noise_power_of_white():
    sigma = 1e-2
    x = sigma * np.random.default_rng(4).standard_normal(1 << 18)
    spec = psd_estimate(x, FS, "hann", 1 << 14)
    expected = 2 * sigma**2 * 4e3 / (FS / 2)  # full-scale-sine units
    assert inband_noise_power(spec, 4e3) == pytest.approx(expected, rel=0.1)


def test_slope_of_integrated_noise():
    # cumulative sum of white noise has a -20 dB/decade spectrum
    x = np.cumsum(np.random.default_rng(5).standard_normal(1 << 18))
    x -= np.mean(x)
    spec = psd_estimate(x, FS, "hann", 1 << 14)
    assert psd_slope_db_per_decade(spec, 5e3, 50e3) == pytest.approx(-20, abs=1.5)


def test_noiseless_modulator_sqnr_and_slope(cfg):
    r = simulate_tone(cfg, None, -5, 1.9e3, N)
    assert r.metrics.sndr_db >= 85.0
    assert psd_slope_db_per_decade(r.spectrum, 10e3, 100e3) == pytest.approx(40, abs=5)


# --- CIC ---------------------------------------------------------------------


def test_cic_dc_gain_and_rate():
    b = Bitstream(np.ones(128 * 20, dtype=np.int8), FS, 1.0)
    d = decimate_cic(b, 128, 3)
    assert d.rate_hz == 8000.0
    assert np.all(d.samples[3:] == 1.0)
    assert d.samples.size == 20


def test_cic_integer_path_matches_convolution_oracle():
    rng = np.random.default_rng(6)
    bits = np.where(rng.random(64 * 50) > 0.4, 1, -1).astype(np.int8)
    r, order = 64, 3
    kernel = np.ones(1)
    for _ in range(order):
        kernel = np.convolve(kernel, np.ones(r))
    oracle = np.convolve(bits.astype(float), kernel)[: bits.size][r - 1 :: r] / r**order
    got = decimate_cic(Bitstream(bits, FS, 1.0), r, order).samples
    np.testing.assert_allclose(got, oracle, rtol=0, atol=1e-12)
    float_path = decimate_cic(bits.astype(float), r, order, fs_hz=FS).samples
    np.testing.assert_allclose(float_path, oracle, rtol=0, atol=1e-9)


def test_cic_rejects_bad_ratio():
    with pytest.raises(ValueError, match="divide"):
        decimate_cic(Bitstream(np.ones(100, dtype=np.int8), FS, 1.0), 128)
    with pytest.raises(ValueError):
        decimate_cic(np.ones(128), 128)  # no rate for a bare array


def test_cic_response_matches_scipy_freqz():
    r, order = 128, 3
    kernel = np.ones(1)
    for _ in range(order):
        kernel = np.convolve(kernel, np.ones(r))
    f = np.array([0.0, 100.0, 1e3, 3.8e3, 7.9e3])
    _, h = signal.freqz(kernel / r**order, worN=f, fs=FS)
    np.testing.assert_allclose(cic_response(f, r, order, FS), np.abs(h), rtol=1e-9)


def test_cic_droop_at_3k8_measured():
    # drive the decimator with a tone and compare output amplitude to the sinc^3 law
    r, order, f = 128, 3, 3.8e3
    n = r * 4096
    x = np.sin(2 * np.pi * f * np.arange(n) / FS)
    y = decimate_cic(x, r, order, fs_hz=FS).samples[16:]
    t = (np.arange(y.size) + 16) * r
    basis = np.column_stack([np.sin(2 * np.pi * f * t / FS), np.cos(2 * np.pi * f * t / FS)])
    amp = np.hypot(*np.linalg.lstsq(basis, y, rcond=None)[0])
    closed = (np.sin(np.pi * f * r / FS) / (r * np.sin(np.pi * f / FS))) ** order
    assert 20 * np.log10(amp) == pytest.approx(20 * np.log10(abs(closed)), abs=0.05)


def test_decimated_sndr_tracks_bitstream(cfg, op_noise):
    """Decimate then estimate: in-band SNDR within 1 dB once CIC droop is undone."""
    n = 1 << 17
    band = 0.8 * cfg.fs_hz / (2 * cfg.osr)
    run_ = simulate_tone(cfg, op_noise, -5, 1.9e3, n, seed=1, band_hz=band)
    d = decimate_cic(run_.bitstream, cfg.osr, 3)
    spec = psd_estimate(d.samples, d.rate_hz, "hann", d.samples.size, band_hz=band)
    spec = compensate_cic_droop(spec, cfg.osr, 3, cfg.fs_hz)
    m = sndr_in_band(spec, run_.f_sig_hz, band)
    assert m.sndr_db == pytest.approx(run_.metrics.sndr_db, abs=1.0)


# --- DR and FoM --------------------------------------------------------------


@pytest.mark.parametrize("intercept", [0.0, 81.0, 112.2])
def test_dr_of_ideal_sweep(intercept):
    sweep = [(a, a + intercept) for a in range(-100, 1, 5)]
    assert dynamic_range(sweep) == pytest.approx(intercept, abs=1e-9)


def test_dr_excludes_knee_and_floor():
    amps = np.arange(-110, 1, 5.0)
    sndr = amps + 81
    sndr = np.where(amps > -10, 81 - 10 - 3 * (amps + 10), sndr)  # compression
    sndr = np.where(amps < -80, np.nan, sndr)  # no tone
    assert dynamic_range(zip(amps, sndr)) == pytest.approx(81, abs=0.5)


def test_dr_errors():
    with pytest.raises(DynamicRangeError):
        dynamic_range([(-10, 70)])
    with pytest.raises(DynamicRangeError):
        dynamic_range([(-20, 60), (-10, 60), (0, 60)])  # offsets shift 10 dB per point


@settings(max_examples=40)
@given(
    c=st.floats(-20, 150),
    jitter=st.lists(st.floats(-0.5, 0.5), min_size=6, max_size=20),
)
def test_dr_is_mean_offset_under_small_jitter(c, jitter):
    amps = np.arange(len(jitter)) * 5.0 - 100
    sweep = list(zip(amps, amps + c + np.array(jitter)))
    assert dynamic_range(sweep) == pytest.approx(c + np.mean(jitter), abs=1e-9)


@pytest.mark.parametrize(
    "imax,imin,expected",
    [(1e-6, 0.6e-12, 124.437), (1e-9, 1e-9, 0.0), (10e-6, 0.122e-12, 158.27)],
)
def test_cross_scale_dr(imax, imin, expected):
    assert cross_scale_dr(imax, imin) == pytest.approx(expected, abs=0.01)


def test_cross_scale_rejects_nonpositive():
    with pytest.raises(ValueError):
        cross_scale_dr(0, 1)


@pytest.mark.parametrize(
    "dr,fc,printed",
    [(81, 4e3, 153), (72, 15e3, 150), (125, 4e3, 197), (112.2, 15e3, 190)],
)
def test_fom_reproduces_table_values(dr, fc, printed):
    assert fom_schreier(dr, fc, 125e-6) == pytest.approx(printed, abs=0.5)


def test_fom_exact_value():
    assert fom_schreier(81, 4e3, 125e-6) == pytest.approx(81 + 10 * math.log10(1.6e7), abs=1e-12)
    assert fom_schreier(81, 4e3, 125e-6) == pytest.approx(153.04, abs=0.005)


@given(dr=st.floats(0, 200), fc=st.floats(1, 1e7), p=st.floats(1e-9, 1), d=st.floats(0.01, 10))
def test_fom_monotone(dr, fc, p, d):
    base = fom_schreier(dr, fc, p)
    assert fom_schreier(dr + d, fc, p) > base
    assert fom_schreier(dr, fc * (1 + d), p) > base
    assert fom_schreier(dr, fc, p * (1 + d)) < base


def test_fom_rejects_nonpositive():
    with pytest.raises(ValueError):
        fom_schreier(81, 4e3, 0)


def test_metrics_report_invariants():
    MetricsReport(78, 78.5, 90, 83, 155, 4e3, 4e3, 125e-6)
    with pytest.raises(ValueError):
        MetricsReport(80, 79, 90, 83, 155, 4e3, 4e3, 125e-6)
    with pytest.raises(ValueError):
        MetricsReport(float("nan"), 79, 90, 83, 155, 4e3, 4e3, 125e-6)
