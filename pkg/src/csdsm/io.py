"""CSV and key=value text formats.

Every CSV starts with one ``#``-prefixed metadata line of space-separated
``key=value`` pairs, so files are self-describing.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .analysis import SpectrumReport
from .config import Bitstream, DecimatedRecord
from .stimulus import Waveform


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _parse(s: str):
    if s in ("true", "false"):
        return s == "true"
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


def meta_line(**meta) -> str:
    return "# " + " ".join(f"{k}={_fmt(v)}" for k, v in meta.items())


def read_meta(path) -> dict:
    with open(path) as fh:
        first = fh.readline().strip()
    if not first.startswith("#"):
        return {}
    return {k: _parse(v) for k, v in (tok.split("=", 1) for tok in first[1:].split())}


def _write(path, meta: dict, header: str | None, data: np.ndarray, fmt):
    path = Path(path)
    with open(path, "w", newline="\n") as fh:
        fh.write(meta_line(**meta) + "\n")
        if header:
            fh.write(header + "\n")
        np.savetxt(fh, data, fmt=fmt, delimiter=",")


def _read(path, skip_header: bool) -> np.ndarray:
    return np.loadtxt(path, comments="#", delimiter=",", skiprows=1 + int(skip_header), ndmin=1)


def write_waveform_csv(path, w: Waveform):
    _write(path, {"fs_hz": float(w.fs_hz), "n": len(w)}, "time_s,current_a",
           np.column_stack([w.t, w.samples]), "%.17g")


def read_waveform_csv(path) -> Waveform:
    meta = read_meta(path)
    data = np.loadtxt(path, comments="#", delimiter=",", skiprows=2, ndmin=2)
    fs = meta.get("fs_hz")
    if fs is None:
        fs = 1.0 / (data[1, 0] - data[0, 0])
    return Waveform(data[:, 1], float(fs))


def write_bitstream_csv(path, b: Bitstream, **extra):
    _write(path, {"fs_hz": float(b.fs_hz), "full_scale_amp": float(b.full_scale_amp), **extra},
           None, b.bits.astype(int), "%d")


def read_bitstream_csv(path) -> Bitstream:
    meta = read_meta(path)
    bits = np.loadtxt(path, comments="#", dtype=np.int8, ndmin=1)
    return Bitstream(bits, float(meta["fs_hz"]), float(meta["full_scale_amp"]))


def write_decimated_csv(path, d: DecimatedRecord, **extra):
    meta = {"rate_hz": float(d.rate_hz), "osr": d.osr, "fs_hz": float(d.fs_hz), **extra}
    _write(path, meta, "sample", d.samples, "%.17g")


def read_decimated_csv(path) -> DecimatedRecord:
    meta = read_meta(path)
    return DecimatedRecord(_read(path, True), float(meta["rate_hz"]), int(meta["osr"]), float(meta["fs_hz"]))


def write_spectrum_csv(path, s: SpectrumReport, **extra):
    meta = {"fs_hz": float(s.fs_hz), "n_fft": s.n_fft, "window": s.window,
            "full_scale": float(s.full_scale), **extra}
    if s.band_hz is not None:
        meta["band_hz"] = float(s.band_hz)
    _write(path, meta, "freq_hz,psd_dbfs", np.column_stack([s.freqs_hz, s.psd]), "%.17g")


def read_spectrum_csv(path) -> SpectrumReport:
    meta = read_meta(path)
    data = np.loadtxt(path, comments="#", delimiter=",", skiprows=2, ndmin=2)
    return SpectrumReport(data[:, 0], data[:, 1], int(meta["n_fft"]), meta["window"],
                          meta.get("band_hz"), float(meta["fs_hz"]), float(meta.get("full_scale", 1.0)))


def write_sweep_csv(path, sweep, **extra):
    _write(path, dict(extra), "amp_dbfs,sndr_db", np.asarray(sweep, dtype=float).reshape(-1, 2), "%.17g")


def read_sweep_csv(path) -> list[tuple[float, float]]:
    data = np.loadtxt(path, comments="#", delimiter=",", skiprows=2, ndmin=2)
    return [(float(a), float(s)) for a, s in data]


def write_noise_csv(path, samples, fs_hz: float, **extra):
    x = np.asarray(samples, dtype=float)
    _write(path, {"fs_hz": float(fs_hz), **extra}, "time_s,noise_a",
           np.column_stack([np.arange(x.size) / fs_hz, x]), "%.17g")


def write_kv(path, values: dict):
    """Flat ``key=value`` text block, one pair per line."""
    lines = [f"{k}={_fmt(v)}" for k, v in values.items()]
    Path(path).write_text("\n".join(lines) + "\n")


def read_kv(path) -> dict:
    out = {}
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        k, _, v = line.partition("=")
        out[k.strip()] = _parse(v.strip())
    return out
