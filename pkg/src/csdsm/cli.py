"""Command-line front end: ``csdsm simulate | sweep | report``.

Exit codes: 0 success, 2 configuration error, 3 modulator instability,
4 missing inputs.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import io
from .analysis import (
    DynamicRangeError,
    cross_scale_dr,
    decimate_cic,
    dynamic_range,
    fom_schreier,
    min_detectable_signal,
)
from .bench import amplitude_sweep, simulate_tone
from .config import (
    I_REF_MAX,
    ConfigError,
    ModulatorConfig,
    NanoporeModel,
    NoiseConfig,
    config_to_mapping,
    effective_full_scale,
    load_config,
)
from .modulator import ModulatorUnstable

EXIT_OK, EXIT_CONFIG, EXIT_UNSTABLE, EXIT_MISSING = 0, 2, 3, 4

CIC_ORDER = 3
# Published figures for this converter; area and channel count are not modeled.
PUBLISHED = {
    "power_uw": 125.0,
    "supply_v": 1.0,
    "channels": 4,
    "area_mm2": 0.042,
    "max_input_a": 1e-6,
    "ref_min_input_a": 10e-9,
    "min_input_pa": 0.6,
    "sndr_db": 80.0,
    "dr_fixed_db": 81.0,
    "dr_cross_db": 125.0,
    "fom_fixed_db": 153.0,
    "fom_cross_db": 197.0,
}
# (DR, F_conv) pairs printed for this work, with the printed FoM.
PUBLISHED_FOM_ROWS = [
    ("fixed @4kHz", 81.0, 4e3, 153.0),
    ("fixed @15kHz", 72.0, 15e3, 150.0),
    ("cross-scale @4kHz", 125.0, 4e3, 197.0),
    ("cross-scale @15kHz", 112.2, 15e3, 190.0),
]
COMPARISON_WORKS = """\
Comparison works (quoted, not simulated):
  [1] 295 uW, 1.8 V, 0.2 mm2, max 10 uA, min 123 pA @3.6kHz / 0.122 pA @3.6Hz,
      DR 100@3.6kHz .. 160@3.6Hz, FoM 167@3.6kHz .. 197@3.6Hz
  [2] 1011 uW, 1.2 V, 0.585 mm2, max 200 uA, min 25 pA @4kHz / 7.75 pA @512Hz,
      DR 127@15kHz .. 150@512Hz, FoM 196@15kHz .. 204@512Hz
  [6] 5220 uW, 1.8 V, 0.091 mm2, max 11.6 uA, min 0.204 pA @200Hz,
      DR 155@200Hz, FoM 194@200Hz
"""


class MissingInputs(Exception):
    def __init__(self, names):
        super().__init__("missing inputs: " + ", ".join(names))
        self.names = names


@dataclass(frozen=True)
class RunManifest:
    config_path: str
    command: str
    out_dir: str
    seed: int
    timestamp: str


def _load(path) -> tuple[ModulatorConfig, NoiseConfig, NanoporeModel]:
    if path is None:
        return ModulatorConfig(), NoiseConfig(), NanoporeModel()
    p = Path(path)
    if not p.is_file():
        raise ConfigError("--config", f"config file not found: {p}")
    return load_config(p)


def _timestamp() -> str:
    # SOURCE_DATE_EPOCH pins the manifest time for reproducible reruns
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    when = datetime.fromtimestamp(int(epoch), timezone.utc) if epoch else datetime.now(timezone.utc)
    return when.isoformat()


def _prepare_out(args, command: str, seed: int, cfgs) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(
        str(args.config) if args.config else "",
        command,
        str(out),
        seed,
        _timestamp(),
    )
    doc = asdict(manifest) | {"config": config_to_mapping(*cfgs)}
    (out / "manifest.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return out


def cmd_simulate(args) -> int:
    cfg, noise, pore = _load(args.config)
    seed = cfg.seed if args.seed is None else args.seed
    out = _prepare_out(args, "simulate", seed, (cfg, noise, pore))
    meta = {"seed": seed}
    try:
        tr = simulate_tone(
            cfg, noise, args.amp_dbfs, args.freq_hz, args.n, seed=seed,
            coherent=args.coherent, nanopore=pore,
        )
    except ModulatorUnstable as exc:
        if exc.bitstream is not None:
            io.write_bitstream_csv(out / "bitstream_partial.csv", exc.bitstream, **meta)
        print(f"error: modulator unstable: {exc}", file=sys.stderr)
        return EXIT_UNSTABLE

    io.write_bitstream_csv(out / "bitstream.csv", tr.bitstream, **meta)
    n_dec = len(tr.bitstream) - len(tr.bitstream) % cfg.osr
    dec = decimate_cic(tr.bitstream.bits[:n_dec], cfg.osr, CIC_ORDER, fs_hz=cfg.fs_hz)
    io.write_decimated_csv(out / "decimated.csv", dec, full_scale_amp=cfg.full_scale_amp, **meta)
    io.write_spectrum_csv(out / "spectrum.csv", tr.spectrum, full_scale_amp=cfg.full_scale_amp, **meta)

    m = tr.metrics
    noise_rms = m.noise_rms(cfg.full_scale_amp)
    io.write_kv(out / "metrics.txt", {
        "sndr_db": m.sndr_db,
        "snr_db": m.snr_db,
        "sfdr_db": m.sfdr_db,
        "signal_dbfs": m.signal_dbfs,
        "tone_found": m.tone_found,
        "band_hz": cfg.band_hz,
        "f_sig_hz": tr.f_sig_hz,
        "amp_dbfs": args.amp_dbfs,
        "n": args.n,
        "fs_hz": cfg.fs_hz,
        "i_ref_amp": cfg.i_ref_amp,
        "alpha": cfg.alpha,
        "full_scale_amp": cfg.full_scale_amp,
        "inband_noise_rms_amp": noise_rms,
        "mds_amp": min_detectable_signal(noise_rms),
        "seed": seed,
    })
    print(f"SNDR {m.sndr_db:.2f} dB, SNR {m.snr_db:.2f} dB, SFDR {m.sfdr_db:.2f} dB "
          f"in {cfg.band_hz:g} Hz -> {out}")
    return EXIT_OK


def sweep_levels(lo: float, hi: float, step: float) -> np.ndarray:
    if not (-120 <= lo <= 0 and -120 <= hi <= 0):
        raise ConfigError("--from/--to", "range must lie within [-120, 0] dBFS")
    if step <= 0 or hi < lo:
        raise ConfigError("--from/--to/--step", "empty amplitude range")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(count)


def cmd_sweep(args) -> int:
    cfg, noise, pore = _load(args.config)
    seed = cfg.seed if args.seed is None else args.seed
    amps = sweep_levels(args.lo, args.hi, args.step)
    out = _prepare_out(args, "sweep", seed, (cfg, noise, pore))
    if args.synthetic_dr is not None:
        sweep = [(float(a), float(a) + args.synthetic_dr) for a in amps]
    else:
        try:
            sweep = amplitude_sweep(cfg, noise, amps, args.freq_hz, args.n, seed=seed, jobs=args.jobs)
        except ModulatorUnstable as exc:
            print(f"error: modulator unstable: {exc}", file=sys.stderr)
            return EXIT_UNSTABLE
    io.write_sweep_csv(out / "sweep.csv", sweep, fs_hz=cfg.fs_hz, full_scale_amp=cfg.full_scale_amp,
                       band_hz=cfg.band_hz, seed=seed)
    try:
        dr = dynamic_range(sweep)
    except DynamicRangeError as exc:
        print(f"warning: {exc}", file=sys.stderr)
        dr = float("nan")
    io.write_kv(out / "dr.txt", {"dr_db": dr, "band_hz": cfg.band_hz, "n_points": len(sweep), "seed": seed})
    print(f"DR {dr:.2f} dB from {len(sweep)} points -> {out}")
    return EXIT_OK


def build_report(cfg: ModulatorConfig, metrics: dict, dr: dict) -> str:
    """Table-I style comparison of simulated figures with the printed ones."""
    need = [("metrics.sndr_db", metrics, "sndr_db"), ("metrics.mds_amp", metrics, "mds_amp"),
            ("metrics.band_hz", metrics, "band_hz"), ("dr.dr_db", dr, "dr_db")]
    missing = [label for label, src, key in need if key not in src]
    if missing:
        raise MissingInputs(missing)

    band = float(metrics["band_hz"])
    max_in = effective_full_scale(I_REF_MAX, cfg.alpha)
    mds = float(metrics["mds_amp"])
    dr_fixed = float(dr["dr_db"])
    dr_cross = cross_scale_dr(max_in, mds) if mds > 0 else math.inf
    rows = [
        ("Power/channel [uW]", cfg.power_watt * 1e6, PUBLISHED["power_uw"]),
        ("Supply [V]", cfg.supply_volt, PUBLISHED["supply_v"]),
        ("Number of channels", PUBLISHED["channels"], PUBLISHED["channels"]),
        ("Active area/channel [mm2]", PUBLISHED["area_mm2"], PUBLISHED["area_mm2"]),
        ("Max input [uA]", max_in * 1e6, PUBLISHED["max_input_a"] * 1e6),
        ("Reference for min input [nA]", cfg.i_ref_amp * 1e9, PUBLISHED["ref_min_input_a"] * 1e9),
        (f"Min input @{band / 1e3:g}kHz [pA]", mds * 1e12, PUBLISHED["min_input_pa"]),
        (f"SNDR @{band / 1e3:g}kHz [dB]", float(metrics["sndr_db"]), PUBLISHED["sndr_db"]),
        (f"Fixed DR @{band / 1e3:g}kHz [dB]", dr_fixed, PUBLISHED["dr_fixed_db"]),
        (f"Cross-scale DR @{band / 1e3:g}kHz [dB]", dr_cross, PUBLISHED["dr_cross_db"]),
        ("Fixed FoM_Schreier [dB]", fom_schreier(dr_fixed, band, cfg.power_watt), PUBLISHED["fom_fixed_db"]),
        ("Cross-scale FoM_Schreier [dB]", fom_schreier(dr_cross, band, cfg.power_watt), PUBLISHED["fom_cross_db"]),
    ]
    lines = ["PERFORMANCE SUMMARY (this work, simulated vs printed)",
             f"{'quantity':<34}{'computed':>12}{'published':>11}{'delta':>10}"]
    for name, val, ref in rows:
        lines.append(f"{name:<34}{val:>12.6g}{ref:>11.4g}{val - ref:>+10.3f}")
    lines += ["", "Printed DR values through the FoM formula",
              f"{'entry':<34}{'computed':>12}{'published':>11}{'delta':>10}"]
    for name, d, fc, ref in PUBLISHED_FOM_ROWS:
        val = fom_schreier(d, fc, PUBLISHED["power_uw"] * 1e-6)
        lines.append(f"{'FoM ' + name:<34}{val:>12.2f}{ref:>11.4g}{val - ref:>+10.2f}")
    xs = cross_scale_dr(PUBLISHED["max_input_a"], PUBLISHED["min_input_pa"] * 1e-12)
    lines.append(f"{'Cross-scale DR (1 uA / 0.6 pA)':<34}{xs:>12.2f}{PUBLISHED['dr_cross_db']:>10.4g}"
                 f"{xs - PUBLISHED['dr_cross_db']:>+10.2f}")
    lines += ["", COMPARISON_WORKS]
    return "\n".join(lines)


def cmd_report(args) -> int:
    cfg, noise, pore = _load(args.config)
    out = Path(args.out)
    metrics_path = Path(args.metrics) if args.metrics else out / "metrics.txt"
    dr_path = Path(args.dr) if args.dr else out / "dr.txt"
    missing = [str(p) for p in (metrics_path, dr_path) if not p.is_file()]
    if missing:
        raise MissingInputs(missing)
    text = build_report(cfg, io.read_kv(metrics_path), io.read_kv(dr_path))
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.txt").write_text(text + "\n")
    print(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="flat TOML config file")
    common.add_argument("--out", metavar="DIR", default="out", help="output directory")
    common.add_argument("--seed", type=int, default=None, help="overrides the config seed")
    common.add_argument("--jobs", type=int, default=1, help="parallel sweep workers")

    p = argparse.ArgumentParser(prog="csdsm", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", parents=[common], help="one tone: bitstream, spectrum, metrics")
    s.add_argument("--amp-dbfs", type=float, default=-5.0)
    s.add_argument("--freq-hz", type=float, default=1.9e3)
    s.add_argument("--n", type=int, default=1 << 16, help="number of modulator clocks")
    s.add_argument("--coherent", action="store_true", help="snap the tone to an odd FFT bin")
    s.set_defaults(func=cmd_simulate)

    w = sub.add_parser("sweep", parents=[common], help="SNDR versus input level and fitted DR")
    w.add_argument("--from", dest="lo", type=float, default=-90.0)
    w.add_argument("--to", dest="hi", type=float, default=-5.0)
    w.add_argument("--step", type=float, default=5.0)
    w.add_argument("--freq-hz", type=float, default=1.9e3)
    w.add_argument("--n", type=int, default=1 << 16)
    w.add_argument("--synthetic-dr", type=float, default=None, metavar="DB",
                   help="skip simulation; feed the fit an ideal sweep with this intercept")
    w.set_defaults(func=cmd_sweep)

    r = sub.add_parser("report", parents=[common], help="Table-I style summary")
    r.add_argument("--metrics", metavar="PATH", help="metrics.txt (default: OUT/metrics.txt)")
    r.add_argument("--dr", metavar="PATH", help="dr.txt (default: OUT/dr.txt)")
    r.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MissingInputs as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING


if __name__ == "__main__":
    sys.exit(main())
