"""The calibrated operating point: spectrum, SNDR sweep, dynamic range, FoM.

Absolute amplifier noise is not known, so its white level was solved for once
(csdsm.bench.calibrate_amp_white_psd) and frozen in configs/operating_point.toml.
Everything below is computed from that single file.
"""

import os
from pathlib import Path

import numpy as np

from csdsm import dynamic_range, fom_schreier, load_config
from csdsm.bench import amplitude_sweep, simulate_tone
from csdsm.cli import build_report

cfg, noise, _ = load_config(Path(__file__).resolve().parents[1] / "configs" / "operating_point.toml")
print(f"amp_white_psd = {noise.amp_white_psd:.3g} A^2/Hz, flicker knee {noise.flicker_knee_hz:g} Hz")

r = simulate_tone(cfg, noise, -5, 1.9e3, seed=cfg.seed)
m = r.metrics
print(f"-5 dBFS @ {r.f_sig_hz:.1f} Hz: SNDR {m.sndr_db:.2f} dB, SNR {m.snr_db:.2f} dB, SFDR {m.sfdr_db:.2f} dB")

amps = np.arange(-90.0, -4.0, 5.0)
sweep = amplitude_sweep(cfg, noise, amps, seed=cfg.seed, jobs=min(8, os.cpu_count() or 1))
print("\n amp [dBFS]  SNDR [dB]")
for a, s in sweep:
    print(f"  {a:8.1f}  {s:8.2f}")
dr = dynamic_range(sweep)
print(f"\nDR {dr:.2f} dB -> FoM {fom_schreier(dr, cfg.band_hz, cfg.power_watt):.2f} dB")

noise_rms = m.noise_rms(cfg.full_scale_amp)
print()
print(build_report(cfg, {"sndr_db": m.sndr_db, "mds_amp": np.sqrt(2) * noise_rms, "band_hz": cfg.band_hz},
                   {"dr_db": dr}))
