"""A 600 fA, 2 kHz tone on the 100 pA range, observed for one second."""

import math
from pathlib import Path

from csdsm import load_config, min_detectable_signal
from csdsm.bench import simulate_tone

cfg, noise, _ = load_config(Path(__file__).resolve().parents[1] / "configs" / "operating_point.toml")
amp = 600e-15
amp_dbfs = 20 * math.log10(amp / cfg.full_scale_amp)
print(f"i_ref {cfg.i_ref_amp * 1e9:g} nA, alpha {cfg.alpha:g}: full scale {cfg.full_scale_amp * 1e12:g} pA")
print(f"600 fA is {amp_dbfs:.2f} dBFS")

r = simulate_tone(cfg, noise, amp_dbfs, 2e3, n=int(cfg.fs_hz), seed=cfg.seed, n_fft=1 << 18)
m = r.metrics
print(f"tone found: {m.tone_found}, SNR {m.snr_db:.1f} dB over {r.spectrum.n_segments} averaged segments")
mds = min_detectable_signal(m.noise_rms(cfg.full_scale_amp))
print(f"in-band noise RMS {m.noise_rms(cfg.full_scale_amp) * 1e15:.1f} fA -> MDS {mds * 1e15:.1f} fA")
