"""Correlated double sampling on the first-stage amplifier.

The amplifier is observed twice per clock and the first observation is
subtracted from the second. A static offset disappears, slow flicker noise
mostly disappears, and uncorrelated white noise doubles in power. The
amplifier's open-loop gain is effectively squared, so the integrator leaks
far less.
"""

import numpy as np

from csdsm import NoiseConfig, cds_effective_gain, integrator_leak_pole, psd_estimate
from csdsm.noise import amplifier_noise, split_seed

FS, N = 1.024e6, 1 << 18
FULL_SCALE = 100e-12  # 10 nA reference, alpha 100

for cds in (False, True):
    a = cds_effective_gain(100.0, cds)
    print(f"CDS {'on ' if cds else 'off'}: effective gain {a:8.0f}, leak pole {integrator_leak_pole(a):.6f}")

offset = NoiseConfig(amp_offset_amp=1e-12)
for cds in (False, True):
    x = amplifier_noise(offset, FS, 1000, cds, split_seed(0))
    print(f"1 pA offset, CDS {'on ' if cds else 'off'}: mean seen by the loop {np.mean(x):.3e} A")

white = NoiseConfig(amp_white_psd=2.6e-33)
both = NoiseConfig(amp_white_psd=2.6e-33, flicker_knee_hz=10e3, flicker_enabled=True)
print("\nin-band (<= 4 kHz) amplifier noise power:")
for cds in (False, True):
    w = amplifier_noise(white, FS, N, cds, split_seed(1))
    f = amplifier_noise(both, FS, N, cds, split_seed(1)) - w  # flicker part alone
    pw, pf = (psd_estimate(s, FS, "hann", 1 << 14, full_scale=FULL_SCALE) for s in (w, f))
    sel = (pw.freqs_hz > 0) & (pw.freqs_hz <= 4e3)
    print(f"  CDS {'on ' if cds else 'off'}: white {10 * np.log10(pw.power[sel].sum()):7.1f} dBFS, "
          f"flicker {10 * np.log10(pf.power[sel].sum()):7.1f} dBFS")
