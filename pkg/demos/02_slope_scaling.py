"""Why scale the reference up by alpha and the feedback down by the same factor.

Two loops share the same 1 nA input full scale. The conventional one runs its
DAC at 1 nA; the slope-scaled one runs it at 100 nA and divides the fed-back
current by alpha = C3/C2 = 100. Shot noise grows only as the square root of
the reference current, so the input-referred DAC noise power falls by alpha.
"""

import math

from csdsm import ModulatorConfig, NoiseConfig, input_referred_dac_noise_psd, validate_config
from csdsm.bench import simulate_tone

I0, ALPHA = 1e-9, 100.0
conv = validate_config(ModulatorConfig(i_ref_amp=I0, c2_farad=1e-12, c3_farad=1e-12, alpha=None))
scaled = validate_config(ModulatorConfig(i_ref_amp=ALPHA * I0, alpha=None))
print(f"full scale: conventional {conv.full_scale_amp:.3g} A, slope-scaled {scaled.full_scale_amp:.3g} A")

for name, c in (("conventional", conv), ("slope-scaled", scaled)):
    psd = input_referred_dac_noise_psd(c.i_ref_amp, c.alpha).value
    print(f"{name:>13}: input-referred DAC PSD {psd:.3e} A^2/Hz")


def inband(c, noise, seed):
    m = simulate_tone(c, noise, -6, 1.9e3, seed=seed).metrics
    return m.noise_power * c.full_scale_amp**2 / 2


shot = NoiseConfig(dac_shot_enabled=True)
q_conv, q_scaled = inband(conv, None, 0), inband(scaled, None, 0)
print("\nsimulated in-band DAC noise (quantization floor removed):")
for seed in range(5):
    a = inband(conv, shot, seed) - q_conv
    b = inband(scaled, shot, seed) - q_scaled
    print(f"  seed {seed}: {10 * math.log10(b / a):6.2f} dB  (expected {-10 * math.log10(ALPHA):.0f})")
