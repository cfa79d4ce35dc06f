"""A translocation-like current step through the pore RC, digitized and decimated.

The pore is a resistor biased by a fixed voltage, with the membrane
capacitance in parallel; the sensed current follows a step with the RC time
constant. Decimating the bitstream by the OSR gives 8 kS/s samples that
track the step.
"""

import numpy as np

from csdsm import ModulatorConfig, NanoporeModel, Waveform, decimate_cic, run, validate_config

cfg = validate_config(ModulatorConfig(i_ref_amp=100e-6, range_check=True))  # 1 uA full scale
pore = NanoporeModel(nanopore_enabled=True)
print(f"pore: {pore.source_current_amp * 1e12:.0f} pA open current, tau {pore.tau_s * 1e3:.2f} ms "
      f"(pole {1 / (2 * np.pi * pore.tau_s):.0f} Hz)")

n = 128 * 256
x = np.full(n, pore.source_current_amp)
x[n // 2 :] *= 0.6  # a blockade drops the current by 40 %
bits = run(Waveform(x, cfg.fs_hz), cfg, nanopore=pore)
dec = decimate_cic(bits, cfg.osr, 3)
i = dec.samples * cfg.full_scale_amp
half = dec.samples.size // 2
print(f"decimated at {dec.rate_hz:g} S/s, {dec.samples.size} samples")
for k in (half - 4, half, half + 1, half + 2, half + 4, half + 16):
    print(f"  t={k / dec.rate_hz * 1e3:6.2f} ms  {i[k] * 1e12:7.1f} pA")
print(f"open level {np.mean(i[8:half]) * 1e12:.1f} pA, blocked level {np.mean(i[half + 32:]) * 1e12:.1f} pA")
