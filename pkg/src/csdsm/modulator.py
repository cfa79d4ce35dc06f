"""Discrete-time behavioral model of the slope-scaled 2nd-order 1-bit loop.

One state update per clock::

    x1' = p*x1 + a1*d*(u - v + e_dac)
    x2' = p*x2 + a2*d*(x1' - v)
    v'  = +1 if x2' >= 0 else -1

``u`` is the input current divided by the effective full scale
``i_ref / alpha``, ``v`` the previous decision (fed back to both stages with
equal weight), ``e_dac`` the normalized DAC noise, ``p`` the leak of a
finite-gain integrator and ``d = 1 - reset_fraction`` the duty loss of the
reset phase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import Bitstream, ModulatorConfig, NanoporeModel, NoiseConfig, validate_config
from .noise import amplifier_noise, input_referred_dac_noise_psd, split_seed, white_noise_samples
from .stimulus import Waveform, nanopore_filter


class ModulatorUnstable(RuntimeError):
    """Integrator state left the stability envelope.

    ``bitstream`` holds the decisions made before the overflow and ``index``
    the clock cycle at which it happened.
    """

    def __init__(self, message: str, index: int, state: "LoopState", bitstream: Bitstream | None = None):
        super().__init__(message)
        self.index = index
        self.state = state
        self.bitstream = bitstream


@dataclass(frozen=True)
class LoopState:
    x1: float = 0.0
    x2: float = 0.0
    last_bit: int = 1


@dataclass(frozen=True)
class FeedbackDac:
    """1-bit current DAC followed by the integrator/differentiator scaler."""

    i_ref_amp: float
    alpha: float
    differential: bool = True

    @property
    def magnitude(self) -> float:
        return self.i_ref_amp / self.alpha


def slope_scaled_feedback(bit: int, dac: FeedbackDac) -> float:
    """Feedback current delivered to the input node for decision ``bit``."""
    if bit not in (-1, 1):
        raise ValueError("bit must be +1 or -1")
    return bit * dac.magnitude


def cds_effective_gain(a_dc: float, cds_enabled: bool = True) -> float:
    """Open-loop gain after correlated double sampling (gain squared)."""
    if a_dc < 1:
        raise ValueError("a_dc must be >= 1")
    return a_dc * a_dc if cds_enabled else a_dc


def integrator_leak_pole(a_eff: float) -> float:
    """Per-cycle state retention ``1 - 1/a_eff`` of a finite-gain integrator."""
    if a_eff < 1:
        raise ValueError("a_eff must be >= 1")
    return 1.0 - 1.0 / a_eff


def sign(x: float) -> int:
    """Ideal comparator; ties resolve to +1."""
    return 1 if x >= 0 else -1


def loop_coefficients(cfg: ModulatorConfig) -> tuple[float, float, float]:
    """``(p, a1*d, a2*d)`` for a validated config."""
    p = integrator_leak_pole(cds_effective_gain(cfg.amp_dc_gain, cfg.cds_enabled))
    duty = 1.0 - cfg.reset_fraction
    a1, a2 = cfg.loop_coeffs
    return p, a1 * duty, a2 * duty


def step(state: LoopState, u: float, fb_noise: float, cfg: ModulatorConfig) -> tuple[LoopState, int]:
    """Advance the loop by one clock and return the new state and decision.

    Raises :class:`ModulatorUnstable` if either integrator exceeds
    ``cfg.stability_limit`` in magnitude or becomes non-finite.
    """
    p, a1, a2 = loop_coefficients(cfg)
    v = state.last_bit
    x1 = p * state.x1 + a1 * (u - v + fb_noise)
    x2 = p * state.x2 + a2 * (x1 - v)
    bit = sign(x2)
    new = LoopState(x1, x2, bit)
    lim = cfg.stability_limit
    if not (abs(x1) <= lim and abs(x2) <= lim):
        raise ModulatorUnstable(f"integrator state exceeded {lim}", 0, new)
    return new, bit


def normalized_inputs(
    x: np.ndarray,
    cfg: ModulatorConfig,
    noise: NoiseConfig | None,
    seed,
) -> tuple[np.ndarray, np.ndarray]:
    """Input and feedback-node sequences in full-scale units, noise included.

    Randomness is split per source from ``seed`` in the order given by
    :data:`csdsm.noise.SEED_ORDER`.
    """
    fs_amp = cfg.full_scale_amp
    n = x.size
    u = x / fs_amp
    fb = np.zeros(n)
    if noise is None:
        return u, fb
    seeds = split_seed(seed)
    if noise.dac_shot_enabled:
        psd = input_referred_dac_noise_psd(cfg.i_ref_amp, cfg.alpha)
        fb = white_noise_samples(psd, cfg.fs_hz, n, seeds["dac_shot"]) / fs_amp
    if noise.amp_white_psd > 0 or noise.amp_offset_amp != 0:
        u = u + amplifier_noise(noise, cfg.fs_hz, n, cfg.cds_enabled, seeds) / fs_amp
    return u, fb


def run(
    input,
    cfg: ModulatorConfig,
    noise: NoiseConfig | None = None,
    seed=None,
    nanopore: NanoporeModel | None = None,
    state: LoopState | None = None,
) -> Bitstream:
    """Simulate the modulator over a whole input record.

    Parameters
    ----------
    input : Waveform or array_like
        Input current in amperes. A bare array is taken to be at ``cfg.fs_hz``.
    cfg : ModulatorConfig
    noise : NoiseConfig, optional
        ``None`` gives a noiseless run.
    seed : int or SeedSequence, optional
        Defaults to ``cfg.seed``. Same inputs and seed give identical bits.
    nanopore : NanoporeModel, optional
        When given with ``nanopore_enabled`` set, the input first passes
        through :func:`csdsm.stimulus.nanopore_filter`.
    state : LoopState, optional
        Initial state, zero by default.

    Returns
    -------
    Bitstream

    Raises
    ------
    ModulatorUnstable
        With the partial bitstream attached, when the state overflows.
    """
    cfg = validate_config(cfg)
    if isinstance(input, Waveform):
        if input.fs_hz != cfg.fs_hz:
            raise ValueError(f"input rate {input.fs_hz} Hz does not match fs_hz {cfg.fs_hz} Hz")
        wave = input
    else:
        x = np.asarray(input, dtype=float)
        if x.size == 0:
            raise ValueError("empty input")
        wave = Waveform(x, cfg.fs_hz)
    if nanopore is not None and nanopore.nanopore_enabled:
        wave = nanopore_filter(wave, nanopore)

    u, fb = normalized_inputs(wave.samples, cfg, noise, cfg.seed if seed is None else seed)
    p, a1, a2 = loop_coefficients(cfg)
    lim = cfg.stability_limit
    state = state or LoopState()
    x1, x2, v = state.x1, state.x2, float(state.last_bit)

    bits = np.empty(u.size, dtype=np.int8)
    for i, (ui, ei) in enumerate(zip(u.tolist(), fb.tolist())):
        x1 = p * x1 + a1 * (ui - v + ei)
        x2 = p * x2 + a2 * (x1 - v)
        v = 1.0 if x2 >= 0 else -1.0
        bits[i] = v
        if not (abs(x1) <= lim and abs(x2) <= lim):
            partial = Bitstream(bits[:i], cfg.fs_hz, cfg.full_scale_amp)
            raise ModulatorUnstable(
                f"integrator state exceeded {lim} at cycle {i} (x1={x1:.3g}, x2={x2:.3g})",
                i,
                LoopState(x1, x2, int(v)),
                partial,
            )
    return Bitstream(bits, cfg.fs_hz, cfg.full_scale_amp)


def ideal_sqnr_db(osr: float, order: int = 2, amp_dbfs: float = 0.0) -> float:
    """Linear-model SQNR of a pure ``(1 - z^-1)^order`` NTF with a +/-1 quantizer.

    Quantization error variance is taken as 1/3 (step 2); the signal is a sine
    of peak ``10**(amp_dbfs/20)``.
    """
    sig = 0.5 * 10 ** (amp_dbfs / 10)
    noise = (1 / 3) * math.pi ** (2 * order) / ((2 * order + 1) * osr ** (2 * order + 1))
    return 10 * math.log10(sig / noise)
