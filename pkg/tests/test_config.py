import dataclasses
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from csdsm.config import (
    ConfigError,
    ModulatorConfig,
    NanoporeModel,
    NoiseConfig,
    config_from_mapping,
    effective_full_scale,
    load_config,
    validate_config,
)


def test_default_capacitors_give_alpha_100():
    cfg = validate_config(ModulatorConfig(c2_farad=100e-15, c3_farad=10e-12, alpha=None))
    assert cfg.alpha == pytest.approx(100, rel=1e-12)


def test_equal_capacitors_give_unity_alpha():
    cfg = validate_config(ModulatorConfig(c2_farad=1e-12, c3_farad=1e-12, alpha=None))
    assert cfg.alpha == 1.0


def test_explicit_alpha_must_match_ratio():
    with pytest.raises(ConfigError) as exc:
        validate_config(ModulatorConfig(alpha=50.0))
    assert exc.value.field == "alpha"
    # within 1e-9 relative is accepted and replaced by the ratio
    cfg = validate_config(ModulatorConfig(alpha=100.0 * (1 + 5e-10)))
    assert cfg.alpha == pytest.approx(100, rel=1e-12)


def test_reset_fraction_out_of_range():
    with pytest.raises(ConfigError, match="reset_fraction out of range") as exc:
        validate_config(ModulatorConfig(reset_fraction=0.5))
    assert exc.value.field == "reset_fraction"


@pytest.mark.parametrize("osr", [1, 0, 2.5, True])
def test_osr_must_be_integer_at_least_two(osr):
    with pytest.raises(ConfigError) as exc:
        validate_config(ModulatorConfig(osr=osr))
    assert exc.value.field == "osr"


@pytest.mark.parametrize(
    "field,value",
    [("fs_hz", 0.0), ("i_ref_amp", -1e-9), ("amp_dc_gain", 0.5), ("power_watt", 0.0),
     ("loop_coeffs", (0.5,)), ("c2_farad", 0.0)],
)
def test_invalid_fields_are_named(field, value):
    with pytest.raises(ConfigError) as exc:
        validate_config(dataclasses.replace(ModulatorConfig(), **{field: value}))
    assert exc.value.field == field


def test_reference_range_check_is_opt_in():
    validate_config(ModulatorConfig(i_ref_amp=10e-9))
    with pytest.raises(ConfigError, match="reference range"):
        validate_config(ModulatorConfig(i_ref_amp=10e-9, range_check=True))
    validate_config(ModulatorConfig(i_ref_amp=100e-6, range_check=True))


@given(
    c2=st.floats(1e-15, 1e-11),
    c3=st.floats(1e-15, 1e-9),
    rf=st.floats(0, 0.1),
)
def test_validate_is_idempotent(c2, c3, rf):
    once = validate_config(ModulatorConfig(c2_farad=c2, c3_farad=c3, alpha=None, reset_fraction=rf))
    assert validate_config(once) == once
    assert once.alpha == c3 / c2


@pytest.mark.parametrize(
    "i_ref,alpha,expected",
    [(100e-6, 100, 1e-6), (10e-9, 1, 10e-9), (10e-9, 100, 100e-12)],
)
def test_effective_full_scale(i_ref, alpha, expected):
    assert effective_full_scale(i_ref, alpha) == pytest.approx(expected, rel=1e-15)


def test_effective_full_scale_rejects_nonpositive_alpha():
    with pytest.raises(ValueError):
        effective_full_scale(1e-6, 0)


@given(
    i=st.floats(1e-12, 1e-3),
    a=st.floats(0.01, 1e4),
    e=st.integers(-20, 20),
)
def test_full_scale_linearity(i, a, e):
    k = 2.0**e  # power-of-two scaling keeps the float arithmetic exact
    assert effective_full_scale(k * i, a) == k * effective_full_scale(i, a)
    assert effective_full_scale(i, k * a) * k == effective_full_scale(i, a)


def test_noise_and_pore_invariants():
    with pytest.raises(ConfigError):
        NoiseConfig(amp_white_psd=-1.0)
    with pytest.raises(ConfigError):
        NoiseConfig(flicker_knee_hz=-1.0)
    with pytest.raises(ConfigError):
        NanoporeModel(r_pore_ohm=0)
    with pytest.raises(ConfigError):
        NanoporeModel(c_mem_farad=-1e-12)


def test_defaults_mirror_operating_point(cfg):
    assert cfg.fs_hz == 1.024e6
    assert cfg.osr == 128
    assert cfg.band_hz == 4000.0
    assert cfg.power_watt == 125e-6
    assert cfg.supply_volt == 1.0
    assert cfg.full_scale_amp == pytest.approx(100e-12)


def test_load_config_roundtrip(tmp_path):
    p = tmp_path / "c.toml"
    p.write_text(
        "fs_hz = 1.024e6\nosr = 64\nloop_coeffs = [0.5, 0.5]\ni_ref_amp = 1e-6\n"
        "cds_enabled = false\namp_white_psd = 1e-30\nnanopore_enabled = true\n"
    )
    cfg, noise, pore = load_config(p)
    assert cfg.osr == 64 and cfg.loop_coeffs == (0.5, 0.5) and not cfg.cds_enabled
    assert noise.amp_white_psd == 1e-30
    assert pore.nanopore_enabled


def test_unknown_key_is_an_error(tmp_path):
    p = tmp_path / "c.toml"
    p.write_text("fs_hz = 1e6\nbogus = 3\n")
    with pytest.raises(ConfigError) as exc:
        load_config(p)
    assert exc.value.field == "bogus"


@pytest.mark.parametrize("data", [{"osr": 12.5}, {"fs_hz": "fast"}, {"cds_enabled": 1},
                                  {"loop_coeffs": 0.5}, {"osr": {"a": 1}}])
def test_wrong_types_are_config_errors(data):
    with pytest.raises(ConfigError) as exc:
        config_from_mapping(data)
    assert exc.value.field == next(iter(data))


def test_bad_toml_is_config_error(tmp_path):
    p = tmp_path / "c.toml"
    p.write_text("fs_hz = = 3\n")
    with pytest.raises(ConfigError):
        load_config(p)


def test_power_property_is_finite(cfg):
    assert math.isfinite(cfg.full_scale_amp)
