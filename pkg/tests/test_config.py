import math

import pytest

from nomaiot.config import (NetworkConfig, config_from_mapping, dbm_to_watt, dump_config,
                            load_config, parse_config_text, parse_power, thermal_noise_dbm,
                            watt_to_dbm)
from nomaiot.errors import ConfigError


def test_defaults():
    cfg = NetworkConfig()
    assert (cfg.M, cfg.R, cfg.r0, cfg.alpha_g, cfg.alpha_u) == (2, 1000.0, 1.0, 4.0, 3.0)
    assert cfg.P_g == pytest.approx(1e-3)
    assert cfg.P_u == 0.0
    assert cfg.tau == (1.0, 1.0)
    assert watt_to_dbm(cfg.sigma2) == pytest.approx(-174 + 10 * math.log10(125e3))


def test_noise_floor():
    assert thermal_noise_dbm(125e3) == pytest.approx(-123.0309, abs=1e-4)


@pytest.mark.parametrize("text, watts", [
    ("0 dBm", 1e-3), ("0", 1e-3), (10, 1e-2), ("-30dBm", 1e-6),
    ("5 mW", 5e-3), ("0.2 W", 0.2), ("off", 0.0), ("-inf", 0.0),
])
def test_parse_power(text, watts):
    assert parse_power(text) == pytest.approx(watts, rel=1e-12)


@pytest.mark.parametrize("text", ["loud", "3 dB", "-1 W", ""])
def test_parse_power_rejects(text):
    with pytest.raises(ConfigError):
        parse_power(text)


def test_dbm_roundtrip():
    for p in (-70.0, -3.5, 0.0, 23.0):
        assert watt_to_dbm(dbm_to_watt(p)) == pytest.approx(p)


def test_tau_from_rates():
    cfg = NetworkConfig().with_devices(3).with_rates_bpcu([0.5, 1, 2])
    assert cfg.tau == pytest.approx((math.sqrt(2) - 1, 1.0, 3.0))
    assert cfg.tau_oma == pytest.approx((2 ** 1.5 - 1, 7.0, 63.0))
    assert cfg.with_tau(0.5).rates_bpcu == pytest.approx((math.log2(1.5),) * 3)


@pytest.mark.parametrize("kw", [
    {"alpha_g": 1.5}, {"alpha_g": 2.0}, {"alpha_u": 2.5}, {"R": -1.0}, {"r0": 600.0},
    {"M": 0}, {"P_g": -1.0}, {"P_u": math.inf}, {"m": (1, 0)}, {"m": (1,)},
    {"m": (1.5, 1)}, {"rates": (1.0, 0.0)},
])
def test_invalid(kw):
    with pytest.raises(ConfigError):
        NetworkConfig(**kw)


def test_parse_text():
    text = """
    # scenario
    M = 3
    Pg_dBm = 10 dBm   # trailing comment
    Pu_dBm: -60
    m_list = 1, 2 3
    rates_bps_list = 0.5 bpcu
    """
    cfg = config_from_mapping(parse_config_text(text))
    assert cfg.M == 3
    assert cfg.P_g == pytest.approx(1e-2)
    assert cfg.P_u == pytest.approx(1e-9)
    assert cfg.m == (1, 2, 3)
    assert cfg.rates_bpcu == pytest.approx((0.5,) * 3)


def test_rate_list_with_units():
    cfg = config_from_mapping({"M": "2", "rates_bps_list": "1 bpcu, 62500"})
    assert cfg.rates_bpcu == pytest.approx((1.0, 0.5))


@pytest.mark.parametrize("text, where", [
    ("M = 2\nfoo = 1\n", ":2:"),
    ("M = 2\nM = 3\n", ":2:"),
    ("just words\n", ":1:"),
    ("R_m =\n", ":1:"),
])
def test_diagnostics_carry_line(text, where):
    with pytest.raises(ConfigError, match=where):
        parse_config_text(text, "cfg.txt")


def test_bad_alpha_in_file(tmp_path):
    p = tmp_path / "bad.cfg"
    p.write_text("alpha_g = 1.5\n")
    with pytest.raises(ConfigError, match="alpha_g"):
        load_config(p)


def test_wrong_list_length():
    with pytest.raises(ConfigError):
        config_from_mapping({"M": "3", "m_list": "1 2"})


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "nope.cfg")


def test_empty_file_gives_defaults(tmp_path):
    p = tmp_path / "empty.cfg"
    p.write_text("# nothing\n\n")
    assert load_config(p) == NetworkConfig()


def test_roundtrip(tmp_path):
    cfg = NetworkConfig(P_u=dbm_to_watt(-55)).with_devices(4).replace(m=(1, 2, 3, 1))
    cfg = cfg.with_rates_bpcu([0.1, 0.25, 0.5, 1.0])
    p = tmp_path / "rt.cfg"
    p.write_text(dump_config(cfg))
    back = load_config(p)
    assert back == cfg
