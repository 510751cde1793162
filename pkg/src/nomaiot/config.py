"""Scenario parameters and the plain-text config format.

Config files are ``key = value`` lines (``:`` also accepted, ``#`` starts a
comment). Recognised keys and defaults::

    M              2            devices per tier
    R_m            1000         disc / semi-sphere radius [m]
    r0_m           1            minimum distance [m]
    alpha_g        4            terrestrial path-loss exponent
    alpha_u        3            aerial path-loss exponent
    Pg_dBm         0            terrestrial transmit power
    Pu_dBm         off          aerial transmit power
    B_Hz           125000       bandwidth
    sigma2_dBm     -174 + 10 log10(B)
    m_list         1            Nakagami parameter per aerial device
    rates_bps_list B            target rate per device [bit/s]

Powers accept a bare number (dBm), ``<x> dBm``, ``<x> mW``, ``<x> W`` or
``off`` / ``-inf`` for zero power. Rates accept ``<x> bpcu`` meaning x*B bit/s.
Lists are comma or whitespace separated; a single value is broadcast to all
M devices. All quantities are stored in SI units.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping, Sequence

from .errors import ConfigError

DEFAULT_B = 125e3


def dbm_to_watt(p_dbm: float) -> float:
    if p_dbm == -math.inf:
        return 0.0
    return 10.0 ** (p_dbm / 10.0) * 1e-3


def watt_to_dbm(p_w: float) -> float:
    if p_w <= 0:
        return -math.inf
    return 10.0 * math.log10(p_w / 1e-3)


def thermal_noise_dbm(bandwidth_hz: float) -> float:
    """Noise floor -174 dBm/Hz integrated over the bandwidth."""
    return -174.0 + 10.0 * math.log10(bandwidth_hz)


@dataclass(frozen=True)
class NetworkConfig:
    """One uplink NOMA cluster: M terrestrial and M aerial devices.

    Thresholds are derived from the target rates, tau_i = 2^(R_i/B) - 1.
    """

    M: int = 2
    R: float = 1000.0
    r0: float = 1.0
    alpha_g: float = 4.0
    alpha_u: float = 3.0
    P_g: float = 1e-3
    P_u: float = 0.0
    sigma2: float = field(default_factory=lambda: dbm_to_watt(thermal_noise_dbm(DEFAULT_B)))
    B: float = DEFAULT_B
    m: tuple[int, ...] = (1, 1)
    rates: tuple[float, ...] = (DEFAULT_B, DEFAULT_B)

    def __post_init__(self):
        object.__setattr__(self, "m", tuple(self.m))
        object.__setattr__(self, "rates", tuple(float(r) for r in self.rates))
        if int(self.M) != self.M or self.M < 1:
            raise ConfigError(f"M must be a positive integer, got {self.M!r}")
        object.__setattr__(self, "M", int(self.M))
        if not self.R > 0:
            raise ConfigError(f"R must be positive, got {self.R!r}")
        if not 0 < self.r0 < self.R / self.M:
            raise ConfigError(f"need 0 < r0 < R/M, got r0={self.r0!r}, R/M={self.R / self.M!r}")
        if not self.alpha_g > 2:
            raise ConfigError(f"alpha_g must exceed 2 (delta_g = 2/alpha_g < 1), got {self.alpha_g!r}")
        if not self.alpha_u >= 3:
            raise ConfigError(f"alpha_u must be at least 3, got {self.alpha_u!r}")
        for name in ("P_g", "P_u", "sigma2"):
            v = getattr(self, name)
            if not (v >= 0 and math.isfinite(v)):
                raise ConfigError(f"{name} must be finite and nonnegative, got {v!r}")
        if not self.B > 0:
            raise ConfigError(f"B must be positive, got {self.B!r}")
        if len(self.m) != self.M:
            raise ConfigError(f"m_list has {len(self.m)} entries, expected M={self.M}")
        for mm in self.m:
            if int(mm) != mm or mm < 1:
                raise ConfigError(f"Nakagami parameters must be integers >= 1, got {mm!r}")
        object.__setattr__(self, "m", tuple(int(mm) for mm in self.m))
        if len(self.rates) != self.M:
            raise ConfigError(f"rates list has {len(self.rates)} entries, expected M={self.M}")
        if any(not r > 0 for r in self.rates):
            raise ConfigError("target rates must be positive")

    @property
    def delta_g(self) -> float:
        return 2.0 / self.alpha_g

    @property
    def delta_u(self) -> float:
        return 3.0 / self.alpha_u

    @property
    def tau(self) -> tuple[float, ...]:
        return tuple(2.0 ** (r / self.B) - 1.0 for r in self.rates)

    @property
    def tau_oma(self) -> tuple[float, ...]:
        """Thresholds when each device only gets a 1/M share of the band."""
        return tuple(2.0 ** (self.M * r / self.B) - 1.0 for r in self.rates)

    @property
    def rates_bpcu(self) -> tuple[float, ...]:
        return tuple(r / self.B for r in self.rates)

    def with_tau(self, tau: float | Sequence[float]) -> "NetworkConfig":
        taus = _broadcast(tau, self.M, "tau")
        return replace(self, rates=tuple(self.B * math.log2(1.0 + t) for t in taus))

    def with_rates_bpcu(self, bpcu: float | Sequence[float]) -> "NetworkConfig":
        vals = _broadcast(bpcu, self.M, "rates_bpcu")
        return replace(self, rates=tuple(self.B * v for v in vals))

    def with_devices(self, M: int) -> "NetworkConfig":
        """Resize to M devices, reusing the last m / rate for new devices."""
        m = tuple(self.m[min(i, self.M - 1)] for i in range(M))
        rates = tuple(self.rates[min(i, self.M - 1)] for i in range(M))
        return replace(self, M=M, m=m, rates=rates)

    def replace(self, **changes) -> "NetworkConfig":
        return replace(self, **changes)

    def to_mapping(self) -> dict[str, str]:
        """Resolved config in config-file syntax (round-trips through load)."""
        return {
            "M": str(self.M),
            "R_m": repr(self.R),
            "r0_m": repr(self.r0),
            "alpha_g": repr(self.alpha_g),
            "alpha_u": repr(self.alpha_u),
            "Pg_dBm": _power_text(self.P_g),
            "Pu_dBm": _power_text(self.P_u),
            "B_Hz": repr(self.B),
            "sigma2_dBm": repr(watt_to_dbm(self.sigma2)) if self.sigma2 > 0 else "off",
            "m_list": ", ".join(str(v) for v in self.m),
            "rates_bps_list": ", ".join(repr(v) for v in self.rates),
        }


def _power_text(p_w: float) -> str:
    return "off" if p_w == 0 else f"{p_w!r} W"


def _broadcast(value, M: int, name: str) -> tuple:
    if isinstance(value, (list, tuple)):
        if len(value) == 1:
            return tuple(value) * M
        if len(value) != M:
            raise ConfigError(f"{name} has {len(value)} entries, expected M={M}")
        return tuple(value)
    return (value,) * M


KNOWN_KEYS = ("M", "R_m", "r0_m", "alpha_g", "alpha_u", "Pg_dBm", "Pu_dBm", "B_Hz",
              "sigma2_dBm", "m_list", "rates_bps_list")

_POWER_RE = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?|[-+]?inf)\s*(dbm|mw|w)?\s*$",
                       re.IGNORECASE)


def parse_power(text) -> float:
    """Power value to watts; bare numbers are dBm."""
    if isinstance(text, (int, float)):
        return dbm_to_watt(float(text))
    s = str(text).strip()
    if s.lower() in ("off", "none", "zero"):
        return 0.0
    mt = _POWER_RE.match(s)
    if not mt:
        raise ConfigError(f"cannot parse power value {text!r}")
    val = float(mt.group(1))
    unit = (mt.group(2) or "dbm").lower()
    if unit == "dbm":
        return dbm_to_watt(val)
    if val < 0:
        raise ConfigError(f"negative linear power {text!r}")
    return val * (1e-3 if unit == "mw" else 1.0)


def _split_list(text) -> list[str]:
    if isinstance(text, (list, tuple)):
        return [str(t) for t in text]
    # whitespace before a unit word ("1.5 bpcu") does not separate entries
    return [t for t in re.split(r"\s*,\s*|\s+(?![A-Za-z])", str(text).strip()) if t]


def _parse_rate(token: str, B: float) -> float:
    s = token.strip().lower()
    if s.endswith("bpcu"):
        return float(s[:-4]) * B
    return float(s)


def _number(key, text) -> float:
    try:
        return float(text)
    except (TypeError, ValueError):
        raise ConfigError(f"key {key!r}: expected a number, got {text!r}") from None


def config_from_mapping(values: Mapping[str, object]) -> NetworkConfig:
    """Build a validated NetworkConfig from config-file keys (all optional)."""
    unknown = [k for k in values if k not in KNOWN_KEYS]
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
    M = int(_number("M", values.get("M", 2)))
    B = _number("B_Hz", values.get("B_Hz", DEFAULT_B))
    if "sigma2_dBm" in values:
        sigma2 = parse_power(values["sigma2_dBm"])
    else:
        sigma2 = dbm_to_watt(thermal_noise_dbm(B))
    try:
        m_tokens = _split_list(values.get("m_list", "1"))
        m = [float(t) for t in m_tokens]
        rate_tokens = _split_list(values.get("rates_bps_list", repr(B)))
        rates = [_parse_rate(t, B) for t in rate_tokens]
    except ValueError as exc:
        raise ConfigError(f"bad list value: {exc}") from None
    if M < 1:
        raise ConfigError(f"M must be a positive integer, got {M!r}")
    return NetworkConfig(
        M=M,
        R=_number("R_m", values.get("R_m", 1000.0)),
        r0=_number("r0_m", values.get("r0_m", 1.0)),
        alpha_g=_number("alpha_g", values.get("alpha_g", 4.0)),
        alpha_u=_number("alpha_u", values.get("alpha_u", 3.0)),
        P_g=parse_power(values.get("Pg_dBm", 0.0)),
        P_u=parse_power(values.get("Pu_dBm", "off")),
        sigma2=sigma2,
        B=B,
        m=tuple(_broadcast(m, M, "m_list")),
        rates=tuple(_broadcast(rates, M, "rates_bps_list")),
    )


def parse_config_text(text: str, source: str = "<string>") -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        mt = re.match(r"^([A-Za-z_][A-Za-z0-9_]*)\s*[=:]\s*(.*)$", line)
        if not mt:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, val = mt.group(1), mt.group(2).strip()
        if key not in KNOWN_KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        if not val:
            raise ConfigError(f"{source}:{lineno}: key {key!r} has no value")
        values[key] = val
    return values


def load_config(path: str | Path) -> NetworkConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return config_from_mapping(parse_config_text(text, str(path)))


def dump_config(cfg: NetworkConfig) -> str:
    return "".join(f"{k} = {v}\n" for k, v in cfg.to_mapping().items())
