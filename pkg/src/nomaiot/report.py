"""Result containers shared by the analytic and simulated estimators."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

METHODS = ("exact-quadrature", "gauss-chebyshev", "low-rate-closed-form", "oma", "monte-carlo")


@dataclass(frozen=True)
class CoverageReport:
    """Per-device coverage of one tier.

    ``per_device[i]`` is the probability that device i+1 is decoded given
    that all nearer devices were cancelled. ``cumulative[i]`` is the overall
    coverage of device i+1: for analytic NOMA methods the running product of
    the conditional values, for Monte Carlo the empirical frequency of the
    whole SIC chain succeeding, and for OMA the device's own coverage since
    OMA devices do not depend on each other.
    """

    tier: str
    method: str
    per_device: tuple[float, ...]
    cumulative: tuple[float, ...]
    std_error: tuple[float, ...] | None = None
    cumulative_std_error: tuple[float, ...] | None = None
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_conditional(cls, tier: str, method: str, values: Sequence[float], **meta):
        vals = tuple(float(v) for v in values)
        return cls(tier=tier, method=method, per_device=vals,
                   cumulative=tuple(float(v) for v in np.cumprod(vals)), meta=meta)


@dataclass(frozen=True)
class SimEstimate:
    value: float
    std_error: float
    trials: int
    seed: int

    @classmethod
    def from_count(cls, hits: int, trials: int, seed: int) -> "SimEstimate":
        p = hits / trials
        return cls(value=p, std_error=float(np.sqrt(p * (1.0 - p) / trials)),
                   trials=trials, seed=seed)


@dataclass(frozen=True)
class ThroughputReport:
    tier: str
    mode: str
    per_device_rate: tuple[float, ...]
    packet_length: float
    sum_rate: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "sum_rate", float(sum(self.per_device_rate)))

    @property
    def per_rb_rate(self) -> float:
        """Average rate per device (one NOMA cluster occupies one RB)."""
        return self.sum_rate / len(self.per_device_rate)
