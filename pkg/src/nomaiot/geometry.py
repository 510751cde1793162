"""Power-zone partition of the disc (terrestrial) and semi-sphere (aerial).

Zone i (1-based) spans ((i-1)R/M, iR/M); the first zone starts at r0 instead
of 0. Each realisation places exactly one device uniformly in each zone, so
the distance density is proportional to r (annulus) or r^2 (shell).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .config import NetworkConfig
from .errors import ConfigError

Kind = Literal["terrestrial", "aerial"]


@dataclass(frozen=True)
class ZoneGeometry:
    index: int
    kind: Kind
    inner: float
    outer: float

    def __post_init__(self):
        if self.kind not in ("terrestrial", "aerial"):
            raise ConfigError(f"unknown zone kind {self.kind!r}")
        if not 0 < self.inner < self.outer:
            raise ConfigError(f"zone bounds must satisfy 0 < inner < outer, got "
                              f"({self.inner}, {self.outer})")

    @property
    def dim(self) -> int:
        return 2 if self.kind == "terrestrial" else 3

    @property
    def measure(self) -> float:
        """outer^d - inner^d with d = 2 (annulus) or 3 (shell)."""
        return self.outer ** self.dim - self.inner ** self.dim

    def contains(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        return (r >= self.inner) & (r <= self.outer)


def make_zone(M: int, R: float, r0: float, i: int, kind: Kind) -> ZoneGeometry:
    if not 1 <= i <= M:
        raise ConfigError(f"zone index {i} outside 1..{M}")
    if not 0 < r0 < R / M:
        raise ConfigError(f"need 0 < r0 < R/M, got r0={r0}, R/M={R / M}")
    inner = r0 if i == 1 else (i - 1) * R / M
    return ZoneGeometry(index=i, kind=kind, inner=inner, outer=i * R / M)


def zone(cfg: NetworkConfig, i: int, kind: Kind) -> ZoneGeometry:
    return make_zone(cfg.M, cfg.R, cfg.r0, i, kind)


def zones(cfg: NetworkConfig, kind: Kind) -> list[ZoneGeometry]:
    return [zone(cfg, i, kind) for i in range(1, cfg.M + 1)]


def pdf_terrestrial(zone: ZoneGeometry, r):
    """Distance density of the device in an annular zone, 2r/(outer^2 - inner^2)."""
    if zone.kind != "terrestrial":
        raise ConfigError("pdf_terrestrial needs a terrestrial zone")
    r = np.asarray(r, dtype=float)
    out = np.where(zone.contains(r), 2.0 * r / zone.measure, 0.0)
    return out if out.ndim else float(out)


def pdf_aerial(zone: ZoneGeometry, r, strict_paper: bool = False):
    """Distance density of the device in a spherical-shell zone.

    ``strict_paper`` reproduces the printed first-zone normaliser, which
    subtracts r0^2 instead of r0^3 and therefore does not integrate to one.
    """
    if zone.kind != "aerial":
        raise ConfigError("pdf_aerial needs an aerial zone")
    r = np.asarray(r, dtype=float)
    norm = zone.measure
    if strict_paper and zone.index == 1:
        norm = zone.outer ** 3 - zone.inner ** 2
    out = np.where(zone.contains(r), 3.0 * r * r / norm, 0.0)
    return out if out.ndim else float(out)


def pdf(zone: ZoneGeometry, r):
    return pdf_terrestrial(zone, r) if zone.kind == "terrestrial" else pdf_aerial(zone, r)


def cdf(zone: ZoneGeometry, r):
    r = np.clip(np.asarray(r, dtype=float), zone.inner, zone.outer)
    d = zone.dim
    out = (r ** d - zone.inner ** d) / zone.measure
    return out if out.ndim else float(out)


def sample_distance(zone: ZoneGeometry, u):
    """Inverse-CDF map from u in (0, 1) to a distance inside the zone."""
    u = np.asarray(u, dtype=float)
    d = zone.dim
    out = (zone.inner ** d + u * zone.measure) ** (1.0 / d)
    return out if out.ndim else float(out)
