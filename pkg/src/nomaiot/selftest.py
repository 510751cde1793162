"""Pinned analytic-versus-simulation regression grid.

Each grid point is one network configuration. Every analytic estimator that
applies to it is compared device by device against a Monte Carlo run with
the same configuration; a comparison passes when the two differ by at most
three standard errors.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

from . import aerial, montecarlo, terrestrial
from .config import NetworkConfig, dbm_to_watt
from .errors import NomaError


@dataclass(frozen=True)
class GridPoint:
    name: str
    M: int
    tau: float
    Pg_dBm: float | None
    Pu_dBm: float | None
    m: tuple[int, ...] | None = None

    def config(self) -> NetworkConfig:
        P_g = 0.0 if self.Pg_dBm is None else dbm_to_watt(self.Pg_dBm)
        P_u = 0.0 if self.Pu_dBm is None else dbm_to_watt(self.Pu_dBm)
        cfg = NetworkConfig(P_g=P_g, P_u=P_u).with_devices(self.M).with_tau(self.tau)
        return cfg.replace(m=self.m or (1,) * self.M)


# Terrestrial points run without aerial power or with a weak aerial tier;
# aerial points mostly switch the ground tier off, since at equal power the
# aerial interference swamps the ground devices (and vice versa).
GRID = (
    GridPoint("g-M2-t0.5-P0", 2, 0.5, 0, None),
    GridPoint("g-M2-t2-P0", 2, 2.0, 0, None),
    GridPoint("g-M2-t0.1-P-10", 2, 0.1, -10, None),
    GridPoint("g-M3-t0.5-P10", 3, 0.5, 10, None),
    GridPoint("g-M3-t1-P0", 3, 1.0, 0, None),
    GridPoint("g-M5-t0.1-P0", 5, 0.1, 0, None),
    GridPoint("g-M5-t0.5-P-10", 5, 0.5, -10, None),
    GridPoint("g-M5-t2-P10", 5, 2.0, 10, None),
    GridPoint("mix-M2-t0.5-P0", 2, 0.5, 0, -60),
    GridPoint("mix-M3-t0.1-P10", 3, 0.1, 10, -50, (2, 1, 3)),
    GridPoint("u-M2-t0.1-P0", 2, 0.1, None, 0),
    GridPoint("u-M2-t1-P10-m2", 2, 1.0, None, 10, (2, 1)),
    GridPoint("u-M2-t2-P-10-m3", 2, 2.0, None, -10, (3, 3)),
    GridPoint("u-M2-t0.5-P0-m3", 2, 0.5, None, 0, (3, 1)),
    GridPoint("u-M3-t0.5-P0", 3, 0.5, None, 0),
    GridPoint("u-M3-t1-P10-m113", 3, 1.0, None, 10, (1, 1, 3)),
    GridPoint("u-M5-t0.1-P-10", 5, 0.1, None, -10),
    GridPoint("u-M5-t0.5-P10-m2", 5, 0.5, None, 10, (1, 1, 1, 1, 2)),
    GridPoint("both-M2-t0.5-P-10-m2", 2, 0.5, -10, -10, (2, 1)),
    GridPoint("both-M3-t1-Pg-10-Pu0", 3, 1.0, -10, 0),
)


@dataclass(frozen=True)
class Comparison:
    point: str
    tier: str
    estimator: str
    device: int
    analytic: float
    simulated: float
    std_error: float

    @property
    def z(self) -> float:
        return abs(self.analytic - self.simulated) / self.std_error

    @property
    def passed(self) -> bool:
        return self.z <= 3.0


def _std_error(p_a: float, p_s: float, n: int) -> float:
    # binomial SE under either estimate; 1/n floor for p exactly 0 or 1
    se = max(math.sqrt(max(p * (1.0 - p), 0.0) / n) for p in (p_a, p_s))
    return max(se, 1.0 / n)


def _analytic(point: GridPoint, cfg: NetworkConfig):
    """(tier, estimator, device, value) for every estimator that applies."""
    out = []
    if cfg.P_g > 0:
        for i in range(1, cfg.M + 1):
            out.append(("terrestrial", "exact", i, terrestrial.coverage_exact(i, cfg)))
            out.append(("terrestrial", "gauss-chebyshev", i, terrestrial.coverage_gc(i, cfg, 100)))
            if cfg.P_u == 0 and cfg.tau[i - 1] < 1:
                out.append(("terrestrial", "low-rate", i, terrestrial.coverage_low_rate(i, cfg)))
            if cfg.P_u == 0:
                out.append(("terrestrial", "oma", i, terrestrial.coverage_oma(i, cfg)))
    if cfg.P_u > 0:
        for i in range(1, cfg.M + 1):
            try:
                out.append(("aerial", "exact", i, aerial.coverage_aerial(i, cfg)))
            except NomaError:
                pass
        if cfg.M == 2 and cfg.P_g == 0 and cfg.m[0] in (2, 3):
            out.append(("aerial", "gauss-chebyshev", 1, aerial.coverage_aerial_nearest_closed(cfg)))
    return out


def run_point(point: GridPoint, trials: int, seed: int, workers: int = 1) -> list[Comparison]:
    cfg = point.config()
    sims = montecarlo.run_coverage_sim(cfg, trials, seed, workers)
    oma = None
    rows = []
    for tier, est, i, value in _analytic(point, cfg):
        if est == "oma":
            if oma is None:
                oma = montecarlo.run_oma_sim(cfg, trials, seed, workers)
            sim = oma.per_device[i - 1]
        else:
            sim = sims[tier].per_device[i - 1]
        rows.append(Comparison(point.name, tier, est, i, float(value), float(sim),
                               _std_error(value, sim, trials)))
    return rows


def run_selftest(trials: int = 1_000_000, seed: int = 20240601, workers: int = 1,
                 grid=GRID, progress=None) -> list[Comparison]:
    out = []
    for point in grid:
        rows = run_point(point, trials, seed, workers)
        if progress is not None:
            progress(point, rows)
        out.extend(rows)
    return out


def render(comparisons: list[Comparison]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("point", "tier", "estimator", "device", "analytic", "monte_carlo",
                "std_error", "z", "result"))
    for c in comparisons:
        w.writerow((c.point, c.tier, c.estimator, c.device, repr(c.analytic), repr(c.simulated),
                    repr(c.std_error), f"{c.z:.3f}", "PASS" if c.passed else "FAIL"))
    return buf.getvalue()
