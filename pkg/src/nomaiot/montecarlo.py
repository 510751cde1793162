"""Monte Carlo ground truth for the coverage and rate expressions.

Each realisation draws one device per zone in both tiers, applies the bounded
path loss and the fading gains, and runs the distance-ordered SIC chain:
device i is decoded against the not-yet-cancelled devices of its own tier,
every device of the other tier and noise.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy import special

from .channel import ChannelDraw, block_sizes, draw_block, path_loss
from .config import NetworkConfig
from .errors import DomainError
from .report import CoverageReport, SimEstimate, ThroughputReport

TIERS = ("terrestrial", "aerial")


def _map_blocks(cfg: NetworkConfig, trials: int, seed: int, fn, workers: int = 1) -> list:
    """fn(draw) for every block, results in block order whatever ``workers`` is."""
    sizes = block_sizes(trials)

    def run(b):
        return fn(draw_block(cfg, seed, b, sizes[b]))

    if workers <= 1 or len(sizes) == 1:
        return [run(b) for b in range(len(sizes))]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, range(len(sizes))))


def received_powers(draw: ChannelDraw, cfg: NetworkConfig) -> tuple[np.ndarray, np.ndarray]:
    s_g = cfg.P_g * path_loss(draw.d_g, cfg.alpha_g, cfg.r0) * draw.g_g
    s_u = cfg.P_u * path_loss(draw.d_u, cfg.alpha_u, cfg.r0) * draw.g_u
    return s_g, s_u


def _residual(s: np.ndarray) -> np.ndarray:
    """Column i holds the power of devices i+1..M (not yet cancelled)."""
    tail = np.cumsum(s[:, ::-1], axis=1)[:, ::-1]
    return tail - s


def sinr(draw: ChannelDraw, cfg: NetworkConfig, tier: str) -> np.ndarray:
    """Per-trial SINR of every device of ``tier`` at its SIC stage, shape (n, M)."""
    s_g, s_u = received_powers(draw, cfg)
    own, other = (s_g, s_u) if tier == "terrestrial" else (s_u, s_g)
    denom = _residual(own) + other.sum(axis=1, keepdims=True) + cfg.sigma2
    with np.errstate(divide="ignore", invalid="ignore"):
        out = own / denom
    return np.nan_to_num(out, nan=0.0)


def interference(draw: ChannelDraw, cfg: NetworkConfig, source: str, i: int = 0) -> np.ndarray:
    """Interference power per trial.

    ``source`` is one of ``terrestrial-residual`` / ``aerial-residual``
    (devices i+1..M of that tier) or ``terrestrial-all`` / ``aerial-all``.
    """
    s_g, s_u = received_powers(draw, cfg)
    tier, scope = source.split("-")
    s = s_g if tier == "terrestrial" else s_u
    if scope == "all":
        return s.sum(axis=1)
    return s[:, i:].sum(axis=1)


def interference_laplace_mc(cfg: NetworkConfig, s: float, source: str, i: int = 0,
                            trials: int = 1_000_000, seed: int = 0) -> tuple[float, float]:
    """Sample mean and standard error of exp(-s I)."""
    parts = _map_blocks(cfg, trials, seed, lambda d: _moments(np.exp(-s * interference(d, cfg, source, i))))
    return _mean_se(parts, trials)


def _moments(x: np.ndarray) -> tuple[float, float]:
    return float(np.sum(x)), float(np.sum(x * x))


def _mean_se(parts, n) -> tuple[float, float]:
    s1 = math.fsum(p[0] for p in parts)
    s2 = math.fsum(p[1] for p in parts)
    mean = s1 / n
    var = max(s2 / n - mean * mean, 0.0)
    return mean, math.sqrt(var / n)


def _coverage_counts(draw: ChannelDraw, cfg: NetworkConfig):
    out = {}
    tau = np.asarray(cfg.tau)
    for tier in TIERS:
        ok = sinr(draw, cfg, tier) > tau
        chain = np.logical_and.accumulate(ok, axis=1)
        out[tier] = (ok.sum(axis=0), chain.sum(axis=0))
    return out


def _report(tier, hits, chain, trials, seed, cfg) -> CoverageReport:
    per = [SimEstimate.from_count(int(h), trials, seed) for h in hits]
    cum = [SimEstimate.from_count(int(h), trials, seed) for h in chain]
    return CoverageReport(
        tier=tier, method="monte-carlo",
        per_device=tuple(e.value for e in per),
        cumulative=tuple(e.value for e in cum),
        std_error=tuple(e.std_error for e in per),
        cumulative_std_error=tuple(e.std_error for e in cum),
        meta={"config": cfg, "trials": trials, "seed": seed},
    )


def run_coverage_sim(cfg: NetworkConfig, trials: int, seed: int,
                     workers: int = 1) -> dict[str, CoverageReport]:
    """Empirical conditional and SIC-chain coverage for both tiers."""
    parts = _map_blocks(cfg, trials, seed, lambda d: _coverage_counts(d, cfg), workers)
    reports = {}
    for tier in TIERS:
        hits = sum(p[tier][0] for p in parts)
        chain = sum(p[tier][1] for p in parts)
        reports[tier] = _report(tier, hits, chain, trials, seed, cfg)
    return reports


def run_oma_sim(cfg: NetworkConfig, trials: int, seed: int, workers: int = 1) -> CoverageReport:
    """Terrestrial OMA: noise-only SNR against the 1/M-bandwidth threshold."""
    tau = np.asarray(cfg.tau_oma)

    def fn(draw):
        s_g, _ = received_powers(draw, cfg)
        return (s_g / cfg.sigma2 > tau).sum(axis=0)

    hits = sum(_map_blocks(cfg, trials, seed, fn, workers))
    rep = _report("terrestrial", hits, hits, trials, seed, cfg)
    return CoverageReport(tier=rep.tier, method="oma", per_device=rep.per_device,
                          cumulative=rep.cumulative, std_error=rep.std_error,
                          cumulative_std_error=rep.cumulative_std_error, meta=rep.meta)


def q_inverse(p):
    """Inverse of the Gaussian tail function Q(x) = P(N(0,1) > x)."""
    return -special.ndtri(p)


def finite_blocklength_rate(sinr_value, N_f: float, P_i: float):
    """Normal-approximation rate in bits per channel use, floored at 0.

    log2(1 + sinr) - sqrt(V / N_f) Q^-1(P_i) / ln 2 with the channel
    dispersion V = 1 - (1 + sinr)^-2. ``N_f = inf`` gives the Shannon rate.
    """
    if not 0 < P_i < 1:
        raise DomainError(f"outage probability must lie in (0, 1), got {P_i!r}")
    if not N_f >= 1:
        raise DomainError(f"packet length must be >= 1, got {N_f!r}")
    x = np.asarray(sinr_value, dtype=float)
    if np.any(x < 0):
        raise DomainError("SINR must be nonnegative")
    shannon = np.log2(1.0 + x)
    if math.isinf(N_f):
        out = shannon
    else:
        V = 1.0 - (1.0 + x) ** -2.0
        out = np.maximum(shannon - np.sqrt(V / N_f) * q_inverse(P_i) / math.log(2.0), 0.0)
    return out if out.ndim else float(out)


def outage_sum_rate(cfg: NetworkConfig, trials: int, seed: int, tier: str = "terrestrial",
                    workers: int = 1) -> ThroughputReport:
    """sum_i P_i,cov * R_i/B with the SIC-chain coverage from simulation."""
    rep = run_coverage_sim(cfg, trials, seed, workers)[tier]
    rates = tuple(c * r for c, r in zip(rep.cumulative, cfg.rates_bpcu))
    return ThroughputReport(tier=tier, mode="outage-sum-rate", per_device_rate=rates,
                            packet_length=math.inf)


def network_throughput(cfg: NetworkConfig, N_f: float, trials: int, seed: int,
                       tier: str = "terrestrial", sinr_mode: str = "threshold",
                       workers: int = 1, coverage: CoverageReport | None = None) -> ThroughputReport:
    """Sum over devices of the finite-blocklength rate.

    P_i is the overall outage 1 - P_i,cov from the SIC-chain simulation. A
    device whose simulated coverage is exactly 0 or 1 makes Q^-1(P_i)
    undefined and raises, except for N_f = inf where P_i drops out.
    ``sinr_mode="threshold"`` evaluates the rate at SINR = tau_i;
    ``"instantaneous"`` averages the rate over the simulated per-trial SINR.
    ``coverage`` may pass in a Monte Carlo report of the same (cfg, trials,
    seed) to skip re-simulating the outage probabilities.
    """
    if sinr_mode not in ("threshold", "instantaneous"):
        raise DomainError(f"unknown SINR mode {sinr_mode!r}")
    rep = coverage if coverage is not None else run_coverage_sim(cfg, trials, seed, workers)[tier]
    outage = [1.0 - c for c in rep.cumulative]
    shannon = math.isinf(N_f)
    if not shannon:
        for i, p in enumerate(outage, 1):
            if p <= 0.0 or p >= 1.0:
                raise DomainError(f"overall coverage of device {i} is exactly {1 - p:g}; "
                                  "Q^-1 of the outage probability is undefined")

    def rate(x, k):
        # the dispersion term vanishes for N_f = inf, so P_i is not needed
        if shannon:
            return np.log2(1.0 + np.asarray(x, dtype=float))
        return finite_blocklength_rate(x, N_f, outage[k])

    if sinr_mode == "threshold":
        rates = tuple(float(rate(t, k)) for k, t in enumerate(cfg.tau))
    else:
        def fn(draw):
            x = sinr(draw, cfg, tier)
            return [math.fsum(rate(x[:, k], k)) for k in range(cfg.M)]
        parts = _map_blocks(cfg, trials, seed, fn, workers)
        rates = tuple(math.fsum(p[k] for p in parts) / trials for k in range(cfg.M))
    return ThroughputReport(tier=tier, mode=f"finite-blocklength-{sinr_mode}",
                            per_device_rate=rates, packet_length=N_f)
