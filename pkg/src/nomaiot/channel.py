"""Path loss, small-scale fading samplers and batched channel realisations.

Randomness comes from counter-based Philox streams keyed by
``(seed, block, stream-id)``: trials are cut into fixed-size blocks and each
block owns independent streams for terrestrial/aerial distances and gains.
A block's draws therefore do not depend on which worker produces it or in
what order blocks are processed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import NetworkConfig
from .errors import DomainError
from .geometry import sample_distance, zones

BLOCK_TRIALS = 1 << 16

# stream ids inside a block
_D_G, _D_U, _G_G, _G_U = range(4)


def path_loss(d, alpha: float, r0: float):
    """Bounded path loss: d^-alpha beyond r0, r0^-alpha inside it."""
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise DomainError("distance must be positive")
    out = np.where(d > r0, d, r0) ** (-alpha)
    return out if out.ndim else float(out)


def sample_rayleigh_power(u):
    """|h|^2 under Rayleigh fading by inversion: -ln(u), exponential(1)."""
    u = np.asarray(u, dtype=float)
    out = -np.log(u)
    return out if out.ndim else float(out)


def sample_nakagami_power(m: int, rng: np.random.Generator, size=None):
    """Unit-mean Gamma(m, 1/m) power gain as the mean of m exponentials."""
    if int(m) != m or m < 1:
        raise DomainError(f"Nakagami parameter must be an integer >= 1, got {m!r}")
    m = int(m)
    shape = () if size is None else (size if isinstance(size, tuple) else (size,))
    u = 1.0 - rng.random(shape + (m,))
    out = sample_rayleigh_power(u).sum(axis=-1) / m
    return out if np.ndim(out) else float(out)


def stream(seed: int, block: int, sid: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(block), int(sid)))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class ChannelDraw:
    """Distances and power gains for a batch of realisations, shape (n, M)."""

    d_g: np.ndarray
    d_u: np.ndarray
    g_g: np.ndarray
    g_u: np.ndarray

    @property
    def trials(self) -> int:
        return self.d_g.shape[0]


def draw_block(cfg: NetworkConfig, seed: int, block: int, n: int) -> ChannelDraw:
    """Realisations for one block of ``n`` trials (n <= BLOCK_TRIALS)."""
    M = cfg.M
    ug = stream(seed, block, _D_G).random((n, M))
    uu = stream(seed, block, _D_U).random((n, M))
    d_g = np.column_stack([sample_distance(z, ug[:, k]) for k, z in enumerate(zones(cfg, "terrestrial"))])
    d_u = np.column_stack([sample_distance(z, uu[:, k]) for k, z in enumerate(zones(cfg, "aerial"))])
    g_g = sample_rayleigh_power(1.0 - stream(seed, block, _G_G).random((n, M)))
    rng_u = stream(seed, block, _G_U)
    g_u = np.column_stack([sample_nakagami_power(m, rng_u, n) for m in cfg.m])
    return ChannelDraw(d_g=d_g, d_u=d_u, g_g=g_g, g_u=g_u)


def block_sizes(trials: int) -> list[int]:
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials}")
    full, rest = divmod(int(trials), BLOCK_TRIALS)
    return [BLOCK_TRIALS] * full + ([rest] if rest else [])


def iter_draws(cfg: NetworkConfig, trials: int, seed: int):
    """Yield ChannelDraw blocks covering ``trials`` realisations."""
    for b, n in enumerate(block_sizes(trials)):
        yield draw_block(cfg, seed, b, n)
