"""Monte Carlo oracle: PPP realisations around a typical user at the window centre.

Each (seed, realisation, tier) triple owns an independent Philox stream keyed
by those integers, so results do not depend on evaluation order or on how
realisations are split across workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .model import NetworkConfig, as_thresholds, mean_radius
from .numerics import DomainError

_MAX_TIERS = 1 << 16


@dataclass(frozen=True)
class SimConfig:
    """Window geometry and sampling budget.

    ``guard_radius`` (when > 0) is the largest mean cooperative radius a run
    accepts, keeping every cooperative region well inside the window.
    """

    window_side: float = 10_000.0
    realizations: int = 10_000
    seed: int = 0
    guard_radius: float = 0.0

    def __post_init__(self):
        if not self.window_side > 0:
            raise DomainError(f"window_side must be > 0, got {self.window_side}")
        if self.realizations < 1:
            raise DomainError(f"realizations must be >= 1, got {self.realizations}")
        if not 0 <= self.seed < 2**64:
            raise DomainError(f"seed must fit in 64 bits, got {self.seed}")
        if self.guard_radius < 0 or 2 * self.guard_radius >= self.window_side:
            raise DomainError(f"guard_radius must be in [0, window_side/2), got {self.guard_radius}")


@dataclass
class TierPoints:
    """One tier of a realisation; coordinates are relative to the typical user."""

    xy: np.ndarray
    fading: np.ndarray

    @property
    def dist(self) -> np.ndarray:
        return np.hypot(self.xy[:, 0], self.xy[:, 1])


@dataclass
class Clusters:
    """Received powers split into cooperating and interfering BSs, per tier."""

    signal: list[np.ndarray]
    interference: list[np.ndarray]

    @property
    def sizes(self) -> list[int]:
        return [len(s) for s in self.signal]

    @property
    def J_S(self) -> float:
        return float(sum(s.sum() for s in self.signal))

    @property
    def J_I(self) -> float:
        return float(sum(s.sum() for s in self.interference))


@dataclass
class SimOutcome:
    tau_hat: float
    tau_stderr: float
    cluster_size_hat: list[float]
    cluster_size_stderr: list[float]
    power_hat: float
    power_stderr: float
    realizations: int
    laplace_samples: list[tuple[float, float, float, float, float]] = field(default_factory=list)
    """(t, E[exp(-t J_S)], stderr, E[exp(-t J_I)], stderr) per requested t."""


def tier_rng(seed: int, realization: int, tier: int) -> np.random.Generator:
    key = (seed % 2**64) | ((realization * _MAX_TIERS + tier) << 64)
    return np.random.Generator(np.random.Philox(key=key))


def realize_network(cfg: NetworkConfig, sim: SimConfig, realization: int) -> list[TierPoints]:
    """Independent PPP per tier in the square window, with a fading mark per point."""
    half = sim.window_side / 2.0
    area = sim.window_side**2
    out = []
    for k, tier in enumerate(cfg.tiers):
        rng = tier_rng(sim.seed, realization, k)
        n = int(rng.poisson(tier.lam * area))
        xy = rng.uniform(-half, half, size=(n, 2))
        out.append(TierPoints(xy, tier.fading.sample(rng, n)))
    return out


def form_clusters(cfg: NetworkConfig, points: Sequence[TierPoints], T) -> Clusters:
    """Split each tier by received power p Psi r^-alpha >= T_k."""
    T = as_thresholds(T)
    signal, interference = [], []
    for tier, pts, thr in zip(cfg.tiers, points, T):
        rx = tier.p * pts.fading * pts.dist ** (-tier.alpha)
        mask = rx >= thr
        signal.append(rx[mask])
        interference.append(rx[~mask])
    return Clusters(signal, interference)


def instantaneous_rate(clusters: Clusters, sigma2: float) -> float:
    """ln(1 + SINR); zero when there is no cooperating BS."""
    js = clusters.J_S
    if js == 0.0:
        return 0.0
    denom = clusters.J_I + sigma2
    if denom == 0.0:
        return math.inf
    return math.log1p(js / denom)


def _one(cfg, sim, T, idx, ts):
    pts = realize_network(cfg, sim, idx)
    cl = form_clusters(cfg, pts, T)
    js, ji = cl.J_S, cl.J_I
    row = [instantaneous_rate(cl, cfg.sigma2), *cl.sizes]
    for t in ts:
        row.append(math.exp(-t * js))
        row.append(math.exp(-t * ji))
    return row


def run(cfg: NetworkConfig, sim: SimConfig, T, laplace_t: Sequence[float] = (),
        workers: int = 1) -> SimOutcome:
    """Average rate, cluster sizes and cluster power over ``sim.realizations`` networks."""
    T = as_thresholds(T)
    ts = tuple(float(t) for t in laplace_t)
    radii = [mean_radius(tier, x) for tier, x in zip(cfg.tiers, T) if math.isfinite(x)]
    if radii and sim.window_side <= 4 * max(radii):
        raise DomainError(f"window_side {sim.window_side} too small for cooperative radius {max(radii):.1f}")
    if radii and sim.guard_radius > 0 and max(radii) > sim.guard_radius:
        raise DomainError(f"cooperative radius {max(radii):.1f} exceeds guard_radius {sim.guard_radius}")

    idx = range(sim.realizations)
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            rows = list(ex.map(lambda i: _one(cfg, sim, T, i, ts), idx))
    else:
        rows = [_one(cfg, sim, T, i, ts) for i in idx]
    data = np.array(rows, dtype=float)

    n = sim.realizations
    se = (lambda col: float(col.std(ddof=1) / math.sqrt(n)) if n > 1 else math.inf)
    sizes = data[:, 1:1 + cfg.K]
    power = sizes @ np.array([cfg.bs_power(k) for k in range(cfg.K)])
    lap = []
    for j, t in enumerate(ts):
        cs, ci = data[:, 1 + cfg.K + 2 * j], data[:, 2 + cfg.K + 2 * j]
        lap.append((t, float(cs.mean()), se(cs), float(ci.mean()), se(ci)))
    return SimOutcome(
        tau_hat=float(data[:, 0].mean()),
        tau_stderr=se(data[:, 0]),
        cluster_size_hat=[float(c) for c in sizes.mean(axis=0)],
        cluster_size_stderr=[se(sizes[:, k]) for k in range(cfg.K)],
        power_hat=float(power.mean()),
        power_stderr=se(power),
        realizations=n,
        laplace_samples=lap,
    )
