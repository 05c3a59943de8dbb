"""Network description: tiers, fading laws, and the threshold/radius duality."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .numerics import DomainError


@dataclass(frozen=True)
class FadingModel:
    """Distribution of the per-link fading coefficient Psi.

    ``kind`` is one of ``"exponential"`` (``param`` is the mean),
    ``"deterministic"`` (``param`` is the constant value) or ``"empirical"``
    (``samples`` holds the draws; moments and sampling use them directly).
    """

    kind: str
    param: float = 1.0
    samples: tuple[float, ...] = field(default=(), repr=False)

    def __post_init__(self):
        if self.kind not in ("exponential", "deterministic", "empirical"):
            raise DomainError(f"unknown fading kind {self.kind!r}")
        if self.kind == "empirical":
            if not self.samples or min(self.samples) < 0:
                raise DomainError("empirical fading needs a non-empty list of nonnegative samples")
        elif not (math.isfinite(self.param) and self.param > 0):
            raise DomainError(f"fading parameter must be finite and > 0, got {self.param}")

    @classmethod
    def exponential(cls, mean: float = 1.0) -> FadingModel:
        return cls("exponential", float(mean))

    @classmethod
    def deterministic(cls, value: float = 1.0) -> FadingModel:
        return cls("deterministic", float(value))

    @classmethod
    def empirical(cls, samples: Sequence[float]) -> FadingModel:
        return cls("empirical", 1.0, tuple(float(s) for s in samples))

    def frac_moment(self, s: float) -> float:
        """E[Psi^s] for s in (0, 1]."""
        if not 0.0 < s <= 1.0:
            raise DomainError(f"fractional moment order must be in (0, 1], got {s}")
        if self.kind == "exponential":
            return self.param**s * math.gamma(1.0 + s)
        if self.kind == "deterministic":
            return self.param**s
        return float(np.mean(np.asarray(self.samples) ** s))

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.kind == "exponential":
            return rng.exponential(self.param, n)
        if self.kind == "deterministic":
            return np.full(n, self.param)
        return rng.choice(np.asarray(self.samples), n)

    def to_dict(self) -> dict:
        if self.kind == "empirical":
            return {"kind": self.kind, "samples": list(self.samples)}
        return {"kind": self.kind, "param": self.param}

    @classmethod
    def from_dict(cls, d: dict) -> FadingModel:
        kind = d.get("kind")
        if kind == "empirical":
            return cls.empirical(d["samples"])
        return cls(kind, float(d.get("param", 1.0)))


@dataclass(frozen=True)
class TierParams:
    """One BS tier.  Units: lam [1/m^2], p [W], P0 [W]; alpha and delta are dimensionless."""

    lam: float
    p: float
    alpha: float
    P0: float = 0.0
    delta: float = 0.0
    fading: FadingModel = FadingModel.exponential(1.0)

    def __post_init__(self):
        if not self.lam > 0:
            raise DomainError(f"lambda (tier density) must be > 0, got {self.lam}")
        if not self.p > 0:
            raise DomainError(f"p (transmit power) must be > 0, got {self.p}")
        if not self.alpha > 2:
            raise DomainError(f"alpha (path-loss exponent) must be > 2, got {self.alpha}")
        if not self.P0 >= 0:
            raise DomainError(f"P0 (static power) must be >= 0, got {self.P0}")
        if not self.delta >= 0:
            raise DomainError(f"delta (load slope) must be >= 0, got {self.delta}")

    @property
    def p_in(self) -> float:
        """Average consumption of one active BS, P0 + delta * p."""
        return self.P0 + self.delta * self.p

    def moment(self, s: float) -> float:
        return self.fading.frac_moment(s)


@dataclass(frozen=True)
class NetworkConfig:
    tiers: tuple[TierParams, ...]
    P_bh: float = 0.0
    sigma2: float = 0.0
    tau0: float = 3.5

    def __post_init__(self):
        object.__setattr__(self, "tiers", tuple(self.tiers))
        if len(self.tiers) < 1:
            raise DomainError("need at least one tier")
        if not self.P_bh >= 0:
            raise DomainError(f"P_bh (backhaul power) must be >= 0, got {self.P_bh}")
        if not self.sigma2 >= 0:
            raise DomainError(f"sigma2 (noise power) must be >= 0, got {self.sigma2}")
        if not self.tau0 > 0:
            raise DomainError(f"rate target tau0 must be > 0, got {self.tau0}")

    @property
    def K(self) -> int:
        return len(self.tiers)

    def bs_power(self, k: int) -> float:
        """Per-BS power including backhaul, P_k,in + P_bh."""
        return self.tiers[k].p_in + self.P_bh

    def replace_tier(self, k: int, **changes) -> NetworkConfig:
        tiers = list(self.tiers)
        tiers[k] = replace(tiers[k], **changes)
        return replace(self, tiers=tuple(tiers))

    def with_(self, **changes) -> NetworkConfig:
        return replace(self, **changes)


@dataclass(frozen=True)
class ThresholdVector:
    """Per-tier RSS thresholds in watts of received power."""

    T: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "T", tuple(float(x) for x in self.T))
        for k, x in enumerate(self.T):
            if not x > 0:
                raise DomainError(f"threshold T_{k + 1} must be > 0, got {x}")

    @classmethod
    def from_radii(cls, cfg: NetworkConfig, radii: Sequence[float]) -> ThresholdVector:
        if len(radii) != cfg.K:
            raise DomainError(f"expected {cfg.K} radii, got {len(radii)}")
        return cls(tuple(threshold_from_radius(t, r) for t, r in zip(cfg.tiers, radii)))

    def radii(self, cfg: NetworkConfig) -> tuple[float, ...]:
        return tuple(mean_radius(t, x) for t, x in zip(cfg.tiers, self.T))

    def __len__(self):
        return len(self.T)

    def __iter__(self):
        return iter(self.T)

    def __getitem__(self, k):
        return self.T[k]


def as_thresholds(T) -> tuple[float, ...]:
    if isinstance(T, ThresholdVector):
        return T.T
    return ThresholdVector(tuple(T)).T


def mean_radius(tier: TierParams, T_k: float) -> float:
    """Mean cooperative radius (p/T)^(1/alpha) E[Psi^(1/alpha)] in metres."""
    if not T_k > 0:
        raise DomainError(f"threshold must be > 0, got {T_k}")
    return (tier.p / T_k) ** (1.0 / tier.alpha) * tier.moment(1.0 / tier.alpha)


def threshold_from_radius(tier: TierParams, R_k: float) -> float:
    """Inverse of :func:`mean_radius`."""
    if not R_k > 0:
        raise DomainError(f"radius must be > 0, got {R_k}")
    return tier.p * (tier.moment(1.0 / tier.alpha) / R_k) ** tier.alpha


def to_db(T: float) -> float:
    """Received power relative to 1 W, in dB."""
    return 10.0 * math.log10(T)


def reference_network(mu1: float = 1.0, mu2: float = 1.0, alpha1: float = 4.3, alpha2: float = 3.8,
                      tau0: float = 3.5, sigma2: float = 0.0) -> NetworkConfig:
    """Two-tier macro/pico network with the reference simulation parameters."""
    macro = TierParams(lam=1.0 / (250.0**2 * math.pi), p=20.0, alpha=alpha1, P0=130.0, delta=4.7,
                       fading=FadingModel.exponential(mu1))
    pico = TierParams(lam=1.0 / (50.0**2 * math.pi), p=0.13, alpha=alpha2, P0=6.8, delta=4.0,
                      fading=FadingModel.exponential(mu2))
    return NetworkConfig(tiers=(macro, pico), P_bh=5.0, sigma2=sigma2, tau0=tau0)
