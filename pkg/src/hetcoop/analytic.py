"""Spatial average rate, cluster statistics, power and energy efficiency."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .model import NetworkConfig, TierParams, as_thresholds
from .numerics import DEFAULT_QUAD, DomainError, QuadratureSpec, integrate_semi_infinite, z_function, z_prime


def mean_cluster_size(tier: TierParams, T_k: float) -> float:
    """Expected number of tier BSs whose received power clears T_k."""
    if not T_k > 0:
        raise DomainError(f"threshold must be > 0, got {T_k}")
    q = 2.0 / tier.alpha
    return math.pi * tier.lam * (tier.p / T_k) ** q * tier.moment(q)


def cluster_sizes(cfg: NetworkConfig, T) -> list[float]:
    T = as_thresholds(T)
    _check_len(cfg, T)
    return [mean_cluster_size(tier, x) for tier, x in zip(cfg.tiers, T)]


def cluster_power(cfg: NetworkConfig, T) -> float:
    """Average intra-cluster consumption sum_k N_k (P_k,in + P_bh) in watts."""
    return sum(n * cfg.bs_power(k) for k, n in enumerate(cluster_sizes(cfg, T)))


def field_coefficients(cfg: NetworkConfig) -> list[float]:
    """pi lam_k E[Psi^(2/alpha)] p_k^(2/alpha), the prefactor of (t)^(2/alpha) Z in the exponents."""
    return [math.pi * t.lam * t.moment(2.0 / t.alpha) * t.p ** (2.0 / t.alpha) for t in cfg.tiers]


def _exponents(cfg: NetworkConfig, T, t: float) -> tuple[float, float]:
    # Laplace exponents of the interference (outside clusters) and signal fields.
    a_int = a_sig = 0.0
    for tier, x, c in zip(cfg.tiers, T, field_coefficients(cfg)):
        scale = c * t ** (2.0 / tier.alpha)
        a_int += scale * z_function(t, x, tier.alpha)
        a_sig += scale * z_prime(t, x, tier.alpha)
    return a_int, a_sig


def laplace_JI(cfg: NetworkConfig, T, t: float) -> float:
    """Laplace transform of the aggregate power from non-cooperating BSs."""
    T = as_thresholds(T)
    _check_len(cfg, T)
    if not t > 0:
        raise DomainError(f"t must be > 0, got {t}")
    return math.exp(-_exponents(cfg, T, t)[0])


def laplace_JS(cfg: NetworkConfig, T, t: float) -> float:
    """Laplace transform of the aggregate power from cooperating BSs."""
    T = as_thresholds(T)
    _check_len(cfg, T)
    if not t > 0:
        raise DomainError(f"t must be > 0, got {t}")
    return math.exp(-_exponents(cfg, T, t)[1])


@dataclass(frozen=True)
class RateBreakdown:
    tau: float
    laplace_JS_at: Callable[[float], float]
    laplace_JI_at: Callable[[float], float]


def _scale_hint(cfg: NetworkConfig) -> tuple[float, float]:
    # ln t where the full field's Laplace exponent is O(1), per tier.
    xs = [(t.alpha / 2.0) * -math.log(w * math.gamma(1 - 2.0 / t.alpha))
          for t, w in zip(cfg.tiers, field_coefficients(cfg))]
    return min(xs) - 30.0, max(xs) + 15.0


def spatial_average_rate(cfg: NetworkConfig, T, quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """E[ln(1 + SINR)] in nats/s/Hz for the typical user.

    Evaluated as int_0^inf e^(-sigma2 t)/t * L_JI(t) [1 - L_JS(t)] dt, which
    keeps the integrand bounded at t -> 0.
    """
    T = as_thresholds(T)
    _check_len(cfg, T)
    if all(math.isinf(x) for x in T):
        return 0.0
    sigma2 = cfg.sigma2

    def integrand(t: float) -> float:
        a_int, a_sig = _exponents(cfg, T, t)
        return math.exp(-a_int - sigma2 * t) * -math.expm1(-a_sig) / t

    return integrate_semi_infinite(integrand, quad, hint=_scale_hint(cfg))


def rate_breakdown(cfg: NetworkConfig, T, quad: QuadratureSpec = DEFAULT_QUAD) -> RateBreakdown:
    T = as_thresholds(T)
    return RateBreakdown(
        tau=spatial_average_rate(cfg, T, quad),
        laplace_JS_at=lambda t: laplace_JS(cfg, T, t),
        laplace_JI_at=lambda t: laplace_JI(cfg, T, t),
    )


def energy_efficiency(cfg: NetworkConfig, T, quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Spatial average rate per watt of cluster power."""
    power = cluster_power(cfg, T)
    if not power > 0:
        raise DomainError("cluster power is zero; energy efficiency undefined")
    return spatial_average_rate(cfg, T, quad) / power


def _check_len(cfg: NetworkConfig, T) -> None:
    if len(T) != cfg.K:
        raise DomainError(f"expected {cfg.K} thresholds, got {len(T)}")
