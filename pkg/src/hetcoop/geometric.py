"""Distance-only clustering baseline: each tier cooperates within a fixed ball.

Requires exponential fading with mean mu_k on every tier.  The optimum mirrors
the RSS case with R_k^(-alpha_k) playing the role of the threshold; the
optimal values R_k^(-alpha_k) are proportional to (P_in + P_bh) / (p mu).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import NetworkConfig
from .numerics import EULER_GAMMA, ConvergenceError, DomainError, bisect_increasing
from .optimizer import InfeasibleError, _theta_from

# csc(2 pi / alpha) has a pole at alpha = 2; keep well clear of it.
MIN_ALPHA = 2.1


@dataclass(frozen=True)
class GeometricOptimum:
    R_star: tuple[float, ...]
    P_cl_tilde: float
    residual: float


def _means(cfg: NetworkConfig) -> list[float]:
    mus = []
    for k, t in enumerate(cfg.tiers):
        if t.fading.kind != "exponential":
            raise DomainError(f"tier {k + 1}: geometric baseline needs exponential fading, got {t.fading.kind}")
        if t.alpha <= MIN_ALPHA:
            raise DomainError(f"tier {k + 1}: alpha={t.alpha} too close to 2 for the geometric baseline")
        mus.append(t.fading.param)
    return mus


def omega_tilde(cfg: NetworkConfig) -> list[float]:
    """(2 pi^2 / alpha) csc(2 pi / alpha) lam (p mu)^(2/alpha)."""
    mus = _means(cfg)
    return [2.0 * math.pi**2 / t.alpha / math.sin(2.0 * math.pi / t.alpha) * t.lam * (t.p * mu) ** (2.0 / t.alpha)
            for t, mu in zip(cfg.tiers, mus)]


def theta_tilde(cfg: NetworkConfig, l: int) -> float:
    return _theta_from(omega_tilde(cfg), [t.alpha for t in cfg.tiers], l)


def geometric_rate_params(cfg: NetworkConfig):
    """(omega_tilde, l -> Theta_tilde_l)."""
    return omega_tilde(cfg), (lambda l: theta_tilde(cfg, l))


def _c_tilde(cfg: NetworkConfig) -> list[float]:
    # Coefficient of R_k^(2 - alpha_k) in the bounded interference exponent.
    return [2.0 * math.pi * t.lam * t.p * mu / (t.alpha - 2.0) for t, mu in zip(cfg.tiers, _means(cfg))]


def b_tilde(cfg: NetworkConfig) -> list[float]:
    c = _c_tilde(cfg)
    return [ck / c[-1] for ck in c]


def d_tilde(cfg: NetworkConfig, l: int) -> float:
    w = omega_tilde(cfg)
    return w[l] ** (cfg.tiers[l].alpha / 2.0) / _c_tilde(cfg)[-1]


def geometric_budget(cfg: NetworkConfig, l: int, tau0: float | None = None) -> float:
    tau0 = cfg.tau0 if tau0 is None else tau0
    a_l = cfg.tiers[l].alpha
    return d_tilde(cfg, l) * math.exp(0.5 * (a_l - 2.0) * EULER_GAMMA + theta_tilde(cfg, l) - tau0)


def omega_ratio_tilde(cfg: NetworkConfig, j: int, k: int) -> float:
    mus = _means(cfg)
    tj, tk = cfg.tiers[j], cfg.tiers[k]
    return cfg.bs_power(j) * tk.p * mus[k] / (cfg.bs_power(k) * tj.p * mus[j])


def geometric_optimal_radii(cfg: NetworkConfig, l: int | None = None,
                            tau0: float | None = None) -> GeometricOptimum:
    """Power-minimising ball radii under the bounded rate floor."""
    K = cfg.K
    if l is None:
        w = omega_tilde(cfg)
        l = max(range(K), key=lambda k: 0.5 * cfg.tiers[k].alpha * math.log(w[k]))
    rhs = geometric_budget(cfg, l, tau0)
    if not rhs > 0:
        raise InfeasibleError(cfg.tau0 if tau0 is None else tau0, math.nan)
    Bt = b_tilde(cfg)
    a = [t.alpha for t in cfg.tiers]

    def lhs(k: int, R: float) -> float:
        return sum(Bt[j] * omega_ratio_tilde(cfg, j, k) ** ((a[j] - 2.0) / a[j])
                   * R ** (a[k] * (2.0 - a[j]) / a[j]) for j in range(K))

    radii = []
    for k in range(K):
        lo, hi = 1e-3, 1e7
        if lhs(k, hi) > rhs or lhs(k, lo) < rhs:
            raise ConvergenceError(f"tier {k + 1}: radius not bracketed in [{lo:g}, {hi:g}] m")
        # lhs decreases in R, so -lhs + rhs increases.
        radii.append(bisect_increasing(lambda R: rhs - lhs(k, R), lo, hi, rtol=1e-13))
    residual = max(abs(lhs(k, R) - rhs) / rhs for k, R in enumerate(radii))
    power = sum(math.pi * t.lam * R**2 * cfg.bs_power(k) for k, (t, R) in enumerate(zip(cfg.tiers, radii)))
    return GeometricOptimum(tuple(radii), power, residual)
