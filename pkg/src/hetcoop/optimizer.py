"""Power minimisation under a spatial-average-rate floor.

Tier indices are 0-based throughout; the last tier (index K-1) is the one
whose threshold is solved for by the lower-bound machinery.

The rate floor is handled through the bound 1 - e^-x <= x applied to the
interference term, which turns the constraint into

    sum_k c_k T_k^((alpha_k - 2)/alpha_k) <= rho_0,
    c_k = 2 pi lam_k E[Psi^(2/alpha_k)] p_k^(2/alpha_k) / (alpha_k - 2),

with rho_0 = omega_l^(alpha_l/2) exp((alpha_l - 2) C / 2 + Theta_l - tau0)
for any reference tier l.  Dividing by c_{K-1} gives the B_k / D_l form.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

from scipy import optimize

from .analytic import cluster_power, field_coefficients, spatial_average_rate
from .model import NetworkConfig, ThresholdVector
from .numerics import (
    EULER_GAMMA, ConvergenceError, DomainError, QuadratureSpec, bisect_increasing,
    integrate_semi_infinite,
)

C = EULER_GAMMA
THETA_QUAD = QuadratureSpec(rel_tol=1e-12, abs_tol=1e-14, max_subdivisions=2000)


class InfeasibleError(ValueError):
    """The rate floor exceeds what the fixed thresholds allow."""

    def __init__(self, tau0: float, tau0_max: float):
        super().__init__(f"tau0={tau0:.6g} exceeds the largest achievable floor tau0_max={tau0_max:.6g}")
        self.tau0 = tau0
        self.tau0_max = tau0_max


def omega(cfg: NetworkConfig) -> list[float]:
    """omega_k = pi lam_k E[Psi^(2/alpha_k)] p_k^(2/alpha_k) Gamma(1 - 2/alpha_k)."""
    return [c * math.gamma(1.0 - 2.0 / t.alpha) for t, c in zip(cfg.tiers, field_coefficients(cfg))]


def _alphas(cfg):
    return [t.alpha for t in cfg.tiers]


def _theta_from(omegas: Sequence[float], alphas: Sequence[float], l: int,
                quad: QuadratureSpec = THETA_QUAD) -> float:
    if len(omegas) == 1:
        return 0.0
    wl, ql = omegas[l], 2.0 / alphas[l]
    rest = [(w, 2.0 / a) for k, (w, a) in enumerate(zip(omegas, alphas)) if k != l]

    def f(t: float) -> float:
        s = sum(w * t**q for w, q in rest)
        return math.exp(-wl * t**ql) * -math.expm1(-s) / t

    xs = [(a / 2.0) * -math.log(w) for w, a in zip(omegas, alphas)]
    return integrate_semi_infinite(f, quad, hint=(min(xs) - 30.0, max(xs) + 15.0))


def theta(cfg: NetworkConfig, l: int, quad: QuadratureSpec = THETA_QUAD) -> float:
    """Theta_l = int_0^inf exp(-w_l t^(2/a_l)) [1 - exp(-sum_{k!=l} w_k t^(2/a_k))] / t dt."""
    _check_index(cfg, l)
    return _theta_from(omega(cfg), _alphas(cfg), l, quad)


def theta_equal_alpha(cfg: NetworkConfig, l: int) -> float:
    """Closed form (alpha/2) ln(sum_k w_k / w_l) when all exponents coincide."""
    alpha = _common_alpha(cfg)
    w = omega(cfg)
    return 0.5 * alpha * math.log(sum(w) / w[l])


def taylor_index(cfg: NetworkConfig) -> int:
    """Reference tier for the two-tier series: 1 if w_0 w_1^(-a_1/a_0) < 1, else 0."""
    if cfg.K != 2:
        raise DomainError("the Taylor expansion applies to two-tier networks only")
    w, a = omega(cfg), _alphas(cfg)
    return 1 if w[0] * w[1] ** (-a[1] / a[0]) < 1 else 0


def theta_taylor_two_tier(cfg: NetworkConfig, M: int, l: int | None = None) -> float:
    """First M terms of the series for Theta_l in a two-tier network.

    Theta_l = (a_l/2) sum_n (-1)^(n+1)/n! (w_j w_l^(-a_l/a_j))^n Gamma(a_l n / a_j).
    ``l`` defaults to :func:`taylor_index`, which keeps the ratio below one.
    """
    if cfg.K != 2:
        raise DomainError("the Taylor expansion applies to two-tier networks only")
    if M < 1:
        raise DomainError(f"need at least one term, got M={M}")
    if l is None:
        l = taylor_index(cfg)
    j = 1 - l
    w, a = omega(cfg), _alphas(cfg)
    ratio = w[j] * w[l] ** (-a[l] / a[j])
    other = w[l] * w[j] ** (-a[j] / a[l])
    if min(ratio, other) >= 1.0 - 1e-9:
        # The two ratios are reciprocal powers, so this only happens at (numerically) one.
        warnings.warn(f"series ratio {ratio:.3g} >= 1 for both index choices; truncation may diverge",
                      RuntimeWarning, stacklevel=2)
    total = 0.0
    for n in range(1, M + 1):
        g = a[l] * n / a[j]
        # Work in logs: ratio^n Gamma(g) / n! overflows quickly for large M.
        mag = math.exp(n * math.log(ratio) + math.lgamma(g) - math.lgamma(n + 1))
        total += mag if n % 2 else -mag
    return 0.5 * a[l] * total


def bound_coefficients(cfg: NetworkConfig) -> list[float]:
    """B_k, the per-tier weights normalised by the last tier (B_{K-1} = 1)."""
    w, a = omega(cfg), _alphas(cfg)
    ref = (a[-1] - 2.0) * math.gamma(1.0 - 2.0 / a[-1]) / w[-1]
    return [ref * wk / ((ak - 2.0) * math.gamma(1.0 - 2.0 / ak)) for wk, ak in zip(w, a)]


def d_coefficient(cfg: NetworkConfig, l: int) -> float:
    """D_l = (a_K - 2) Gamma(1 - 2/a_K) w_l^(a_l/2) / (2 w_K)."""
    _check_index(cfg, l)
    w, a = omega(cfg), _alphas(cfg)
    return (a[-1] - 2.0) * math.gamma(1.0 - 2.0 / a[-1]) * w[l] ** (a[l] / 2.0) / (2.0 * w[-1])


def default_index(cfg: NetworkConfig) -> int:
    w, a = omega(cfg), _alphas(cfg)
    return max(range(cfg.K), key=lambda k: (a[k] / 2.0) * math.log(w[k]))


def rate_budget(cfg: NetworkConfig, l: int | None = None, tau0: float | None = None,
                theta_l: float | None = None) -> float:
    """Right-hand side D_l exp((a_l - 2) C / 2 + Theta_l - tau0); independent of l."""
    if l is None:
        l = default_index(cfg)
    if tau0 is None:
        tau0 = cfg.tau0
    if theta_l is None:
        theta_l = theta(cfg, l)
    a_l = cfg.tiers[l].alpha
    return d_coefficient(cfg, l) * math.exp(0.5 * (a_l - 2.0) * C + theta_l - tau0)


def _partial_sum(cfg: NetworkConfig, T_partial: Sequence[float]) -> float:
    if len(T_partial) != cfg.K - 1:
        raise DomainError(f"expected {cfg.K - 1} fixed thresholds, got {len(T_partial)}")
    B = bound_coefficients(cfg)
    total = 0.0
    for k, x in enumerate(T_partial):
        if not x > 0:
            raise DomainError(f"threshold T_{k + 1} must be > 0, got {x}")
        a = cfg.tiers[k].alpha
        total += B[k] * x ** ((a - 2.0) / a)
    return total


def _from_slack(cfg: NetworkConfig, slack: float, tau0_max_fn: Callable[[], float], tau0: float) -> float:
    if slack < 0:
        raise InfeasibleError(tau0, tau0_max_fn())
    aK = cfg.tiers[-1].alpha
    return slack ** (aK / (aK - 2.0))


def threshold_lower_bound(cfg: NetworkConfig, T_partial: Sequence[float], l: int | None = None,
                          tau0: float | None = None) -> float:
    """Lower bound T_K^d on the optimal last-tier threshold given the others."""
    tau0 = cfg.tau0 if tau0 is None else tau0
    slack = rate_budget(cfg, l, tau0) - _partial_sum(cfg, T_partial)
    return _from_slack(cfg, slack, lambda: tau0_max(cfg, T_partial, l), tau0)


def threshold_lower_bound_two_tier_closed(cfg: NetworkConfig, T_1: float, M: int = 2,
                                          tau0: float | None = None) -> float:
    """T_2^a: the two-tier bound with Theta from the M-term series."""
    if cfg.K != 2:
        raise DomainError("closed form applies to two-tier networks only")
    tau0 = cfg.tau0 if tau0 is None else tau0
    l = taylor_index(cfg)
    th = theta_taylor_two_tier(cfg, M, l)
    slack = rate_budget(cfg, l, tau0, th) - _partial_sum(cfg, [T_1])
    return _from_slack(cfg, slack, lambda: tau0_max(cfg, [T_1], l), tau0)


def tau0_max(cfg: NetworkConfig, T_partial: Sequence[float], l: int | None = None) -> float:
    """Largest rate floor for which the lower bound exists."""
    if cfg.K < 2:
        raise DomainError("tau0_max needs at least two tiers")
    if l is None:
        l = default_index(cfg)
    a_l = cfg.tiers[l].alpha
    return (0.5 * (a_l - 2.0) * C + theta(cfg, l)
            - math.log(_partial_sum(cfg, T_partial) / d_coefficient(cfg, l)))


def rate_lower_bound(cfg: NetworkConfig, T, l: int | None = None) -> float:
    """Closed-form lower bound on the interference-limited rate at thresholds T."""
    T = tuple(T)
    if l is None:
        l = default_index(cfg)
    w, a = omega(cfg), _alphas(cfg)
    rho = sum(2.0 * wk / ((ak - 2.0) * math.gamma(1.0 - 2.0 / ak)) * x ** ((ak - 2.0) / ak)
              for wk, ak, x in zip(w, a, T))
    return 0.5 * (a[l] - 2.0) * C + 0.5 * a[l] * math.log(w[l]) - math.log(rho) + theta(cfg, l)


def threshold_exact(cfg: NetworkConfig, T_partial: Sequence[float], tau0: float | None = None,
                    rate_fn: Callable | None = None, rtol: float = 1e-9) -> float:
    """Largest T_K whose interference-limited rate still meets tau0.

    Found by bracketing around the lower bound and solving on log T_K; the
    rate is strictly decreasing in T_K so the root is unique.
    """
    tau0 = cfg.tau0 if tau0 is None else tau0
    cfg0 = cfg.with_(sigma2=0.0)
    if rate_fn is None:
        rate_fn = spatial_average_rate
    base = threshold_lower_bound(cfg0, T_partial, tau0=tau0)

    def g(logT: float) -> float:
        return rate_fn(cfg0, (*T_partial, math.exp(logT))) - tau0

    lo, hi = math.log(base) - 6 * math.log(10), math.log(base) + 6 * math.log(10)
    g_lo, g_hi = g(lo), g(hi)
    if g_lo < 0 or g_hi > 0:
        raise ConvergenceError(f"no sign change for T_K in [{math.exp(lo):.3g}, {math.exp(hi):.3g}]")
    root = optimize.brentq(g, lo, hi, xtol=1e-13, rtol=1e-14)
    return math.exp(root)


def _common_alpha(cfg: NetworkConfig) -> float:
    a = _alphas(cfg)
    if max(a) - min(a) > 1e-12 * max(a):
        raise DomainError(f"path-loss exponents differ: {a}")
    return a[0]


def xi(cfg: NetworkConfig) -> float:
    """Xi = (a - 2) Gamma(1 - 2/a) (sum w)^(a/2) / (2 w_K), equal exponents only."""
    alpha = _common_alpha(cfg)
    w = omega(cfg)
    return (alpha - 2.0) * math.gamma(1.0 - 2.0 / alpha) * sum(w) ** (alpha / 2.0) / (2.0 * w[-1])


def equal_alpha_lower_bound(cfg: NetworkConfig, T_partial: Sequence[float],
                            tau0: float | None = None) -> float:
    alpha = _common_alpha(cfg)
    tau0 = cfg.tau0 if tau0 is None else tau0
    w = omega(cfg)
    e = (alpha - 2.0) / alpha
    if len(T_partial) != cfg.K - 1:
        raise DomainError(f"expected {cfg.K - 1} fixed thresholds, got {len(T_partial)}")
    slack = xi(cfg) * math.exp(0.5 * (alpha - 2.0) * C - tau0) - sum(
        wk * x**e / w[-1] for wk, x in zip(w, T_partial))
    return _from_slack(cfg, slack, lambda: tau0_max(cfg, T_partial), tau0)


def lambda_monotonicity_regions(cfg: NetworkConfig, T_partial: Sequence[float],
                                tau0: float | None = None) -> tuple[float, float]:
    """(G1, G2): T_K^d rises with lam_K above G1 and falls below (G1 - G2)^+."""
    alpha = _common_alpha(cfg)
    tau0 = cfg.tau0 if tau0 is None else tau0
    if len(T_partial) != cfg.K - 1:
        raise DomainError(f"expected {cfg.K - 1} fixed thresholds, got {len(T_partial)}")
    q = 2.0 / alpha
    g = math.gamma(1.0 - q)
    mom = [t.moment(q) * t.p**q for t in cfg.tiers]
    head = range(cfg.K - 1)
    G1 = 2.0 * sum(mom[k] * cfg.tiers[k].lam for k in head) / ((alpha - 2.0) * mom[-1])
    s_head = sum(omega(cfg)[k] for k in head)
    e = (alpha - 2.0) / alpha
    G2 = 4.0 * sum(mom[k] * T_partial[k] ** e * cfg.tiers[k].lam for k in head) / (
        (alpha - 2.0) ** 2 * g * math.exp(0.5 * (alpha - 2.0) * C - tau0)
        * s_head ** (0.5 * (alpha - 2.0)) * mom[-1])
    return G1, G2


@dataclass(frozen=True)
class OptimalThresholds:
    T_star: ThresholdVector
    residual: float
    achieved_rate_lower_bound: float
    scale: float = 1.0
    """Common factor applied in exact mode (1.0 otherwise)."""

    @property
    def ratios_to_last(self) -> list[float]:
        return [x / self.T_star[-1] for x in self.T_star]


def optimal_thresholds(cfg: NetworkConfig, l: int | None = None, tau0: float | None = None,
                       exact: bool = False, closed_form: bool = True) -> OptimalThresholds:
    """Thresholds minimising cluster power subject to the bounded rate floor.

    Optimal thresholds are proportional to per-BS power (P_in + P_bh), so
    a single monotone equation in T_K fixes all of them.  With ``exact`` the
    whole vector is then rescaled by one factor until the true rate equals
    tau0, keeping the ratios.  ``closed_form=False`` forces the root-finder
    even when all exponents coincide.
    """
    tau0 = cfg.tau0 if tau0 is None else tau0
    cfg0 = cfg.with_(sigma2=0.0)
    K = cfg.K
    B = bound_coefficients(cfg)
    W = [cfg.bs_power(k) for k in range(K)]
    a = _alphas(cfg)
    rhs = rate_budget(cfg, l, tau0)

    def lhs(TK: float) -> float:
        return sum(B[j] * (W[j] / W[-1] * TK) ** ((a[j] - 2.0) / a[j]) for j in range(K))

    alpha = None
    if closed_form:
        try:
            alpha = _common_alpha(cfg)
        except DomainError:
            pass
    if alpha is not None:
        e = (alpha - 2.0) / alpha
        TK = (xi(cfg) * math.exp(0.5 * (alpha - 2.0) * C - tau0)
              / sum(B[j] * (W[j] / W[-1]) ** e for j in range(K))) ** (1.0 / e)
    else:
        lo, hi = 1e-20, 1e5
        while lhs(lo) > rhs:
            lo *= 1e-5
        while lhs(hi) < rhs:
            hi *= 1e5
        TK = bisect_increasing(lambda x: lhs(x) - rhs, lo, hi, rtol=1e-13)
    T = [W[k] / W[-1] * TK for k in range(K)]
    residual = abs(lhs(TK) - rhs) / rhs
    scale = 1.0
    if exact:
        scale = _exact_scale(cfg0, T, tau0)
        T = [x * scale for x in T]
    return OptimalThresholds(ThresholdVector(tuple(T)), residual, rate_lower_bound(cfg0, T, l), scale)


def _exact_scale(cfg0: NetworkConfig, T: Sequence[float], tau0: float) -> float:
    def g(logc: float) -> float:
        c = math.exp(logc)
        return spatial_average_rate(cfg0, [x * c for x in T]) - tau0

    lo, hi = -3.0, 3.0
    while g(lo) < 0:
        lo -= 3.0
        if lo < -60:
            raise ConvergenceError("could not bracket the exact rescaling factor")
    while g(hi) > 0:
        hi += 3.0
        if hi > 60:
            raise ConvergenceError("could not bracket the exact rescaling factor")
    return math.exp(optimize.brentq(g, lo, hi, xtol=1e-12))


def minimum_cluster_power(cfg: NetworkConfig, **kwargs) -> float:
    return cluster_power(cfg, optimal_thresholds(cfg, **kwargs).T_star)


def _check_index(cfg: NetworkConfig, l: int) -> None:
    if not 0 <= l < cfg.K:
        raise DomainError(f"tier index {l} out of range for K={cfg.K}")
