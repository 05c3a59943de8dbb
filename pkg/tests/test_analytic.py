import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from hetcoop.analytic import (
    cluster_power, cluster_sizes, energy_efficiency, field_coefficients, laplace_JI, laplace_JS,
    mean_cluster_size, rate_breakdown, spatial_average_rate,
)
from hetcoop.model import FadingModel, NetworkConfig, ThresholdVector, TierParams, reference_network
from hetcoop.numerics import DomainError

T_GRID = np.logspace(-6, 6, 25)


def radii_T(cfg, R):
    return ThresholdVector.from_radii(cfg, R)


def pgfl_exponent(tier, T_k, t, inside):
    """2 pi lam int int (1 - e^(-t p psi r^-alpha)) 1{side} r dr dF(psi) for exp(mu) fading."""
    mu = tier.fading.param
    a, p = tier.alpha, tier.p

    def over_r(psi):
        r0 = (p * psi / T_k) ** (1 / a)
        g = lambda r: -math.expm1(-t * p * psi * r**-a) * r
        if inside:
            return integrate.quad(g, 0, r0, epsabs=0, epsrel=1e-11, limit=200)[0]
        pieces = [(r0, 10 * r0), (10 * r0, math.inf)]
        return sum(integrate.quad(g, lo, hi, epsabs=0, epsrel=1e-11, limit=200)[0] for lo, hi in pieces)

    outer = integrate.quad(lambda psi: over_r(psi) * math.exp(-psi / mu) / mu, 0, math.inf,
                           epsabs=0, epsrel=1e-10, limit=200)[0]
    return 2 * math.pi * tier.lam * outer


@pytest.mark.parametrize("t", [1e8, 1e10, 1e12])
def test_laplace_against_pgfl(cfg, T_ref, t):
    ji = sum(pgfl_exponent(tier, x, t, inside=False) for tier, x in zip(cfg.tiers, T_ref))
    js = sum(pgfl_exponent(tier, x, t, inside=True) for tier, x in zip(cfg.tiers, T_ref))
    assert laplace_JI(cfg, T_ref, t) == pytest.approx(math.exp(-ji), rel=1e-7)
    assert laplace_JS(cfg, T_ref, t) == pytest.approx(math.exp(-js), rel=1e-7)


def test_laplace_limits(cfg, T_ref):
    assert laplace_JI(cfg, T_ref, 1e-30) == pytest.approx(1.0, abs=1e-12)
    assert laplace_JS(cfg, T_ref, 1e-30) == pytest.approx(1.0, abs=1e-12)
    tiny = (1e-300, 1e-300)
    for t in (1.0, 1e10, 1e14):
        assert laplace_JI(cfg, tiny, t) == pytest.approx(1.0, abs=1e-12)
    huge = (1e300, 1e300)
    for t in (1.0, 1e10, 1e14):
        assert laplace_JS(cfg, huge, t) == pytest.approx(1.0, abs=1e-12)


def test_laplace_domain(cfg, T_ref):
    for fn in (laplace_JI, laplace_JS):
        with pytest.raises(DomainError):
            fn(cfg, T_ref, 0.0)
        with pytest.raises(DomainError):
            fn(cfg, (1.0,), 1.0)


radii = st.tuples(st.floats(50.0, 2000.0), st.floats(10.0, 800.0))


@given(R=radii)
def test_laplace_bounds_and_monotone(R):
    cfg = reference_network()
    T = radii_T(cfg, R)
    prev_i = prev_s = 1.0
    for t in T_GRID:
        li, ls = laplace_JI(cfg, T, t), laplace_JS(cfg, T, t)
        assert 0.0 < li <= 1.0 or (li == 0.0 and t > 1e5)
        assert 0.0 < ls <= 1.0 or (ls == 0.0 and t > 1e5)
        assert li <= prev_i and ls <= prev_s
        prev_i, prev_s = li, ls


@given(R=radii, t=st.floats(1e6, 1e14))
def test_product_identity(R, t):
    cfg = reference_network()
    T = radii_T(cfg, R)
    full = sum(a * t ** (2 / tier.alpha) * math.gamma(1 - 2 / tier.alpha)
               for tier, a in zip(cfg.tiers, field_coefficients(cfg)))
    prod = laplace_JI(cfg, T, t) * laplace_JS(cfg, T, t)
    assert prod == pytest.approx(math.exp(-full), rel=1e-10, abs=1e-300)


# Cluster statistics and power

def test_cluster_size_trivial():
    tier = TierParams(lam=2e-5, p=3.0, alpha=3.7, fading=FadingModel.deterministic(1.0))
    assert mean_cluster_size(tier, 3.0) == pytest.approx(math.pi * 2e-5)
    assert mean_cluster_size(tier, 1e300) < 1e-100


def test_cluster_size_domain(cfg):
    with pytest.raises(DomainError):
        mean_cluster_size(cfg.tiers[0], 0.0)


def test_cluster_size_equals_density_times_mean_area(cfg):
    # N_k = lam pi R_k^2 E[Psi^(2/a)] / E[Psi^(1/a)]^2
    R = (500.0, 150.0)
    for tier, N, r in zip(cfg.tiers, cluster_sizes(cfg, radii_T(cfg, R)), R):
        a = tier.alpha
        expected = tier.lam * math.pi * r**2 * math.gamma(1 + 2 / a) / math.gamma(1 + 1 / a) ** 2
        assert N == pytest.approx(expected, rel=1e-12)


def test_single_macro_power_229():
    cfg = reference_network()
    one = NetworkConfig(tiers=(cfg.tiers[0],), P_bh=5.0)
    tier = one.tiers[0]
    # N_1 = 1 when (p/T)^(2/a) = 1 / (pi lam E[Psi^(2/a)])
    T = tier.p * (math.pi * tier.lam * tier.moment(2 / tier.alpha)) ** (tier.alpha / 2)
    assert cluster_sizes(one, (T,))[0] == pytest.approx(1.0, rel=1e-12)
    assert cluster_power(one, (T,)) == pytest.approx(229.0, rel=1e-12)


def test_power_degenerate_model(cfg, T_ref):
    bare = cfg.with_(P_bh=0.0).replace_tier(0, delta=0.0).replace_tier(1, delta=0.0)
    N = cluster_sizes(bare, T_ref)
    assert cluster_power(bare, T_ref) == pytest.approx(N[0] * 130.0 + N[1] * 6.8, rel=1e-13)


@given(R=radii, k=st.integers(0, 1), f=st.floats(1.01, 10.0))
def test_power_decreasing_in_threshold(R, k, f):
    cfg = reference_network()
    T = list(radii_T(cfg, R))
    base = cluster_power(cfg, T)
    T[k] *= f
    assert cluster_power(cfg, T) < base


# Spatial average rate

def mp_z(t, T, alpha):
    q = 2 / mpmath.mpf(alpha)
    x = mpmath.mpf(t) * T
    return mpmath.gammainc(1 - q, 0, x) + mpmath.expm1(-x) * x ** (-q)


def rate_oracle(cfg, T):
    """Rate integral evaluated in t with mpmath and the closed-form Z."""
    coef = field_coefficients(cfg)

    def f(t):
        a_int = a_sig = mpmath.mpf(0)
        for tier, x, c in zip(cfg.tiers, T, coef):
            s = c * t ** (2 / mpmath.mpf(tier.alpha))
            z = mp_z(t, x, tier.alpha)
            a_int += s * z
            a_sig += s * (mpmath.gamma(1 - 2 / mpmath.mpf(tier.alpha)) - z)
        return mpmath.exp(-a_int - cfg.sigma2 * t) * -mpmath.expm1(-a_sig) / t

    with mpmath.workdps(25):
        edges = [0] + [mpmath.mpf(10) ** e for e in range(-2, 30, 2)] + [mpmath.inf]
        return float(mpmath.quad(f, edges))


@pytest.mark.parametrize("R,sigma2", [((500.0, 150.0), 0.0), ((300.0, 80.0), 0.0),
                                      ((800.0, 300.0), 0.0), ((500.0, 150.0), 1e-13)])
def test_rate_against_oracle(R, sigma2):
    cfg = reference_network(sigma2=sigma2)
    T = radii_T(cfg, R)
    assert spatial_average_rate(cfg, T) == pytest.approx(rate_oracle(cfg, T), rel=1e-6)


def test_rate_equal_alpha_single_tier_closed_form():
    # K=1, common alpha, sigma2=0: tau = int (1/t) e^(-a t^q Z)(1 - e^(-a t^q Z')) dt depends only on
    # the product T * (scale) so it must equal the value at any rescaled (lam, T) pair.
    tier = TierParams(lam=1e-5, p=1.0, alpha=4.0)
    a = NetworkConfig(tiers=(tier,))
    b = NetworkConfig(tiers=(TierParams(lam=4e-5, p=1.0, alpha=4.0),))
    # Doubling lam^(1/2) halves the distance scale; T scales by 2^alpha = 16 to keep N fixed.
    assert spatial_average_rate(a, (1e-12,)) == pytest.approx(spatial_average_rate(b, (16e-12,)), rel=1e-7)


def test_rate_empty_cluster(cfg):
    assert spatial_average_rate(cfg, (math.inf, math.inf)) == 0.0
    assert spatial_average_rate(cfg, (1e30, 1e30)) == pytest.approx(0.0, abs=1e-15)


def test_rate_breakdown(cfg, T_ref):
    b = rate_breakdown(cfg, T_ref)
    assert b.tau == pytest.approx(spatial_average_rate(cfg, T_ref))
    assert b.laplace_JS_at(1e10) == laplace_JS(cfg, T_ref, 1e10)
    assert b.laplace_JI_at(1e10) == laplace_JI(cfg, T_ref, 1e10)


@given(R=radii, k=st.integers(0, 1), f=st.floats(1.05, 20.0))
def test_rate_decreasing_in_threshold(R, k, f):
    cfg = reference_network()
    T = list(radii_T(cfg, R))
    base = spatial_average_rate(cfg, T)
    assert base >= 0
    T[k] *= f
    assert spatial_average_rate(cfg, T) < base


@given(a1=st.floats(2.5, 6.0), a2=st.floats(2.5, 6.0), mu=st.floats(0.2, 5.0),
       R=radii, f=st.floats(1.05, 20.0))
def test_rate_decreasing_random_configs(a1, a2, mu, R, f):
    cfg = reference_network(alpha1=a1, alpha2=a2, mu2=mu)
    T = radii_T(cfg, R)
    base = spatial_average_rate(cfg, T)
    assert spatial_average_rate(cfg, (T[0] * f, T[1])) < base
    assert spatial_average_rate(cfg, (T[0], T[1] * f)) < base


def test_rate_diminishing_returns_in_R2(cfg):
    R2 = np.arange(50.0, 401.0, 25.0)
    tau = np.array([spatial_average_rate(cfg, radii_T(cfg, (500.0, r))) for r in R2])
    inc = np.diff(tau)
    assert np.all(inc > 0)
    assert np.all(np.diff(inc) < 0)


# Energy efficiency

def test_ee_zero_power_raises(cfg):
    with pytest.raises(DomainError):
        energy_efficiency(cfg, (math.inf, math.inf))


def test_ee_small_cluster_limit(cfg):
    # tau vanishes with the cluster while tau / P_cl stays finite (it grows only like ln 1/N).
    T = radii_T(cfg, (1e-3, 1e-3))
    assert spatial_average_rate(cfg, T) < 1e-3
    assert 0 < energy_efficiency(cfg, T) < 10


def test_ee_definition(cfg, T_ref):
    assert energy_efficiency(cfg, T_ref) == pytest.approx(
        spatial_average_rate(cfg, T_ref) / cluster_power(cfg, T_ref), rel=1e-14)


def test_ee_interior_optimum_grows_with_R1(cfg):
    R2 = np.arange(20.0, 401.0, 5.0)
    best = []
    for R1 in (200.0, 300.0, 400.0, 500.0, 600.0):
        ee = np.array([energy_efficiency(cfg, radii_T(cfg, (R1, r))) for r in R2])
        i = int(np.argmax(ee))
        assert 0 < i < len(R2) - 1
        # unimodal on the grid
        assert np.all(np.diff(ee[: i + 1]) > 0) and np.all(np.diff(ee[i:]) < 0)
        best.append(R2[i])
    assert all(b2 >= b1 for b1, b2 in zip(best, best[1:]))
    assert best[-1] > best[0]
