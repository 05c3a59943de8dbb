"""Special functions and semi-infinite quadrature.

Every integral in this package runs over t in (0, inf) with integrands of
the shape [difference of stretched exponentials] / t.  Those are smooth but
spread over many decades of t, so the quadrature works on the log scale
x = ln t, where the transformed integrand t*f(t) decays exponentially at
both ends.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate, special

EULER_GAMMA = 0.57721566490153286

# x = ln t search range; rate-type integrands have t-scales far inside this.
_X_MIN, _X_MAX = -700.0, 700.0


class DomainError(ValueError):
    """Argument outside the mathematical domain of a function."""


class ConvergenceError(ArithmeticError):
    """Quadrature or root-finding failed to reach the requested accuracy."""

    def __init__(self, message: str, estimate: float = math.nan, error: float = math.nan):
        super().__init__(f"{message} (estimate={estimate!r}, error bound={error!r})")
        self.estimate = estimate
        self.error = error


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    max_subdivisions: int = 2000

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise DomainError(f"rel_tol must be > 0, got {self.rel_tol}")
        if not self.abs_tol >= 0:
            raise DomainError(f"abs_tol must be >= 0, got {self.abs_tol}")
        if self.max_subdivisions < 1:
            raise DomainError(f"max_subdivisions must be >= 1, got {self.max_subdivisions}")


DEFAULT_QUAD = QuadratureSpec()


def gamma_fn(x: float) -> float:
    """Gamma function for real x > 0."""
    x = float(x)
    if not (math.isfinite(x) and x > 0):
        raise DomainError(f"gamma_fn needs a finite x > 0, got {x}")
    return math.gamma(x)


def lower_inc_gamma(s: float, x: float) -> float:
    """Non-normalised lower incomplete gamma, int_0^x t^(s-1) e^-t dt, for s in (0, 1)."""
    s, x = float(s), float(x)
    if not 0.0 < s < 1.0:
        raise DomainError(f"lower_inc_gamma needs s in (0, 1), got {s}")
    if not x >= 0.0:
        raise DomainError(f"lower_inc_gamma needs x >= 0, got {x}")
    if x == 0.0:
        return 0.0
    return float(special.gammainc(s, x)) * math.gamma(s)


def upper_inc_gamma(s: float, x: float) -> float:
    """Non-normalised upper incomplete gamma for s in (0, 1)."""
    s, x = float(s), float(x)
    if not 0.0 < s < 1.0:
        raise DomainError(f"upper_inc_gamma needs s in (0, 1), got {s}")
    if not x >= 0.0:
        raise DomainError(f"upper_inc_gamma needs x >= 0, got {x}")
    return float(special.gammaincc(s, x)) * math.gamma(s)


def _z_series(x: float, q: float) -> float:
    # (2/alpha) * int_0^x (1 - e^-v) v^(-q-1) dv expanded termwise, q = 2/alpha.
    # Alternating with factorial decay; free of the cancellation that hits the
    # closed form when x is small.
    total = 0.0
    term_pow = 1.0  # x^n / n!
    n = 1
    while True:
        term_pow *= x / n
        contrib = term_pow / (n - q)
        total += contrib if n % 2 else -contrib
        if contrib < 1e-17 * abs(total) or n > 200:
            break
        n += 1
    return q * x ** (-q) * total


def z_function(t: float, T: float, alpha: float) -> float:
    """Truncated interference integral Z(t, T, alpha).

    Z = gamma(1 - 2/alpha, T t) + (exp(-T t) - 1) (T t)^(-2/alpha), which
    equals int_{(T t)^(-2/alpha)}^inf [1 - exp(-u^(-alpha/2))] du.
    Lies in [0, Gamma(1 - 2/alpha)] and is nondecreasing in T t.
    """
    t, T, alpha = float(t), float(T), float(alpha)
    if not t > 0:
        raise DomainError(f"z_function needs t > 0, got {t}")
    if not T >= 0:
        raise DomainError(f"z_function needs T >= 0, got {T}")
    if not alpha > 2:
        raise DomainError(f"z_function needs alpha > 2, got {alpha}")
    x = T * t
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return math.gamma(1.0 - 2.0 / alpha)
    return _z_of_product(x, alpha)


def _z_of_product(x: float, alpha: float) -> float:
    q = 2.0 / alpha
    if x < 1.0:
        return _z_series(x, q)
    s = 1.0 - q
    return float(special.gammainc(s, x)) * math.gamma(s) + math.expm1(-x) * x ** (-q)


def z_function_array(x: np.ndarray, alpha: float) -> np.ndarray:
    """Vectorised Z as a function of the product x = T*t (x >= 0)."""
    x = np.asarray(x, dtype=float)
    q = 2.0 / alpha
    s = 1.0 - q
    out = np.empty_like(x)
    big = x >= 1.0
    xb = x[big]
    out[big] = special.gammainc(s, xb) * math.gamma(s) + np.expm1(-xb) * xb ** (-q)
    small = ~big
    if np.any(small):
        xs = x[small]
        total = np.zeros_like(xs)
        term = np.ones_like(xs)
        for n in range(1, 40):
            term = term * xs / n
            total += (1 if n % 2 else -1) * term / (n - q)
        with np.errstate(divide="ignore", invalid="ignore"):
            zs = np.where(xs > 0, q * xs ** (-q) * total, 0.0)
        out[small] = zs
    return out


def _transformed(f: Callable[[float], float]) -> Callable[[float], float]:
    def h(x: float) -> float:
        t = math.exp(x)
        return f(t) * t

    return h


def _locate_support(h: Callable[[float], float], spec: QuadratureSpec, hint):
    # Coarse scan on x = ln t to find the bulk, then walk outward until |h| is
    # negligible.  Integrands here decay at least exponentially in x, with
    # rate >= 2/alpha, so a tail beyond the cutoff adds at most a few cutoffs.
    lo, hi = hint if hint is not None else (-60.0, 60.0)
    xs = np.linspace(lo, hi, int(round(hi - lo)) * 2 + 1)
    vals = np.array([abs(h(x)) for x in xs])
    peak = float(vals.max())
    if peak == 0.0:
        return None
    knee = float(xs[int(vals.argmax())])
    cutoff = 0.02 * max(spec.abs_tol, 1e-3 * spec.rel_tol * peak)
    sig = xs[vals > cutoff]
    if sig.size == 0:
        sig = np.array([knee])
    a = float(sig[0]) - 1.0
    b = float(sig[-1]) + 1.0
    step = 1.0
    while abs(h(a)) > cutoff:
        a = max(a - step, _X_MIN)
        step *= 1.5
        if a == _X_MIN and abs(h(a)) > cutoff:
            raise ConvergenceError("integrand does not decay as t -> 0", math.nan, abs(h(a)))
    step = 1.0
    while abs(h(b)) > cutoff:
        b = min(b + step, _X_MAX)
        step *= 1.5
        if b == _X_MAX and abs(h(b)) > cutoff:
            raise ConvergenceError("integrand does not decay as t -> inf", math.nan, abs(h(b)))
    return a, b, knee


def integrate_semi_infinite(
    f: Callable[[float], float],
    spec: QuadratureSpec = DEFAULT_QUAD,
    hint: tuple[float, float] | None = None,
) -> float:
    """Integrate f over (0, inf).

    ``hint`` is an optional (ln t_lo, ln t_hi) window where the bulk of the
    integrand is expected; the support search starts there.
    """
    h = _transformed(f)
    support = _locate_support(h, spec, hint)
    if support is None:
        return 0.0
    a, b, knee = support
    points = [knee] if a < knee < b else None
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(
                h, a, b, points=points,
                epsabs=spec.abs_tol, epsrel=spec.rel_tol, limit=spec.max_subdivisions,
            )
        except integrate.IntegrationWarning as exc:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", integrate.IntegrationWarning)
                val, err = integrate.quad(
                    h, a, b, points=points,
                    epsabs=spec.abs_tol, epsrel=spec.rel_tol, limit=spec.max_subdivisions,
                )
            if err > 10 * max(spec.abs_tol, spec.rel_tol * abs(val)):
                raise ConvergenceError(f"quadrature did not converge: {exc}", val, err) from None
    return float(val)


def bisect_increasing(g: Callable[[float], float], lo: float, hi: float, rtol: float = 1e-12,
                      max_iter: int = 400) -> float:
    """Root of an increasing function on [lo, hi] by bisection in log space.

    Both ends must be positive and bracket the sign change.
    """
    glo, ghi = g(lo), g(hi)
    if glo > 0 or ghi < 0:
        raise ConvergenceError(f"root not bracketed in [{lo:g}, {hi:g}] (g={glo:g}, {ghi:g})")
    a, b = math.log(lo), math.log(hi)
    for _ in range(max_iter):
        m = 0.5 * (a + b)
        if g(math.exp(m)) < 0:
            a = m
        else:
            b = m
        if b - a < rtol:
            break
    return math.exp(0.5 * (a + b))


def z_prime(t: float, T: float, alpha: float) -> float:
    """Complement Gamma(1 - 2/alpha) - Z(t, T, alpha), computed without cancellation."""
    t, T, alpha = float(t), float(T), float(alpha)
    if not (t > 0 and T >= 0 and alpha > 2):
        raise DomainError(f"z_prime domain violated: t={t}, T={T}, alpha={alpha}")
    q = 2.0 / alpha
    s = 1.0 - q
    x = T * t
    if math.isinf(x):
        return 0.0
    if x < 1.0:
        return math.gamma(s) - (_z_series(x, q) if x > 0 else 0.0)
    return float(special.gammaincc(s, x)) * math.gamma(s) - math.expm1(-x) * x ** (-q)
