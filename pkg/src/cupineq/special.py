"""Gamma-function constants for the Cauchy, Gaussian and sphere inequalities.

Everything is computed in log-space and exponentiated only on return, so
orders up to ~1e6 (used in the Gaussian-limit sweeps) never overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DivergentMeasureError, DomainError

#: Relative tolerance used for exact floating-point identities.
EXACT_RTOL = 1e-12

LOG_PI = math.log(math.pi)
LOG_SQRT_PI = 0.5 * LOG_PI


def log_gamma_beta(x: float, y: float | None = None) -> float:
    """Return log Gamma(x), or log B(x, y) when ``y`` is given."""
    if not x > 0:
        raise DomainError(f"log-gamma requires x > 0, got x={x!r}")
    if y is None:
        return math.lgamma(x)
    if not y > 0:
        raise DomainError(f"log-beta requires y > 0, got y={y!r}")
    return math.lgamma(x) + math.lgamma(y) - math.lgamma(x + y)


def _lg(x: float) -> float:
    return log_gamma_beta(x)


# Stirling series coefficients B_{2k} / (2k (2k-1)), k = 1..6
_STIRLING = (1 / 12, -1 / 360, 1 / 1260, -1 / 1680, 1 / 1188, -691 / 360360)
_STIRLING_MIN = 15.0


def _stirling_tail(z: float) -> float:
    zi = 1.0 / z
    zi2 = zi * zi
    acc = 0.0
    for c in reversed(_STIRLING):
        acc = acc * zi2 + c
    return acc * zi


def log_gamma_ratio(x: float, h: float) -> float:
    """log Gamma(x + h) - log Gamma(x) without cancellation for large x.

    Differencing two lgamma values near 1e4..1e6 loses ~1e-11 relative
    accuracy; the Stirling-series difference keeps it near machine precision.
    """
    y = x + h
    if not (x > 0 and y > 0):
        raise DomainError(f"log-gamma ratio requires x > 0 and x + h > 0, got x={x}, h={h}")
    if min(x, y) < _STIRLING_MIN:
        return math.lgamma(y) - math.lgamma(x)
    return (
        (y - 0.5) * math.log1p(h / x)
        + h * math.log(x)
        - h
        + (_stirling_tail(y) - _stirling_tail(x))
    )


def log_gaussian_abs_moment(n: int, p: float) -> float:
    return 0.5 * p * math.log(2.0) + log_gamma_ratio(0.5 * n, 0.5 * p)


def gaussian_abs_moment(n: int, p: float) -> float:
    """E|Z|^p for Z standard normal in R^n: 2^{p/2} Gamma((n+p)/2) / Gamma(n/2)."""
    if n < 1:
        raise DomainError(f"requires n >= 1, got n={n}")
    if p < 0:
        raise DomainError(f"requires p >= 0, got p={p}")
    return math.exp(log_gaussian_abs_moment(n, p))


def pisier_cp(p: float) -> float:
    """Gaussian L^p Poincare constant c_p = (pi/2)^p E|xi|^p."""
    if not p >= 1:
        raise DomainError(f"c_p requires p >= 1, got p={p}")
    return math.exp(p * math.log(math.pi / 2) + log_gaussian_abs_moment(1, p))


def log_spherical_mean_ratio_G(n: int, p: float) -> float:
    return _lg(0.5 * (p + 1)) - LOG_SQRT_PI - log_gamma_ratio(0.5 * n, 0.5 * p)


def spherical_mean_ratio_G(n: int, p: float) -> float:
    """E|theta_1|^p for theta uniform on S^{n-1}.

    Equals E|xi|^p / E|Z|^p with xi, Z standard normal in R and R^n.
    """
    if n < 1:
        raise DomainError(f"requires n >= 1, got n={n}")
    if p < 0:
        raise DomainError(f"requires p >= 0, got p={p}")
    return math.exp(log_spherical_mean_ratio_G(n, p))


def log_cauchy_norm_const(n: int, alpha: float) -> float:
    if n < 1:
        raise DomainError(f"requires n >= 1, got n={n}")
    if not alpha > 0.5 * n:
        raise DivergentMeasureError(
            f"Cauchy measure requires alpha > n/2, got n={n}, alpha={alpha}"
        )
    return 0.5 * n * LOG_PI - log_gamma_ratio(alpha - 0.5 * n, 0.5 * n)


def cauchy_norm_const(n: int, alpha: float) -> float:
    """c_{n,alpha} = pi^{n/2} Gamma(alpha - n/2) / Gamma(alpha)."""
    return math.exp(log_cauchy_norm_const(n, alpha))


def log_unit_sphere_area(n: int) -> float:
    """log of n * omega_n, the surface area of S^{n-1}."""
    return math.log(2.0) + 0.5 * n * LOG_PI - _lg(0.5 * n)


@dataclass(frozen=True)
class PoincareConstants:
    C: float
    A: float
    c_ratio: float
    beta: float


def _check_poincare_window(n: int, p: float, alpha: float) -> None:
    if n < 1:
        raise DomainError(f"requires n >= 1, got n={n}")
    if not alpha > n + 0.5:
        raise DomainError(f"requires alpha > n + 1/2, got n={n}, alpha={alpha}")
    if not p >= 1:
        raise DomainError(f"requires p >= 1, got p={p}")
    if not p < 2 * (alpha - n):
        raise DomainError(
            f"requires p < 2(alpha-n) = {2 * (alpha - n)}, got p={p}"
        )


def log_poincare_C(n: int, p: float, alpha: float) -> float:
    _check_poincare_window(n, p, alpha)
    return _lg(0.5 * (p + 1)) - LOG_SQRT_PI - log_gamma_ratio(alpha - n - 0.5 * p, 0.5 * p)


def poincare_constants(n: int, p: float, alpha: float) -> PoincareConstants:
    """Constants of the L^p Poincare inequality for m_{2n,alpha}.

    ``C`` is the closed form, ``A`` the prefactor of the integral
    I_p(x) = A (1+|x|^2)^{-beta}, and ``c_ratio`` = c_{n,beta} / c_{2n,alpha}.
    A and c_ratio go through independent Gamma expressions, and their product
    is checked against C.
    """
    log_C = log_poincare_C(n, p, alpha)
    beta = alpha - 0.5 * (n + p)

    # A = G(n,p) * (n omega_n / 2) * B(alpha - (n+p)/2, (n+p)/2)
    log_A = (
        log_spherical_mean_ratio_G(n, p)
        + log_unit_sphere_area(n)
        - math.log(2.0)
        + _lg(0.5 * (n + p))
        - log_gamma_ratio(beta, 0.5 * (n + p))
    )
    log_ratio = log_cauchy_norm_const(n, beta) - log_cauchy_norm_const(2 * n, alpha)

    C = math.exp(log_C)
    A = math.exp(log_A)
    c_ratio = math.exp(log_ratio)
    # compared in log space: far out in (p, alpha) the logs reach |log C| ~ 1e3
    # and each lgamma term carries ~1 ulp of its own magnitude
    if abs(log_A + log_ratio - log_C) > EXACT_RTOL * max(1.0, abs(log_C)):
        raise ArithmeticError(
            f"C != A * c_ratio: {C!r} vs {A * c_ratio!r} (n={n}, p={p}, alpha={alpha})"
        )
    return PoincareConstants(C=C, A=A, c_ratio=c_ratio, beta=beta)


def cheeger_cauchy_coefficient(n: int, alpha: float) -> float:
    """(sqrt(pi)/2) Gamma(alpha-n-1/2) / Gamma(alpha-n), the p = 1 coefficient."""
    if not alpha > n + 0.5:
        raise DomainError(f"requires alpha > n + 1/2, got n={n}, alpha={alpha}")
    return math.exp(LOG_SQRT_PI - math.log(2.0) - log_gamma_ratio(alpha - n - 0.5, 0.5))


def log_product_bound_d(n: int, alpha: float) -> float:
    if not alpha > n:
        raise DomainError(f"requires alpha > n, got n={n}, alpha={alpha}")
    return log_gamma_ratio(alpha - n, 0.5 * n) - log_gamma_ratio(alpha - 0.5 * n, 0.5 * n)


def product_bound_d(n: int, alpha: float) -> float:
    """d = Gamma(alpha - n/2)^2 / (Gamma(alpha - n) Gamma(alpha)).

    m_{2n,alpha} >= d * (m_{n,alpha} x m_{n,alpha}) pointwise on densities.
    """
    return math.exp(log_product_bound_d(n, alpha))


@dataclass(frozen=True)
class GammaBoundPair:
    """Two-sided bound sqrt(2e)(x/e)^x <= Gamma(x+1/2) <= sqrt(2pi)(x/e)^x.

    Stored in log form; ``lower``/``upper`` overflow to inf for large x.
    """

    x: float
    log_lower: float
    log_upper: float
    log_value: float
    wendel_holds: bool
    gautschi_holds: bool

    @property
    def lower(self) -> float:
        return _safe_exp(self.log_lower)

    @property
    def upper(self) -> float:
        return _safe_exp(self.log_upper)

    @property
    def value(self) -> float:
        return _safe_exp(self.log_value)

    @property
    def contains(self) -> bool:
        slack = EXACT_RTOL * max(1.0, abs(self.log_value))
        return self.log_lower <= self.log_value + slack and self.log_value <= self.log_upper + slack

    @property
    def violations(self) -> list[str]:
        out = []
        if not self.contains:
            out.append("two-sided bound")
        if not self.wendel_holds:
            out.append("Wendel")
        if not self.gautschi_holds:
            out.append("Gautschi")
        return out


def _safe_exp(v: float) -> float:
    try:
        return math.exp(v)
    except OverflowError:
        return math.inf


def gamma_inequality_bounds(x: float) -> GammaBoundPair:
    if not x >= 0.5:
        raise DomainError(f"two-sided Gamma bound requires x >= 1/2, got x={x}")
    log_core = x * (math.log(x) - 1.0)
    log_lower = 0.5 * (math.log(2.0) + 1.0) + log_core
    log_upper = 0.5 * math.log(2 * math.pi) + log_core
    log_value = _lg(x + 0.5)
    # Gamma(x+1/2) <= Gamma(x) sqrt(x)
    wendel = log_gamma_ratio(x, 0.5) <= 0.5 * math.log(x) + EXACT_RTOL
    # Gamma(x+1)/Gamma(x+1/2) < sqrt(x+1)
    gautschi = log_gamma_ratio(x + 0.5, 0.5) < 0.5 * math.log(x + 1) + EXACT_RTOL
    return GammaBoundPair(
        x=x,
        log_lower=log_lower,
        log_upper=log_upper,
        log_value=log_value,
        wendel_holds=wendel,
        gautschi_holds=gautschi,
    )


def lipschitz_moment_bound(n: int, alpha: float, p: float) -> float:
    """Moment bound 2 (2p/(alpha-n))^{p/2} for 1-Lipschitz f under m_{2n,alpha}.

    Also checks that it dominates the exact bound (pi/2)^p C(n, p, alpha).
    """
    if not alpha >= n + 1.5:
        raise DomainError(f"requires alpha >= n + 3/2, got n={n}, alpha={alpha}")
    if not 1 <= p <= 2 * (alpha - n - 1):
        raise DomainError(
            f"requires 1 <= p <= 2(alpha-n-1) = {2 * (alpha - n - 1)}, got p={p}"
        )
    log_bound = math.log(2.0) + 0.5 * p * math.log(2 * p / (alpha - n))
    log_exact = p * math.log(math.pi / 2) + log_poincare_C(n, p, alpha)
    if log_exact > log_bound + EXACT_RTOL * max(1.0, abs(log_bound)):
        raise ArithmeticError(
            f"moment bound {math.exp(log_bound)} below exact {math.exp(log_exact)}"
        )
    return math.exp(log_bound)


def exact_lipschitz_moment_bound(n: int, alpha: float, p: float) -> float:
    """(pi/2)^p C(n, p, alpha): the sharper bound before Gamma estimates."""
    return math.exp(p * math.log(math.pi / 2) + log_poincare_C(n, p, alpha))
