import math

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cupineq import special
from cupineq.errors import DivergentMeasureError, DomainError

# reference values from 30-digit mpmath evaluation, frozen
C_TABLE = {
    (1, 2, 3): 0.5,
    (2, 1, 6): 0.3125,
    (2, 2, 6): 1 / 6,
    (3, 1.5, 7.25): 0.20512820512820512821,
}
D_TABLE = {
    (1, 2): math.pi / 4,
    (2, 4): 2 / 3,
    (3, 9): 0.7237088039365829161,
    (1, 5): 0.9395632325799552532,
    (5, 40): 0.84447735560153584853,
}
NORM_TABLE = {
    (1, 1): math.pi,
    (2, 3): math.pi / 2,
    (3, 2.5): 4.1887902047863909846,
    (4, 10): 0.13707783890401886971,
}
CP_TABLE = {1: 1.2533141373155002512, 2: 2.4674011002723396547, 3: 6.1848573627982870126,
            4.5: 32.935564245936057705}


@pytest.mark.parametrize("args,value", C_TABLE.items())
def test_poincare_C_matches_reference(args, value):
    assert special.poincare_constants(*args).C == pytest.approx(value, rel=1e-13)


@pytest.mark.parametrize("args,value", D_TABLE.items())
def test_product_bound_d_reference(args, value):
    assert special.product_bound_d(*args) == pytest.approx(value, rel=1e-13)


@pytest.mark.parametrize("args,value", NORM_TABLE.items())
def test_cauchy_norm_const_reference(args, value):
    assert special.cauchy_norm_const(*args) == pytest.approx(value, rel=1e-13)


@pytest.mark.parametrize("p,value", CP_TABLE.items())
def test_pisier_cp_reference(p, value):
    assert special.pisier_cp(p) == pytest.approx(value, rel=1e-13)


def test_pisier_cp_closed_forms():
    assert special.pisier_cp(1) == pytest.approx(math.sqrt(math.pi / 2), rel=1e-14)
    assert special.pisier_cp(2) == pytest.approx(math.pi**2 / 4, rel=1e-14)


def test_gaussian_abs_moment_small_cases():
    assert special.gaussian_abs_moment(1, 2) == pytest.approx(1.0, rel=1e-14)
    assert special.gaussian_abs_moment(3, 2) == pytest.approx(3.0, rel=1e-14)
    assert special.gaussian_abs_moment(1, 1) == pytest.approx(math.sqrt(2 / math.pi), rel=1e-14)
    assert special.gaussian_abs_moment(4, 0) == 1.0


def test_spherical_mean_ratio():
    assert special.spherical_mean_ratio_G(1, 3.7) == pytest.approx(1.0, rel=1e-14)
    # E theta_1^2 = 1/n on the sphere
    for n in (2, 3, 7):
        assert special.spherical_mean_ratio_G(n, 2) == pytest.approx(1 / n, rel=1e-14)
    assert special.spherical_mean_ratio_G(2, 3) == pytest.approx(0.42441318157838756205, rel=1e-13)


def test_unit_sphere_area():
    assert math.exp(special.log_unit_sphere_area(1)) == pytest.approx(2.0)
    assert math.exp(special.log_unit_sphere_area(2)) == pytest.approx(2 * math.pi)
    assert math.exp(special.log_unit_sphere_area(3)) == pytest.approx(4 * math.pi)


def test_cauchy_norm_divergent():
    with pytest.raises(DivergentMeasureError):
        special.cauchy_norm_const(2, 1.0)
    with pytest.raises(DomainError):
        special.cauchy_norm_const(0, 3.0)


@pytest.mark.parametrize(
    "n,p,alpha,fragment",
    [(1, 1, 1.5, "alpha > n + 1/2"), (2, 4, 4, "p < 2(alpha-n)"), (1, 0.5, 3, "p >= 1"), (0, 1, 3, "n >= 1")],
)
def test_poincare_window_errors_name_constraint(n, p, alpha, fragment):
    with pytest.raises(DomainError, match=fragment.replace("(", r"\(").replace(")", r"\)").replace("+", r"\+")):
        special.poincare_constants(n, p, alpha)


def test_cheeger_coefficient_agrees_with_p1_constant():
    for n, a in [(1, 3), (2, 5), (3, 4.2), (5, 60)]:
        c = special.poincare_constants(n, 1, a).C * math.pi / 2
        assert c == pytest.approx(special.cheeger_cauchy_coefficient(n, a), rel=1e-13)
    assert special.cheeger_cauchy_coefficient(2, 5) == pytest.approx(0.58904862254808623221, rel=1e-13)


def test_gamma_bounds_at_half():
    b = special.gamma_inequality_bounds(0.5)
    assert b.lower == pytest.approx(1.0, rel=1e-14)
    assert b.value == pytest.approx(1.0, rel=1e-14)
    assert b.contains and not b.violations


def test_gamma_bounds_overflow_to_inf():
    b = special.gamma_inequality_bounds(1e6)
    assert b.upper == math.inf and b.value == math.inf
    assert b.contains


def test_gamma_bounds_domain():
    with pytest.raises(DomainError):
        special.gamma_inequality_bounds(0.4)


def test_lipschitz_moment_bound_values():
    assert special.lipschitz_moment_bound(2, 38, 2) == pytest.approx(2 * 4 / 36, rel=1e-14)
    assert special.exact_lipschitz_moment_bound(2, 38, 2) < special.lipschitz_moment_bound(2, 38, 2)
    with pytest.raises(DomainError):
        special.lipschitz_moment_bound(2, 3.4, 1)
    with pytest.raises(DomainError):
        special.lipschitz_moment_bound(2, 5, 5)


def test_log_gamma_ratio_against_mpmath():
    mpmath.mp.dps = 40
    for x, h in [(1e4, 0.5), (1e6, -3.5), (20.25, 7.0), (3.0, 0.5), (5e5, 2.5)]:
        ref = float(mpmath.loggamma(mpmath.mpf(x) + h) - mpmath.loggamma(x))
        assert special.log_gamma_ratio(x, h) == pytest.approx(ref, rel=1e-14, abs=1e-15)


def test_gaussian_limit_large_alpha():
    for p in (1, 2, 3):
        a = 1e6
        val = special.poincare_constants(2, p, a).C * (2 * a) ** (p / 2) * (math.pi / 2) ** p
        assert val == pytest.approx(special.pisier_cp(p), rel=1e-5)


# ---------------------------------------------------------------- properties


@given(n=st.integers(1, 12), excess=st.floats(0.51, 5e3), frac=st.floats(0.0, 0.999))
def test_C_equals_A_times_ratio(n, excess, frac):
    alpha = n + excess
    p = 1 + frac * (2 * (alpha - n) - 1)
    if p >= 2 * (alpha - n):
        return
    c = special.poincare_constants(n, p, alpha)
    if c.C > 1e-250:
        assert c.A * c.c_ratio == pytest.approx(c.C, rel=1e-12 * max(1.0, abs(math.log(c.C))))
    assert c.beta == pytest.approx(alpha - (n + p) / 2)


@given(x=st.floats(0.5, 1e7))
def test_gamma_bounds_hold(x):
    b = special.gamma_inequality_bounds(x)
    assert b.contains and b.wendel_holds and b.gautschi_holds


@given(n=st.integers(1, 10), excess=st.floats(1.5, 400), frac=st.floats(0, 1))
def test_lipschitz_bound_dominates_exact(n, excess, frac):
    alpha = n + excess
    p = 1 + frac * (2 * (alpha - n - 1) - 1)
    p = min(p, 2 * (alpha - n - 1))
    assert special.exact_lipschitz_moment_bound(n, alpha, p) <= special.lipschitz_moment_bound(n, alpha, p) * (
        1 + 1e-12
    )


@given(n=st.integers(1, 32))
def test_d_at_least_half_from_n_squared(n):
    alpha = max(n * n, n + 1)
    assert special.product_bound_d(n, alpha) >= 0.5


@given(n=st.integers(1, 8), alpha=st.floats(1.0, 1e4))
def test_d_at_most_one(n, alpha):
    if alpha <= n:
        return
    assert 0 < special.product_bound_d(n, alpha) <= 1 + 1e-12
