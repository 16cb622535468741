import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cupineq import special
from cupineq import verify as V
from cupineq.errors import ConfigurationError, DomainError, ShapeError, VarianceGuardError
from cupineq.funcs import Linear, SmoothNorm, standard_suite
from cupineq.measures import CauchyParams, GaussianMeasure, RngStream, sample_cauchy
from cupineq.montecarlo import MCEstimate, mc_estimate

S = RngStream(11)
ex = MCEstimate.exact_value


def mc(mean, se):
    return MCEstimate(mean, se, 10_000)


# --------------------------------------------------------------------------- verdicts


def test_decide_exact_sides():
    assert V.decide(ex(1.0), ex(2.0)) is V.Verdict.HOLDS
    assert V.decide(ex(2.0), ex(1.0)) is V.Verdict.VIOLATED
    # equality up to rounding is not a violation
    assert V.decide(ex(1.0 + 1e-14), ex(1.0)) is V.Verdict.HOLDS
    assert V.decide(ex(1.0 + 1e-9), ex(1.0)) is V.Verdict.VIOLATED


def test_decide_bands():
    assert V.decide(mc(1.0, 0.01), ex(1.1)) is V.Verdict.HOLDS
    assert V.decide(mc(1.0, 0.01), ex(1.02)) is V.Verdict.INCONCLUSIVE
    assert V.decide(mc(1.2, 0.01), mc(1.0, 0.01)) is V.Verdict.VIOLATED
    assert V.decide(mc(1.0, 0.01), mc(1.05, 0.01), k=1) is V.Verdict.HOLDS


def test_worst():
    H, I, X = V.Verdict.HOLDS, V.Verdict.INCONCLUSIVE, V.Verdict.VIOLATED
    assert V.worst([H, I, H]) is I
    assert V.worst([H, X, I]) is X
    assert V.worst([]) is H


def test_report_json_handles_non_finite():
    r = V.InequalityReport("x", ex(1.0), ex(0.0), params={"a": np.float64(math.inf)})
    d = json.loads(r.to_json())
    assert d["ratio"] == "inf" and d["params"]["a"] == "inf"
    assert d["verdict"] == "VIOLATED"


def test_power_domain():
    with pytest.raises(DomainError):
        V.Power(0.5)


# --------------------------------------------------------------------------- Gaussian reports


def test_pisier_linear_exact_sides():
    th = np.array([0.6, -0.8])
    r = V.pisier_gaussian_report(Linear(th), V.Power(1), 2, 200_000, S)
    assert r.exact_ratio == pytest.approx(2 * math.sqrt(2) / math.pi, rel=1e-12)
    assert r.extra["lhs_concordant"] and r.extra["rhs_concordant"]
    assert r.verdict is V.Verdict.HOLDS


def test_pisier_exp_linear_exact_sides():
    r = V.pisier_gaussian_report(Linear([0.3, 0.1]), V.Exp(), 2, 200_000, S)
    s2 = 0.1
    assert r.exact_lhs == pytest.approx(math.exp(s2))
    assert r.exact_rhs == pytest.approx(math.exp(math.pi**2 / 8 * s2))
    assert r.extra["lhs_concordant"] and r.extra["rhs_concordant"]


def test_exp_moment_linear():
    r = V.exp_moment_report(Linear([0.3]), 1, 200_000, S)
    assert r.exact_lhs == pytest.approx(math.exp(0.045))
    assert r.extra["lhs_concordant"] and r.verdict is V.Verdict.HOLDS


def test_exp_moment_nonlinear_centers_by_mc():
    r = V.exp_moment_report(SmoothNorm(2).scaled(0.3), 2, 50_000, S)
    assert r.extra["centering_se"] > 0
    assert r.verdict is V.Verdict.HOLDS


@settings(max_examples=10, deadline=None)
@given(st.floats(0.05, 20.0), st.sampled_from([1.0, 1.5, 2.0]))
def test_pisier_rescaling_covariance(lam, p):
    f = standard_suite(2)["rbf3"]
    a = V.pisier_gaussian_report(f, V.Power(p), 2, 2000, S)
    b = V.pisier_gaussian_report(f.scaled(lam), V.Power(p), 2, 2000, S)
    assert b.lhs.mean == pytest.approx(lam**p * a.lhs.mean, rel=1e-9)
    assert b.rhs.mean == pytest.approx(lam**p * a.rhs.mean, rel=1e-9)
    assert b.ratio == pytest.approx(a.ratio, rel=1e-9)


def test_dimension_mismatch():
    with pytest.raises(ShapeError):
        V.pisier_gaussian_report(Linear([1.0]), V.Power(1), 2, 1000, S)


# --------------------------------------------------------------------------- Cauchy Poincare


def test_cauchy_linear_exact_ratio():
    r = V.cauchy_poincare_report(Linear([1.0, 0.0]), CauchyParams(2, 6.0), 2, 200_000, S)
    assert r.exact_ratio == pytest.approx(8 / math.pi**2, rel=1e-12)
    assert r.extra["cross_moment_zero"]
    assert r.extra["lhs_concordant"] and r.extra["rhs_concordant"]


def test_cauchy_p1_matches_cheeger_coefficient():
    r = V.cauchy_poincare_report(Linear([1.0]), CauchyParams(1, 4.0), 1, 20_000, S)
    assert r.extra["cheeger_matches"]


def test_cauchy_variance_guards():
    params = CauchyParams(2, 3.0)
    with pytest.raises(VarianceGuardError):
        V.cauchy_poincare_report(Linear([1.0, 0.0]), params, 1.5, 10_000, S, mode="mc")
    with pytest.raises(VarianceGuardError):
        V.cauchy_poincare_report(SmoothNorm(2), params, 1.5, 10_000, S)
    r = V.cauchy_poincare_report(Linear([1.0, 0.0]), params, 1.5, 10_000, S)
    assert r.params["mode"] == "exact" and r.lhs.exact
    assert any("OMITTED" in m for m in r.notes)


def test_cauchy_outside_window():
    with pytest.raises(DomainError):
        V.cauchy_poincare_report(Linear([1.0]), CauchyParams(1, 1.4), 1, 10_000, S)


def test_limit_sweep(tmp_path):
    t = V.gaussian_limit_sweep(2, 1.0, [1e4, 1e2, 1e3])
    assert [r["alpha"] for r in t.rows] == [1e2, 1e3, 1e4]
    assert t.monotone and t.gaps[-1] < 0.01
    assert t.limit == pytest.approx(math.sqrt(math.pi / 2))
    path = tmp_path / "s.csv"
    t.to_csv(path)
    assert path.read_text().splitlines()[0] == "alpha,rescaled_constant,limit,relative_gap"


# --------------------------------------------------------------------------- sphere


def test_sphere_linear():
    r = V.sphere_poincare_report(Linear([0.6, 0.8]), 2, 200_000, S)
    assert r.exact_lhs == pytest.approx(0.5)
    assert r.extra["lhs_concordant"] and r.extra["rhs_concordant"]
    assert r.extra["lipschitz_ok"]
    with pytest.raises(DomainError):
        V.sphere_poincare_report(Linear([1.0]), 1, 10_000, S)


# --------------------------------------------------------------------------- sets and perimeter


def test_parse_set():
    h = V.parse_set("halfspace:0.5", 3)
    assert isinstance(h, V.HalfSpace) and h.direction.tolist() == [1, 0, 0] and h.offset == 0.5
    assert V.parse_set("ball:2", 2).radius == 2
    for bad in ("cube:1", "ball:x", "ball:-1"):
        with pytest.raises(ConfigurationError):
            V.parse_set(bad, 2)


def test_set_measure_against_sampling():
    params = CauchyParams(2, 3.0)
    for A in (V.parse_set("halfspace:0.4", 2), V.parse_set("ball:0.8", 2)):
        est = mc_estimate(lambda x: A.distance(x) <= 0, lambda m, s: sample_cauchy(params, m, s), 400_000, S)
        assert abs(est.mean - V.set_measure(params, A)) < 5 * est.se


def test_perimeter_closed_forms():
    # standard Cauchy on R: density at 0 is 1/pi
    assert V.perimeter_analytic(CauchyParams(1, 1.0), V.parse_set("halfspace:0", 1)) == pytest.approx(
        1 / math.pi, rel=1e-14
    )
    # unit circle under gamma_2: 2 pi * e^{-1/2} / (2 pi)
    assert V.perimeter_analytic(GaussianMeasure(2), V.parse_set("ball:1", 2)) == pytest.approx(
        math.exp(-0.5), rel=1e-14
    )


def test_intercept_weights():
    np.testing.assert_allclose(V.intercept_weights([0.2, 0.1, 0.05]), [-0.5, 0.5, 1.0], atol=1e-12)


def test_perimeter_estimate_gaussian_ball():
    est = V.perimeter_estimate(GaussianMeasure(2), V.parse_set("ball:1", 2), [0.2, 0.1, 0.05], 400_000, S)
    assert est.analytic == pytest.approx(math.exp(-0.5))
    assert abs(est.mc_extrapolated.mean - est.analytic) < 5 * est.mc_extrapolated.se + 0.01
    with pytest.raises(ConfigurationError):
        V.perimeter_estimate(GaussianMeasure(2), V.parse_set("ball:1", 2), [0.1, 0.2, 0.05], 1000, S)


def test_halfspace_pair_mass():
    assert V.halfspace_pair_mass(1, 4.5, 0.0) == pytest.approx(0.25, abs=1e-12)
    assert V.halfspace_pair_mass(3, 7.0, 0.0) == pytest.approx(0.25, abs=1e-12)
    pair = CauchyParams(4, 4.5)
    c = 0.7
    est = mc_estimate(
        lambda d: (d[:, 0] <= c) & (d[:, 2] > c), lambda m, s: sample_cauchy(pair, m, s), 400_000, S
    )
    assert abs(est.mean - V.halfspace_pair_mass(2, 4.5, c)) < 5 * est.se


def test_isoperimetry_gaussian_equality():
    b = V.isoperimetry_report(3, None, V.parse_set("halfspace:0", 3), 1000, S, measure="gaussian")
    r = b.reports[0]
    assert r.extra["equality"] and b.verdict is V.Verdict.HOLDS
    assert r.exact_rhs == pytest.approx(1 / math.sqrt(2 * math.pi), rel=1e-14)


def test_isoperimetry_cauchy_halfspace_and_ball():
    b = V.isoperimetry_report(1, 4.0, V.parse_set("halfspace:0.5", 1), 10_000, S)
    assert [r.label for r in b.reports] == ["cauchy-pair-isoperimetry", "cauchy-isoperimetry"]
    assert all(r.lhs.exact for r in b.reports) and b.verdict is V.Verdict.HOLDS
    b = V.isoperimetry_report(2, 3.0, V.parse_set("ball:1", 2), 100_000, S)
    assert not b.reports[0].lhs.exact and b.verdict is V.Verdict.HOLDS
    with pytest.raises(DomainError):
        V.isoperimetry_report(2, 1.0, V.parse_set("ball:1", 2), 10_000, S)
    with pytest.raises(ConfigurationError):
        V.isoperimetry_report(2, 3.0, V.parse_set("ball:1", 2), 10_000, S, measure="laplace")


# --------------------------------------------------------------------------- tails and domination


def test_tails_window_and_notes():
    f = Linear([1.0, 0.0])
    b = V.tail_and_moment_report(f, CauchyParams(2, 6.0), [1, 2, 9], 20_000, S, moments=(1, 2, 7))
    notes = " ".join(b.notes)
    assert "t=9 dropped" in notes and "p=7 dropped" in notes
    assert {r.label for r in b.reports} == {"tail-pair", "moment-pair", "tail-product"}
    b = V.tail_and_moment_report(f, CauchyParams(2, 3.6), [1], 20_000, S, moments=(1,))
    assert "product-measure tails skipped" in " ".join(b.notes)
    assert {r.label for r in b.reports} == {"tail-pair", "moment-pair"}
    with pytest.raises(DomainError):
        V.tail_and_moment_report(f, CauchyParams(2, 3.0), [1], 10_000, S)


def test_tails_bundle_holds():
    b = V.tail_and_moment_report(SmoothNorm(2), CauchyParams(2, 10.0), [1, 2, 3], 50_000, S)
    assert "tail-product" in {r.label for r in b.reports}
    assert b.verdict is V.Verdict.HOLDS


def test_domination_ratio_at_origin():
    params = CauchyParams(2, 4.0)
    rep = V.product_domination_check(params, 10_000, S)
    # at the origin the density ratio is c_n^2 / c_{2n}
    log_origin = 2 * special.log_cauchy_norm_const(2, 4.0) - special.log_cauchy_norm_const(4, 4.0)
    assert rep.origin_ratio == pytest.approx(math.exp(log_origin), rel=1e-12)
    assert rep.ok and rep.infimum >= rep.d


def test_d_half_table():
    rows = V.d_half_table(32)
    assert len(rows) == 32 and rows[0][1] == 2.0 and rows[1][1] == 4.0
    assert min(d for _, _, d in rows) >= 0.5


# --------------------------------------------------------------------------- determinism


def test_digest_ignores_volatile_fields():
    a = V.pisier_gaussian_report(Linear([1.0, 0.0]), V.Power(2), 2, 5000, RngStream(3))
    b = V.pisier_gaussian_report(Linear([1.0, 0.0]), V.Power(2), 2, 5000, RngStream(3))
    b.timestamp = "1970-01-01T00:00:00+00:00"
    b.runtime_seconds = 123.0
    assert V.digest(a) == V.digest(b)
    c = V.pisier_gaussian_report(Linear([1.0, 0.0]), V.Power(2), 2, 5000, RngStream(4))
    assert V.digest(a) != V.digest(c)


def test_workers_do_not_change_reports():
    f = standard_suite(2)["rbf3"]
    a = V.cauchy_poincare_report(f, CauchyParams(2, 6.0), 2, 150_000, S, workers=1)
    b = V.cauchy_poincare_report(f, CauchyParams(2, 6.0), 2, 150_000, S, workers=4)
    assert V.digest(a) == V.digest(b)


def test_reports_to_csv(tmp_path):
    rs = V.flatten([V.isoperimetry_report(1, 4.0, V.parse_set("halfspace:0", 1), 1000, S)])
    path = tmp_path / "r.csv"
    V.reports_to_csv(rs, path)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("label,params,lhs") and len(lines) == 3
