"""Estimators for both sides of the Gaussian and Cauchy inequalities.

Every report is oriented so that the claimed inequality reads ``lhs <= rhs``.
Sides come from Monte Carlo (with standard errors), from closed forms, or
from deterministic quadrature; closed forms carry ``exact=True``.
"""

from __future__ import annotations

import csv
import datetime as _dt
import hashlib
import json
import math
import time
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import special as sps

from . import special
from .errors import ConfigurationError, DomainError, ShapeError, VarianceGuardError
from .funcs import Linear, Scaled, TestFunction
from .measures import (
    CauchyParams,
    GaussianMeasure,
    RngStream,
    cauchy_log_density,
    cauchy_radial_moment,
    marginal_order,
    sample_cauchy,
    sample_cauchy_product,
    sample_sphere_uniform,
    sample_std_gaussian,
)
from .montecarlo import MCEstimate, mc_estimate_many
from .quadrature import integrate_tail

K_SIGMA = 3.0
CONCORDANCE_SIGMA = 5.0
HALF_PI = 0.5 * math.pi
SQRT_PI = math.sqrt(math.pi)


class Verdict(str, Enum):
    HOLDS = "HOLDS"
    INCONCLUSIVE = "INCONCLUSIVE"
    VIOLATED = "VIOLATED"


def decide(lhs: MCEstimate, rhs: MCEstimate, k: float = K_SIGMA) -> Verdict:
    """Three-way verdict on ``lhs <= rhs`` from k-sigma bands.

    When both sides are exact a relative slack of EXACT_RTOL absorbs rounding,
    so equality cases read as HOLDS.
    """
    if lhs.exact and rhs.exact:
        slack = special.EXACT_RTOL * max(abs(lhs.mean), abs(rhs.mean))
        return Verdict.HOLDS if lhs.mean <= rhs.mean + slack else Verdict.VIOLATED
    lo_l, hi_l = lhs.mean - k * lhs.se, lhs.mean + k * lhs.se
    lo_r, hi_r = rhs.mean - k * rhs.se, rhs.mean + k * rhs.se
    if lo_l > hi_r:
        return Verdict.VIOLATED
    if hi_l <= lo_r:
        return Verdict.HOLDS
    return Verdict.INCONCLUSIVE


_SEVERITY = {Verdict.HOLDS: 0, Verdict.INCONCLUSIVE: 1, Verdict.VIOLATED: 2}


def worst(verdicts: Iterable[Verdict]) -> Verdict:
    return max(verdicts, key=_SEVERITY.__getitem__, default=Verdict.HOLDS)


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else ("nan" if math.isnan(v) else ("inf" if v > 0 else "-inf"))
    return obj


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


@dataclass
class InequalityReport:
    label: str
    lhs: MCEstimate
    rhs: MCEstimate
    params: dict = field(default_factory=dict)
    seed: int | None = None
    runtime_seconds: float = 0.0
    k: float = K_SIGMA
    exact_lhs: float | None = None
    exact_rhs: float | None = None
    notes: list[str] = field(default_factory=list)
    extra: dict = field(default_factory=dict)
    timestamp: str = field(default_factory=_now)

    @property
    def ratio(self) -> float:
        if self.rhs.mean == 0:
            return 0.0 if self.lhs.mean == 0 else math.inf
        return self.lhs.mean / self.rhs.mean

    @property
    def slack_sigmas(self) -> float:
        """(rhs - lhs) in units of the combined standard error."""
        se = math.hypot(self.lhs.se, self.rhs.se)
        gap = self.rhs.mean - self.lhs.mean
        if se == 0:
            return 0.0 if gap == 0 else math.copysign(math.inf, gap)
        return gap / se

    @property
    def verdict(self) -> Verdict:
        return decide(self.lhs, self.rhs, self.k)

    @property
    def exact_ratio(self) -> float | None:
        if self.exact_lhs is None or self.exact_rhs in (None, 0):
            return None
        return self.exact_lhs / self.exact_rhs

    def to_dict(self) -> dict:
        return _clean(
            {
                "label": self.label,
                "params": self.params,
                "lhs": self.lhs.to_dict(),
                "rhs": self.rhs.to_dict(),
                "ratio": self.ratio,
                "slack_sigmas": self.slack_sigmas,
                "verdict": self.verdict,
                "exact_lhs": self.exact_lhs,
                "exact_rhs": self.exact_rhs,
                "notes": self.notes,
                "extra": self.extra,
                "seed": self.seed,
                "runtime_seconds": self.runtime_seconds,
                "timestamp": self.timestamp,
            }
        )

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, **kw)


@dataclass
class ReportBundle:
    label: str
    reports: list[InequalityReport]
    params: dict = field(default_factory=dict)
    seed: int | None = None
    runtime_seconds: float = 0.0
    notes: list[str] = field(default_factory=list)
    extra: dict = field(default_factory=dict)
    timestamp: str = field(default_factory=_now)

    @property
    def verdict(self) -> Verdict:
        return worst(r.verdict for r in self.reports)

    def to_dict(self) -> dict:
        return _clean(
            {
                "label": self.label,
                "params": self.params,
                "verdict": self.verdict,
                "reports": [r.to_dict() for r in self.reports],
                "notes": self.notes,
                "extra": self.extra,
                "seed": self.seed,
                "runtime_seconds": self.runtime_seconds,
                "timestamp": self.timestamp,
            }
        )

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, **kw)


VOLATILE_KEYS = frozenset({"timestamp", "runtime_seconds"})


def _strip(obj):
    if isinstance(obj, dict):
        return {k: _strip(v) for k, v in obj.items() if k not in VOLATILE_KEYS}
    if isinstance(obj, list):
        return [_strip(v) for v in obj]
    return obj


def digest(report) -> str:
    """SHA-256 of a report's JSON with timestamps and wall-clock times removed."""
    d = report.to_dict() if hasattr(report, "to_dict") else report
    blob = json.dumps(_strip(d), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


# --------------------------------------------------------------------------- helpers


@dataclass(frozen=True)
class Power:
    p: float

    def __post_init__(self):
        if not self.p >= 1:
            raise DomainError(f"Power(p) needs p >= 1 for convexity, got p={self.p}")

    def __call__(self, r):
        return np.abs(r) ** self.p

    @property
    def name(self) -> str:
        return f"power{self.p:g}"


@dataclass(frozen=True)
class Exp:
    def __call__(self, r):
        return np.exp(r)

    @property
    def name(self) -> str:
        return "exp"


def linear_theta(f: TestFunction) -> np.ndarray | None:
    """Coefficient vector if ``f`` is linear (possibly scaled), else None."""
    if isinstance(f, Linear):
        return f.theta
    if isinstance(f, Scaled):
        inner = linear_theta(f.base)
        return None if inner is None else f.factor * inner
    return None


def _check_dim(f: TestFunction, n: int) -> None:
    if f.dim != n:
        raise ShapeError(f"test function has dimension {f.dim}, measure has n={n}")


def _concordance(report: InequalityReport) -> None:
    """Attach |MC - exact| <= 5 se checks for each side that has an exact value."""
    for side, est, exact in (("lhs", report.lhs, report.exact_lhs), ("rhs", report.rhs, report.exact_rhs)):
        if exact is None or est.exact:
            continue
        tol = max(CONCORDANCE_SIGMA * est.se, special.EXACT_RTOL * abs(exact))
        ok = abs(est.mean - exact) <= tol
        report.extra[f"{side}_concordant"] = ok
        resolved = est.se > special.EXACT_RTOL * abs(exact)
        report.extra[f"{side}_z"] = (est.mean - exact) / est.se if resolved else 0.0
        if not ok:
            report.notes.append(f"{side} Monte Carlo estimate is more than 5 se from its exact value")


def _split(data: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = data.shape[1] // 2
    return data[:, :n], data[:, n:]


def describe_function(f: TestFunction) -> str:
    if isinstance(f, Scaled):
        return f"{describe_function(f.base)}*{f.factor:.6g}"
    return type(f).__name__


def _f_params(f: TestFunction) -> dict:
    return {"function": describe_function(f), "lipschitz_bound": f.lipschitz_bound()}


# --------------------------------------------------------------------------- Gaussian


def pisier_gaussian_report(
    f: TestFunction,
    psi: Power | Exp,
    n: int,
    count: int,
    stream: RngStream,
    *,
    workers: int = 1,
) -> InequalityReport:
    """E psi(f(Y) - f(X)) <= E psi((pi/2) <grad f(X), Y>) under gamma_n x gamma_n."""
    t0 = time.perf_counter()
    _check_dim(f, n)

    def lhs(data):
        x, y = _split(data)
        return psi(f(y) - f(x))

    def rhs(data):
        x, y = _split(data)
        return psi(HALF_PI * np.sum(f.gradient(x) * y, axis=1))

    est = mc_estimate_many(
        {"lhs": lhs, "rhs": rhs},
        lambda m, s: sample_std_gaussian(2 * n, m, s),
        count,
        stream.child("pairs"),
        workers=workers,
    )
    report = InequalityReport(
        label=f"pisier-{psi.name}",
        lhs=est["lhs"],
        rhs=est["rhs"],
        params={"n": n, "psi": psi.name, **_f_params(f)},
        seed=stream.seed,
    )
    theta = linear_theta(f)
    if theta is not None:
        s2 = float(theta @ theta)
        if isinstance(psi, Power):
            a = s2 ** (0.5 * psi.p)
            report.exact_lhs = a * 2 ** (0.5 * psi.p) * special.gaussian_abs_moment(1, psi.p)
            report.exact_rhs = a * special.pisier_cp(psi.p)
        else:
            report.exact_lhs = math.exp(s2)
            report.exact_rhs = math.exp(math.pi**2 / 8 * s2)
        _concordance(report)
    report.runtime_seconds = time.perf_counter() - t0
    return report


def exp_moment_report(
    f: TestFunction,
    n: int,
    count: int,
    stream: RngStream,
    *,
    workers: int = 1,
) -> InequalityReport:
    """E e^{f(X) - E f} <= E e^{(pi^2/8)|grad f(X)|^2} under gamma_n."""
    t0 = time.perf_counter()
    _check_dim(f, n)
    sampler = lambda m, s: sample_std_gaussian(n, m, s)  # noqa: E731
    theta = linear_theta(f)
    notes = []
    if theta is not None:
        center, center_se = 0.0, 0.0
        notes.append("linear f is centered exactly (E f = 0)")
    else:
        c = mc_estimate_many({"f": f}, sampler, count, stream.child("centering"), workers=workers)["f"]
        center, center_se = c.mean, c.se
        notes.append("f centered by an independent Monte Carlo estimate of its mean")

    est = mc_estimate_many(
        {
            "lhs": lambda x: np.exp(f(x) - center),
            "rhs": lambda x: np.exp(math.pi**2 / 8 * np.sum(f.gradient(x) ** 2, axis=1)),
        },
        sampler,
        count,
        stream.child("points"),
        workers=workers,
    )
    report = InequalityReport(
        label="exp-moment",
        lhs=est["lhs"],
        rhs=est["rhs"],
        params={"n": n, **_f_params(f)},
        seed=stream.seed,
        notes=notes,
        extra={"centering_mean": center, "centering_se": center_se},
    )
    if theta is not None:
        s2 = float(theta @ theta)
        report.exact_lhs = math.exp(0.5 * s2)
        report.exact_rhs = math.exp(math.pi**2 / 8 * s2)
        _concordance(report)
    report.runtime_seconds = time.perf_counter() - t0
    return report


# --------------------------------------------------------------------------- Cauchy Poincare


def cauchy_poincare_report(
    f: TestFunction,
    params: CauchyParams,
    p: float,
    count: int,
    stream: RngStream,
    *,
    mode: str = "auto",
    workers: int = 1,
) -> InequalityReport:
    """E_{m_{2n,alpha}} |f(x)-f(y)|^p <= C (pi/2)^p E_{m_{n,beta}} |grad f|^p.

    ``mode``: ``"mc"`` samples both sides, ``"exact"`` uses closed forms
    (linear f only), ``"auto"`` samples when p < alpha - n and otherwise
    falls back to closed forms.
    """
    t0 = time.perf_counter()
    n, alpha = params.n, params.alpha
    _check_dim(f, n)
    consts = special.poincare_constants(n, p, alpha)
    coef = consts.C * HALF_PI**p
    theta = linear_theta(f)
    mc_ok = p < alpha - n
    if mode not in ("auto", "mc", "exact"):
        raise ConfigurationError(f"unknown mode {mode!r}")
    if mode == "mc" and not mc_ok:
        raise VarianceGuardError(
            f"Monte Carlo needs p < alpha - n = {alpha - n} for finite variance, got p={p}; "
            "use the exact/quadrature mode"
        )
    if mode == "auto":
        mode = "mc" if mc_ok else "exact"
    if mode == "exact" and theta is None:
        raise VarianceGuardError(
            f"p={p} is outside the Monte Carlo window p < alpha - n = {alpha - n} and "
            "closed forms exist only for linear f"
        )

    exact_lhs = exact_rhs = None
    if theta is not None:
        norm = float(np.linalg.norm(theta))
        one_dim = CauchyParams(1, alpha - n + 0.5)
        exact_lhs = (math.sqrt(2) * norm) ** p * cauchy_radial_moment(one_dim, p)
        exact_rhs = coef * norm**p

    notes, extra = [], {"C": consts.C, "A": consts.A, "c_ratio": consts.c_ratio, "beta": consts.beta}
    if p == 1:
        extra["cheeger_coefficient"] = special.cheeger_cauchy_coefficient(n, alpha)
        extra["cheeger_matches"] = math.isclose(
            coef, extra["cheeger_coefficient"], rel_tol=special.EXACT_RTOL
        )

    if mode == "exact":
        lhs, rhs = MCEstimate.exact_value(exact_lhs), MCEstimate.exact_value(exact_rhs)
        notes.append("Monte Carlo sides OMITTED: variance guard p < alpha - n not met")
    else:
        pair = CauchyParams(2 * n, alpha)
        integrands = {"lhs": lambda d: np.abs(f(_split(d)[1]) - f(_split(d)[0])) ** p}
        cross_ok = theta is not None and alpha - n > 2
        if cross_ok:
            integrands["cross"] = lambda d: (_split(d)[0] @ theta) * (_split(d)[1] @ theta)
        left = mc_estimate_many(
            integrands,
            lambda m, s: sample_cauchy(pair, m, s),
            count,
            stream.child("lhs"),
            workers=workers,
        )
        right = mc_estimate_many(
            {"rhs": lambda x: coef * np.sum(f.gradient(x) ** 2, axis=1) ** (0.5 * p)},
            lambda m, s: sample_cauchy(CauchyParams(n, consts.beta), m, s),
            count,
            stream.child("rhs"),
            workers=workers,
        )
        lhs, rhs = left["lhs"], right["rhs"]
        if cross_ok:
            cross = left["cross"]
            extra["cross_moment"] = cross.mean
            extra["cross_moment_se"] = cross.se
            extra["cross_moment_zero"] = abs(cross.mean) <= CONCORDANCE_SIGMA * cross.se
    report = InequalityReport(
        label="cauchy-poincare",
        lhs=lhs,
        rhs=rhs,
        params={"n": n, "alpha": alpha, "p": p, "mode": mode, **_f_params(f)},
        seed=stream.seed,
        exact_lhs=exact_lhs,
        exact_rhs=exact_rhs,
        notes=notes,
        extra=extra,
    )
    _concordance(report)
    report.runtime_seconds = time.perf_counter() - t0
    return report


@dataclass
class SweepTable:
    n: int
    p: float
    rows: list[dict]
    limit: float

    HEADER = ("alpha", "rescaled_constant", "limit", "relative_gap")

    @property
    def gaps(self) -> list[float]:
        return [r["relative_gap"] for r in self.rows]

    @property
    def monotone(self) -> bool:
        g = self.gaps
        return all(b < a for a, b in zip(g, g[1:]))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(self.HEADER)
            for r in self.rows:
                w.writerow([repr(float(r[k])) for k in self.HEADER])

    def to_dict(self) -> dict:
        return _clean({"n": self.n, "p": self.p, "limit": self.limit, "rows": self.rows,
                       "monotone": self.monotone})


def gaussian_limit_sweep(n: int, p: float, alphas: Sequence[float]) -> SweepTable:
    """C(n,p,alpha) (2 alpha)^{p/2} (pi/2)^p against its alpha -> inf limit c_p."""
    limit = special.pisier_cp(p)
    rows = []
    for a in sorted(alphas):
        log_val = special.log_poincare_C(n, p, a) + 0.5 * p * math.log(2 * a) + p * math.log(HALF_PI)
        val = math.exp(log_val)
        rows.append({"alpha": a, "rescaled_constant": val, "limit": limit,
                     "relative_gap": abs(val - limit) / limit})
    return SweepTable(n, p, rows, limit)


# --------------------------------------------------------------------------- sphere


def sphere_poincare_report(
    f: TestFunction,
    n: int,
    count: int,
    stream: RngStream,
    *,
    workers: int = 1,
) -> InequalityReport:
    """E_sigma |f(x)-f(y)|^2 <= (pi^2/(4n)) E_pi |grad f(u)|^2 (1-|u|^2) on S^{2n-1}."""
    t0 = time.perf_counter()
    if n < 2:
        raise DomainError(f"sphere split needs n >= 2, got n={n}")
    _check_dim(f, n)
    coef = math.pi**2 / (4 * n)

    def rhs(d):
        x = _split(d)[0]
        return coef * np.sum(f.gradient(x) ** 2, axis=1) * (1.0 - np.sum(x * x, axis=1))

    est = mc_estimate_many(
        {"lhs": lambda d: (f(_split(d)[0]) - f(_split(d)[1])) ** 2, "rhs": rhs},
        lambda m, s: sample_sphere_uniform(2 * n, m, s),
        count,
        stream.child("sphere"),
        workers=workers,
    )
    report = InequalityReport(
        label="sphere-poincare",
        lhs=est["lhs"],
        rhs=est["rhs"],
        params={"n": n, **_f_params(f)},
        seed=stream.seed,
        notes=["gradient side uses the first half of each sphere point (its law is the ball marginal)"],
    )
    theta = linear_theta(f)
    if theta is not None:
        s2 = float(theta @ theta)
        report.exact_lhs = s2 / n
        report.exact_rhs = math.pi**2 / (8 * n) * s2
        _concordance(report)
    if f.lipschitz_bound() <= 1.0:
        bound = math.pi**2 / (8 * n)
        report.extra["lipschitz_bound"] = bound
        report.extra["lipschitz_ok"] = report.lhs.mean <= bound + K_SIGMA * report.lhs.se
    report.runtime_seconds = time.perf_counter() - t0
    return report


# --------------------------------------------------------------------------- sets


@dataclass(frozen=True, eq=False)
class HalfSpace:
    """A = {x : <theta, x> <= offset}."""

    direction: np.ndarray
    offset: float = 0.0

    def __post_init__(self):
        th = np.asarray(self.direction, dtype=float)
        if th.ndim != 1 or not math.isclose(float(np.linalg.norm(th)), 1.0, rel_tol=1e-9):
            raise ConfigurationError("half-space direction must be a unit vector")
        object.__setattr__(self, "direction", th)

    @property
    def dim(self) -> int:
        return self.direction.size

    def distance(self, x: np.ndarray) -> np.ndarray:
        """Signed distance: positive outside A."""
        return x @ self.direction - self.offset

    def describe(self) -> str:
        return f"halfspace:{self.offset:g}"


@dataclass(frozen=True)
class CenteredBall:
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ConfigurationError(f"ball radius must be positive, got {self.radius}")

    def distance(self, x: np.ndarray) -> np.ndarray:
        return np.linalg.norm(x, axis=1) - self.radius

    def describe(self) -> str:
        return f"ball:{self.radius:g}"


SetSpec = HalfSpace | CenteredBall


def parse_set(text: str, n: int) -> SetSpec:
    """``halfspace:<offset>`` (direction e_1) or ``ball:<radius>``."""
    kind, _, value = text.partition(":")
    try:
        v = float(value)
    except ValueError:
        raise ConfigurationError(f"bad set spec {text!r}; use halfspace:<c> or ball:<r>") from None
    kind = kind.strip().lower()
    if kind == "halfspace":
        e1 = np.zeros(n)
        e1[0] = 1.0
        return HalfSpace(e1, v)
    if kind == "ball":
        return CenteredBall(v)
    raise ConfigurationError(f"unknown set kind {kind!r}; use halfspace or ball")


Measure = GaussianMeasure | CauchyParams


def _dim(measure: Measure) -> int:
    return measure.n


def _check_set(measure: Measure, A: SetSpec) -> None:
    if isinstance(A, HalfSpace) and A.dim != measure.n:
        raise ShapeError(f"half-space lives in R^{A.dim}, measure in R^{measure.n}")


def cauchy_cdf_1d(a: float, x):
    """CDF of m_{1,a}; sqrt(2a-1) X is Student t with 2a-1 degrees of freedom."""
    nu = 2 * a - 1
    return sps.stdtr(nu, np.asarray(x, dtype=float) * math.sqrt(nu))


def cauchy_density_1d(a: float, x):
    x = np.asarray(x, dtype=float)
    return np.exp(-a * np.log1p(x * x) - special.log_cauchy_norm_const(1, a))


def set_measure(measure: Measure, A: SetSpec) -> float:
    """nu(A) in closed form via normal, chi-square, Student t and F distributions."""
    _check_set(measure, A)
    n = _dim(measure)
    if isinstance(measure, GaussianMeasure):
        if isinstance(A, HalfSpace):
            return float(sps.ndtr(A.offset))
        return float(sps.chdtr(n, A.radius**2))
    if isinstance(A, HalfSpace):
        return float(cauchy_cdf_1d(marginal_order(n, 1, measure.alpha), A.offset))
    d = measure.d
    # |X|^2 d / n is F(n, d)
    return float(sps.fdtr(n, d, A.radius**2 * d / n))


def perimeter_analytic(measure: Measure, A: SetSpec) -> float:
    """nu^+(A): marginal density at the offset, or surface area times radial density."""
    _check_set(measure, A)
    n = _dim(measure)
    if isinstance(A, HalfSpace):
        c = A.offset
        if isinstance(measure, GaussianMeasure):
            return math.exp(-0.5 * c * c) / math.sqrt(2 * math.pi)
        return float(cauchy_density_1d(marginal_order(n, 1, measure.alpha), c))
    r = A.radius
    log_area = special.log_unit_sphere_area(n) + (n - 1) * math.log(r)
    if isinstance(measure, GaussianMeasure):
        log_w = -0.5 * n * math.log(2 * math.pi) - 0.5 * r * r
    else:
        log_w = -measure.alpha * math.log1p(r * r) - special.log_cauchy_norm_const(n, measure.alpha)
    return math.exp(log_area + log_w)


def _sampler(measure: Measure):
    if isinstance(measure, GaussianMeasure):
        return lambda m, s: sample_std_gaussian(measure.n, m, s)
    return lambda m, s: sample_cauchy(measure, m, s)


def intercept_weights(eps: Sequence[float]) -> np.ndarray:
    """Weights w with sum_i w_i g(eps_i) = intercept of the least-squares line."""
    X = np.column_stack([np.ones(len(eps)), np.asarray(eps, dtype=float)])
    return np.linalg.pinv(X)[0]


@dataclass
class PerimeterEstimate:
    mc_extrapolated: MCEstimate
    analytic: float
    eps: list[float]
    per_eps: list[MCEstimate]
    weights: list[float]

    @property
    def relative_error(self) -> float:
        return abs(self.mc_extrapolated.mean - self.analytic) / self.analytic

    def to_dict(self) -> dict:
        return _clean({
            "mc_extrapolated": self.mc_extrapolated.to_dict(),
            "analytic": self.analytic,
            "eps": self.eps,
            "per_eps": [e.to_dict() for e in self.per_eps],
            "weights": self.weights,
        })


def perimeter_estimate(
    measure: Measure,
    A: SetSpec,
    eps_list: Sequence[float],
    count: int,
    stream: RngStream,
    *,
    workers: int = 1,
) -> PerimeterEstimate:
    """(nu(A_eps) - nu(A))/eps by Monte Carlo, extrapolated linearly to eps = 0.

    All eps share one sample, and the extrapolated value is itself a sample
    mean (a fixed linear combination of indicators), so its standard error
    accounts for the correlation between eps levels.
    """
    eps = [float(e) for e in eps_list]
    if len(eps) < 3 or any(e <= 0 for e in eps) or any(b >= a for a, b in zip(eps, eps[1:])):
        raise ConfigurationError(f"eps_list must be >= 3 strictly decreasing positive values, got {eps}")
    _check_set(measure, A)
    fit = eps[-3:]
    w = intercept_weights(fit)

    def shell(d, e):
        return ((d > 0) & (d < e)) / e

    integrands = {f"eps{i}": (lambda x, e=e: shell(A.distance(x), e)) for i, e in enumerate(eps)}
    integrands["extrapolated"] = lambda x: sum(wi * shell(A.distance(x), e) for wi, e in zip(w, fit))
    est = mc_estimate_many(integrands, _sampler(measure), count, stream.child("perimeter"), workers=workers)
    return PerimeterEstimate(
        mc_extrapolated=est["extrapolated"],
        analytic=perimeter_analytic(measure, A),
        eps=eps,
        per_eps=[est[f"eps{i}"] for i in range(len(eps))],
        weights=[float(v) for v in w],
    )


def halfspace_pair_mass(n: int, alpha: float, offset: float, tol: float = 1e-13) -> float:
    """m_{2n,alpha}{<theta,x> <= c < <theta,y>} by quadrature.

    The pair (<theta,x>, <theta,y>) has law m_{2, alpha-n+1}. Given the first
    coordinate s, the second divided by sqrt(1+s^2) has law m_{1, alpha-n+1}
    and s itself has law m_{1, alpha-n+1/2}.
    """
    a2 = alpha - n + 1
    c = offset

    def g(r: float) -> float:
        s = c - r
        upper = 1.0 - float(cauchy_cdf_1d(a2, c / math.sqrt(1 + s * s)))
        return float(cauchy_density_1d(a2 - 0.5, s)) * upper

    return integrate_tail(g, 0.0, tol)


def isoperimetry_report(
    n: int,
    beta: float | None,
    A: SetSpec,
    count: int,
    stream: RngStream,
    *,
    measure: str = "cauchy",
    workers: int = 1,
) -> ReportBundle:
    """Isoperimetric checks for a Cauchy measure m_{n,beta} or for gamma_n.

    Cauchy (alpha = beta* = beta + (n+1)/2):
      (i)  (2 sqrt(alpha-n)/sqrt(pi)) m_{2n,alpha}(A x A^c) <= m_{n,beta}^+(A)
      (ii) c m_{n,alpha}(A)(1 - m_{n,alpha}(A)) <= m_{n,beta}^+(A),
           c = (d_{n,alpha}/sqrt(pi)) sqrt(2 beta)
    Gaussian:
      (iii) sqrt(2/pi) min(gamma(A), 1 - gamma(A)) <= gamma^+(A)
    """
    t0 = time.perf_counter()
    reports, notes = [], []
    params = {"n": n, "set": A.describe(), "measure": measure}
    if measure == "gaussian":
        g = GaussianMeasure(n)
        per = perimeter_analytic(g, A)
        m = set_measure(g, A)
        lower = math.sqrt(2 / math.pi) * min(m, 1 - m)
        rep = InequalityReport(
            label="gaussian-cheeger",
            lhs=MCEstimate.exact_value(lower),
            rhs=MCEstimate.exact_value(per),
            params=params,
            seed=stream.seed,
            exact_lhs=lower,
            exact_rhs=per,
        )
        rep.extra["equality"] = math.isclose(lower, per, rel_tol=special.EXACT_RTOL)
        reports.append(rep)
    elif measure == "cauchy":
        if beta is None or not beta >= 0.5 * (n + 1):
            raise DomainError(f"requires beta >= (n+1)/2 = {0.5 * (n + 1)}, got beta={beta}")
        alpha = beta + 0.5 * (n + 1)
        params.update(beta=beta, alpha=alpha)
        per = perimeter_analytic(CauchyParams(n, beta), A)
        coef = 2 * math.sqrt(alpha - n) / SQRT_PI
        if isinstance(A, HalfSpace):
            pair_mass = MCEstimate.exact_value(halfspace_pair_mass(n, alpha, A.offset))
            notes.append("pair mass of a half-space computed by quadrature of its 2-D marginal")
        else:
            r = A.radius
            pair = CauchyParams(2 * n, alpha)

            def inside_outside(d):
                x, y = _split(d)
                return (np.linalg.norm(x, axis=1) <= r) & (np.linalg.norm(y, axis=1) > r)

            pair_mass = mc_estimate_many(
                {"mass": inside_outside},
                lambda m, s: sample_cauchy(pair, m, s),
                count,
                stream.child("pair-mass"),
                workers=workers,
            )["mass"]
        lower_i = pair_mass.scaled(coef)
        reports.append(
            InequalityReport(
                label="cauchy-pair-isoperimetry",
                lhs=lower_i,
                rhs=MCEstimate.exact_value(per),
                params=params,
                seed=stream.seed,
                exact_lhs=lower_i.mean if pair_mass.exact else None,
                exact_rhs=per,
                extra={"pair_mass": pair_mass.mean, "coefficient": coef},
            )
        )
        d = special.product_bound_d(n, alpha)
        c = d / SQRT_PI * math.sqrt(2 * beta)
        m = set_measure(CauchyParams(n, alpha), A)
        lower_ii = c * m * (1 - m)
        reports.append(
            InequalityReport(
                label="cauchy-isoperimetry",
                lhs=MCEstimate.exact_value(lower_ii),
                rhs=MCEstimate.exact_value(per),
                params=params,
                seed=stream.seed,
                exact_lhs=lower_ii,
                exact_rhs=per,
                extra={"d": d, "c": c, "measure_of_A": m},
            )
        )
    else:
        raise ConfigurationError(f"unknown measure {measure!r}; use cauchy or gaussian")
    return ReportBundle(
        label="isoperimetry",
        reports=reports,
        params=params,
        seed=stream.seed,
        runtime_seconds=time.perf_counter() - t0,
        notes=notes,
    )


# --------------------------------------------------------------------------- tails


def _binomial(est: MCEstimate) -> MCEstimate:
    p = min(max(est.mean, 0.0), 1.0)
    return MCEstimate(est.mean, math.sqrt(p * (1 - p) / est.count), est.count, est.stream)


def tail_and_moment_report(
    f: TestFunction,
    params: CauchyParams,
    t_grid: Sequence[float],
    count: int,
    stream: RngStream,
    *,
    moments: Sequence[float] = (1, 2, 4),
    workers: int = 1,
) -> ReportBundle:
    """Deviation and moment bounds for a 1-Lipschitz f under m_{2n,alpha}."""
    t0 = time.perf_counter()
    n, alpha = params.n, params.alpha
    if not alpha >= n + 1.5:
        raise DomainError(f"requires alpha >= n + 3/2 = {n + 1.5}, got alpha={alpha}")
    _check_dim(f, n)
    g = f.normalized()
    scale = math.sqrt(alpha - n)
    notes = []
    ts = []
    for t in t_grid:
        if 0 <= t <= scale:
            ts.append(float(t))
        else:
            notes.append(f"t={t:g} dropped: outside [0, sqrt(alpha-n)] = [0, {scale:.6g}]")
    ps = []
    for p in moments:
        if not 1 <= p <= 2 * (alpha - n - 1):
            notes.append(f"moment p={p:g} dropped: outside [1, 2(alpha-n-1)]")
        elif not p < alpha - n:
            notes.append(f"moment p={p:g} dropped: Monte Carlo variance guard p < alpha - n")
        else:
            ps.append(float(p))

    def delta(d):
        x, y = _split(d)
        return np.abs(g(x) - g(y))

    integrands = {f"tail{i}": (lambda d, t=t: scale * delta(d) >= t) for i, t in enumerate(ts)}
    integrands.update({f"moment{j}": (lambda d, p=p: delta(d) ** p) for j, p in enumerate(ps)})
    reports = []
    base = {"n": n, "alpha": alpha, **_f_params(g)}
    if integrands:
        pair = CauchyParams(2 * n, alpha)
        est = mc_estimate_many(
            integrands, lambda m, s: sample_cauchy(pair, m, s), count, stream.child("pairs"), workers=workers
        )
        for i, t in enumerate(ts):
            bound = 2 * math.exp(-t * t / 12)
            reports.append(InequalityReport(
                label="tail-pair", lhs=_binomial(est[f"tail{i}"]), rhs=MCEstimate.exact_value(bound),
                params={**base, "t": t}, seed=stream.seed, exact_rhs=bound,
            ))
        for j, p in enumerate(ps):
            bound = special.lipschitz_moment_bound(n, alpha, p)
            reports.append(InequalityReport(
                label="moment-pair", lhs=est[f"moment{j}"], rhs=MCEstimate.exact_value(bound),
                params={**base, "p": p}, seed=stream.seed, exact_rhs=bound,
                extra={"exact_bound": special.exact_lipschitz_moment_bound(n, alpha, p)},
            ))
    if alpha >= n * n and ts:
        prod = mc_estimate_many(
            {f"tail{i}": integrands[f"tail{i}"] for i in range(len(ts))},
            lambda m, s: sample_cauchy_product(params, m, s),
            count,
            stream.child("product"),
            workers=workers,
        )
        for i, t in enumerate(ts):
            bound = 4 * math.exp(-t * t / 12)
            reports.append(InequalityReport(
                label="tail-product", lhs=_binomial(prod[f"tail{i}"]), rhs=MCEstimate.exact_value(bound),
                params={**base, "t": t}, seed=stream.seed, exact_rhs=bound,
            ))
    elif ts:
        notes.append("product-measure tails skipped: requires alpha >= n^2")
    return ReportBundle(
        label="tails",
        reports=reports,
        params={**base, "t_grid": list(t_grid), "scale": 1.0 / max(f.lipschitz_bound(), 1.0)},
        seed=stream.seed,
        runtime_seconds=time.perf_counter() - t0,
        notes=notes,
    )


# --------------------------------------------------------------------------- product domination


@dataclass
class DominationReport:
    n: int
    alpha: float
    d: float
    infimum: float
    argmin: list[float]
    origin_ratio: float
    probe_count: int

    @property
    def ok(self) -> bool:
        return self.infimum >= self.d * (1 - 1e-10)

    def to_dict(self) -> dict:
        return _clean({**self.__dict__, "ok": self.ok})


def log_density_ratio(params: CauchyParams, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """log w_{2n,alpha}(x,y) - log w_{n,alpha}(x) - log w_{n,alpha}(y)."""
    pair = CauchyParams(2 * params.n, params.alpha)
    return (
        cauchy_log_density(pair, np.hstack([x, y]))
        - cauchy_log_density(params, x)
        - cauchy_log_density(params, y)
    )


def product_domination_check(params: CauchyParams, probe_count: int, stream: RngStream) -> DominationReport:
    """Pointwise density ratio of m_{2n,alpha} to m_{n,alpha} x m_{n,alpha} at random probes."""
    n, alpha = params.n, params.alpha
    if not alpha > n:
        raise DomainError(f"requires alpha > n, got n={n}, alpha={alpha}")
    if probe_count < 2:
        raise DomainError("need at least two probes")
    half = probe_count // 2
    a = sample_cauchy(CauchyParams(2 * n, alpha), half, stream.child("joint")).data
    b = sample_cauchy_product(params, probe_count - half, stream.child("product")).data
    probes = np.vstack([a, b])
    x, y = probes[:, :n], probes[:, n:]
    log_r = log_density_ratio(params, x, y)
    i = int(np.argmin(log_r))
    zero = np.zeros((1, n))
    return DominationReport(
        n=n,
        alpha=alpha,
        d=special.product_bound_d(n, alpha),
        infimum=float(np.exp(log_r[i])),
        argmin=probes[i].tolist(),
        origin_ratio=float(np.exp(log_density_ratio(params, zero, zero)[0])),
        probe_count=probe_count,
    )


def d_half_table(n_max: int = 32) -> list[tuple[int, float, float]]:
    """(n, alpha, d_{n,alpha}) at alpha = max(n^2, n+1), the smallest order where both
    the product-domination bound and the alpha >= n^2 regime apply."""
    return [(n, float(max(n * n, n + 1)), special.product_bound_d(n, max(n * n, n + 1)))
            for n in range(1, n_max + 1)]


# --------------------------------------------------------------------------- suite


def standard_suite_reports(
    n: int = 2,
    alpha: float = 6.0,
    count: int = 100_000,
    seed: int = 0,
    *,
    workers: int = 1,
) -> list:
    """Every report over the standard function suite; none should read VIOLATED."""
    from .funcs import lipschitz_suite, standard_suite

    root = RngStream(seed)
    out = []
    suite = standard_suite(n)
    params = CauchyParams(n, alpha)
    for name, f in suite.items():
        s = root.child(name)
        for p in (1, 2):
            out.append(pisier_gaussian_report(f, Power(p), n, count, s.child(f"pisier{p}"), workers=workers))
            if p < alpha - n:
                out.append(cauchy_poincare_report(f, params, p, count, s.child(f"cauchy{p}"), workers=workers))
        out.append(pisier_gaussian_report(f, Exp(), n, count, s.child("pisier-exp"), workers=workers))
        out.append(exp_moment_report(f, n, count, s.child("exp"), workers=workers))
        if n >= 2:
            out.append(sphere_poincare_report(f, n, count, s.child("sphere"), workers=workers))
    if alpha >= n + 1.5:
        for name, f in lipschitz_suite(n).items():
            out.append(tail_and_moment_report(f, params, [1, 2, 3], count, root.child("tails").child(name)))
    return out


def flatten(reports: Iterable) -> list[InequalityReport]:
    out = []
    for r in reports:
        out.extend(r.reports if isinstance(r, ReportBundle) else [r])
    return out


def reports_to_csv(rows: Iterable[InequalityReport], path) -> None:
    header = ["label", "params", "lhs", "lhs_se", "rhs", "rhs_se", "ratio", "slack_sigmas", "verdict"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for r in rows:
            w.writerow([r.label, json.dumps(_clean(r.params), sort_keys=True), r.lhs.mean, r.lhs.se,
                        r.rhs.mean, r.rhs.se, r.ratio, r.slack_sigmas, r.verdict.value])

