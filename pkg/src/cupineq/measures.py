"""Gaussian, Cauchy, chi, sphere and ball-marginal measures.

Samplers take an explicit :class:`RngStream`; identical streams give
bit-identical batches. Cauchy draws use X = Z / eta with Z standard normal
and eta ~ chi_{2 alpha - n}.
"""

from __future__ import annotations

import math
import zlib
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from . import special
from .errors import DomainError, InfiniteMomentError, ShapeError, VarianceGuardError
from .quadrature import cumulative_on_grid, integrate_half_line, integrate_tail

_U64 = 1 << 64


@dataclass(frozen=True)
class RngStream:
    """A (seed, stream_id) pair naming one reproducible random stream."""

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            v = getattr(self, name)
            if not (isinstance(v, (int, np.integer)) and 0 <= int(v) < _U64):
                raise DomainError(f"{name} must be an unsigned 64-bit integer, got {v!r}")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(int(self.seed), spawn_key=(int(self.stream_id),))
        return np.random.Generator(np.random.PCG64(ss))

    def derive(self, *keys: int | str) -> RngStream:
        """A new stream whose id is a hash of this one and ``keys``."""
        ints = tuple(k if isinstance(k, int) else zlib.crc32(k.encode()) for k in keys)
        ss = np.random.SeedSequence(int(self.seed), spawn_key=(int(self.stream_id), *ints))
        return RngStream(int(self.seed), int(ss.generate_state(1, np.uint64)[0]))

    def chunk(self, index: int) -> RngStream:
        return self.derive(0, index)

    def child(self, tag: int | str) -> RngStream:
        return self.derive(1, tag)


@dataclass(frozen=True, eq=False)
class PointBatch:
    """``count`` points in R^dim, stored row-major as a (count, dim) array."""

    data: np.ndarray

    def __post_init__(self):
        data = np.ascontiguousarray(self.data, dtype=float)
        if data.ndim != 2 or data.shape[1] < 1:
            raise ShapeError(f"PointBatch needs a (count, dim) array, got shape {data.shape}")
        if data.size and not np.all(np.isfinite(data)):
            raise FloatingPointError("PointBatch entries must be finite")
        object.__setattr__(self, "data", data)

    @property
    def dim(self) -> int:
        return self.data.shape[1]

    @property
    def count(self) -> int:
        return self.data.shape[0]

    def split(self) -> tuple[np.ndarray, np.ndarray]:
        """View a batch in R^{2n} as pairs (x, y) in R^n x R^n."""
        if self.dim % 2:
            raise ShapeError(f"cannot split odd dimension {self.dim} into pairs")
        n = self.dim // 2
        return self.data[:, :n], self.data[:, n:]

    def __eq__(self, other):
        return isinstance(other, PointBatch) and np.array_equal(self.data, other.data)


@dataclass(frozen=True)
class CauchyParams:
    """Cauchy measure m_{n,alpha} with density proportional to (1+|x|^2)^-alpha."""

    n: int
    alpha: float

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"Cauchy dimension must be >= 1, got n={self.n}")
        # raises DivergentMeasureError for alpha <= n/2
        special.log_cauchy_norm_const(self.n, self.alpha)

    @property
    def d(self) -> float:
        """Degrees of freedom 2 alpha - n of the chi mixing variable."""
        return 2 * self.alpha - self.n


@dataclass(frozen=True)
class GaussianMeasure:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"Gaussian dimension must be >= 1, got n={self.n}")


def _check_count(count: int) -> int:
    if count < 0:
        raise DomainError(f"count must be >= 0, got {count}")
    return int(count)


# --------------------------------------------------------------------------- samplers


def sample_std_gaussian(n: int, count: int, stream: RngStream) -> PointBatch:
    count = _check_count(count)
    return PointBatch(stream.generator().standard_normal((count, n)))


def _chi(gen: np.random.Generator, d: float, count: int) -> np.ndarray:
    # chi_d = sqrt(Gamma(d/2, scale 2)); numpy's gamma sampler is Marsaglia-Tsang
    return np.sqrt(gen.gamma(0.5 * d, 2.0, size=count))


def sample_chi(d: float, count: int, stream: RngStream) -> PointBatch:
    if not d > 0:
        raise DomainError(f"chi distribution requires d > 0, got d={d}")
    count = _check_count(count)
    return PointBatch(_chi(stream.generator(), d, count)[:, None])


def sample_cauchy(params: CauchyParams, count: int, stream: RngStream) -> PointBatch:
    count = _check_count(count)
    gen = stream.generator()
    z = gen.standard_normal((count, params.n))
    eta = _chi(gen, params.d, count)
    return PointBatch(z / eta[:, None])


def sample_cauchy_product(params: CauchyParams, count: int, stream: RngStream) -> PointBatch:
    """Pairs (x, y) with x, y independent draws from m_{n,alpha}."""
    x = sample_cauchy(params, count, stream.child("product-x")).data
    y = sample_cauchy(params, count, stream.child("product-y")).data
    return PointBatch(np.hstack([x, y]))


def sample_sphere_uniform(m: int, count: int, stream: RngStream) -> PointBatch:
    """Uniform points on S^{m-1} in R^m."""
    if m < 2:
        raise DomainError(f"sphere sampling requires m >= 2, got m={m}")
    count = _check_count(count)
    g = stream.generator().standard_normal((count, m))
    norms = np.linalg.norm(g, axis=1)
    # a zero Gaussian vector has probability zero; guard anyway
    norms[norms == 0] = 1.0
    return PointBatch(g / norms[:, None])


# --------------------------------------------------------------------------- densities


def _as_points(x, n: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 0 or x.shape[-1] != n:
        raise ShapeError(f"expected points with last dimension {n}, got shape {x.shape}")
    return x


def cauchy_log_density(params: CauchyParams, x) -> float | np.ndarray:
    x = _as_points(x, params.n)
    r2 = np.sum(x * x, axis=-1)
    out = -special.log_cauchy_norm_const(params.n, params.alpha) - params.alpha * np.log1p(r2)
    return float(out) if np.ndim(out) == 0 else out


def gaussian_log_density(n: int, x) -> float | np.ndarray:
    x = _as_points(x, n)
    out = -0.5 * n * math.log(2 * math.pi) - 0.5 * np.sum(x * x, axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def cauchy_radial_moment(params: CauchyParams, p: float) -> float:
    """E|X|^p under m_{n,alpha}, finite only for 0 <= p < 2 alpha - n."""
    n, a = params.n, params.alpha
    if p < 0:
        raise DomainError(f"requires p >= 0, got p={p}")
    if not p < 2 * a - n:
        raise InfiniteMomentError(
            f"E|X|^p is infinite for p >= 2 alpha - n = {2 * a - n}, got p={p}"
        )
    # Gamma(a-(n+p)/2)/Gamma(a-n/2) * Gamma((n+p)/2)/Gamma(n/2)
    return math.exp(
        special.log_gamma_ratio(0.5 * n, 0.5 * p)
        - special.log_gamma_ratio(a - 0.5 * (n + p), 0.5 * p)
    )


def marginal_order(N: int, k: int, alpha: float) -> float:
    """Order of the k-dimensional coordinate projection of m_{N,alpha}."""
    if not 1 <= k <= N:
        raise DomainError(f"projection requires 1 <= k <= N, got k={k}, N={N}")
    CauchyParams(N, alpha)
    return alpha - 0.5 * (N - k)


# --------------------------------------------------------------------------- radial laws


def cauchy_radial_density(params: CauchyParams) -> Callable[[float], float]:
    """Density of |X| under m_{n,alpha}: s_{n-1} r^{n-1} w(r)."""
    n, a = params.n, params.alpha
    log_c = special.log_unit_sphere_area(n) - special.log_cauchy_norm_const(n, a)

    def rho(r: float) -> float:
        if r <= 0:
            return math.exp(log_c) if n == 1 else 0.0
        return math.exp(log_c + (n - 1) * math.log(r) - a * math.log1p(r * r))

    return rho


def chi_density(d: float) -> Callable[[float], float]:
    log_c = -(0.5 * d - 1) * math.log(2.0) - special.log_gamma_beta(0.5 * d)

    def rho(r: float) -> float:
        if r <= 0:
            return math.exp(log_c) if d == 1 else 0.0
        return math.exp(log_c + (d - 1) * math.log(r) - 0.5 * r * r)

    return rho


def radial_moment_quadrature(params: CauchyParams, p: float, tol: float = 1e-12) -> float:
    """E|X|^p under m_{n,alpha} by quadrature of the radial density."""
    if not p < 2 * params.alpha - params.n:
        raise InfiniteMomentError(f"E|X|^p is infinite for p={p}")
    rho = cauchy_radial_density(params)
    return integrate_half_line(lambda r: r**p * rho(r) if r > 0 else 0.0, tol)


def radial_moment(
    params: CauchyParams,
    p: float,
    count: int = 0,
    stream: RngStream | None = None,
    method: str = "auto",
) -> tuple[float, float | None]:
    """E|X|^p by Monte Carlo when its variance is finite, else by quadrature.

    Returns (value, standard_error); the error is None for quadrature.
    """
    mc_ok = 2 * p < 2 * params.alpha - params.n
    if method == "mc" and not mc_ok:
        raise VarianceGuardError(
            f"MC estimate of E|X|^{p} has infinite variance (needs 2p < 2 alpha - n); "
            "use method='quadrature'"
        )
    if method == "quadrature" or (method == "auto" and (not mc_ok or stream is None)):
        return radial_moment_quadrature(params, p), None
    r = np.linalg.norm(sample_cauchy(params, count, stream).data, axis=1) ** p
    return float(r.mean()), float(r.std(ddof=1) / math.sqrt(count))


class RadialCDF:
    """CDF of a radial law tabulated by quadrature on r = s/(1-s), s in [0, 1)."""

    def __init__(self, rho: Callable[[float], float], panels: int = 4000):
        s = np.linspace(0.0, 1.0, panels + 1)[:-1]

        def integrand(t: float) -> float:
            one_minus = 1.0 - t
            return rho(t / one_minus) / (one_minus * one_minus)

        cum = cumulative_on_grid(integrand, s)
        tail = integrate_tail(rho, s[-1] / (1.0 - s[-1]))
        self._s = np.append(s, 1.0)
        self._cum = np.append(cum, cum[-1] + tail)

    @property
    def total(self) -> float:
        return float(self._cum[-1])

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        s = r / (1.0 + r)
        return np.interp(s, self._s, self._cum)


# --------------------------------------------------------------------------- sphere / ball


@dataclass(frozen=True)
class BallMarginal:
    """First-n-coordinate marginal of the uniform measure on S^{2n-1}."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"requires n >= 1, got n={self.n}")

    @property
    def log_const(self) -> float:
        n = self.n
        return special.log_gamma_beta(n) - 0.5 * n * special.LOG_PI - special.log_gamma_beta(0.5 * n)

    def density(self, u) -> float | np.ndarray:
        u = np.asarray(u, dtype=float)
        r2 = np.sum(u * u, axis=-1) if u.ndim else u * u
        inside = r2 < 1.0
        safe = np.where(inside, 1.0 - r2, 1.0)
        val = np.where(inside, np.exp(self.log_const + (0.5 * self.n - 1) * np.log(safe)), 0.0)
        return float(val) if np.ndim(val) == 0 else val

    def sigma2(self, x) -> float | np.ndarray:
        """Isotropic function (1 - |x|^2)/n of the sphere along the first coordinate."""
        x = np.asarray(x, dtype=float)
        r2 = np.sum(x * x, axis=-1) if x.ndim else x * x
        val = (1.0 - r2) / self.n
        return float(val) if np.ndim(val) == 0 else val

    def sample(self, count: int, stream: RngStream) -> PointBatch:
        pts = sample_sphere_uniform(2 * self.n, count, stream)
        return PointBatch(pts.data[:, : self.n])

    def radial_density(self) -> Callable[[float], float]:
        n = self.n
        log_c = self.log_const + special.log_unit_sphere_area(n)

        def rho(r: float) -> float:
            if r <= 0 or r >= 1:
                return math.exp(log_c) if (n == 1 and r == 0) else 0.0
            return math.exp(log_c + (n - 1) * math.log(r) + (0.5 * n - 1) * math.log1p(-r * r))

        return rho


def ball_marginal(n: int) -> BallMarginal:
    return BallMarginal(n)
