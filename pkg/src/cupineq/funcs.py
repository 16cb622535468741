"""Smooth test functions with analytic gradients and certified Lipschitz bounds.

All evaluation is vectorized over leading axes: ``x`` has shape (..., dim).
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, ShapeError

#: max of the logistic derivative
LOGISTIC_MAX_SLOPE = 0.25


def _points(x, dim: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 0 or x.shape[-1] != dim:
        raise ShapeError(f"expected points with last dimension {dim}, got shape {x.shape}")
    return x


def _vec(v, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size == 0 or not np.all(np.isfinite(v)):
        raise ConfigurationError(f"{name} must be a non-empty finite vector")
    return v


class TestFunction:
    """Base class; subclasses implement ``_value``, ``_grad`` and ``lipschitz_bound``."""

    __test__ = False  # keep pytest from collecting this class
    dim: int

    def __call__(self, x):
        return self._value(_points(x, self.dim))

    def gradient(self, x):
        return self._grad(_points(x, self.dim))

    def lipschitz_bound(self) -> float:
        raise NotImplementedError

    def scaled(self, factor: float) -> Scaled:
        return Scaled(self, float(factor))

    def normalized(self) -> TestFunction:
        """Rescaled so that the certified Lipschitz bound is at most 1."""
        lip = self.lipschitz_bound()
        return self if lip <= 1.0 else self.scaled(1.0 / lip)


@dataclass(frozen=True, eq=False)
class Linear(TestFunction):
    theta: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "theta", _vec(self.theta, "theta"))

    @property
    def dim(self) -> int:
        return self.theta.size

    def _value(self, x):
        return x @ self.theta

    def _grad(self, x):
        return np.broadcast_to(self.theta, x.shape).copy()

    def lipschitz_bound(self) -> float:
        return float(np.linalg.norm(self.theta))


@dataclass(frozen=True, eq=False)
class SmoothNorm(TestFunction):
    """sqrt(eps^2 + |x|^2)."""

    dim: int
    epsilon: float = 1.0

    def __post_init__(self):
        if self.dim < 1 or not self.epsilon > 0:
            raise ConfigurationError("SmoothNorm needs dim >= 1 and epsilon > 0")

    def _value(self, x):
        return np.sqrt(self.epsilon**2 + np.sum(x * x, axis=-1))

    def _grad(self, x):
        return x / self._value(x)[..., None]

    def lipschitz_bound(self) -> float:
        return 1.0


@dataclass(frozen=True, eq=False)
class RbfMixture(TestFunction):
    """sum_i w_i exp(-|x - c_i|^2 / (2 sigma_i^2))."""

    centers: np.ndarray
    weights: np.ndarray
    widths: np.ndarray

    def __post_init__(self):
        centers = np.atleast_2d(np.asarray(self.centers, dtype=float))
        weights = np.atleast_1d(np.asarray(self.weights, dtype=float))
        widths = np.atleast_1d(np.asarray(self.widths, dtype=float))
        k = centers.shape[0]
        if weights.shape != (k,) or widths.shape != (k,):
            raise ConfigurationError(
                f"RbfMixture needs one weight and width per center, got "
                f"{k} centers, {weights.size} weights, {widths.size} widths"
            )
        if not (np.all(widths > 0) and np.all(np.isfinite(centers)) and np.all(np.isfinite(weights))):
            raise ConfigurationError("RbfMixture widths must be positive and parameters finite")
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "widths", widths)

    @property
    def dim(self) -> int:
        return self.centers.shape[1]

    def _bumps(self, x):
        diff = x[..., None, :] - self.centers  # (..., k, dim)
        r2 = np.sum(diff * diff, axis=-1)
        return diff, self.weights * np.exp(-0.5 * r2 / self.widths**2)

    def _value(self, x):
        return np.sum(self._bumps(x)[1], axis=-1)

    def _grad(self, x):
        diff, b = self._bumps(x)
        return -np.sum((b / self.widths**2)[..., None] * diff, axis=-2)

    def lipschitz_bound(self) -> float:
        # each bump's radial slope (r/s^2) exp(-r^2/2s^2) peaks at r = s
        return float(np.sum(np.abs(self.weights) * math.exp(-0.5) / self.widths))


@dataclass(frozen=True, eq=False)
class SmoothedHalfspace(TestFunction):
    """logistic((<theta, x> - c) / delta), a smooth stand-in for 1{<theta,x> > c}."""

    theta: np.ndarray
    offset: float = 0.0
    softness: float = 1.0

    def __post_init__(self):
        theta = _vec(self.theta, "theta")
        if not math.isclose(float(np.linalg.norm(theta)), 1.0, rel_tol=1e-9):
            raise ConfigurationError("SmoothedHalfspace direction must be a unit vector")
        if not self.softness > 0:
            raise ConfigurationError("SmoothedHalfspace softness must be positive")
        object.__setattr__(self, "theta", theta)

    @property
    def dim(self) -> int:
        return self.theta.size

    def _s(self, x):
        return (x @ self.theta - self.offset) / self.softness

    def _value(self, x):
        s = self._s(x)
        return 0.5 * (1.0 + np.tanh(0.5 * s))

    def _grad(self, x):
        s = self._s(x)
        e = np.exp(-np.abs(s))
        slope = e / (1.0 + e) ** 2
        return (slope / self.softness)[..., None] * self.theta

    def lipschitz_bound(self) -> float:
        return LOGISTIC_MAX_SLOPE / self.softness


@dataclass(frozen=True, eq=False)
class Scaled(TestFunction):
    base: TestFunction
    factor: float = field(default=1.0)

    @property
    def dim(self) -> int:
        return self.base.dim

    def _value(self, x):
        return self.factor * self.base._value(x)

    def _grad(self, x):
        return self.factor * self.base._grad(x)

    def lipschitz_bound(self) -> float:
        return abs(self.factor) * self.base.lipschitz_bound()


_VARIANTS = {
    "linear": Linear,
    "smoothnorm": SmoothNorm,
    "rbf": RbfMixture,
    "rbfmixture": RbfMixture,
    "halfspace": SmoothedHalfspace,
    "smoothedhalfspace": SmoothedHalfspace,
}


def build(spec: Mapping) -> TestFunction:
    """Build a test function from ``{"variant": name, **params}``.

    Variants: ``linear`` (theta), ``smoothnorm`` (dim, epsilon),
    ``rbf`` (centers, weights, widths), ``halfspace`` (theta, offset, softness).
    An optional ``scale`` multiplies the result.
    """
    if not isinstance(spec, Mapping) or "variant" not in spec:
        raise ConfigurationError(f"function spec needs a 'variant' key, got {spec!r}")
    params = dict(spec)
    name = str(params.pop("variant")).lower().replace("_", "").replace("-", "")
    scale = params.pop("scale", None)
    try:
        cls = _VARIANTS[name]
    except KeyError:
        raise ConfigurationError(f"unknown test-function variant {spec['variant']!r}") from None
    try:
        f = cls(**params)
    except TypeError as exc:
        raise ConfigurationError(f"bad parameters for {name}: {exc}") from None
    return f.scaled(scale) if scale is not None else f


def eval_with_grad(f: TestFunction, x) -> tuple[np.ndarray | float, np.ndarray]:
    v, g = f(x), f.gradient(x)
    return (float(v) if np.ndim(v) == 0 else v), g


def lipschitz_bound(f: TestFunction) -> float:
    return f.lipschitz_bound()


def standard_suite(n: int) -> dict[str, TestFunction]:
    """The default functions exercised by every report."""
    e1 = np.zeros(n)
    e1[0] = 1.0
    rng = np.random.default_rng(20240607)
    centers = rng.uniform(-1.0, 1.0, size=(3, n))
    return {
        "linear": Linear(e1),
        "smoothnorm": SmoothNorm(n, 1.0),
        "rbf3": RbfMixture(centers, [1.0, -0.7, 0.5], [0.8, 1.2, 0.6]),
        "halfspace": SmoothedHalfspace(e1, 0.0, 1.0),
    }


def lipschitz_suite(n: int) -> dict[str, TestFunction]:
    """Three functions with ||f||_Lip <= 1, used by the tail checks."""
    suite = standard_suite(n)
    return {
        "linear": suite["linear"],
        "smoothnorm": suite["smoothnorm"],
        "rbf3": suite["rbf3"].normalized(),
    }
