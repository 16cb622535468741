"""Spherical-cup transform of pair measures on R^n x R^n.

Two realizations:

* :func:`cup_sample` pushes samples of a pair law through U_t with
  t ~ Uniform[0, pi/2] (any n).
* :func:`cup_density_grid_1d` applies the density operator
  (Uw)(u, v) = (2/pi) int_0^{pi/2} w(u cos t - v sin t, u sin t + v cos t) dt
  to a density tabulated on a square grid of the plane (n = 1).
"""

from __future__ import annotations

import math
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, ShapeError, TruncationError
from .measures import PointBatch, RngStream
from .quadrature import gauss_legendre, midpoint_rule

HALF_PI = 0.5 * math.pi


def apply_rotation(x, y, t):
    """U_t(x, y) = (x cos t + y sin t, -x sin t + y cos t).

    ``x`` and ``y`` may be batches (..., n); ``t`` broadcasts against the
    leading axes.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ShapeError(f"x and y must have the same shape, got {x.shape} and {y.shape}")
    t = np.asarray(t, dtype=float)
    if t.ndim and x.ndim:
        t = t[..., None]
    c, s = np.cos(t), np.sin(t)
    return x * c + y * s, -x * s + y * c


def cup_sample(
    pair_sampler: Callable[[int, RngStream], PointBatch],
    count: int,
    stream: RngStream,
) -> PointBatch:
    """Draw from the spherical cup of the pair law sampled by ``pair_sampler``."""
    pairs = pair_sampler(count, stream.child("pairs"))
    x, y = pairs.split()
    t = stream.child("angles").generator().uniform(0.0, HALF_PI, size=pairs.count)
    u, v = apply_rotation(x, y, t)
    return PointBatch(np.hstack([u, v]))


@dataclass(frozen=True)
class QuadratureSpec:
    node_count: int = 64
    rule: str = "gauss-legendre"

    def __post_init__(self):
        if self.node_count < 2:
            raise ConfigurationError(f"need at least 2 quadrature nodes, got {self.node_count}")
        if self.rule not in ("gauss-legendre", "midpoint"):
            raise ConfigurationError(f"unknown quadrature rule {self.rule!r}")

    def nodes(self) -> tuple[np.ndarray, np.ndarray]:
        """Angles in [0, pi/2] and weights summing to 1 (the 2/pi factor folded in)."""
        rule = gauss_legendre if self.rule == "gauss-legendre" else midpoint_rule
        t, w = rule(self.node_count, 0.0, HALF_PI)
        return t, w / HALF_PI


@dataclass(frozen=True, eq=False)
class GridDensity2D:
    """Density sampled at the cell centers of an M x M grid on [-L, L]^2.

    ``values[i, j]`` is the density at (x_i, y_j). ``source``, when present,
    is the analytic function the grid was tabulated from.
    """

    half_width: float
    cells: int
    values: np.ndarray
    source: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = field(default=None, repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if not self.half_width > 0:
            raise ConfigurationError(f"half-width must be positive, got {self.half_width}")
        if values.shape != (self.cells, self.cells):
            raise ConfigurationError(
                f"values must be {self.cells}x{self.cells}, got shape {values.shape}"
            )
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise ConfigurationError("grid density values must be finite and non-negative")
        object.__setattr__(self, "values", values)

    @property
    def h(self) -> float:
        return 2.0 * self.half_width / self.cells

    @property
    def centers(self) -> np.ndarray:
        return -self.half_width + self.h * (np.arange(self.cells) + 0.5)

    @classmethod
    def from_function(cls, func, half_width: float = 8.0, cells: int = 512) -> GridDensity2D:
        tmp = cls(half_width, cells, np.zeros((cells, cells)))
        xx, yy = np.meshgrid(tmp.centers, tmp.centers, indexing="ij")
        return cls(half_width, cells, func(xx, yy), source=func)

    def mass(self) -> float:
        return float(self.values.sum() * self.h**2)

    def lp_norm(self, p: float) -> float:
        if math.isinf(p):
            return float(self.values.max(initial=0.0))
        return float((np.sum(self.values**p) * self.h**2) ** (1.0 / p))

    def interpolate(self, x, y) -> np.ndarray:
        """Bilinear interpolation between cell centers, zero outside the grid."""
        M, h, L = self.cells, self.h, self.half_width
        padded = np.zeros((M + 2, M + 2))
        padded[1:-1, 1:-1] = self.values
        fx = (np.asarray(x) + L) / h - 0.5
        fy = (np.asarray(y) + L) / h - 0.5
        i0 = np.floor(fx)
        j0 = np.floor(fy)
        tx = fx - i0
        ty = fy - j0
        inside = (i0 >= -1) & (i0 <= M - 1) & (j0 >= -1) & (j0 <= M - 1)
        i = np.clip(i0, -1, M - 1).astype(np.intp) + 1
        j = np.clip(j0, -1, M - 1).astype(np.intp) + 1
        out = (
            (1 - tx) * (1 - ty) * padded[i, j]
            + tx * (1 - ty) * padded[i + 1, j]
            + (1 - tx) * ty * padded[i, j + 1]
            + tx * ty * padded[i + 1, j + 1]
        )
        return np.where(inside, out, 0.0)

    def to_csv(self, path) -> None:
        lines = [f"{self.half_width!r},{self.cells}"]
        lines += [",".join(repr(float(v)) for v in row) for row in self.values]
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def from_csv(cls, path) -> GridDensity2D:
        rows = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
        if rows and rows[0].replace(" ", "").upper() == "L,M":
            rows = rows[1:]
        try:
            L_text, M_text = rows[0].split(",")
            L, M = float(L_text), int(M_text)
            values = np.array([[float(v) for v in r.split(",")] for r in rows[1:]])
        except (ValueError, IndexError) as exc:
            raise ConfigurationError(f"malformed grid CSV {path}: {exc}") from None
        return cls(L, M, values)


def _cup_rows(w: GridDensity2D, t: np.ndarray, weights: np.ndarray, rows: slice, exact: bool):
    c = w.centers
    uu, vv = np.meshgrid(c[rows], c, indexing="ij")
    out = np.zeros_like(uu)
    evaluate = w.source if exact else w.interpolate
    for tk, wk in zip(t, weights):
        ct, st = math.cos(tk), math.sin(tk)
        out += wk * evaluate(uu * ct - vv * st, uu * st + vv * ct)
    return out


def cup_density_grid_1d(
    w: GridDensity2D,
    quad: QuadratureSpec = QuadratureSpec(),
    *,
    interpolation: str = "bilinear",
    workers: int = 1,
    row_block: int = 64,
) -> GridDensity2D:
    """Spherical-cup density of a pair density on R x R.

    ``interpolation="exact"`` evaluates the grid's analytic ``source`` at
    rotated points instead of interpolating the table. Output rows are
    computed in independent blocks; the result does not depend on ``workers``.
    """
    if w.cells < 4:
        raise ConfigurationError(f"grid needs at least 4 cells per axis, got {w.cells}")
    if interpolation not in ("bilinear", "exact"):
        raise ConfigurationError(f"unknown interpolation {interpolation!r}")
    exact = interpolation == "exact"
    if exact and w.source is None:
        raise ConfigurationError("exact interpolation needs a grid built with from_function")
    t, weights = quad.nodes()
    blocks = [slice(s, min(s + row_block, w.cells)) for s in range(0, w.cells, row_block)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda b: _cup_rows(w, t, weights, b, exact), blocks))
    else:
        parts = [_cup_rows(w, t, weights, b, exact) for b in blocks]
    out = np.maximum(np.vstack(parts), 0.0)
    return GridDensity2D(w.half_width, w.cells, out)


@dataclass(frozen=True)
class NormCheck:
    p: float
    in_norm: float
    out_norm: float
    ratio: float
    tol: float
    contraction_ok: bool
    isometry_ok: bool | None

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def discretization_tol(w: GridDensity2D, quad: QuadratureSpec) -> float:
    return max(10 * w.h**2, 10 / quad.node_count**2)


def check_support(w: GridDensity2D, max_outside: float = 1e-10) -> float:
    """Fraction of mass outside [-L/2, L/2]^2; raises if above ``max_outside``."""
    c = np.abs(w.centers)
    outer = (c[:, None] > 0.5 * w.half_width) | (c[None, :] > 0.5 * w.half_width)
    total = w.values.sum()
    frac = float(w.values[outer].sum() / total) if total > 0 else 0.0
    if frac > max_outside:
        raise TruncationError(
            f"{frac:.3e} of the mass lies outside [-L/2, L/2]^2 (limit {max_outside:g}); "
            "enlarge the grid"
        )
    return frac


def cup_operator_norm_check(
    w: GridDensity2D,
    quad: QuadratureSpec = QuadratureSpec(),
    p: float = 2.0,
    *,
    transformed: GridDensity2D | None = None,
    interpolation: str = "bilinear",
) -> NormCheck:
    """Compare discrete L^p norms of w and Uw.

    ``contraction_ok`` tests ratio <= 1 + tol; for p = 2 ``isometry_ok``
    tests |ratio - 1| <= tol, with tol = max(10 h^2, 10 / N^2).
    """
    if not (p >= 1):
        raise ConfigurationError(f"p must lie in [1, inf], got {p}")
    check_support(w)
    uw = transformed if transformed is not None else cup_density_grid_1d(
        w, quad, interpolation=interpolation
    )
    tol = discretization_tol(w, quad)
    a, b = w.lp_norm(p), uw.lp_norm(p)
    ratio = b / a if a > 0 else 1.0
    return NormCheck(
        p=p,
        in_norm=a,
        out_norm=b,
        ratio=ratio,
        tol=tol,
        contraction_ok=ratio <= 1 + tol,
        isometry_ok=abs(ratio - 1) <= tol if p == 2 else None,
    )


def reflect_diagonal(w: GridDensity2D) -> GridDensity2D:
    """(R w)(x, y) = w(y, x)."""
    src = w.source
    refl = None if src is None else (lambda x, y: src(y, x))
    return GridDensity2D(w.half_width, w.cells, w.values.T.copy(), source=refl)


def adjoint_pairing(
    f: GridDensity2D,
    g: GridDensity2D,
    quad: QuadratureSpec = QuadratureSpec(),
) -> tuple[float, float]:
    """Return (<Uf, g>, <f, R U R g>) on the grid.

    U averages rotations by t in [0, pi/2]; its adjoint averages t in
    [-pi/2, 0], which is R U R. The two numbers agree up to interpolation
    error. U itself is not self-adjoint unless f or g is R-symmetric.
    """
    if (f.half_width, f.cells) != (g.half_width, g.cells):
        raise ConfigurationError("adjoint check needs two densities on the same grid")
    h2 = f.h**2
    uf = cup_density_grid_1d(f, quad).values
    rurg = cup_density_grid_1d(reflect_diagonal(g), quad).values.T
    return float(np.sum(uf * g.values) * h2), float(np.sum(f.values * rurg) * h2)


def gaussian_bump(center=(0.0, 0.0), width: float = 1.0):
    """Normalized isotropic Gaussian density on R^2 as a grid source."""
    cx, cy = center
    norm = 1.0 / (2 * math.pi * width**2)

    def func(x, y):
        return norm * np.exp(-0.5 * ((x - cx) ** 2 + (y - cy) ** 2) / width**2)

    return func
