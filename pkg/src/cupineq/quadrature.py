"""Deterministic quadrature used as an independent oracle for densities.

Adaptive Simpson on bounded intervals, and a half-line version using the
algebraic map r = s / (1 - s), which keeps polynomial (Cauchy) tails
integrable near s = 1.
"""

from __future__ import annotations

import math
from collections.abc import Callable

import numpy as np


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-12,
    max_depth: int = 48,
) -> float:
    """Integrate ``f`` over [a, b] with Richardson-corrected adaptive Simpson."""
    if a == b:
        return 0.0
    if a > b:
        return -adaptive_simpson(f, b, a, tol, max_depth)

    def simpson(fa: float, fm: float, fb: float, h: float) -> float:
        return h / 6.0 * (fa + 4.0 * fm + fb)

    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = simpson(fa, fm, fb, b - a)

    # explicit stack instead of recursion; left halves are pushed last so the
    # summation order is fixed
    total = 0.0
    stack = [(a, b, fa, fm, fb, whole, tol, max_depth)]
    while stack:
        a_, b_, fa_, fm_, fb_, s_whole, tol_, depth = stack.pop()
        m_ = 0.5 * (a_ + b_)
        lm, rm = 0.5 * (a_ + m_), 0.5 * (m_ + b_)
        flm, frm = f(lm), f(rm)
        h = b_ - a_
        s_left = simpson(fa_, flm, fm_, 0.5 * h)
        s_right = simpson(fm_, frm, fb_, 0.5 * h)
        delta = s_left + s_right - s_whole
        if depth <= 0 or abs(delta) <= 15.0 * tol_:
            total += s_left + s_right + delta / 15.0
        else:
            stack.append((m_, b_, fm_, frm, fb_, s_right, 0.5 * tol_, depth - 1))
            stack.append((a_, m_, fa_, flm, fm_, s_left, 0.5 * tol_, depth - 1))
    return total


def integrate_tail(f: Callable[[float], float], start: float, tol: float = 1e-12) -> float:
    """Integrate ``f`` over [start, inf) through r = start + s/(1-s)."""

    def mapped(s: float) -> float:
        if s >= 1.0:
            return 0.0
        one_minus = 1.0 - s
        val = f(start + s / one_minus) / (one_minus * one_minus)
        return val if math.isfinite(val) else 0.0

    return adaptive_simpson(mapped, 0.0, 1.0, tol)


def integrate_half_line(
    f: Callable[[float], float],
    tol: float = 1e-12,
    split: float = 1.0,
) -> float:
    """Integrate ``f`` over [0, inf): [0, split] directly, then the mapped tail."""
    return adaptive_simpson(f, 0.0, split, tol) + integrate_tail(f, split, tol)


def cumulative_on_grid(
    f: Callable[[float], float],
    grid: np.ndarray,
    tol: float = 1e-13,
) -> np.ndarray:
    """Running integral of ``f`` from grid[0] to each grid point."""
    grid = np.asarray(grid, dtype=float)
    pieces = [adaptive_simpson(f, lo, hi, tol) for lo, hi in zip(grid[:-1], grid[1:])]
    return np.concatenate([[0.0], np.cumsum(pieces)])


def gauss_legendre(n: int, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the n-point Gauss-Legendre rule on [a, b]."""
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def midpoint_rule(n: int, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    h = (b - a) / n
    return a + h * (np.arange(n) + 0.5), np.full(n, h)
