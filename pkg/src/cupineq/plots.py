"""SVG line plots for limit sweeps and tail reports."""

from __future__ import annotations

import warnings

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_ASYMPTOTE_LABELS = {1.0: "c_1 = sqrt(pi/2)", 2.0: "c_2 = pi^2/4"}


def _save(fig, path) -> None:
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def plot_sweep(sweep: dict, path) -> bool:
    """Rescaled constant against alpha with its limit. Returns False if empty."""
    rows = sweep.get("rows") or []
    if not rows:
        warnings.warn("empty sweep: no plot written", stacklevel=2)
        return False
    alphas = [r["alpha"] for r in rows]
    vals = [r["rescaled_constant"] for r in rows]
    p = float(sweep["p"])
    label = _ASYMPTOTE_LABELS.get(p, f"c_{p:g}")
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(alphas, vals, "o-", label=f"rescaled constant (n={sweep['n']}, p={p:g})")
    ax.axhline(sweep["limit"], color="k", ls="--", label=label)
    ax.set_xscale("log")
    ax.set_xlabel("alpha")
    ax.set_ylabel("C (2 alpha)^{p/2} (pi/2)^p")
    ax.legend()
    _save(fig, path)
    return True


def plot_tails(bundles: list[dict], path) -> bool:
    """Empirical pair tails against the 2 exp(-t^2/12) curve."""
    pts = [
        (r["params"]["t"], r["lhs"]["mean"], r["params"].get("function", "?"))
        for b in bundles
        for r in b.get("reports", [])
        if r["label"] == "tail-pair"
    ]
    if not pts:
        warnings.warn("no tail lines found: no plot written", stacklevel=2)
        return False
    t_max = max(t for t, _, _ in pts)
    grid = np.linspace(0.0, max(t_max, 1.0), 200)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(grid, 2 * np.exp(-grid**2 / 12), "k-", label="2 exp(-t^2/12)")
    for name in sorted({p[2] for p in pts}):
        sel = [(t, v) for t, v, nm in pts if nm == name]
        ts, vs = zip(*sel)
        # zero tails cannot be drawn on a log axis; pin them at the floor
        floor = 1e-7
        ax.plot(ts, [max(v, floor) for v in vs], "o", label=name)
    ax.set_yscale("log")
    ax.set_ylim(1e-7, 3)
    ax.set_xlabel("t")
    ax.set_ylabel("P(sqrt(alpha-n)|f(x)-f(y)| >= t)")
    ax.legend()
    _save(fig, path)
    return True

