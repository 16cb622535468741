"""Rescaled Cauchy Poincare constants approaching the Gaussian constant c_p."""

from __future__ import annotations

import argparse
from dataclasses import dataclass, field

import numpy as np

from cupineq import verify
from cupineq.plots import plot_sweep


@dataclass
class SweepConfig:
    n: int = 2
    p_values: list[float] = field(default_factory=lambda: [1.0, 2.0])
    alphas: list[float] = field(default_factory=lambda: list(np.logspace(1, 6, 11)))
    plot_prefix: str | None = None


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=SweepConfig.n)
    ap.add_argument("--plot-prefix", default=None, help="write <prefix>_p<p>.svg per p")
    args = ap.parse_args(argv)
    cfg = SweepConfig(n=args.n, plot_prefix=args.plot_prefix)
    for p in cfg.p_values:
        table = verify.gaussian_limit_sweep(cfg.n, p, cfg.alphas)
        print(f"n={cfg.n} p={p:g} limit={table.limit:.12f} monotone={table.monotone}")
        for row in table.rows:
            print(f"  alpha={row['alpha']:<12.6g} constant={row['rescaled_constant']:.12f} "
                  f"gap={row['relative_gap']:.3e}")
        if cfg.plot_prefix:
            plot_sweep(table.to_dict(), f"{cfg.plot_prefix}_p{p:g}.svg")


if __name__ == "__main__":
    main()
