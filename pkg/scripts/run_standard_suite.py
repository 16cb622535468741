"""Run every inequality check over the standard function suite and save a CSV.

    python3 scripts/run_standard_suite.py --count 200000 --out suite.csv
"""

from __future__ import annotations

import argparse
import collections
from dataclasses import dataclass, fields

from cupineq import verify


@dataclass
class SuiteConfig:
    n: int = 2
    alpha: float = 6.0
    count: int = 200_000
    seed: int = 0
    workers: int = 1
    out: str = "standard_suite.csv"


def parse(argv=None) -> SuiteConfig:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for f in fields(SuiteConfig):
        ap.add_argument(f"--{f.name}", type=type(f.default), default=f.default)
    return SuiteConfig(**vars(ap.parse_args(argv)))


def main(argv=None) -> int:
    cfg = parse(argv)
    reports = verify.standard_suite_reports(cfg.n, cfg.alpha, cfg.count, cfg.seed, workers=cfg.workers)
    rows = verify.flatten(reports)
    verify.reports_to_csv(rows, cfg.out)
    tally = collections.Counter(r.verdict.value for r in rows)
    for r in rows:
        print(f"{r.verdict.value:12s} {r.label:26s} {r.params.get('function', ''):22s} ratio={r.ratio:.4f}")
    print(dict(tally), "->", cfg.out)
    return 1 if tally.get("VIOLATED") else 0


if __name__ == "__main__":
    raise SystemExit(main())
