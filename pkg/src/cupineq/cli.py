"""Command-line driver.

    cupineq <experiment> [--config FILE] [flags]
    cupineq list
    cupineq plot --in REPORT.json --plot OUT.svg

Exit codes: 0 success, 2 configuration error, 3 domain error, 4 a VIOLATED
verdict.
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import sys
import time
import warnings
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import special, transform, verify
from .errors import ConfigurationError, DomainError, TruncationError
from .funcs import lipschitz_suite, standard_suite
from .measures import (
    CauchyParams,
    RngStream,
    cauchy_radial_moment,
    sample_cauchy,
    sample_std_gaussian,
)

EXIT_OK, EXIT_CONFIG, EXIT_DOMAIN, EXIT_VIOLATED = 0, 2, 3, 4

EXPERIMENTS: dict[str, tuple[str, dict]] = {
    "constants": (
        "requires alpha > n + 1/2 and 1 <= p < 2(alpha−n)",
        {"n": 1, "alpha": 3.0, "p": 2.0},
    ),
    "sample": ("requires alpha > n/2", {"n": 2, "alpha": 3.0, "measure": "cauchy", "count": 100_000}),
    "cup": (
        "requires M >= 4, N >= 2 and mass outside [-L/2, L/2]^2 below 1e-10",
        {"grid_L": 8.0, "grid_M": 512, "nodes": 64},
    ),
    "pisier": ("requires p >= 1", {"n": 2, "p": 1.0, "functions": ["linear"], "psi": "power"}),
    "cauchy-poincare": (
        "requires alpha > n + 1/2 and 1 <= p < 2(alpha−n)",
        {"n": 2, "alpha": 6.0, "p": 2.0, "functions": ["linear"]},
    ),
    "sphere": ("requires n >= 2", {"n": 2, "functions": ["linear"]}),
    "isoperimetry": (
        "requires beta >= (n+1)/2 for the Cauchy measure",
        {"n": 1, "beta": 4.0, "set": "halfspace:0", "measure": "cauchy"},
    ),
    "tails": (
        "requires alpha >= n + 3/2",
        {"n": 2, "alpha": 38.0, "t_grid": [2.0, 3.0, 4.0, 5.0], "functions": ["linear", "smoothnorm", "rbf3"]},
    ),
    "limit-sweep": (
        "requires alpha > n + 1/2 and 1 <= p < 2(alpha−n) for every alpha",
        {"n": 2, "p": 1.0, "alphas": [100.0, 1000.0, 10000.0]},
    ),
}

DEFAULT_COUNT = 1_000_000
QUICK_FACTOR = 100


@dataclass
class ExperimentConfig:
    experiment: str
    n: int = 2
    alpha: float | None = None
    beta: float | None = None
    p: float | None = None
    functions: list[str] = field(default_factory=lambda: ["linear"])
    psi: str = "power"
    count: int = DEFAULT_COUNT
    seed: int = 0
    quick: bool = False
    workers: int = 1
    json_path: str | None = None
    csv_path: str | None = None
    plot_path: str | None = None
    alphas: list[float] = field(default_factory=list)
    t_grid: list[float] = field(default_factory=list)
    set: str = "halfspace:0"
    measure: str = "cauchy"
    grid_L: float = 8.0
    grid_M: int = 512
    nodes: int = 64

    @property
    def effective_count(self) -> int:
        return max(self.count // QUICK_FACTOR, 1000) if self.quick else self.count

    def validate(self) -> None:
        """Check names and parameter windows; runs before any sampling or writing."""
        if self.experiment not in EXPERIMENTS:
            raise ConfigurationError(f"unknown experiment {self.experiment!r}")
        if self.count < 1000:
            raise ConfigurationError(f"samples must be >= 1000, got {self.count}")
        if self.seed < 0:
            raise ConfigurationError(f"seed must be non-negative, got {self.seed}")
        if self.workers < 1:
            raise ConfigurationError(f"workers must be >= 1, got {self.workers}")
        suite = standard_suite(max(self.n, 1))
        for name in self.functions:
            if name not in suite:
                raise ConfigurationError(f"unknown function {name!r}; choose from {sorted(suite)}")
        if self.psi not in ("power", "exp"):
            raise ConfigurationError(f"psi must be power or exp, got {self.psi!r}")
        if self.measure not in ("cauchy", "gaussian"):
            raise ConfigurationError(f"measure must be cauchy or gaussian, got {self.measure!r}")
        verify.parse_set(self.set, max(self.n, 1))
        _check_windows(self)


def _need(cfg: ExperimentConfig, *names: str) -> None:
    missing = [k for k in names if getattr(cfg, k) is None]
    if missing:
        raise ConfigurationError(f"{cfg.experiment} needs {', '.join('--' + m for m in missing)}")


def _check_windows(cfg: ExperimentConfig) -> None:
    e, n = cfg.experiment, cfg.n
    if n < 1:
        raise DomainError(f"requires n >= 1, got n={n}")
    if e in ("constants", "cauchy-poincare"):
        _need(cfg, "alpha", "p")
        special.poincare_constants(n, cfg.p, cfg.alpha)
    elif e == "sample":
        if cfg.measure == "cauchy":
            _need(cfg, "alpha")
            CauchyParams(n, cfg.alpha)
    elif e == "cup":
        transform.QuadratureSpec(cfg.nodes)
        if cfg.grid_M < 4 or not cfg.grid_L > 0:
            raise ConfigurationError("grid needs M >= 4 and L > 0")
    elif e == "pisier":
        _need(cfg, "p")
        if cfg.psi == "power":
            verify.Power(cfg.p)
    elif e == "sphere":
        if n < 2:
            raise DomainError(f"sphere requires n >= 2, got n={n}")
    elif e == "isoperimetry":
        if cfg.measure == "cauchy":
            _need(cfg, "beta")
            if not cfg.beta >= 0.5 * (n + 1):
                raise DomainError(f"requires beta >= (n+1)/2 = {0.5 * (n + 1)}, got beta={cfg.beta}")
    elif e == "tails":
        _need(cfg, "alpha")
        if not cfg.alpha >= n + 1.5:
            raise DomainError(f"requires alpha >= n + 3/2 = {n + 1.5}, got alpha={cfg.alpha}")
    elif e == "limit-sweep":
        _need(cfg, "p")
        if not cfg.alphas:
            raise ConfigurationError("limit-sweep needs --alphas")
        for a in cfg.alphas:
            special.log_poincare_C(n, cfg.p, a)


def list_experiments() -> str:
    lines = []
    for name, (window, defaults) in EXPERIMENTS.items():
        shown = ", ".join(f"{k}={_fmt(v)}" for k, v in defaults.items())
        lines.append(f"{name}: {window} [defaults: {shown}]")
    return "\n".join(lines)


def _fmt(v) -> str:
    if isinstance(v, list):
        return ",".join(_fmt(x) for x in v)
    return f"{v:g}" if isinstance(v, float) else str(v)


# --------------------------------------------------------------------------- config parsing


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in str(text).replace(" ", "").split(",") if x]
    except ValueError:
        raise ConfigurationError(f"expected comma-separated numbers, got {text!r}") from None


_CONFIG_KEYS = {
    "experiment": ("name", str),
    "measure": {"n": int, "alpha": float, "beta": float, "p": float, "measure": str, "set": str, "psi": str},
    "functions": {"names": "functions"},
    "sampling": {"count": int, "samples": int, "seed": int, "quick": "bool", "workers": int},
    "outputs": {"json": "json_path", "csv": "csv_path", "plot": "plot_path"},
    "sweep": {"alphas": "floats", "t_grid": "floats"},
    "grid": {"L": "grid_L", "M": "grid_M", "nodes": "nodes"},
}


def read_config_file(path) -> dict:
    """Flat key = value file with sections; returns ExperimentConfig keyword overrides."""
    parser = configparser.ConfigParser()
    parser.optionxform = str
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from None
    out: dict = {}
    for section in parser.sections():
        spec = _CONFIG_KEYS.get(section)
        if spec is None:
            raise ConfigurationError(f"unknown config section [{section}]")
        for key, raw in parser.items(section):
            try:
                if section == "experiment":
                    if key != "name":
                        raise KeyError(key)
                    out["experiment"] = raw.strip()
                elif section == "functions":
                    out["functions"] = [s.strip() for s in raw.split(",") if s.strip()]
                elif section == "outputs":
                    out[spec[key]] = raw.strip()
                elif section == "sweep":
                    out[key] = _floats(raw)
                elif section == "grid":
                    out[spec[key]] = float(raw) if key == "L" else int(raw)
                else:
                    kind = spec[key]
                    target = "count" if key == "samples" else key
                    if kind == "bool":
                        out[target] = parser.getboolean(section, key)
                    else:
                        out[target] = kind(raw.strip())
            except KeyError:
                raise ConfigurationError(f"unknown key {key!r} in [{section}]") from None
            except ValueError as exc:
                raise ConfigurationError(f"bad value for {key!r} in [{section}]: {exc}") from None
    return out


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value config file with sections")
    p.add_argument("--n", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--p", type=float)
    p.add_argument("--samples", type=int, dest="count")
    p.add_argument("--seed", type=int)
    p.add_argument("--set", dest="set", help="halfspace:<offset> or ball:<radius>")
    p.add_argument("--measure", choices=["cauchy", "gaussian"])
    p.add_argument("--functions", type=lambda s: [x.strip() for x in s.split(",") if x.strip()])
    p.add_argument("--psi", choices=["power", "exp"])
    p.add_argument("--alphas", type=_floats_arg)
    p.add_argument("--t-grid", type=_floats_arg, dest="t_grid")
    p.add_argument("--grid-L", type=float, dest="grid_L")
    p.add_argument("--grid-M", type=int, dest="grid_M")
    p.add_argument("--nodes", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--out", dest="json_path")
    p.add_argument("--csv", dest="csv_path")
    p.add_argument("--plot", dest="plot_path")
    p.add_argument("--quick", action="store_true", default=None)


def _floats_arg(text: str) -> list[float]:
    try:
        return _floats(text)
    except ConfigurationError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigurationError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cupineq", description="Gaussian and Cauchy Poincare-type inequality checks")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in EXPERIMENTS:
        _add_common(sub.add_parser(name))
    sub.add_parser("list")
    plot = sub.add_parser("plot")
    plot.add_argument("--in", dest="inputs", nargs="+", required=True)
    plot.add_argument("--plot", dest="plot_path", required=True)
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    merged: dict = {"experiment": args.command}
    merged.update(EXPERIMENTS[args.command][1])
    if args.config:
        from_file = read_config_file(args.config)
        if from_file.get("experiment", args.command) != args.command:
            raise ConfigurationError(
                f"config names experiment {from_file['experiment']!r}, command is {args.command!r}"
            )
        merged.update(from_file)
    names = {f.name for f in fields(ExperimentConfig)}
    merged.update({k: v for k, v in vars(args).items() if k in names and v is not None})
    return ExperimentConfig(**merged)


# --------------------------------------------------------------------------- experiments


def _functions(cfg: ExperimentConfig, lipschitz: bool = False):
    suite = lipschitz_suite(cfg.n) if lipschitz else standard_suite(cfg.n)
    full = standard_suite(cfg.n)
    return {k: suite.get(k, full[k]) for k in cfg.functions}


def _run_constants(cfg, stream):
    c = special.poincare_constants(cfg.n, cfg.p, cfg.alpha)
    result = {
        "C": c.C,
        "A": c.A,
        "c_ratio": c.c_ratio,
        "beta": c.beta,
        "rhs_coefficient": c.C * (math.pi / 2) ** cfg.p,
        "pisier_cp": special.pisier_cp(cfg.p),
        "cheeger_coefficient": special.cheeger_cauchy_coefficient(cfg.n, cfg.alpha),
    }
    if cfg.alpha > cfg.n:
        result["product_bound_d"] = special.product_bound_d(cfg.n, cfg.alpha)
    if cfg.alpha >= cfg.n + 1.5 and 1 <= cfg.p <= 2 * (cfg.alpha - cfg.n - 1):
        result["lipschitz_moment_bound"] = special.lipschitz_moment_bound(cfg.n, cfg.alpha, cfg.p)
    return [result], []


def _run_sample(cfg, stream):
    m = cfg.effective_count
    if cfg.measure == "cauchy":
        params = CauchyParams(cfg.n, cfg.alpha)
        batch = sample_cauchy(params, m, stream.child("sample"))
    else:
        params = None
        batch = sample_std_gaussian(cfg.n, m, stream.child("sample"))
    r = np.linalg.norm(batch.data, axis=1)
    moments = {}
    for q in (1.0, 2.0):
        entry = {"empirical": float(np.mean(r**q))}
        if params is None:
            entry["exact"] = special.gaussian_abs_moment(cfg.n, q)
        elif q < params.d:
            entry["exact"] = cauchy_radial_moment(params, q)
        moments[f"E|X|^{q:g}"] = entry
    if cfg.csv_path:
        np.savetxt(cfg.csv_path, batch.data, delimiter=",", header=",".join(f"x{i}" for i in range(cfg.n)),
                   comments="")
    return [{"measure": cfg.measure, "count": m, "moments": moments}], []


def _run_cup(cfg, stream):
    w = transform.GridDensity2D.from_function(transform.gaussian_bump((2.0, 0.0), 0.3), cfg.grid_L, cfg.grid_M)
    quad = transform.QuadratureSpec(cfg.nodes)
    uw = transform.cup_density_grid_1d(w, quad, workers=cfg.workers)
    checks = [transform.cup_operator_norm_check(w, quad, p, transformed=uw).to_dict()
              for p in (1.0, 2.0, 3.0, math.inf)]
    return [{"grid": {"L": cfg.grid_L, "M": cfg.grid_M, "N": cfg.nodes}, "checks": checks}], [
        verify.Verdict.HOLDS if all(c["contraction_ok"] for c in checks) else verify.Verdict.VIOLATED
    ]


def _run_pisier(cfg, stream):
    psi = verify.Power(cfg.p) if cfg.psi == "power" else verify.Exp()
    reps = [verify.pisier_gaussian_report(f, psi, cfg.n, cfg.effective_count, stream.child(k), workers=cfg.workers)
            for k, f in _functions(cfg).items()]
    return reps, [r.verdict for r in reps]


def _run_cauchy(cfg, stream):
    params = CauchyParams(cfg.n, cfg.alpha)
    reps = [verify.cauchy_poincare_report(f, params, cfg.p, cfg.effective_count, stream.child(k),
                                          workers=cfg.workers)
            for k, f in _functions(cfg).items()]
    return reps, [r.verdict for r in reps]


def _run_sphere(cfg, stream):
    reps = [verify.sphere_poincare_report(f, cfg.n, cfg.effective_count, stream.child(k), workers=cfg.workers)
            for k, f in _functions(cfg).items()]
    return reps, [r.verdict for r in reps]


def _run_isoperimetry(cfg, stream):
    A = verify.parse_set(cfg.set, cfg.n)
    b = verify.isoperimetry_report(cfg.n, cfg.beta, A, cfg.effective_count, stream.child("iso"),
                                   measure=cfg.measure, workers=cfg.workers)
    return [b], [b.verdict]


def _run_tails(cfg, stream):
    params = CauchyParams(cfg.n, cfg.alpha)
    out = [verify.tail_and_moment_report(f, params, cfg.t_grid, cfg.effective_count, stream.child(k),
                                         workers=cfg.workers)
           for k, f in _functions(cfg, lipschitz=True).items()]
    return out, [b.verdict for b in out]


def _run_sweep(cfg, stream):
    table = verify.gaussian_limit_sweep(cfg.n, cfg.p, cfg.alphas)
    return [table], []


RUNNERS = {
    "constants": _run_constants,
    "sample": _run_sample,
    "cup": _run_cup,
    "pisier": _run_pisier,
    "cauchy-poincare": _run_cauchy,
    "sphere": _run_sphere,
    "isoperimetry": _run_isoperimetry,
    "tails": _run_tails,
    "limit-sweep": _run_sweep,
}


def _as_dict(obj):
    return obj.to_dict() if hasattr(obj, "to_dict") else verify._clean(obj)


def _config_dict(cfg: ExperimentConfig) -> dict:
    d = asdict(cfg)
    for k in ("json_path", "csv_path", "plot_path", "workers"):
        d.pop(k)
    return verify._clean(d)


def _summary(obj) -> str:
    if isinstance(obj, verify.InequalityReport):
        return (f"{obj.label} {json.dumps(verify._clean(obj.params), sort_keys=True)}: "
                f"lhs={obj.lhs.mean:.6g}±{obj.lhs.se:.2g} rhs={obj.rhs.mean:.6g}±{obj.rhs.se:.2g} "
                f"ratio={obj.ratio:.6g} {obj.verdict.value}")
    if isinstance(obj, verify.ReportBundle):
        return "\n".join([f"{obj.label}: {obj.verdict.value}", *(f"  {_summary(r)}" for r in obj.reports),
                          *(f"  note: {m}" for m in obj.notes)])
    if isinstance(obj, verify.SweepTable):
        return "\n".join(f"alpha={r['alpha']:g} constant={r['rescaled_constant']:.10g} "
                         f"limit={r['limit']:.10g} gap={r['relative_gap']:.3e}" for r in obj.rows)
    return json.dumps(_as_dict(obj), sort_keys=True)


def run(cfg: ExperimentConfig) -> int:
    """Run one experiment; returns the process exit code."""
    try:
        cfg.validate()
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN

    t0 = time.perf_counter()
    stream = RngStream(cfg.seed).child(cfg.experiment)
    try:
        results, verdicts = RUNNERS[cfg.experiment](cfg, stream)
    except (DomainError, TruncationError) as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    doc = {
        "experiment": cfg.experiment,
        "config": _config_dict(cfg),
        "seed": cfg.seed,
        "results": [_as_dict(r) for r in results],
        "verdict": verify.worst(verdicts).value,
        "runtime_seconds": time.perf_counter() - t0,
        "timestamp": verify._now(),
    }
    for r in results:
        print(_summary(r))
    if cfg.json_path:
        Path(cfg.json_path).write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    if cfg.csv_path and cfg.experiment != "sample":
        if cfg.experiment == "limit-sweep":
            results[0].to_csv(cfg.csv_path)
        else:
            verify.reports_to_csv(verify.flatten(r for r in results if hasattr(r, "verdict")), cfg.csv_path)
    if cfg.plot_path:
        if cfg.experiment == "limit-sweep":
            from .plots import plot_sweep

            plot_sweep(doc["results"][0], cfg.plot_path)
        elif cfg.experiment == "tails":
            from .plots import plot_tails

            plot_tails(doc["results"], cfg.plot_path)
        else:
            warnings.warn(f"no plot defined for {cfg.experiment}", stacklevel=1)
    return EXIT_VIOLATED if doc["verdict"] == verify.Verdict.VIOLATED.value else EXIT_OK


def emit_plots(inputs: list[str], plot_path: str) -> int:
    """Plot a saved limit-sweep or tails report."""
    from .plots import plot_sweep, plot_tails

    docs = []
    for path in inputs:
        try:
            docs.append(json.loads(Path(path).read_text()))
        except (OSError, json.JSONDecodeError) as exc:
            print(f"configuration error: cannot read {path}: {exc}", file=sys.stderr)
            return EXIT_CONFIG
    sweeps = [r for d in docs for r in d.get("results", []) if "rows" in r]
    tails = [r for d in docs for r in d.get("results", []) if r.get("label") == "tails"]
    if sweeps:
        plot_sweep(sweeps[0], plot_path)
    elif tails:
        plot_tails(tails, plot_path)
    else:
        print("configuration error: no sweep or tail results in input", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "list":
            print(list_experiments())
            return EXIT_OK
        if args.command == "plot":
            return emit_plots(args.inputs, args.plot_path)
        cfg = config_from_args(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TypeError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
