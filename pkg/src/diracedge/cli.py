"""Command line entry point: ``diracedge {run, sweep-radius, sweep-epsilon, ansatz-check, spectrum}``.

Exit codes: 0 success, 2 invalid configuration or arguments, 3 numerical flag
(boundary leak or non-finite field), 4 fit failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .analysis import power_law_fit
from .config import ConfigError, RunConfig, parse_config, validate
from .mass import TransitionProfile
from .propagator import NumericalBlowup
from .runner import residual_norm, run_experiment, run_pool, sweep
from .snapshot import write_vector_1d
from .spectrum1d import Dirac1DProblem, dispersion_scan, gap_mode

log = logging.getLogger("diracedge")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_FIT = 0, 2, 3, 4

DEFAULT_RADII = (10.0, 15.0, 20.0, 30.0, 40.0)
DEFAULT_EPSILONS = (0.05, 0.1, 0.15, 0.2, 0.3)


class FitFailure(RuntimeError):
    pass


def _float_list(text: str) -> list[float]:
    try:
        return [float(s) for s in text.split(",") if s.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from exc


def _out_dir(args, cfg: RunConfig | None = None) -> Path:
    d = Path(args.out_dir or (cfg.out_dir if cfg else "."))
    d.mkdir(parents=True, exist_ok=True)
    return d


def cmd_run(args) -> int:
    cfg = parse_config(args.config)
    bad = [s for s in args.snapshots or () if not 0 <= s <= cfg.T]
    if bad:
        raise ConfigError([f"snapshot time {s} outside [0, T={cfg.T}]" for s in bad])
    out = _out_dir(args, cfg)
    o = run_experiment(cfg, out, snapshots=args.snapshots, workers=args.workers)
    s = o.series.samples[-1]
    print(f"{o.csv_path}: t={s.t:g} l2_error={s.l2_error:.6e} energy_drift={o.series.energy_drift:.2e}")
    for p in o.snapshot_files:
        print(f"snapshot {p}")
    if o.leaked:
        log.error("boundary leak flagged (frame/max %.3g)", o.leak_ratio)
        return EXIT_NUMERIC
    return EXIT_OK


def fit_sweep(points, parameter: str, out: Path, tag: str) -> dict:
    """Write the sweep table and fit report; fitting skips leaked or failed runs."""
    with open(out / f"{tag}_{parameter}_sweep.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([parameter, "l2_error", "leaked", "failure"])
        for p in points:
            w.writerow([repr(p.value), repr(p.error), int(p.leaked), p.failure or ""])
    good = [p for p in points if not p.leaked and p.failure is None and np.isfinite(p.error)]
    excluded = [p.value for p in points if p not in good]
    if len(good) < 3:
        raise FitFailure(f"only {len(good)} usable runs (excluded: {excluded}); need at least 3")
    fit = power_law_fit([p.value for p in good], [p.error for p in good])
    report = json.loads(fit.to_json(out / f"{tag}_{parameter}_fit.json", parameter=parameter,
                                    excluded=excluded))
    print(f"{parameter} fit: slope={fit.slope:.4f} intercept={fit.intercept:.4f} "
          f"residual_rms={fit.residual_rms:.2e} ({len(good)} points)")
    return report


def _sweep_command(args, kind: str, parameter: str, defaults) -> int:
    cfg = parse_config(args.config)
    if cfg.geometry.kind != kind:
        raise ConfigError([f"{args.command} needs [geometry] kind = {kind}"])
    values = args.values or list(cfg.sweep_values) or list(defaults)
    if len(values) < 3:
        raise ConfigError([f"a {parameter} sweep needs at least 3 values, got {len(values)}"])
    problems = []
    for v in values:
        problems += [f"{parameter}={v}: {p}" for p in validate(cfg.with_parameter(v))]
    if problems:
        raise ConfigError(problems)
    points = sweep(cfg, values, workers=args.workers or 1)
    for p in points:
        flag = " (leaked)" if p.leaked else f" ({p.failure})" if p.failure else ""
        print(f"{parameter}={p.value:g} error={p.error:.6e}{flag}")
    fit_sweep(points, parameter, _out_dir(args, cfg), cfg.tag)
    return EXIT_OK


def cmd_sweep_radius(args) -> int:
    return _sweep_command(args, "circle", "R", DEFAULT_RADII)


def cmd_sweep_epsilon(args) -> int:
    return _sweep_command(args, "perturbed", "epsilon", DEFAULT_EPSILONS)


def _residual_task(cfg: RunConfig) -> float:
    return residual_norm(cfg)


def ansatz_residuals(cfg: RunConfig, values, workers: int = 1) -> list[tuple[float, float]]:
    """Residual norms at each parameter value.  ``epsilon = 0`` is allowed here (residual 0)."""
    configs = []
    for v in values:
        c = cfg.with_parameter(v)
        if cfg.geometry.kind == "perturbed" and v == 0:
            configs.append(None)
            continue
        problems = validate(c)
        if problems:
            raise ConfigError([f"{v}: {p}" for p in problems])
        configs.append(c)
    norms = run_pool(_residual_task, [c for c in configs if c is not None], workers)
    it = iter(norms)
    return [(float(v), 0.0 if c is None else next(it)) for v, c in zip(values, configs)]


def cmd_ansatz_check(args) -> int:
    cfg = parse_config(args.config)
    kind = cfg.geometry.kind
    if kind not in ("circle", "perturbed"):
        raise ConfigError(["ansatz-check needs a circle or perturbed geometry"])
    parameter = "R" if kind == "circle" else "epsilon"
    defaults = (20.0, 40.0, 80.0) if kind == "circle" else (0.05, 0.1, 0.2)
    values = args.values or list(cfg.sweep_values) or list(defaults)
    rows = ansatz_residuals(cfg, values, args.workers or 1)
    out = _out_dir(args, cfg)
    with open(out / f"{cfg.tag}_residual.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([parameter, "residual_l2"])
        for v, r in rows:
            w.writerow([repr(v), repr(r)])
            print(f"{parameter}={v:g} residual={r:.6e}")
    positive = [(v, r) for v, r in rows if v > 0 and r > 0]
    if len(positive) < 3:
        raise FitFailure(f"need at least 3 nonzero residuals to fit, got {len(positive)}")
    fit = power_law_fit(*zip(*positive))
    fit.to_json(out / f"{cfg.tag}_residual_fit.json", parameter=parameter)
    print(f"{parameter} residual fit: slope={fit.slope:.4f} residual_rms={fit.residual_rms:.2e}")
    return EXIT_OK


def _gap_task(problem: Dirac1DProblem):
    return dispersion_scan([problem.lam], problem)[0]


def cmd_spectrum(args) -> int:
    if args.count < 1:
        raise ConfigError(["--count must be at least 1"])
    if args.lambda_max < args.lambda_min:
        raise ConfigError(["--lambda-max must not be below --lambda-min"])
    try:
        profile = TransitionProfile(args.profile, args.m_inf)
        template = Dirac1DProblem(0.0, profile, -args.u_max, args.u_max, args.n)
    except ValueError as exc:
        raise ConfigError([str(exc)]) from exc
    lams = np.linspace(args.lambda_min, args.lambda_max, args.count)
    rows = run_pool(_gap_task, [template.with_lambda(float(l)) for l in lams], args.workers or 1)
    out = _out_dir(args)
    path = out / "spectrum.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["lambda", "omega_gap", "edge"])
        for r in rows:
            w.writerow([repr(r.lam), repr(r.omega_gap), repr(r.edge)])
            print(f"lambda={r.lam:+.4f} omega_gap={r.omega_gap:+.10f} edge={r.edge:.6f}")
    if args.dump_vectors:
        for i, lam in enumerate(lams):
            prob = template.with_lambda(float(lam))
            mode = gap_mode(prob)
            if mode is not None:
                write_vector_1d(out / f"mode_{i:03d}.bin", prob.u, mode.vector, lam, mode.omega)
    print(f"wrote {path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="diracedge", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config=True):
        if config:
            p.add_argument("--config", required=True, help="INI run configuration")
        p.add_argument("--out-dir", default=None, help="output directory (overrides [output])")
        p.add_argument("--workers", type=int, default=1, help="worker processes")

    p = sub.add_parser("run", help="propagate one configuration and record its error series")
    common(p)
    p.add_argument("--snapshots", type=_float_list, default=None, help="times t1,t2,... to dump")
    p.set_defaults(func=cmd_run)

    for name, func, what in (("sweep-radius", cmd_sweep_radius, "radii"),
                             ("sweep-epsilon", cmd_sweep_epsilon, "epsilon values")):
        p = sub.add_parser(name, help=f"error at T over several {what}, with a log-log fit")
        common(p)
        p.add_argument("--values", type=_float_list, default=None, help=f"comma-separated {what}")
        p.set_defaults(func=func)

    p = sub.add_parser("ansatz-check", help="residual norms of the ansatz without time stepping")
    common(p)
    p.add_argument("--values", type=_float_list, default=None)
    p.set_defaults(func=cmd_ansatz_check)

    p = sub.add_parser("spectrum", help="in-gap eigenvalue of the 1D operator over a lambda range")
    common(p, config=False)
    p.add_argument("--lambda-min", type=float, default=-0.8)
    p.add_argument("--lambda-max", type=float, default=0.8)
    p.add_argument("--count", type=int, default=17)
    p.add_argument("--n", type=int, default=1024)
    p.add_argument("--u-max", type=float, default=30.0)
    p.add_argument("--profile", choices=("tanh", "sign"), default="tanh")
    p.add_argument("--m-inf", type=float, default=1.0)
    p.add_argument("--dump-vectors", action="store_true")
    p.set_defaults(func=cmd_spectrum)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        for p in exc.problems:
            print(f"config error: {p}", file=sys.stderr)
        return EXIT_CONFIG
    except FitFailure as exc:
        print(f"fit failed: {exc}", file=sys.stderr)
        return EXIT_FIT
    except NumericalBlowup as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
