"""Command-line front end.

Exit codes: 0 success, 1 invalid input, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .harness import ESTIMATES, corpus, run_convergence, run_experiment, verify_kernel_estimates
from .io import (
    ConfigError,
    RunConfig,
    convergence_csv_text,
    dump_json,
    load_config,
    parse_int_list,
    parse_params,
)
from .legendre_core import gauss_rule
from .spectral import coefficients, default_quad_order, partial_sum, partial_sum_kernel
from .variation import GridFunction2D, LambdaWeights, variation_report

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME = 0, 1, 2

# config field -> command-line flag, for error messages
FLAGS = {
    "fn": "--fn",
    "params": "--params",
    "sizes": "--sizes",
    "quad_order": "--quad-order",
    "eps": "--eps",
    "grid_points": "--grid",
    "lambda_generator": "--lambda",
    "lambda_delta": "--lambda-delta",
    "method": "--method",
    "n_max": "--n-max",
    "delta1": "--delta1",
    "delta2": "--delta2",
    "n_list": "--n-list",
    "samples": "--samples",
    "estimates": "--estimates",
    "seed": "--seed",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _add_fn(p):
    p.add_argument("--fn", default="constant", help="corpus function name")
    p.add_argument("--params", default="", help="function parameters, e.g. 'c=3,levels=8'")


def _quad(text: str):
    return text if text == "auto" else int(text)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="flsuite", description="Double Fourier-Legendre analysis and variation functionals.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("coeffs", help="Fourier-Legendre coefficient matrix")
    _add_fn(p)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--quad-order", default="auto")
    p.add_argument("--out", help="JSON output path (default stdout)")

    p = sub.add_parser("partial-sum", help="rectangular partial sum at a point")
    _add_fn(p)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--y", type=float, required=True)
    p.add_argument("--quad-order", default="auto")
    p.add_argument("--out", help="JSON output path (default stdout)")

    p = sub.add_parser("variation", help="variation report on a uniform grid")
    _add_fn(p)
    p.add_argument("--grid", type=int, default=9, help="grid points per axis")
    p.add_argument("--lambda", dest="lambda_generator", default="harmonic",
                   choices=["harmonic", "constant", "power_log"])
    p.add_argument("--lambda-delta", type=float, default=1.0)
    p.add_argument("--method", default="exhaustive", choices=["exhaustive", "greedy_peel"])
    p.add_argument("--n-max", type=int, default=None)
    p.add_argument("--delta1", type=float, default=0.25)
    p.add_argument("--delta2", type=float, default=0.25)
    p.add_argument("--out", help="JSON output path (default stdout)")

    p = sub.add_parser("converge", help="sup-norm convergence table (CSV)")
    _add_fn(p)
    p.add_argument("--sizes", required=True, help="comma-separated increasing truncation orders")
    p.add_argument("--eps", type=float, default=0.25)
    p.add_argument("--grid", type=int, default=41)
    p.add_argument("--quad-order", default="auto")
    p.add_argument("--timing", action="store_true", help="fill the wall_ms column")
    p.add_argument("--out", help="CSV output path (default stdout)")

    p = sub.add_parser("verify-kernels", help="empirical constants of the kernel estimates")
    p.add_argument("--n-list", default="8,16,32,64,128")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--estimates", default=",".join(ESTIMATES))
    p.add_argument("--out", help="JSON output path (default stdout)")

    p = sub.add_parser("run", help="run a batch described by a config file")
    p.add_argument("config", help="flat key = value config file")
    p.add_argument("--out", help="override the run directory")
    p.add_argument("--timing", action="store_true", help="record wall times")
    return parser


def _emit_json(obj, out) -> None:
    if out:
        dump_json(out, obj)
    else:
        sys.stdout.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _config_from_args(args, **fields) -> RunConfig:
    kw = {}
    if hasattr(args, "fn"):
        kw["fn"] = args.fn
        kw["params"] = parse_params(args.params, "params")
    for name in ("eps", "samples", "seed", "method", "n_max", "delta1", "delta2", "lambda_generator", "lambda_delta"):
        if hasattr(args, name):
            kw[name] = getattr(args, name)
    if hasattr(args, "grid"):
        kw["grid_points"] = args.grid
    if hasattr(args, "quad_order"):
        try:
            kw["quad_order"] = _quad(args.quad_order)
        except ValueError:
            raise ConfigError("quad_order", f"expected 'auto' or an integer, got {args.quad_order!r}") from None
    kw.update(fields)
    return RunConfig(**kw).validate()


def _function(cfg: RunConfig):
    try:
        return corpus(cfg.fn, **cfg.params)
    except ValueError as exc:
        raise ConfigError("params", str(exc)) from None


def _cmd_coeffs(args) -> None:
    cfg = _config_from_args(args)
    if args.N < 1:
        raise ConfigError("N", "must be >= 1")
    if args.M < 1:
        raise ConfigError("M", "must be >= 1")
    f = _function(cfg)
    q = default_quad_order(args.N, args.M, f.kinked) if cfg.quad_order == "auto" else cfg.quad_order
    C = coefficients(f, args.N, args.M, gauss_rule(q))
    _emit_json(
        {"function": f.name, "params": f.params, "N": C.N, "M": C.M, "quad_order": C.quad_order,
         "values": C.values.tolist()},
        args.out,
    )


def _cmd_partial_sum(args) -> None:
    cfg = _config_from_args(args)
    if args.N < 1:
        raise ConfigError("N", "must be >= 1")
    if args.M < 1:
        raise ConfigError("M", "must be >= 1")
    for name in ("x", "y"):
        if not -1.0 <= getattr(args, name) <= 1.0:
            raise ConfigError(name, "must lie in [-1, 1]")
    f = _function(cfg)
    q = default_quad_order(args.N, args.M, f.kinked) if cfg.quad_order == "auto" else cfg.quad_order
    rule = gauss_rule(q)
    direct = partial_sum(coefficients(f, args.N, args.M, rule), args.N, args.M, args.x, args.y)
    via_kernel = partial_sum_kernel(f, args.N, args.M, args.x, args.y, rule)
    _emit_json(
        {"function": f.name, "N": args.N, "M": args.M, "x": args.x, "y": args.y, "quad_order": q,
         "value": direct.value, "value_kernel": via_kernel.value,
         "exact": float(f(args.x, args.y))},
        args.out,
    )


def _cmd_variation(args) -> None:
    cfg = _config_from_args(args)
    f = _function(cfg)
    g = GridFunction2D.uniform(f, cfg.grid_points)
    lam = LambdaWeights(cfg.lambda_generator, delta=cfg.lambda_delta)
    rep = variation_report(g, lam, cfg.method, cfg.n_max, cfg.delta1, cfg.delta2).to_dict()
    rep["function"] = f.name
    rep["grid_points"] = cfg.grid_points
    _emit_json(rep, args.out)


def _cmd_converge(args) -> None:
    cfg = _config_from_args(args, sizes=parse_int_list(args.sizes, "sizes"))
    f = _function(cfg)
    table = run_convergence(f, cfg.eps, cfg.sizes, cfg.grid_points, cfg.quad_order)
    text = convergence_csv_text(table, include_timing=args.timing)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_verify(args) -> None:
    estimates = [e.strip() for e in args.estimates.split(",") if e.strip()]
    cfg = _config_from_args(args, n_list=parse_int_list(args.n_list, "n_list"), estimates=estimates)
    reps = verify_kernel_estimates(cfg.n_list, cfg.samples, cfg.eps, cfg.seed, cfg.estimates)
    _emit_json([r.to_dict() for r in reps], args.out)


def _cmd_run(args) -> None:
    cfg = load_config(args.config)
    if args.out:
        cfg.out = args.out
    if args.timing:
        cfg.timing = True
    arts = run_experiment(cfg)
    print(f"wrote {len(arts.files)} artifact(s) to {arts.directory}")


COMMANDS = {
    "coeffs": _cmd_coeffs,
    "partial-sum": _cmd_partial_sum,
    "variation": _cmd_variation,
    "converge": _cmd_converge,
    "verify-kernels": _cmd_verify,
    "run": _cmd_run,
}


def dispatch(argv=None) -> int:
    """Parse ``argv`` and run the subcommand; returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        COMMANDS[args.command](args)
    except ConfigError as exc:
        if args.command == "run":
            flag = exc.key
        else:
            flag = FLAGS.get(exc.key, f"--{exc.key}")
        msg = str(exc).split(": ", 1)[-1]
        print(f"error: {flag}: {msg}", file=sys.stderr)
        return EXIT_INVALID
    except (KeyError, ValueError, IndexError) as exc:
        msg = exc.args[0] if exc.args else str(exc)
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_INVALID if isinstance(exc, KeyError) else EXIT_RUNTIME
    except (OSError, ArithmeticError, RuntimeError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
