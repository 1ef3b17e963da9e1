"""Command-line front end.

Subcommands:
    solve      integrate one problem and write the trajectory CSV
    verify     convergence self-test against an independent series oracle
    bench      wall-time scaling over worker counts and step counts
    bifurcate  forcing-amplitude sweep with strobed samples and cluster stats
    precision  the same problem at two float widths, with divergence CSV

Exit codes: 0 success, 1 usage error, 2 invalid configuration or failed
verification, 3 runtime failure (non-finite state, aborted sweep, I/O).
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import math
import sys

import numpy as np

from . import analysis, bench, config, precision
from ._textio import fmt17, open_for_write
from .errors import (
    FracsimError,
    NonFiniteStateError,
    SweepRunError,
    ValidationError,
)
from .parallel import solve_parallel
from .partition import PartitionPlan
from .problem import Problem, Trajectory
from .solver import solve_sequential
from .systems import LcrParams, make_lcr_rhs, make_linear_rhs, parse_rhs

log = logging.getLogger("fracsim")

USAGE_EXIT = 1
CONFIG_EXIT = 2
RUNTIME_EXIT = 3


def write_trajectory_csv(trajectory: Trajectory, path, stride: int = 1) -> None:
    """Write step,t,y1..yd rows at 17 significant digits.

    Row n appears when n is a multiple of ``stride`` (step 0 always does).

    Raises:
        ValidationError: stride is not a positive integer.
        FracsimError: the path cannot be opened for writing.
    """
    if not isinstance(stride, (int, np.integer)) or isinstance(stride, bool) or stride < 1:
        raise ValidationError(f"stride must be a positive integer, got {stride!r}")
    d = trajectory.problem.dim
    header = "step,t," + ",".join(f"y{i + 1}" for i in range(d))
    with open_for_write(path) as fh:
        fh.write(header + "\n")
        for n in range(0, trajectory.problem.steps + 1, stride):
            state = ",".join(fmt17(v) for v in trajectory.states[n])
            fh.write(f"{n},{fmt17(trajectory.times[n])},{state}\n")


def _build_problem(cfg: config.RunConfig) -> Problem:
    """Assemble the Problem a subcommand asked for."""
    orders = tuple(cfg.require("orders"))
    if cfg.system == "lcr":
        params = _lcr_params(cfg)
        rhs = make_lcr_rhs(params)
        if len(orders) != 2:
            raise ValidationError(
                f"the circuit system has 2 components; got {len(orders)} orders"
            )
    elif cfg.system == "linear":
        rhs = make_linear_rhs(cfg.lam)
    elif cfg.system == "expr":
        sources = cfg.require("rhs")
        if len(sources) != len(orders):
            raise ValidationError(
                f"{len(sources)} expressions for {len(orders)} orders; "
                "give one expression per component"
            )
        rhs = parse_rhs(sources)
    else:
        raise ValidationError(
            f"unknown system {cfg.system!r}; expected lcr, linear, or expr"
        )
    return Problem(
        dim=len(orders),
        orders=orders,
        init=config.parse_init(cfg, orders),
        rhs=rhs,
        horizon=cfg.require("horizon"),
        steps=cfg.require("steps"),
    )


def _lcr_params(cfg: config.RunConfig) -> LcrParams:
    return LcrParams(sigma=cfg.sigma, f=cfg.f, omega=cfg.omega, a=cfg.a, b=cfg.b)


def _build_plan(cfg: config.RunConfig) -> PartitionPlan:
    return PartitionPlan(workers=cfg.workers, mode=cfg.mode)


def _cmd_solve(cfg: config.RunConfig) -> int:
    out = cfg.require("out")
    problem = _build_problem(cfg)
    plan = _build_plan(cfg)
    if cfg.precision == "f64":
        trajectory = solve_parallel(problem, plan)
    else:
        trajectory = precision.solve_with_width(problem, plan, cfg.precision)
    write_trajectory_csv(trajectory, out, cfg.stride)
    final = ", ".join(fmt17(v) for v in trajectory.states[-1])
    print(
        f"solve: {problem.steps} steps to t={fmt17(problem.horizon)}, "
        f"final state [{final}]"
    )
    print(f"solve: wrote {out}")
    return 0


_VERIFY_LADDER = (1024, 2048, 4096, 8192)
_VERIFY_MIN_ORDER = 1.5


def _cmd_verify(cfg: config.RunConfig) -> int:
    """Convergence order of the solver on d^a y = lam*y against the series oracle.

    The scheme's global error is O(h^(1+a)); an observed order below 1.5
    means the implementation is broken, not merely unlucky, so that is the
    pass line.
    """
    alpha = cfg.orders[0] if cfg.orders else 0.9
    if not 0.0 < alpha <= 1.0:
        raise ValidationError(
            f"verify works on a single component with order in (0, 1]; got {alpha}"
        )
    lam = cfg.lam
    horizon = cfg.horizon if cfg.horizon is not None else 1.0
    z = lam * horizon**alpha
    exact = analysis.mittag_leffler(alpha, z)
    errors = []
    for n_steps in _VERIFY_LADDER:
        problem = Problem(
            dim=1,
            orders=(alpha,),
            init=((1.0,),),
            rhs=make_linear_rhs(lam),
            horizon=horizon,
            steps=n_steps,
        )
        trajectory = solve_sequential(problem)
        err = abs(float(trajectory.states[-1, 0]) - exact)
        errors.append(max(err, 1e-300))
        print(f"verify: N={n_steps:5d}  error={err:.6e}")
    logs_n = [math.log2(n) for n in _VERIFY_LADDER]
    logs_e = [math.log2(e) for e in errors]
    slope = np.polyfit(logs_n, logs_e, 1)[0]
    order = -float(slope)
    print(
        f"verify: alpha={alpha:g} lam={lam:g} horizon={horizon:g} "
        f"reference={exact:.12e}"
    )
    if order < _VERIFY_MIN_ORDER:
        print(
            f"verify: FAIL observed order {order:.3f} < {_VERIFY_MIN_ORDER}; "
            "the error table above did not shrink as required"
        )
        return CONFIG_EXIT
    print(f"verify: PASS observed order {order:.3f} >= {_VERIFY_MIN_ORDER}")
    return 0


def _cmd_bench(cfg: config.RunConfig) -> int:
    out = cfg.require("out")
    base = _build_problem(cfg)
    steps_list = cfg.steps_list or (base.steps,)
    workers_list = cfg.workers_list or (cfg.workers,)
    table = bench.TimingTable(rows=())
    for n_steps in steps_list:
        problem = dataclasses.replace(base, steps=int(n_steps))
        table = table.merged(
            bench.time_solve(
                problem, workers_list, repeats=cfg.repeats, mode=cfg.mode
            )
        )
        for row in table:
            if row.n_steps == n_steps:
                log.info(
                    "bench: N=%d workers=%d median=%.3fs",
                    row.n_steps,
                    row.workers,
                    row.seconds_median,
                )
    bench.write_timing_csv(table, out)
    print(bench.speedup_report(table).to_text())
    print(f"bench: wrote {out}")
    return 0


def _cmd_bifurcate(cfg: config.RunConfig) -> int:
    if cfg.system != "lcr":
        raise ValidationError("bifurcate sweeps the circuit system; set system = lcr")
    out = cfg.require("out")
    base = _build_problem(cfg)
    params = _lcr_params(cfg)
    f_start = cfg.require("f_start")
    f_end = cfg.require("f_end")
    f_count = cfg.require("f_count")
    if f_count < 1:
        raise ValidationError(f"f_count must be >= 1, got {f_count}")
    if f_count == 1:
        f_values = [float(f_start)]
    else:
        f_values = [float(v) for v in np.linspace(f_start, f_end, f_count)]
    if not 0.0 <= cfg.transient_frac < 1.0:
        raise ValidationError(
            f"transient_frac must be in [0, 1), got {cfg.transient_frac}"
        )
    transient = int(cfg.transient_frac * base.steps)
    seeds = config.parse_seeds(cfg.seeds) if cfg.seeds is not None else None
    plan = _build_plan(cfg)
    table = analysis.sweep_bifurcation(
        base,
        params,
        f_values,
        transient,
        plan=plan,
        seeds=seeds,
        phase=cfg.strobe_phase,
    )
    analysis.write_strobe_csv(table, out)
    stats_out = cfg.stats_out
    if stats_out is None:
        root, dot, ext = str(out).rpartition(".")
        stats_out = f"{root}_stats{dot}{ext}" if dot else f"{out}_stats"
    analysis.write_stats_csv(table, stats_out, threshold=cfg.threshold)
    for row in table:
        stats = analysis.attractor_stats(row.samples, threshold=cfg.threshold)
        sign = "yes" if stats.spans_both_signs else "no"
        print(
            f"bifurcate: f={row.f:g} samples={stats.n_samples} "
            f"clusters={stats.clusters} spans_both_signs={sign}"
        )
    print(f"bifurcate: wrote {out} and {stats_out}")
    return 0


def _cmd_precision(cfg: config.RunConfig) -> int:
    out = cfg.require("out")
    problem = _build_problem(cfg)
    plan = _build_plan(cfg)
    widths = cfg.widths
    if len(widths) != 2:
        raise ValidationError(
            f"widths takes exactly two comma-separated names, got {widths!r}"
        )
    report = precision.run_dual_precision(
        problem, plan, widths=(widths[0], widths[1]), threshold=cfg.div_threshold
    )
    precision.write_divergence_csv(report, out)
    lo, hi = report.resolved
    print(
        f"precision: {lo} vs {hi}, final divergence {report.final_divergence:.6e}, "
        f"wall {report.wall_times[0]:.3f}s / {report.wall_times[1]:.3f}s"
    )
    if report.threshold is not None:
        if report.first_exceedance is None:
            print(f"precision: divergence stayed below {report.threshold:g}")
        else:
            n = report.first_exceedance
            print(
                f"precision: divergence first exceeded {report.threshold:g} "
                f"at step {n} (t={fmt17(report.times[n])})"
            )
    print(f"precision: wrote {out}")
    return 0


_HANDLERS = {
    "solve": _cmd_solve,
    "verify": _cmd_verify,
    "bench": _cmd_bench,
    "bifurcate": _cmd_bifurcate,
    "precision": _cmd_precision,
}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse's default error() calls sys.exit(2); route through our own codes.
    def error(self, message):
        raise _UsageError(message)


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="INI file with [common] and per-subcommand sections")
    sub.add_argument("--workers", type=int, help="worker count for the history sums")
    sub.add_argument("--steps", type=int, help="number of time steps N")
    sub.add_argument("--horizon", type=float, help="end time T")
    sub.add_argument(
        "--mode",
        choices=["balanced", "static", "static_block"],
        help="history partitioning: balanced (default) or static block",
    )
    sub.add_argument(
        "--precision",
        choices=["f64", "extended", "extended-hw", "extended-sw"],
        help="arithmetic width for the solve",
    )
    sub.add_argument("--out", help="output CSV path")
    sub.add_argument("--stride", type=int, help="write every stride-th step")
    sub.add_argument(
        "--system", choices=["lcr", "linear", "expr"], help="which right-hand side"
    )
    sub.add_argument("--orders", help="comma-separated component orders, e.g. 0.9,0.9")
    sub.add_argument(
        "--init",
        help="initial data: values per component, ';' between components "
        "when a component needs several derivatives",
    )
    sub.add_argument(
        "--rhs",
        action="append",
        help="expression for one component (repeat per component; system=expr)",
    )
    sub.add_argument(
        "--lambda",
        dest="lam",
        type=float,
        help="coefficient for the linear test system",
    )
    sub.add_argument(
        "--param",
        action="append",
        metavar="KEY=VALUE",
        help="set any configuration key, e.g. --param f=0.125",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="fracsim",
        description="Predictor-corrector solver for fractional-order systems.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    sub = subparsers.add_parser("solve", help="integrate one problem to CSV")
    _add_common(sub)

    sub = subparsers.add_parser("verify", help="convergence self-test (exit 2 on failure)")
    _add_common(sub)

    sub = subparsers.add_parser("bench", help="time the solver across worker counts")
    _add_common(sub)
    sub.add_argument("--repeats", type=int, help="timed repetitions per cell")
    sub.add_argument("--steps-list", dest="steps_list", help="comma-separated step counts")
    sub.add_argument(
        "--workers-list", dest="workers_list", help="comma-separated worker counts"
    )

    sub = subparsers.add_parser("bifurcate", help="forcing-amplitude sweep to CSV")
    _add_common(sub)
    sub.add_argument("--f-start", dest="f_start", type=float, help="first amplitude")
    sub.add_argument("--f-end", dest="f_end", type=float, help="last amplitude")
    sub.add_argument("--f-count", dest="f_count", type=int, help="number of amplitudes")
    sub.add_argument(
        "--transient-frac",
        dest="transient_frac",
        type=float,
        help="fraction of steps discarded before strobing (default 0.5)",
    )
    sub.add_argument(
        "--seeds", help="initial states, e.g. '0.6,-0.4; -0.6,0.4' (one per run)"
    )
    sub.add_argument("--stats-out", dest="stats_out", help="cluster statistics CSV path")
    sub.add_argument(
        "--threshold", type=float, help="cluster linkage distance (default 0.3)"
    )

    sub = subparsers.add_parser("precision", help="dual-width divergence run")
    _add_common(sub)
    sub.add_argument("--widths", help="two widths to compare, e.g. f64,extended")
    sub.add_argument(
        "--div-threshold",
        dest="div_threshold",
        type=float,
        help="report the first step whose divergence exceeds this",
    )

    return parser


# argparse dest -> configuration key for flags whose names differ.
_FLAG_KEYS = {"lam": "lambda"}

_SKIP_DESTS = {"command", "config", "param"}


def _overrides_from_args(args: argparse.Namespace) -> dict:
    """CLI values keyed by configuration name; --param first, flags above it."""
    overrides: dict = {}
    for pair in args.param or []:
        key, sep, value = pair.partition("=")
        if not sep or not key.strip():
            raise _UsageError(f"--param needs KEY=VALUE, got {pair!r}")
        overrides[key.strip()] = value.strip()
    for dest, value in vars(args).items():
        if dest in _SKIP_DESTS or value is None:
            continue
        key = _FLAG_KEYS.get(dest, dest)
        if dest == "rhs":
            value = ";".join(value)
        overrides[key] = value
    return overrides


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = config.load_config(
            args.config, _overrides_from_args(args), command=args.command
        )
        return _HANDLERS[args.command](cfg)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return CONFIG_EXIT
    except (NonFiniteStateError, SweepRunError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return RUNTIME_EXIT
    except FracsimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return RUNTIME_EXIT


if __name__ == "__main__":
    sys.exit(main())
