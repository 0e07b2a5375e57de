"""Command-line front end: ``info``, ``sweep``, ``simulate`` and ``validate``.

Exit codes: 0 success, 1 validation failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import contextlib
import json
import sys
from typing import Sequence

from .attack_sim import (
    MeasurementMode,
    ProtocolConfig,
    RelayStrategy,
    SimulationSummary,
    loss_matched_config,
    run_simulation,
)
from .probe_model import DomainError
from .report import (
    COLUMNS,
    PARAMETERS,
    ReportRow,
    SweepSpec,
    format_number,
    row_from_error,
    row_from_inconclusive,
    sweep_rows,
    write_csv,
)
from .validation import run_validation

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


@contextlib.contextmanager
def _open_output(path: str):
    if path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh


def _render_row(row: ReportRow, fmt: str) -> str:
    if fmt == "json":
        return _dump_json(row.to_dict())
    if fmt == "csv":
        import io

        buf = io.StringIO()
        write_csv([row], buf)
        return buf.getvalue()
    width = max(map(len, COLUMNS))
    return "".join(f"{k:<{width}}  {format_number(v)}\n" for k, v in row.to_dict().items())


def _render_summary(summary: SimulationSummary, fmt: str) -> str:
    data = summary.to_dict()
    if fmt == "json":
        return _dump_json(data)
    config = data.pop("config_echo")
    lines = [f"{k}: {'n/a' if v is None else format_number(v)}" for k, v in data.items()]
    lines.append("config:")
    lines += [f"  {k}: {v}" for k, v in config.items()]
    return "\n".join(lines) + "\n"


def cmd_info(args: argparse.Namespace) -> int:
    if args.error_rate is not None:
        row = row_from_error(args.error_rate)
    else:
        row = row_from_inconclusive(args.inconclusive_rate)
    with _open_output(args.output) as out:
        out.write(_render_row(row, args.format))
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    lo, hi = PARAMETERS[args.parameter]
    spec = SweepSpec(
        args.parameter,
        lo if args.start is None else args.start,
        hi if args.stop is None else args.stop,
        args.steps,
    )
    rows = sweep_rows(spec)
    with _open_output(args.output) as out:
        if args.format == "json":
            out.write(_dump_json([r.to_dict() for r in rows]))
        else:
            write_csv(rows, out)
    return EXIT_OK


def build_config(args: argparse.Namespace, parser: argparse.ArgumentParser) -> ProtocolConfig:
    if args.loss_match is not None:
        if args.measurement not in (None, MeasurementMode.POVM.value):
            parser.error("--loss-match requires --measurement povm")
        if args.relay not in (None, RelayStrategy.CONCLUSIVE_ONLY.value):
            parser.error("--loss-match requires --relay conclusive-only")
        if args.channel_loss is not None and args.channel_loss != args.loss_match:
            parser.error("--loss-match sets the channel loss; --channel-loss must match it")
        return loss_matched_config(args.loss_match, args.trials, args.seed)

    measurement = args.measurement or MeasurementMode.PROJECTIVE.value
    relay = args.relay or RelayStrategy.RELAY_ALL.value
    if relay == RelayStrategy.CONCLUSIVE_ONLY.value and measurement != MeasurementMode.POVM.value:
        parser.error("--relay conclusive-only requires --measurement povm")
    kwargs = dict(
        seed=args.seed,
        measurement_mode=measurement,
        relay_strategy=relay,
        channel_loss=0.0 if args.channel_loss is None else args.channel_loss,
    )
    if args.error_rate is not None:
        return ProtocolConfig.from_error_rate(args.error_rate, args.trials, **kwargs)
    return ProtocolConfig.from_inconclusive_rate(args.inconclusive_rate, args.trials, **kwargs)


def cmd_simulate(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    config = build_config(args, parser)
    summary = run_simulation(config, workers=args.workers)
    with _open_output(args.output) as out:
        out.write(_render_summary(summary, args.format))
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    checks = run_validation(args.grid_points, inject_fault=args.inject_fault)
    ok = all(c.passed for c in checks)
    with _open_output(args.output) as out:
        if args.format == "json":
            out.write(_dump_json({
                "passed": ok,
                "grid_points": args.grid_points,
                "checks": [
                    {"name": c.name, "passed": c.passed, "residual": c.residual, "tolerance": c.tolerance}
                    for c in checks
                ],
            }))
        else:
            width = max(len(c.name) for c in checks)
            for c in checks:
                status = "PASS" if c.passed else "FAIL"
                out.write(f"{status}  {c.name:<{width}}  residual={c.residual:.3e}  tol={c.tolerance:.0e}\n")
            out.write(f"{'all checks passed' if ok else 'validation FAILED'}\n")
    return EXIT_OK if ok else EXIT_FAILED


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {text}")
    return value


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="conclusive-probe",
        description="Entangling-probe attack on BB84: probe parameters, sweeps, Monte Carlo runs and checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    info = sub.add_parser("info", help="report all derived quantities at one operating point")
    group = info.add_mutually_exclusive_group(required=True)
    group.add_argument("--error-rate", type=float, help="probe-induced error rate E in [0, 1/3]")
    group.add_argument("--inconclusive-rate", type=float, help="POVM inconclusive rate R? in [0, 1]")
    info.add_argument("--format", choices=("text", "json", "csv"), default="text")
    info.add_argument("--output", default="-")

    sweep = sub.add_parser("sweep", help="tabulate derived quantities over a uniform parameter grid")
    sweep.add_argument("--parameter", choices=sorted(PARAMETERS), default="error_rate")
    sweep.add_argument("--from", dest="start", type=float, help="first grid value (default: domain minimum)")
    sweep.add_argument("--to", dest="stop", type=float, help="last grid value (default: domain maximum)")
    sweep.add_argument("--steps", type=int, default=11, help="number of grid points, at least 2")
    sweep.add_argument("--format", choices=("csv", "json"), default="csv")
    sweep.add_argument("--output", default="-")

    sim = sub.add_parser("simulate", help="Monte Carlo run of the attacked protocol")
    group = sim.add_mutually_exclusive_group(required=True)
    group.add_argument("--error-rate", type=float)
    group.add_argument("--inconclusive-rate", type=float)
    group.add_argument("--loss-match", type=float, metavar="LOSS",
                       help="POVM attack with conclusive-only relay, R? tuned to this channel loss")
    sim.add_argument("--trials", type=_positive_int, default=100_000)
    sim.add_argument("--seed", type=_seed, default=0)
    sim.add_argument("--measurement", choices=[m.value for m in MeasurementMode])
    sim.add_argument("--relay", choices=[r.value for r in RelayStrategy])
    sim.add_argument("--channel-loss", type=float)
    sim.add_argument("--workers", type=_positive_int, default=1)
    sim.add_argument("--format", choices=("text", "json"), default="text")
    sim.add_argument("--output", default="-")

    val = sub.add_parser("validate", help="run the analytic invariant suite")
    val.add_argument("--grid-points", type=_positive_int, default=1000)
    val.add_argument("--format", choices=("text", "json"), default="text")
    val.add_argument("--output", default="-")
    val.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "info":
            return cmd_info(args)
        if args.command == "sweep":
            return cmd_sweep(args)
        if args.command == "simulate":
            return cmd_simulate(args, parser)
        return cmd_validate(args)
    except (DomainError, ValueError) as exc:
        parser.error(str(exc))
    except OSError as exc:
        print(f"conclusive-probe: cannot write output: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
