"""Command-line entry point (``exlab``)."""

import argparse
import logging
import sys

from exlab import bounds, harness, verify
from exlab.game import GameInstance

log = logging.getLogger("exlab")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _add_output(p):
    p.add_argument("--out", help="write results to this file")
    p.add_argument("--format", choices=("csv", "json"), default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="exlab", description="Exclusion-game strategy simulator and bound checker.")
    parser.add_argument("-v", "--verbose", action="store_true")
    parser.add_argument("--max-n", type=int, default=None,
                        help="raise the exhaustive size cap (same as EXLAB_MAX_QUBITS)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("verify", help="run an exhaustive verification suite")
    p.add_argument("--suite", required=True, choices=("all",) + tuple(verify.SUITES))
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)

    for name in ("simulate", "sweep"):
        p = sub.add_parser(name, help=f"{name} from a YAML or JSON config")
        p.add_argument("--config", required=True)
        if name == "sweep":
            p.add_argument("--workers", type=int, default=1)
        _add_output(p)

    p = sub.add_parser("bounds", help="evaluate a closed-form bound")
    p.add_argument("--formula", required=True, choices=bounds.FORMULAS)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--gamma", default="0", help="tolerated error as p/q")
    p.add_argument("--l", type=int, help="dimension for perturbation_bounds")
    p.add_argument("--eps", type=float, help="accuracy for perturbation_bounds")
    p.add_argument("--gap", type=float, help="per-round gap for hoeffding_repetitions")
    p.add_argument("--tau", type=float, help="target error for hoeffding_repetitions")
    _add_output(p)
    return parser


def _output(records, out, fmt):
    if out:
        harness.emit(records, out, fmt or ("json" if str(out).endswith(".json") else "csv"))
    else:
        sys.stdout.write(harness.to_json(records) if fmt == "json" else harness.to_csv(records))


def cmd_verify(args) -> int:
    checks = verify.run_suite(args.suite, args.n, args.m)
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}  {c.detail}")
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_FAIL


def cmd_simulate(args) -> int:
    config, _ = harness.load_config(args.config)
    record = harness.run(config)
    _output([record], args.out or config.output_path, args.format or config.format)
    return EXIT_OK


def cmd_sweep(args) -> int:
    config, grid = harness.load_config(args.config)
    if grid is None:
        raise UsageError(f"{args.config}: no 'sweep' section")
    records = harness.sweep(config, grid["param"], grid["values"], workers=args.workers)
    _output(records, args.out or config.output_path, args.format or config.format)
    return EXIT_OK


def cmd_bounds(args) -> int:
    game = GameInstance(args.n, args.m, harness.parse_rational(args.gamma))
    extra = {}
    if args.formula == "perturbation_bounds":
        if args.l is None or args.eps is None:
            raise UsageError("perturbation_bounds needs --l and --eps")
        extra = {"l": args.l, "epsilon": args.eps}
    if args.formula == "hoeffding_repetitions":
        if args.gap is None or args.tau is None:
            raise UsageError("hoeffding_repetitions needs --gap and --tau")
        extra = {"gap": args.gap, "tau": args.tau}
    reports = bounds.evaluate(args.formula, game.n, game.m, args.k, **extra)
    record = harness.ResultRecord(
        suite="bounds", n=game.n, m=game.m, gamma=game.gamma, strategy="",
        params={"k": args.k} if args.k is not None else {}, mode="bounds", seed=0,
        trials=None, cost="", worst_case_error=None, mean_error=None, bound_values=reports,
    )
    _output([record], args.out, args.format)
    return EXIT_OK


COMMANDS = {"verify": cmd_verify, "simulate": cmd_simulate, "sweep": cmd_sweep, "bounds": cmd_bounds}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"exlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return exc.code or EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.max_n is not None:
        import os
        os.environ["EXLAB_MAX_QUBITS"] = str(args.max_n)
        if args.max_n > harness.QUANTUM_CAP:
            log.warning("exhaustive cap raised to n=%d; memory use grows as 2^n (%d bytes per state vector)",
                        args.max_n, 16 << args.max_n)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"exlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, KeyError, FileNotFoundError) as exc:
        print(f"exlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"exlab: error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
