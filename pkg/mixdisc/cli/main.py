"""
Command-line entry point.

Every subcommand reads instance files, runs one operation and writes a single
JSON document to standard output (or ``--output``). Diagnostics go to
standard error. Exit codes: 0 success, 1 domain or validation rejection,
2 resource cap or non-convergence, 3 I/O or parse error.
"""

import argparse
import logging
import sys
import time
from typing import List, Optional

from ..parameters import positive
from ..support import MixdiscError, ParameterError, get_settings, override_settings
from . import commands
from .instances import output_document, write_document

logger = logging.getLogger("mixdisc")

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


class CommandLineError(MixdiscError):
    """Unusable command line."""

    exit_code = 3


def positive_float(text: str) -> float:
    try:
        return positive("value", text)
    except ParameterError:
        raise argparse.ArgumentTypeError(f"expected a finite number above 0, got {text!r}")


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str):
        raise CommandLineError(f"{self.prog}: {message}")


def _add_method(parser: argparse.ArgumentParser, default: str = "padded") -> None:
    parser.add_argument(
        "--method",
        choices=sorted(commands.DERIVATIVE_METHODS),
        default=default,
        help="derivative path (default: %(default)s)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="mixdisc",
        description="Exact and approximate mixed discriminants.",
    )
    parser.add_argument("--threads", type=int, default=None, help="worker threads (default: MIXDISC_THREADS or all cores)")
    parser.add_argument("--log-level", choices=LOG_LEVELS, default="WARNING")
    parser.add_argument("--output", "-o", default=None, help="write the document here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    exact = sub.add_parser("exact", help="exact oracles at small scale")
    source = exact.add_mutually_exclusive_group(required=True)
    source.add_argument("--tuple", help="instance file holding A_1, ..., A_n")
    source.add_argument("--matrix", help="instance file holding one matrix")
    exact.add_argument(
        "--quantity", choices=("mixed-discriminant", "padded", "permanent", "minor-sum")
    )
    exact.add_argument("--method", choices=("polarization", "permutation"), default="polarization")
    exact.add_argument("--m", type=int, default=None, help="power for minor-sum (default 2)")
    exact.set_defaults(handler=commands.exact)

    approx = sub.add_parser("approx", help="approximate ln D in the polydisc")
    approx.add_argument("--tuple", required=True)
    approx.add_argument("--eps", type=float, default=None)
    approx.add_argument("--rho", type=float, default=None)
    approx.add_argument("--points", nargs="+", default=None, help="z_1 ... z_n, e.g. 0.5 0.3+0.2j")
    approx.add_argument("--pd", action="store_true", help="positive definite input near multiples of I")
    approx.add_argument("--check-exact", action="store_true")
    _add_method(approx)
    approx.set_defaults(handler=commands.approx)

    ds = sub.add_parser("ds", help="doubly stochastic tuples")
    ds.add_argument("action", choices=("validate", "scale", "approx", "contract"))
    ds.add_argument("--tuple", required=True)
    ds.add_argument("--tol", type=positive_float, default=None)
    ds.add_argument("--max-iter", type=int, default=10_000)
    ds.add_argument("--z", default=None, help="evaluation point for approx")
    ds.add_argument("--rho", type=float, default=None)
    ds.add_argument("--gamma", type=float, default=None, help="contraction for contract")
    ds.add_argument("--eps", type=float, default=None)
    ds.add_argument("--check-exact", action="store_true")
    _add_method(ds)
    ds.set_defaults(handler=commands.ds)

    charpoly = sub.add_parser("charpoly", help="mixed characteristic polynomial")
    charpoly.add_argument("--tuple", required=True)
    charpoly.add_argument("--mss", action="store_true", help="check the root bound")
    charpoly.add_argument("--eps-trace", type=float, default=None)
    charpoly.add_argument("--stability", action="store_true", help="doubly stochastic stability polynomial")
    charpoly.set_defaults(handler=commands.charpoly)

    minors = sub.add_parser("minors", help="approximate sum_S det(B_S)^m")
    minors.add_argument("--matrix", required=True)
    minors.add_argument("--from-vectors", action="store_true", help="matrix rows are vectors x_k")
    minors.add_argument("--m", type=int, default=None)
    minors.add_argument("--rho", type=float, default=None)
    minors.add_argument("--eps", type=float, default=None)
    minors.add_argument("--check-exact", action="store_true")
    minors.set_defaults(handler=commands.minors)

    verify = sub.add_parser("verify", help="sampled zero-free checks")
    verify.add_argument("region", choices=("polydisc", "ds", "minors"))
    verify.add_argument("--n", type=int, default=4)
    verify.add_argument("--samples", type=int, default=10)
    verify.add_argument("--grid", type=int, default=8)
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--m", type=int, default=2)
    verify.add_argument("--boundary", action="store_true")
    verify.set_defaults(handler=commands.verify)

    gen = sub.add_parser("gen", help="generate a seeded instance")
    gen.add_argument(
        "kind", choices=("symmetric", "ds", "pd", "matrix", "psd-decomposition", "rank2")
    )
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--norm-bound", type=float, default=None)
    gen.add_argument("--radius", type=float, default=None)
    gen.add_argument("--grid", type=int, default=None)
    gen.add_argument("--eps", type=float, default=None)
    gen.add_argument("--count", type=int, default=None)
    gen.add_argument("--rank", type=int, default=None)
    gen.add_argument("--complex", action="store_true")
    gen.set_defaults(handler=commands.gen)

    bench = sub.add_parser("bench", help="timing sweep over n and eps")
    bench.add_argument("--ns", type=int, nargs="+", default=None)
    bench.add_argument("--eps", type=float, nargs="+", default=None)
    bench.add_argument("--rho", type=float, default=None)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--plot", default=None, help="save a degree and timing plot here")
    _add_method(bench, default="minor-sums")
    bench.set_defaults(handler=commands.bench)
    return parser


def _configure_logging(level: str) -> None:
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    logger.handlers[:] = [handler]
    logger.setLevel(level)
    logging.captureWarnings(True)
    logging.getLogger("py.warnings").handlers[:] = [handler]


def run(argv: Optional[List[str]] = None) -> int:
    """
    Run one command and return its exit code.

    Parameters
    ----------
    argv : list of str, optional
        Arguments without the program name (default ``sys.argv[1:]``)
    """
    try:
        args = build_parser().parse_args(argv)
    except CommandLineError as e:
        print(e, file=sys.stderr)
        return e.exit_code
    _configure_logging(args.log_level)

    changes = {} if args.threads is None else {"threads": args.threads}
    start = time.perf_counter()
    try:
        with override_settings(**changes):
            logger.debug("running %s with %d threads", args.command, get_settings().threads)
            output = args.handler(args)
    except MixdiscError as e:
        logger.error("%s: %s", type(e).__name__, e)
        return e.exit_code
    timing = {"total_seconds": time.perf_counter() - start, **output.timing}

    document = output_document(args.command, output.inputs, output.result, timing)
    try:
        if args.output:
            with open(args.output, "w", encoding="utf-8") as stream:
                write_document(document, stream)
        else:
            write_document(document, sys.stdout)
    except OSError as e:
        logger.error("cannot write output: %s", e)
        return 3
    return 0


def main() -> None:
    sys.exit(run())
