"""`tnprob verify`: run the verification suites and write a JSON report."""

import argparse
import asyncio
from pathlib import Path

from tnprob.commands.common import RunRecorder, comma_list, manifest_path
from tnprob.reporter import Reporter
from tnprob.services.storage_service import write_document
from tnprob.services.verify_service import ALL_SUITES, run_suites
from tnprob.verify import SuiteRegistry


def register(subparsers: argparse._SubParsersAction) -> None:  # type: ignore[type-arg]
    parser = subparsers.add_parser("verify", help="run property suites; exit 1 if any check fails")
    parser.add_argument(
        "--suite",
        type=comma_list,
        default=[ALL_SUITES],
        help=f"comma list from {', '.join([*SuiteRegistry.get_names(), ALL_SUITES])}",
    )
    parser.add_argument("--trials", type=int, default=None, help="random trials per property (suite default)")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--tol", type=float, default=None, help="override the default tolerance of bound checks")
    parser.add_argument("--out", type=Path, default=Path("verify_report.json"))
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    recorder = RunRecorder("verify", args, seeds={"seed": args.seed})
    report = asyncio.run(run_suites(args.suite, args.trials, args.seed, args.tol))
    recorder.add(write_document(report, args.out))
    recorder.write(manifest_path(args.out))
    Reporter("verification").print_verify(report)
    return 0 if report.passed else 1
