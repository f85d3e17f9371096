"""`tnprob query`: marginal or conditional distribution of a model as CSV."""

import argparse
from pathlib import Path

from tnprob.commands.common import RunRecorder, comma_list, manifest_path, one_based_outcomes, parse_pairs
from tnprob.inference import query
from tnprob.services.storage_service import load_model, write_distribution_csv
from tnprob.utils import log_to_console


def register(subparsers: argparse._SubParsersAction) -> None:  # type: ignore[type-arg]
    parser = subparsers.add_parser("query", help="write a (conditional) marginal distribution")
    parser.add_argument("--model", type=Path, required=True)
    parser.add_argument("--marginalize", type=comma_list, default=[], help="variables to sum out, e.g. x1,x2")
    parser.add_argument("--condition", default=None, help="one-based evidence, e.g. x3=2,x4=1")
    parser.add_argument("--out", type=Path, required=True)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    recorder = RunRecorder("query", args)
    model = load_model(args.model)
    evidence = one_based_outcomes(parse_pairs(args.condition, "condition"))
    dist = query(model, marginalize=args.marginalize, condition=evidence)
    recorder.add(write_distribution_csv(dist, args.out))
    recorder.write(manifest_path(args.out))
    log_to_console(f"✓ Distribution over {list(dist.names) or 'no variables'} written to {args.out}")
    if evidence:
        log_to_console(f"📊 log P(evidence) = {dist.log_evidence:.6f}")
    return 0
