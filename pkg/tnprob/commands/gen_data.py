"""`tnprob gen-data`: write a Bars-and-Stripes sequence dataset."""

import argparse
from pathlib import Path

from tnprob.commands.common import RunRecorder, manifest_path
from tnprob.data import build_dataset
from tnprob.errors import PreconditionError
from tnprob.services.storage_service import write_dataset_csv
from tnprob.utils import log_to_console


def register(subparsers: argparse._SubParsersAction) -> None:  # type: ignore[type-arg]
    parser = subparsers.add_parser("gen-data", help="generate the Bars-and-Stripes sequence dataset")
    parser.add_argument("--rows", type=int, default=8)
    parser.add_argument("--cols", type=int, default=8)
    parser.add_argument(
        "--segment-len", type=int, default=16, help="split each raster into pieces of this length (0: keep whole)"
    )
    parser.add_argument("--seed", type=int, default=0, help="recorded with the dataset for later splits")
    parser.add_argument("--no-dedup", action="store_true", help="keep the constant images twice")
    parser.add_argument("--out", type=Path, default=None, help="CSV path (default data/bs_<rows>x<cols>.csv)")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    if args.rows < 1 or args.cols < 1 or args.segment_len < 0:
        raise PreconditionError("--rows and --cols must be positive and --segment-len non-negative")
    out = args.out or Path("data") / f"bs_{args.rows}x{args.cols}.csv"
    recorder = RunRecorder("gen-data", args, seeds={"seed": args.seed})

    ds = build_dataset(args.rows, args.cols, args.segment_len or None, not args.no_dedup, args.seed)
    recorder.add(write_dataset_csv(ds, out))
    recorder.write(manifest_path(out))
    log_to_console(f"✓ Wrote {ds.size} sequences of length {ds.t_len} to {out}")
    return 0
