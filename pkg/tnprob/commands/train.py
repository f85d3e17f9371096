"""`tnprob train`: fit UGM or DBM HMM mixtures over replications and hidden dimensions."""

import argparse
import asyncio
from pathlib import Path

from tnprob.commands.common import RunRecorder, int_list
from tnprob.data import SequenceDataset, build_dataset
from tnprob.learn import TrainConfig
from tnprob.models import MixtureFamily
from tnprob.reporter import Reporter
from tnprob.services.storage_service import read_dataset_csv
from tnprob.services.training_service import train_family
from tnprob.utils import log_to_console


def register(subparsers: argparse._SubParsersAction) -> None:  # type: ignore[type-arg]
    parser = subparsers.add_parser("train", help="train HMM mixtures and write metrics CSVs")
    parser.add_argument("--family", choices=[f.value for f in MixtureFamily], required=True)
    parser.add_argument("--hidden-dim", type=int_list, default=[4], help="N, or a comma list such as 4,8,16")
    parser.add_argument("--epochs", type=int, default=30)
    parser.add_argument("--replications", type=int, default=15)
    parser.add_argument("--lr", type=float, default=0.01)
    parser.add_argument("--split-fraction", type=float, default=0.7)
    parser.add_argument("--data", type=Path, default=None, help="dataset CSV (default: 8x8 bars and stripes, 16-step)")
    parser.add_argument("--out-dir", type=Path, default=Path("runs"))
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--no-wall-clock", action="store_true", help="write 0 in the wall_seconds column")
    parser.set_defaults(handler=run)


def _dataset(args: argparse.Namespace) -> SequenceDataset:
    if args.data is not None:
        return read_dataset_csv(args.data)
    log_to_console("⚠️  No --data given, using the 8x8 Bars-and-Stripes dataset in 16-step segments")
    return build_dataset(8, 8, 16, True, args.seed)


def run(args: argparse.Namespace) -> int:
    cfg = TrainConfig(
        epochs=args.epochs,
        lr=args.lr,
        replications=args.replications,
        split_fraction=args.split_fraction,
        seed=args.seed,
    )
    dataset = _dataset(args)
    seeds = {
        "seed": cfg.seed,
        "split_seeds": [cfg.split_seed(r) for r in range(cfg.replications)],
        "init_seeds": [cfg.init_seed(r) for r in range(cfg.replications)],
    }
    recorder = RunRecorder("train", args, seeds=seeds)
    recorder.config["train"] = cfg.model_dump()
    log_to_console(
        f"📦 {dataset.size} sequences of length {dataset.t_len}; "
        f"{cfg.replications} replication(s) x N in {args.hidden_dim}"
    )

    summaries = asyncio.run(
        train_family(args.family, args.hidden_dim, dataset, cfg, args.out_dir, wall_clock=not args.no_wall_clock)
    )
    for summary in summaries:
        recorder.add(*summary.artifacts)
    recorder.write(args.out_dir / f"{args.family}_manifest.json")
    Reporter(f"{args.family} training").print_training(summaries)

    if all(summary.succeeded == 0 for summary in summaries):
        log_to_console("❌ Every replication diverged")
        return 1
    return 0
