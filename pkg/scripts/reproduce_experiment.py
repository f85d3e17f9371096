"""Train both HMM mixture families on 8x8 Bars and Stripes and compare held-out NLL."""

import argparse
import csv
import sys
from pathlib import Path

# Add parent directory to path so we can import tnprob
sys.path.insert(0, str(Path(__file__).parent.parent))

from tnprob.commands.common import int_list
from tnprob.main import main as tnprob_main

FAMILIES = ("ugm", "dbm")


def best_test_nll(path: Path) -> float | None:
    """Lowest held-out NLL in a trajectory CSV, None for an empty (diverged) trajectory."""
    with path.open(newline="", encoding="utf-8") as f:
        values = [float(row["test_nll"]) for row in csv.DictReader(f)]
    return min(values) if values else None


def compare(out_dir: Path, hidden_dim: int, replications: int) -> None:
    best = {
        family: [best_test_nll(out_dir / family / f"{family}_N{hidden_dim}_rep{r}.csv") for r in range(replications)]
        for family in FAMILIES
    }
    print(f"\n📊 N={hidden_dim}")
    for family in FAMILIES:
        finished = [v for v in best[family] if v is not None]
        if finished:
            mean = sum(finished) / len(finished)
            print(f"  {family}: mean best held-out NLL {mean:.4f} over {len(finished)} replication(s)")
        else:
            print(f"  {family}: every replication diverged")

    pairs = [(u, d) for u, d in zip(best["ugm"], best["dbm"]) if u is not None and d is not None]
    wins = sum(1 for u, d in pairs if d <= u)
    marker = "✅" if pairs and 2 * wins > len(pairs) else "⚠️ "
    print(f"  {marker} dbm <= ugm in {wins} of {len(pairs)} replication(s)")


def reproduce(args: argparse.Namespace) -> int:
    out_dir: Path = args.out_dir
    data = out_dir / "bs_8x8.csv"
    print("🚀 Generating 8x8 Bars and Stripes in 16-step segments...")
    status = tnprob_main(
        ["gen-data", "--rows", "8", "--cols", "8", "--segment-len", "16", "--seed", str(args.seed), "--out", str(data)]
    )
    if status:
        return status

    dims = ",".join(str(n) for n in args.hidden_dim)
    for family in FAMILIES:
        print(f"\n🚀 Training {family} mixtures, N in {args.hidden_dim}...")
        flags = [
            "train",
            "--family", family,
            "--hidden-dim", dims,
            "--epochs", str(args.epochs),
            "--replications", str(args.replications),
            "--lr", str(args.lr),
            "--seed", str(args.seed),
            "--data", str(data),
            "--out-dir", str(out_dir / family),
        ]  # fmt: skip
        if args.no_wall_clock:
            flags.append("--no-wall-clock")
        status = tnprob_main(flags)
        if status:
            return status

    for hidden_dim in args.hidden_dim:
        compare(out_dir, hidden_dim, args.replications)
    print(f"\n✨ Artifacts in {out_dir}")
    return 0


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--hidden-dim", type=int_list, default=[4], help="N, or a comma list such as 4,8,16")
    parser.add_argument("--replications", type=int, default=3)
    parser.add_argument("--epochs", type=int, default=30)
    parser.add_argument("--lr", type=float, default=0.01)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out-dir", type=Path, default=Path("runs/experiment"))
    parser.add_argument("--no-wall-clock", action="store_true")
    sys.exit(reproduce(parser.parse_args()))
