"""Command-line entry point."""

import argparse
import logging
import sys
from collections.abc import Sequence

from dotenv import load_dotenv

# Load .env before settings are read so TNPROB_* variables apply
load_dotenv()

from pydantic import ValidationError  # noqa: E402

from tnprob import __version__  # noqa: E402
from tnprob.commands import COMMANDS  # noqa: E402
from tnprob.config import settings  # noqa: E402
from tnprob.errors import TnProbError  # noqa: E402
from tnprob.utils import log_to_console  # noqa: E402

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tnprob", description="Tensor-network probabilistic models: conversions, inference and training."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    # Configure logging - simple format for console output
    logging.basicConfig(
        level=getattr(logging, settings.log_level.upper(), logging.INFO),
        format="%(message)s",
        handlers=[logging.StreamHandler()],
    )
    args = build_parser().parse_args(argv)
    try:
        return int(args.handler(args))
    except TnProbError as e:
        log_to_console(f"❌ {args.command} failed: {e}")
        return 2
    except ValidationError as e:
        log_to_console(f"❌ {args.command}: invalid settings: {e}")
        return 2
    except OSError as e:
        log_to_console(f"❌ {args.command}: I/O error: {e}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
