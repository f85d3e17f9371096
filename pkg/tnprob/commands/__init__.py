"""Command-line subcommands; each module exposes register(subparsers) and run(args)."""

from tnprob.commands import convert, gen_data, query, train, verify

COMMANDS = [gen_data, train, convert, verify, query]

__all__ = ["COMMANDS"]
