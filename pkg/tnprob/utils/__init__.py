"""Utility modules."""

from tnprob.utils.logging import log_to_console

__all__ = ["log_to_console"]
