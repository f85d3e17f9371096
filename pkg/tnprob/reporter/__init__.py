"""Console reporting for verification and training runs."""

from tnprob.reporter.reporter import Reporter

__all__ = ["Reporter"]
