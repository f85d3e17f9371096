"""Base verification suite interface."""

import time
import zlib
from abc import ABC, abstractmethod
from collections.abc import Iterator
from typing import Any

import numpy as np
from numpy.typing import ArrayLike

from tnprob.schemas import CheckResult, SuiteReport


def relative_residual(actual: ArrayLike, expected: ArrayLike) -> float:
    """max |actual - expected| / max |expected| (absolute when expected is all zero)."""
    a, e = np.asarray(actual), np.asarray(expected)
    if a.shape != e.shape:
        return float("inf")
    scale = float(np.abs(e).max(initial=0.0))
    error = float(np.abs(a - e).max(initial=0.0))
    return error / scale if scale > 0.0 else error


class BaseSuite(ABC):
    """
    Base class for verification suites.

    Subclasses should:
    1. Set class-level metadata (DESCRIPTION, DEFAULT_TRIALS, DEFAULT_TOLERANCE)
    2. Use the @SuiteRegistry.register decorator
    3. Implement checks(), yielding one CheckResult per check
    """

    SUITE_NAME: str = ""
    DESCRIPTION: str = ""
    DEFAULT_TRIALS: int = 10
    DEFAULT_TOLERANCE: float = 1e-10

    def __init__(self, trials: int | None = None, seed: int = 0, tolerance: float | None = None) -> None:
        """
        Initialize the suite.

        Args:
            trials: Random trials (None for DEFAULT_TRIALS)
            seed: Seed; each suite derives its own stream from it and its name
            tolerance: Tolerance for equivalence checks (None for DEFAULT_TOLERANCE)
        """
        self.trials = self.DEFAULT_TRIALS if trials is None else trials
        self.seed = seed
        self.tolerance = self.DEFAULT_TOLERANCE if tolerance is None else tolerance
        self.rng = np.random.default_rng([seed, zlib.crc32(self.SUITE_NAME.encode())])

    @abstractmethod
    def checks(self) -> Iterator[CheckResult]:
        """Yield check results; random checks run `self.trials` times."""

    def within(
        self, name: str, residual: float, tolerance: float | None = None, witness: dict[str, Any] | None = None
    ) -> CheckResult:
        """A check that passes when the residual is at most the tolerance."""
        tolerance = self.tolerance if tolerance is None else tolerance
        return CheckResult(
            name=name, residual=residual, tolerance=tolerance, passed=residual <= tolerance, witness=witness
        )

    def worst(self, name: str, residuals: list[float], tolerance: float | None = None) -> CheckResult:
        """One bound check over many trials; the witness names the worst trial."""
        if not residuals:
            return self.within(name, 0.0, tolerance, witness={"trials": 0})
        worst = int(np.argmax(residuals))
        return self.within(name, residuals[worst], tolerance, witness={"trials": len(residuals), "worst_trial": worst})

    def exceeds(
        self, name: str, value: float, threshold: float, witness: dict[str, Any] | None = None
    ) -> CheckResult:
        """A witness check that passes when the value is at least the threshold."""
        return CheckResult(
            name=name,
            kind="witness",
            residual=value,
            tolerance=threshold,
            passed=value >= threshold,
            witness=witness,
        )

    def run(self) -> SuiteReport:
        start = time.perf_counter()
        results = list(self.checks())
        warnings = []
        if self.trials == 0:
            warnings.append("0 trials: random checks were skipped, the pass is vacuous")
        bounded = [c.residual for c in results if c.kind == "bound"]
        return SuiteReport(
            suite=self.SUITE_NAME,
            description=self.DESCRIPTION,
            trials=self.trials,
            tolerance=self.tolerance,
            max_residual=max(bounded, default=0.0),
            passed=all(c.passed for c in results),
            checks=results,
            warnings=warnings,
            seconds=time.perf_counter() - start,
        )
