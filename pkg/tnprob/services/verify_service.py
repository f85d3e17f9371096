"""Verification service: run registered suites concurrently and collect one report."""

import asyncio
from collections.abc import Sequence

from tnprob.errors import PreconditionError
from tnprob.schemas import SuiteReport, VerifyReport
from tnprob.utils import log_to_console
from tnprob.verify import SuiteRegistry

ALL_SUITES = "all"


def resolve_suites(names: Sequence[str]) -> list[str]:
    """Expand "all" and reject unknown names, keeping registration order."""
    if not names or ALL_SUITES in names:
        return SuiteRegistry.get_names()
    unknown = [name for name in names if not SuiteRegistry.is_registered(name)]
    if unknown:
        raise PreconditionError(f"unknown suite(s) {unknown}; choose from {SuiteRegistry.get_names()}")
    return list(dict.fromkeys(names))


def run_suite(name: str, trials: int | None, seed: int, tolerance: float | None) -> SuiteReport:
    suite = SuiteRegistry.create_instance(name, trials=trials, seed=seed, tolerance=tolerance)
    if suite is None:
        raise PreconditionError(f"suite {name!r} is not registered")
    return suite.run()


async def run_suites(
    names: Sequence[str], trials: int | None = None, seed: int = 0, tolerance: float | None = None
) -> VerifyReport:
    """
    Run suites in worker threads.

    A suite that raises is reported as failed with the exception as its warning; the
    others still complete.
    """
    names = resolve_suites(names)
    log_to_console(f"🚀 Running {len(names)} verification suite(s): {', '.join(names)}")
    tasks = [asyncio.to_thread(run_suite, name, trials, seed, tolerance) for name in names]
    outcomes = await asyncio.gather(*tasks, return_exceptions=True)

    reports: list[SuiteReport] = []
    for name, outcome in zip(names, outcomes):
        if isinstance(outcome, Exception):
            log_to_console(f"❌ Suite {name} raised exception: {outcome}")
            suite_class = SuiteRegistry.get(name)
            reports.append(
                SuiteReport(
                    suite=name,
                    description=suite_class.DESCRIPTION if suite_class else "",
                    trials=trials if trials is not None else 0,
                    tolerance=tolerance if tolerance is not None else 0.0,
                    passed=False,
                    warnings=[f"{type(outcome).__name__}: {outcome}"],
                )
            )
        else:
            reports.append(outcome)

    return VerifyReport(
        seed=seed,
        trials=trials if trials is not None else -1,
        tolerance=tolerance,
        passed=all(r.passed for r in reports),
        suites=reports,
    )
