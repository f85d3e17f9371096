"""Console reports for verification and training runs."""

from collections.abc import Sequence

from tnprob.schemas import VerifyReport
from tnprob.services.training_service import TrainingSummary
from tnprob.utils import log_to_console

RULE = "=" * 80


class Reporter:
    """Summarize command results on the console."""

    def __init__(self, title: str) -> None:
        self.title = title

    def _banner(self) -> None:
        log_to_console("\n" + RULE)
        log_to_console(self.title.upper())
        log_to_console(RULE)

    def print_verify(self, report: VerifyReport) -> None:
        self._banner()
        log_to_console(f"Seed: {report.seed}")
        for suite in report.suites:
            mark = "✓" if suite.passed else "❌"
            log_to_console(
                f"{mark} {suite.suite}: max residual {suite.max_residual:.3e} "
                f"({len(suite.checks)} checks, {suite.seconds:.1f}s)"
            )
            for check in suite.checks:
                if not check.passed:
                    relation = "<" if check.kind == "witness" else ">"
                    log_to_console(
                        f"    - {check.name}: {check.residual:.3e} {relation} {check.tolerance:.1e}"
                    )
            for warning in suite.warnings:
                log_to_console(f"    ⚠️  {warning}")
        log_to_console(f"\nResult: {'PASS' if report.passed else 'FAIL'}")
        log_to_console(RULE + "\n")

    def print_training(self, summaries: Sequence[TrainingSummary]) -> None:
        self._banner()
        for summary in summaries:
            log_to_console(
                f"📊 {summary.family.value} N={summary.hidden_dim}: {summary.parameters} parameters, "
                f"{summary.succeeded} finished, {summary.failed} diverged"
            )
            best = summary.best_test_nlls
            if best:
                mean = sum(best) / len(best)
                log_to_console(f"  Best-epoch held-out NLL: mean {mean:.4f}, min {min(best):.4f}")
            for result in summary.results:
                if not result.ok:
                    log_to_console(f"  ❌ replication {result.replication}: {result.error}")
        log_to_console(RULE + "\n")
