"""Verification suites."""

from tnprob.verify.base import BaseSuite, relative_residual
from tnprob.verify.registry import SuiteRegistry

# Import suite implementations to trigger registration
# Each suite uses the @SuiteRegistry.register() decorator
from tnprob.verify.suites import (
    DecoheredCutSuite,
    FullyDecoheredSuite,
    GaugeSuite,
    LikelihoodSuite,
    NonnegativitySuite,
    ObserverEffectSuite,
    PhaseIndependenceSuite,
    PurificationSuite,
)

__all__ = [
    "BaseSuite",
    "SuiteRegistry",
    "relative_residual",
    "DecoheredCutSuite",
    "FullyDecoheredSuite",
    "GaugeSuite",
    "LikelihoodSuite",
    "NonnegativitySuite",
    "ObserverEffectSuite",
    "PhaseIndependenceSuite",
    "PurificationSuite",
]
