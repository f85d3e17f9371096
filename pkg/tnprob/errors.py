"""Exception types raised across tnprob.

Every error derives from TnProbError and from the closest builtin, so callers may catch
either the specific class, the tnprob base, or the builtin.
"""

from typing import Any


class TnProbError(Exception):
    """Base class for all tnprob errors."""


# Tensor calculus


class ShapeMismatchError(TnProbError, ValueError):
    """Two tensors that must share a shape do not."""


class DimensionMismatchError(TnProbError, ValueError):
    """Modes paired for contraction have different dimensions."""


class ModeIndexError(TnProbError, IndexError):
    """A mode index lies outside the order of its tensor."""


class DuplicateModeError(TnProbError, ValueError):
    """The same mode was named in more than one pairing."""


class ContractionBudgetError(TnProbError, RuntimeError):
    """An intermediate tensor would exceed the configured element budget."""

    def __init__(self, message: str, step: int, size: int) -> None:
        super().__init__(message)
        self.step = step
        self.size = size


# Networks


class InvalidNetworkError(TnProbError, ValueError):
    """A tensor network failed validation; `report` lists every violation."""

    def __init__(self, report: Any) -> None:
        super().__init__(str(report))
        self.report = report


class UnknownEdgeError(TnProbError, ValueError):
    """An edge ID is not part of the graph."""


class VisibleEdgeError(TnProbError, ValueError):
    """A hidden edge was required but a visible edge was given."""


class SingularGaugeError(TnProbError, ValueError):
    """A gauge matrix is singular or too badly conditioned to invert."""


# Models and inference


class ModelInvariantError(TnProbError, ValueError):
    """A model family's structural invariant does not hold."""


class DegenerateModelError(TnProbError, ValueError):
    """The model's unnormalized tensor sums to zero (Z = 0)."""


class UnknownVariableError(TnProbError, ValueError):
    """A variable name is not a visible edge of the model."""


class OutcomeRangeError(TnProbError, ValueError):
    """An outcome or symbol lies outside its variable's range."""


class UndefinedConditionalError(TnProbError, ValueError):
    """Conditioning on an outcome of zero probability."""


class PreconditionError(TnProbError, ValueError):
    """A conversion was requested on a model that does not meet its precondition."""


# Learning and data


class ZeroProbabilitySequenceError(TnProbError, ValueError):
    """A training sequence has zero (or non-finite) likelihood."""

    def __init__(self, message: str, index: int) -> None:
        super().__init__(message)
        self.index = index


class TrainingDivergedError(TnProbError, RuntimeError):
    """NLL became non-finite during training; `trajectory` holds the epochs completed."""

    def __init__(self, message: str, trajectory: list[Any]) -> None:
        super().__init__(message)
        self.trajectory = trajectory


class EmptyDatasetError(TnProbError, ValueError):
    """An operation needs at least one sequence."""


class SchemaError(TnProbError, ValueError):
    """A model, network or dataset file does not match its schema."""
