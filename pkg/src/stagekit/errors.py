"""Exception hierarchy shared by all stagekit modules.

Each class carries the CLI exit code it maps to: schema and validation
problems exit 2, numeric and degenerate-data problems exit 3.
"""

from __future__ import annotations


class StagekitError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class InvalidInputError(StagekitError):
    """A caller-supplied value violates a documented precondition."""

    exit_code = 2


class SchemaError(InvalidInputError):
    """An input file does not match its documented schema."""


class IncompleteWeightsError(InvalidInputError):
    """A sibling group is missing local weights needed for composition."""


class UnsupportedOrderError(InvalidInputError):
    """No random-consistency-index entry exists for a matrix of this size."""


class InsufficientDataError(StagekitError):
    """Too few observations for the statistic to be defined."""

    exit_code = 3


class DegenerateDataError(StagekitError):
    """Inputs are structurally valid but make the statistic undefined."""

    exit_code = 3


class ConvergenceError(StagekitError):
    """An iterative method exceeded its iteration cap without converging."""

    exit_code = 3


class PipelineStageError(StagekitError):
    """A pipeline stage failed; carries the stage name and the cause."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause
        self.exit_code = getattr(cause, "exit_code", 1)
