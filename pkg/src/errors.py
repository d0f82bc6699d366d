"""
Exception hierarchy shared by every stage of the toolkit.
"""

from typing import Any, Dict, Optional, Sequence


class ToolkitError(Exception):
    """Base class for all toolkit failures"""


# lp

class NumericalBreakdown(ToolkitError):
    """Pivot element vanished even under Bland's rule"""


class IterationLimitReached(ToolkitError):
    pass


class TooLarge(ToolkitError):
    pass


class UnboundedRegion(ToolkitError):
    pass


class FormatError(ToolkitError):
    """A text or JSON artifact could not be parsed"""


# milp

class NoIncumbentAtLimit(ToolkitError):
    """Search stopped on a node or time limit before any integer-feasible point was found"""

    def __init__(self, message: str, node_count: int = 0, bound: float = float("-inf")):
        super().__init__(message)
        self.node_count = node_count
        self.bound = bound


class UnboundedRelaxation(ToolkitError):
    pass


# spmodel

class DimensionMismatch(ToolkitError):
    pass


class RecourseInfeasible(ToolkitError):
    """Second stage has no feasible point for the given first-stage decision"""

    def __init__(self, message: str, x: Optional[Sequence[float]] = None, scenario_id: Optional[str] = None):
        super().__init__(message)
        self.x = None if x is None else [float(v) for v in x]
        self.scenario_id = scenario_id


class InfeasibleFirstStage(ToolkitError):
    pass


class EmptyScenarioSet(ToolkitError):
    pass


# nn

class NonFiniteLoss(ToolkitError):
    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


# embed

class NonNegativityViolated(ToolkitError):
    pass


class UnboundedInput(ToolkitError):
    pass


# harness

class BaselineZero(ToolkitError):
    pass


class PipelineStageError(ToolkitError):
    """A pipeline stage failed; carries the stage name and the artifact it was working on"""

    def __init__(self, stage: str, artifact: Optional[str], cause: Exception):
        super().__init__(f"stage '{stage}' failed on {artifact or '<no artifact>'}: {cause}")
        self.stage = stage
        self.artifact = artifact
        self.cause = cause
