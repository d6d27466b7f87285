"""Exception types shared across the package."""


class GaugeTreeError(Exception):
    """Base class for all package-specific errors."""


class OutOfRangeError(GaugeTreeError):
    """A table gauge was queried outside its stored scale range."""


class InsufficientDataError(GaugeTreeError):
    """Not enough scales requested to reach an order verdict."""


class TruncationError(GaugeTreeError):
    """A node is longer than the tree's working depth."""


class NotInTreeError(GaugeTreeError):
    """Cylinder measure requested for a node outside the tree."""


class NodeBudgetError(GaugeTreeError):
    """Materialization would exceed the explicit node budget."""

    def __init__(self, count, budget):
        super().__init__(f"materialization needs {count} leaves, budget is {budget}")
        self.count = count
        self.budget = budget


class FrostmanConditionError(GaugeTreeError):
    """The mass-distribution inequality fails up to the working depth."""

    def __init__(self, worst_level, excess):
        super().__init__(
            f"cylinder measure exceeds the gauge at level {worst_level} "
            f"(log2 excess {excess:.6g})"
        )
        self.worst_level = worst_level
        self.excess = excess


class EnumerationBudgetError(GaugeTreeError):
    """Brute-force cover enumeration bound exceeded."""


class UndefinedNodeError(GaugeTreeError):
    """An explicit node map has no entry for the requested node."""


class DepthExhaustedError(GaugeTreeError):
    """No eligible selector level remains for a game stage."""

    def __init__(self, requirement):
        super().__init__(f"no eligible level left for requirement {requirement}")
        self.requirement = requirement


class InfeasibleError(GaugeTreeError):
    """The schedule is too thin for the requested stage budget."""

    def __init__(self, requested, feasible):
        super().__init__(
            f"requested {requested} stages per requirement, "
            f"only {feasible} completed fairly"
        )
        self.requested = requested
        self.feasible = feasible


class GameInvariantError(GaugeTreeError):
    """A self-check inside a game stage failed."""


class DegenerateIntervalError(GaugeTreeError):
    """Four-cover requested for an empty interval."""
