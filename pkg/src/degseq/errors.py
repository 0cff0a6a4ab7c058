"""Exception types shared across the package."""


class DegseqError(Exception):
    """Base class for all package errors."""


class InfeasibleState(DegseqError):
    """An interval came out empty on a state that was supposed to be feasible."""


class Infeasible(DegseqError):
    """The requested graph space is empty."""


class BudgetExceeded(DegseqError):
    """The brute-force configuration ceiling was passed."""


class MemoryBudgetExceeded(DegseqError):
    """The count table grew past its memory budget."""

    def __init__(self, states, budget_mb):
        self.states = states
        self.budget_mb = budget_mb
        super().__init__(
            f"count table exceeded {budget_mb} MB after storing {states} states"
        )


class EmptyInput(DegseqError):
    """An estimator was handed no samples."""


class UnknownSupport(DegseqError):
    """A metric needs the size of the graph space but it was not supplied."""
