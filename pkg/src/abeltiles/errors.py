"""Exception types shared across the package."""

from __future__ import annotations


class InputError(ValueError):
    """Malformed user input: group spec, literal, or out-of-range parameter."""


class MixedGroupError(InputError):
    """Operands belong to different groups."""


class NotCyclicError(InputError):
    """Operation requires a cyclic group."""


class BudgetExceededError(RuntimeError):
    """A search exceeded its node budget.

    Distinct from "no result": the search was cut short, so the answer is
    unknown.  `consumed` counts nodes actually visited.
    """

    def __init__(self, consumed: int, limit: int, what: str = "search"):
        super().__init__(f"{what} exceeded node budget ({consumed} >= {limit})")
        self.consumed = consumed
        self.limit = limit


class NoPeriodicComplementError(RuntimeError):
    """No periodic tiling complement was found.

    Either the ambient group lacks the periodic-tiling property or the
    search budget was too small to tell.
    """


class ConstructionError(RuntimeError):
    """A construction's verified claims did not all hold."""
