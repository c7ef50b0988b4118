"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: InputError -> 1,
InternalInvariantError -> 2, OracleMismatch -> 3.
"""


class TrihochError(Exception):
    """Base class for all errors raised by this package."""


class InputError(TrihochError):
    """Invalid user input: parse errors, failed validation, bad job options."""


class BudgetExceeded(InputError):
    """A requested brute-force build would exceed the configured work budget."""

    def __init__(self, required, budget):
        self.required = required
        self.budget = budget
        super().__init__(
            f"bar-complex build refused: estimated {required} matrix entries "
            f"exceeds the budget of {budget}; raise the budget to at least "
            f"{required} to force the build"
        )


class InternalInvariantError(TrihochError):
    """A structural identity the engine relies on failed (e.g. delta^2 != 0)."""


class OracleMismatch(TrihochError):
    """An independent oracle disagreed with the main computation."""
