"""Exception hierarchy.

Every failure mode named by an operation maps to one subclass here so callers
(and the CLI's exit-code table) can dispatch on type rather than message text.
"""


class RsnwtError(Exception):
    """Base class for all library errors."""


class InputError(RsnwtError, ValueError):
    """Malformed or out-of-contract input."""


class ZeroInverse(InputError, ZeroDivisionError):
    pass


class FieldTooSmall(InputError):
    pass


class EmptyGraph(InputError):
    pass


class TooSmall(InputError):
    pass


class TooLarge(RsnwtError):
    """An exhaustive enumeration would exceed its configured bound."""


class SearchBudgetExceeded(TooLarge):
    pass


class NotADecomposition(InputError):
    pass


class EdgeCountMismatch(InputError):
    pass


class EmptyIndexSet(InputError):
    pass


class PreconditionFailed(InputError):
    def __init__(self, condition: str, detail: str = ""):
        self.condition = condition
        msg = f"PreconditionFailed({condition})"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class AgreementMismatch(InputError):
    pass


class NotATransversal(InputError):
    pass


class DegenerateSystem(InputError):
    pass


class WeightDeficit(InputError):
    pass


class HypothesesUnmet(InputError):
    def __init__(self, failures: list[str]):
        self.failures = list(failures)
        super().__init__("HypothesesUnmet: " + "; ".join(self.failures))


class BudgetExhausted(RsnwtError):
    pass


class DuplicateColumn(InputError):
    pass


class VersionMismatch(RsnwtError):
    pass
