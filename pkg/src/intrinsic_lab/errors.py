"""Exception types shared across the package."""


class IntrinsicLabError(Exception):
    """Base class for every error raised by this package."""


class InvalidPair(IntrinsicLabError, ValueError):
    """A dimension pair (k, d) outside 1 <= k <= d."""


class IdenticallyZero(IntrinsicLabError, ValueError):
    pass


class OutsideDomain(IntrinsicLabError, ValueError):
    pass


class PoleHit(IntrinsicLabError, ZeroDivisionError):
    """A rational coordinate function has a vanishing denominator."""


class BudgetExceeded(IntrinsicLabError):
    """An enumeration would exceed its configured candidate budget."""

    def __init__(self, needed, budget):
        super().__init__(f"enumeration needs {needed} candidates, budget is {budget}")
        self.needed = needed
        self.budget = budget


class PrecisionExhausted(IntrinsicLabError):
    """Certified enclosures could not separate two candidates."""

    def __init__(self, message, candidates=()):
        super().__init__(message)
        self.candidates = tuple(candidates)


class InsufficientData(IntrinsicLabError, ValueError):
    pass


class Degenerate(IntrinsicLabError, ValueError):
    """The target is itself an intrinsic rational (zero distance record)."""


class SimplexViolation(IntrinsicLabError):
    """Low-height rationals in a ball failed to lie on one affine hyperplane."""

    def __init__(self, message, failure=None):
        super().__init__(message)
        self.failure = failure


class IllegalMove(IntrinsicLabError):
    def __init__(self, player, detail):
        super().__init__(f"illegal move by {player}: {detail}")
        self.player = player
        self.detail = detail


class UnknownChart(IntrinsicLabError, ValueError):
    pass
