"""Exception hierarchy."""


class RankAreError(Exception):
    """Base class for all library errors."""


class DomainError(RankAreError, ValueError):
    """Argument outside the domain of the operation."""


class PreconditionError(RankAreError, ValueError):
    """A density/score pairing does not satisfy the regularity required."""


class DivergenceError(RankAreError, ArithmeticError):
    """A defining integral does not converge."""


class NonConvergence(RankAreError, ArithmeticError):
    """Numerical procedure stopped before reaching its tolerance."""


class OutsideF2Error(PreconditionError):
    """Serial efficiency requested under an infinite-variance density."""


class UnsupportedError(RankAreError, NotImplementedError):
    pass


class ShapeError(PreconditionError):
    """Score shapes do not match any case of a bound."""


class ExtrapolationUnstable(NonConvergence):
    pass


class NoBracketError(RankAreError, ValueError):
    pass


class TiesError(RankAreError, ValueError):
    """Tied observations where continuous data are assumed."""

    def __init__(self, tied_indices):
        self.tied_indices = list(tied_indices)
        super().__init__(f"tied values at indices {self.tied_indices}")


class BudgetExceeded(RankAreError, RuntimeError):
    pass
