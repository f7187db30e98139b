"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Malformed specification object or configuration."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class ReturnTimeTruncated(RuntimeError):
    """Return-time search exceeded its cap.

    Carries the number of iterations completed so callers can count and
    report truncations instead of silently dropping them.
    """

    def __init__(self, start: float, steps_completed: int):
        self.start = start
        self.steps_completed = steps_completed
        super().__init__(
            f"no return to Y within {steps_completed} iterations from y={start!r}"
        )


class NumericError(RuntimeError):
    """A numerical procedure failed to converge to its tolerance."""


class PartitionConsistencyError(RuntimeError):
    """A return-partition cell failed its spot check."""


class StatisticalError(RuntimeError):
    """Not enough data for a statistically meaningful estimate."""
