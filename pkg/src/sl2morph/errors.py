"""Exception types shared across the package."""


class RetryBudgetExceeded(RuntimeError):
    """A randomized search ran out of attempts (signals a broken oracle or bad seed)."""


class ForeignElementError(ValueError):
    """A handle or element was presented to an oracle that does not own it."""
