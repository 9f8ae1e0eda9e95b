"""Exception types shared across the package."""


class PreconditionError(ValueError):
    """An operation was called outside its stated domain."""


class NumericalError(RuntimeError):
    """A numerical routine failed to reach its accuracy target."""
