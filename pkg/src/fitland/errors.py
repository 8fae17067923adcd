"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Raised when a run configuration fails validation."""


class BudgetExceededError(RuntimeError):
    """Raised when a surrogate query would exceed the per-round cap."""


class ContractViolationError(RuntimeError):
    """Raised when an explorer breaks its proposal contract."""
