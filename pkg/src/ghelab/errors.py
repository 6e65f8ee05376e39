"""Exception types shared across the lab."""


class ParameterError(ValueError):
    """A numeric or structural parameter is outside its allowed range."""


class MalformedElementError(ValueError):
    """An element encoding does not respect its group's coordinate bounds."""


class ClosureOverflowError(RuntimeError):
    """A subgroup closure grew past the configured desk-scale cap."""


class DomainError(ValueError):
    """Two objects that must live over the same group do not."""


class InstanceError(ValueError):
    """An SMP instance cannot be built from the given scheme."""


class GameError(RuntimeError):
    """An adversary broke the rules of a security game."""
