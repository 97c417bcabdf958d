"""Exception types shared across the package."""


class TreeCAError(Exception):
    pass


class AddressError(TreeCAError, ValueError):
    """A vertex word is not a valid address for the given degree."""


class PreconditionError(TreeCAError, ValueError):
    pass


class CapacityError(TreeCAError):
    """A combinatorial space exceeds the configured cap."""


class NonQuiescentRuleError(TreeCAError):
    """Finite-support simulation was requested for a rule with f(0...0) != 0."""


class FormatError(TreeCAError, ValueError):
    """Malformed rule, configuration or canonical-ball text."""
