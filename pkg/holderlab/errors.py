"""Exception hierarchy shared by all holderlab modules."""


class HolderLabError(Exception):
    """Base class for errors raised by holderlab."""


class ResourceBudgetError(HolderLabError):
    """A configured size budget (exponent bits, node count, pairs) was exceeded."""


class ContractError(HolderLabError, ValueError):
    """A precondition of an operation does not hold."""


class DomainError(HolderLabError, ValueError):
    """An argument lies outside the domain of a function."""


class GuardError(ContractError):
    """A level value sits too close to a vertex value of the field."""


class ParameterError(HolderLabError, ValueError):
    """Construction parameters are invalid."""


class ConstructionError(HolderLabError, RuntimeError):
    """An internal consistency check failed while building an object."""
