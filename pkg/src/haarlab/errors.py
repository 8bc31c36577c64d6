"""Exception hierarchy shared by all modules."""


class HaarLabError(Exception):
    """Base class for every error raised by the package."""


class InvalidDimensionError(HaarLabError, ValueError):
    pass


class InvalidParameterError(HaarLabError, ValueError):
    pass


class NotNormalizedError(HaarLabError, ValueError):
    pass


class ContractError(HaarLabError, ValueError):
    """A precondition on the shape, field or content of an argument failed."""


class DomainError(HaarLabError, ValueError):
    """A closed-form expression was evaluated outside its validity window."""


class ResourceError(HaarLabError, MemoryError):
    """The requested problem size exceeds the desk-scale limits."""


class ConfigError(HaarLabError, ValueError):
    def __init__(self, message, field=None):
        self.field = field
        if field:
            message = f"{field}: {message}"
        super().__init__(message)
