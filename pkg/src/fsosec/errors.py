"""Exception hierarchy shared by the library and the CLI."""

from __future__ import annotations


class FsoSecError(Exception):
    """Base class for every error raised by fsosec."""


class DomainError(FsoSecError, ValueError):
    """An argument lies outside the domain of a physical model."""


class SingularityError(DomainError):
    """A model is singular at the requested point (e.g. zero distance)."""


class ConfigError(FsoSecError, ValueError):
    """A scenario, sweep or CLI configuration is malformed."""


class SweepPointError(DomainError):
    """A domain error raised while evaluating one grid point of a sweep."""

    def __init__(self, variable: str, value: float, cause: Exception):
        self.variable = variable
        self.value = value
        self.cause = cause
        super().__init__(f"{variable}={value!r}: {cause}")


class RegistryError(FsoSecError, ValueError):
    """Base class for threat-registry errors."""


class RegistryParseError(RegistryError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")


class DuplicateIdError(RegistryError):
    pass


class DanglingReferenceError(RegistryError):
    pass


class UnknownIdError(RegistryError, LookupError):
    pass
