"""Exception types shared across the package."""


class StorysphereError(Exception):
    """Base class for all package errors."""


class DomainError(StorysphereError, ValueError):
    """An argument lies outside its mathematical domain."""


class ConfigError(StorysphereError, ValueError):
    """A configuration value is outside its documented range."""


class ContractError(StorysphereError, ValueError):
    """A caller violated an operation precondition."""


class LoadError(StorysphereError, ValueError):
    """An input file is missing, malformed, or inconsistent.

    The message always names the offending input.
    """


class GraphValidationError(StorysphereError, ValueError):
    """A branch graph document failed validation.

    Carries the full list of structural errors.
    """

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class ProviderError(StorysphereError, RuntimeError):
    """A description provider could not produce text."""
