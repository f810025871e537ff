from __future__ import annotations

__all__ = (
    "BracketError",
    "ConfigError",
    "GridMismatchError",
    "InvalidParameterError",
    "InvalidSpaceSpecError",
    "NegativeRadicandError",
    "NoContractionError",
    "RangeGateWarning",
    "TruncationWarning",
)


class InvalidParameterError(ValueError):
    """Exception raised when a numerical parameter is outside its admissible range."""


class GridMismatchError(ValueError):
    """Exception raised when operands live on different grids or scale axes."""


class InvalidSpaceSpecError(ValueError):
    """Exception raised when a SpaceSpec violates the standing assumptions of its family."""


class NegativeRadicandError(ValueError):
    """Exception raised when the admissibility radicand is negative at some frequency.

    Attributes:
        witness: The sampled frequency where the radicand was found negative.
    """

    def __init__(self, msg: str, *, witness: float) -> None:
        super().__init__(msg)
        self.witness = witness


class ConfigError(ValueError):
    """Exception raised when an experiment configuration cannot be validated.

    Attributes:
        section: Configuration section containing the offending key (empty for top-level keys).
        key: The offending key.
    """

    def __init__(self, msg: str, *, section: str = "", key: str = "") -> None:
        location = f"[{section}] {key}" if section else key
        super().__init__(f"{location}: {msg}" if location else msg)
        self.section = section
        self.key = key


class NoContractionError(ArithmeticError):
    """Exception raised when the Neumann iteration does not contract at the given covering.

    Attributes:
        ratio: Measured residual ratio of the first iterate.
    """

    def __init__(self, msg: str, *, ratio: float) -> None:
        super().__init__(msg)
        self.ratio = ratio


class BracketError(ArithmeticError):
    """Exception raised when a root cannot be bracketed."""


class RangeGateWarning(UserWarning):
    """Warning emitted when a field handed to the discretization operator is not in the reproducing range."""


class TruncationWarning(UserWarning):
    """Warning emitted when a signal carries spectral mass beyond the last resolved level."""
