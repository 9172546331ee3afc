"""Exception types shared across the library.

The command line maps ``GroupTestError`` (and file I/O problems) to exit
code 1; argparse usage errors exit with 2 as usual.
"""


class GroupTestError(Exception):
    """Base class for domain errors raised by this package."""


class DimensionMismatchError(GroupTestError):
    """Two operands disagree on the number of tests or items."""


class InvalidInstanceError(GroupTestError):
    """Problem sizes outside a formula's domain (for example d >= n)."""


class InvalidNoiseError(GroupTestError):
    """Flip probability outside the valid window [0, 0.5)."""


class UseNoiselessError(GroupTestError):
    """A noisy design was requested with q = 0.

    The noisy threshold calibration degenerates at q = 0; the caller should
    switch to the noiseless variant of the algorithm instead.
    """


class TextFormatError(GroupTestError):
    """Malformed matrix or vector text, with a 1-based line number."""

    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
