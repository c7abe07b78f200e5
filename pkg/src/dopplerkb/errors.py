"""Exception hierarchy shared across the toolkit.

The CLI maps these onto exit codes: usage errors exit 1, ``DataError`` exits
2, ``FitError`` (degenerate or unconverged fits) exits 3.
"""


class DopplerKBError(Exception):
    """Base class for all toolkit errors."""


class DataError(DopplerKBError):
    """Malformed files, invalid configuration, or unusable input data."""


class FitError(DopplerKBError):
    """Degenerate or non-converged least-squares problems."""
