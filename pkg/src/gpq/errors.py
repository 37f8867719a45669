"""Exception hierarchy shared across the package."""


class GpqError(Exception):
    """Base class for all errors raised by this package."""


class DataError(GpqError):
    """Invalid numeric data or parameters: malformed embedding files,
    non-finite values, impossible cluster counts, shape mismatches."""


class FormatError(GpqError):
    """Malformed GPQE container: bad magic/version, CRC mismatch,
    truncated stream, out-of-range indices."""
