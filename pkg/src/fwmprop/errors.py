"""Exception types shared across the package.

Each error names the contract violation it signals; modules raise these
instead of bare ValueError so callers (and the CLI) can map failures to
exit codes and machine-readable reports.
"""


class FwmError(Exception):
    """Base class for all package errors."""


class DegenerateSteadyState(FwmError):
    """Liouvillian null space is not one-dimensional."""


class NoRoot(FwmError):
    """Density calibration found no sign change in the bracketing interval."""


class BadGrid(FwmError):
    """Transverse grid violates sampling or shape requirements."""


class WrongSpace(FwmError):
    """Field pair is in the wrong representation for the requested operation."""


class TableRange(FwmError):
    """Susceptibility table does not cover the grid's wavevector range."""


class FitFailed(FwmError):
    """Gaussian width fit residual too large (strongly non-Gaussian profile)."""

    def __init__(self, message, width_rms=None):
        super().__init__(message)
        self.width_rms = width_rms


class NotReached(FwmError):
    """Balance-point criterion never satisfied along the trajectory."""


class DegenerateImage(FwmError):
    """Image comparison input has zero variance."""


class ParseError(FwmError):
    """Configuration text is not parseable."""


class ValidationError(FwmError):
    """Configuration parsed but violates schema invariants."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class IoError(FwmError):
    """File could not be read or written."""


class FormatError(FwmError):
    """File content does not match the expected format."""
