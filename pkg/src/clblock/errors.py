"""Exception hierarchy for clblock.

Errors are grouped so the CLI can map them onto exit codes: input/parse
problems (Touchstone, config) versus numerical problems (singular or
degenerate systems).
"""


class ClblockError(Exception):
    """Base class for all clblock errors."""


class NumericalError(ClblockError):
    """Base class for singular/degenerate numerical conditions."""


class SingularMatrixError(NumericalError):
    """Matrix inverse requested for a (near-)singular matrix."""


class DegenerateEigenError(NumericalError):
    """2x2 eigendecomposition with (near-)coincident eigenvalues."""


class SingularCouplingError(NumericalError):
    """Coupling ratio at or beyond 1, where even/odd impedances diverge."""


class InvalidCapacitanceError(ClblockError):
    """Capacitance matrix violates sign or positive-definiteness constraints."""


class NoTransmissionError(NumericalError):
    """S21 = 0: the wave transfer matrix T does not exist."""


class ConversionSingularError(NumericalError):
    """Singular linear system in an S/Z/T conversion or renormalization."""


class MixedReferenceError(ClblockError):
    """Cascade of networks with different reference impedances."""


class CalibrationDegenerateError(NumericalError):
    """Line standard electrically degenerate (theta within 1e-3 of n*pi)."""

    def __init__(self, freq_hz, message=None):
        self.freq_hz = freq_hz
        super().__init__(message or f"degenerate line standard at {freq_hz:g} Hz")


class FrequencyAlignmentError(ClblockError):
    """Frequency grids of measurement sets do not match."""


class TouchstoneError(ClblockError):
    """Malformed Touchstone input; carries the offending line number."""

    def __init__(self, message, line_no=None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class ConfigError(ClblockError):
    """Malformed design-configuration input; names the offending key."""

    def __init__(self, message, key=None):
        self.key = key
        super().__init__(message)
