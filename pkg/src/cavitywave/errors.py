"""Exception types shared across the package."""


class CavityWaveError(Exception):
    """Base class for all library-specific errors."""


class DimensionMismatchError(CavityWaveError, ValueError):
    """Operands live on different grids, boundaries, or time axes."""


class ConfigurationError(CavityWaveError, ValueError):
    """A run configuration violates a stability or mode requirement."""


class ContractViolationError(CavityWaveError, ValueError):
    """An argument breaks a documented precondition (support, shape, range)."""


class DegenerateShiftError(CavityWaveError, ZeroDivisionError):
    """The boundary impedance integral vanishes, so the mean-shift constant is undefined."""


class DivergenceError(CavityWaveError, ArithmeticError):
    """An iteration produced non-finite values or lost positive definiteness."""


class PhantomSpecError(CavityWaveError, ValueError):
    """A generator specification is inconsistent with the target grid."""


class FileFormatError(CavityWaveError, ValueError):
    """A data file does not conform to the expected on-disk format."""
