"""Exception hierarchy shared by the library and the command line."""


class SymKronError(Exception):
    """Base class for all library errors."""


class SizeCapError(SymKronError, ValueError):
    """A requested object would exceed a size cap."""


class ShapeError(SymKronError, ValueError):
    """Dimension or order mismatch between operands."""


class SymmetryError(SymKronError, ValueError):
    """A full vector is not constant on the classes of the redundant enumeration."""

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class ParamError(SymKronError, ValueError):
    """Wave packet parameters violate a compatibility condition."""

    def __init__(self, message, condition=None, residual=None):
        super().__init__(message)
        self.condition = condition
        self.residual = residual


class NotUnitaryError(SymKronError, ValueError):
    pass


class InconsistentTableError(SymKronError, ArithmeticError):
    pass
