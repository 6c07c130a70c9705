"""Matrix-free n-fold symmetric Kronecker products and Hagedorn wave packets."""

from .errors import (
    InconsistentTableError,
    NotUnitaryError,
    ParamError,
    ShapeError,
    SizeCapError,
    SymKronError,
    SymmetryError,
)
from .multiindex import level_size, lex_enumerate, lex_rank, multinomial
from .product import SymKronOperator, materialize
from .symspace import FullVec, SymVec, build_P, compress, expand

__version__ = "0.1.0"
