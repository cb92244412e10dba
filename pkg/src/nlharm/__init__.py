"""Numerical exterior calculus on discrete tori with quadratically
constrained harmonic-form minimization and pointwise curvature-identity
verification."""

from .backend import HAVE_COMPILED, backend_name
from .grid import Cochain, GridOperator, TorusGrid, cup, lie_derivative, sym_cup
from .multivector import (
    InnerProduct,
    MultiVector,
    clifford,
    clifford_hat,
    hodge_star,
    interior,
    pfaffian,
    pfaffian_polar,
    sd_asd_split,
    wedge,
)

__version__ = "0.1.0"
