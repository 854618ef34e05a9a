"""Computable quantum Euclidean spaces.

Weyl-algebra symbolics, polynomial symbol calculus, truncated Fock-space
numerics, the Moyal product on grids and the d=2 Bott index pairing.
"""

from .errors import IncompatibleAlgebraError, NumericalGateError, TruncationError, ValidationError
from .skew import NormalForm, SkewMatrix, assemble_big_theta, pfaffian_modulus, standard_form
from .weyl import (
    BiDegree,
    WeylAlgebra,
    WeylElement,
    adjoint,
    bidegree,
    derive_x,
    derive_xi,
    transference,
    weyl_mul,
)
from .weyl_io import element_from_json, element_to_json, parse_element
from .symbols import SymbolExpansion, compose, quantize, symbol_trace, verify_composition
from .fock import (
    FockOperator,
    FockRep,
    build_generators,
    heat_trace_closed,
    heat_trace_numeric,
    trace,
)
from .moyal import GridFunction, integral, star, star_adjoint_check
from .clifford import CliffordAlgebra, clifford_build, curvature_form
from .index import (
    bott_index,
    chern_coefficient,
    cocycle_constants,
    dirac_square_check,
    simplified_cocycle,
)

__version__ = "0.1.0"
