"""Exact sum-product counts and graph spectra over matrix rings M_n(F_q)."""

from .field import FieldSpec, VectorSpace, field_of_order, make_field
from .ring import RingSpec
from .sets import MatrixSet, set_build, set_combine

__all__ = [
    "FieldSpec",
    "MatrixSet",
    "RingSpec",
    "VectorSpace",
    "field_of_order",
    "make_field",
    "set_build",
    "set_combine",
]
