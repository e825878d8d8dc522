"""Homogeneous differential operators with measure data.

Structure certificates (ellipticity, canceling, cocanceling), regularity
functionals and Riesz energies of vector measures, a spectral solver for
``A*(D) f = mu`` and numerical checks of the associated weighted inequalities.
"""
from .errors import EllipticityError, InputError, NumericalError, PreconditionError
from .grid import GridField
from .measures import VectorMeasure
from .operators import HomogeneousOperator, certify, check_cocanceling, parse_operator

__all__ = [
    "EllipticityError", "InputError", "NumericalError", "PreconditionError",
    "GridField", "VectorMeasure", "HomogeneousOperator", "certify", "check_cocanceling",
    "parse_operator",
]
