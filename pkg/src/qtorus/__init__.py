"""Numerical harmonic analysis on 2-dimensional quantum tori."""
from .algebra import (Monomial, ParameterError, QPoly, TrigPoly, adjoint, fourier_coeff,
                      mul, tensor_shift, trace, trace_product)
from .matrix_model import (MatrixRep, NormEstimate, QuadratureGrid, irrational_norm, l2_norm,
                           lp_norm, op_norm, represent)

__all__ = [
    "Monomial", "ParameterError", "QPoly", "TrigPoly", "adjoint", "fourier_coeff", "mul",
    "tensor_shift", "trace", "trace_product", "MatrixRep", "NormEstimate", "QuadratureGrid",
    "irrational_norm", "l2_norm", "lp_norm", "op_norm", "represent",
]
__version__ = "0.1.0"
