"""Quantum symmetric pairs for Kac-Moody algebras, computed exactly.

The package builds U_q(g') for a symmetrizable Cartan matrix in normal form
over Q(i)(q), the quantum involutions theta_q(X, tau), the coideal
subalgebras B_{c,s} with their defining relations, and the q = 1 side.
"""

__version__ = "0.1.0"

from .algebra import Elem, TElem, Uq
from .cartan import CartanDatum, DiagramMap, GimMatrix, affinize, gim_double, named_cartan, validate_cartan, validate_gim
from .classical import classical_theta, involution_check, specialize
from .errors import QSPError
from .maps import theta_q
from .qsp import (
    QSPParams,
    centralizer_probe,
    closed_Cij,
    curly_W,
    curly_Z,
    emit_presentation,
    extract_Cij,
    gim_presentation,
    iwasawa_check,
    make_B,
    rescale_params,
    serre_defect,
)
from .scalar import GaussRat, ParamPoly, Scalar, parse_coeff, parse_scalar
from .weyl import AdmissiblePair, enumerate_admissible, make_pair, parameter_domains, validate_admissible

__all__ = [
    "__version__",
    "Uq", "Elem", "TElem",
    "CartanDatum", "DiagramMap", "GimMatrix", "affinize", "gim_double", "named_cartan", "validate_cartan", "validate_gim",
    "classical_theta", "involution_check", "specialize",
    "QSPError",
    "theta_q",
    "QSPParams", "centralizer_probe", "closed_Cij", "curly_W", "curly_Z", "emit_presentation", "extract_Cij",
    "gim_presentation", "iwasawa_check", "make_B", "rescale_params", "serre_defect",
    "GaussRat", "ParamPoly", "Scalar", "parse_coeff", "parse_scalar",
    "AdmissiblePair", "enumerate_admissible", "make_pair", "parameter_domains", "validate_admissible",
]
