"""Generalized Mahler measures of Laurent polynomials over arbitrary tori."""

__version__ = "0.1.0"

from ._backend import BACKEND
from .errors import (
    DegeneracyError,
    DivergentSeries,
    DomainError,
    GMahlerError,
    MixedRoots,
    NonIntegral,
    NumericalFailure,
    PreconditionNotMet,
    SingularityDominated,
    UsageError,
    ZeroOnContour,
)
from .laurent import LaurentPoly, constant_term, evaluate, factor_in_variable, family_q, parse, power
from .measure import (
    MeasureResult,
    Method,
    Torus,
    mahler_direct,
    mahler_jensen,
    mahler_measure,
    roots_complex,
)
from .q4 import arc_split, linear_factor_measure, q4_closed, q4_params
from .quad import GridSpec, QuadResult, periodic_integral_1d, periodic_integral_nd
from .region import build_region, classify_point, ellipse_conditions, ellipse_membership, family_extremes
from .special import bloch_wigner, catalan, dilog, li2
from .theorems import (
    bounded_component_value,
    cassaigne_maillot,
    series_coefficients,
    series_expansion,
    series_mtilde,
    verify_main_relation,
)
from .winding import index_in_disc, nu_pair, nu_vector, rho_constancy

__all__ = [name for name in dir() if not name.startswith("_")]
