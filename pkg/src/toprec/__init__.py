"""Exact topological recursion for matrix models and the colored tensor-model curve."""
from .algebra import Context, Rational, ScalarExpr, TruncatedSeries, format_scalar, parse_scalar
from .curve import SpectralCurve, joukowsky, qmtm_constant, qmtm_curve
from .forms import DiffForm, LaurentSeries, format_form, parse_form
from .models import gaussian_model, quartic_formal_model, wick_trace_moments
from .recursion import CorrelatorStore, check_linear, check_quadratic, moments, omega

__version__ = "0.1.0"

__all__ = [
    "Context", "Rational", "ScalarExpr", "TruncatedSeries", "format_scalar", "parse_scalar",
    "SpectralCurve", "joukowsky", "qmtm_constant", "qmtm_curve", "DiffForm", "LaurentSeries",
    "format_form", "parse_form", "gaussian_model", "quartic_formal_model", "wick_trace_moments",
    "CorrelatorStore", "check_linear", "check_quadratic", "moments", "omega",
]
