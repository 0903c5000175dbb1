"""Frobenius difference modules over F_q(s)((t)): exact finite-field
arithmetic, truncated fundamental matrices, Galois witnesses at places and
finite generation certificates."""

from .errors import DGWError
from .fields import FieldCtx, FieldElem, build_extension, frobenius, small_field
from .funcfield import PlaceFin, Poly, RatFunc, enumerate_places, make_place, place_from_poly
from .module import (FrobModule, ReducedModule, check_existence_hypothesis, export_pre_t_motive,
                     frobenius_product, raise_level, reduce_module_at)
from .nori import SlInstance, build_instance, search_nori_parameters
from .series import BivarEntry, TruncSeries, TruncSeriesMatrix, apply_phi, expand_at_place, invert
from .solver import (Witness, descend_conjugator, extract_witness, lang_solve, normalize_to_sl,
                     solve_truncated)

__version__ = "0.1.0"

__all__ = [
    "DGWError", "FieldCtx", "FieldElem", "build_extension", "frobenius", "small_field",
    "PlaceFin", "Poly", "RatFunc", "enumerate_places", "make_place", "place_from_poly",
    "FrobModule", "ReducedModule", "check_existence_hypothesis", "export_pre_t_motive",
    "frobenius_product", "raise_level", "reduce_module_at",
    "SlInstance", "build_instance", "search_nori_parameters",
    "BivarEntry", "TruncSeries", "TruncSeriesMatrix", "apply_phi", "expand_at_place", "invert",
    "Witness", "descend_conjugator", "extract_witness", "lang_solve", "normalize_to_sl",
    "solve_truncated",
]
