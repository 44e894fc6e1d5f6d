"""Exact linear algebra for bounded homotopy categories of small additive categories."""

from .exactlin import GF, QQ, Field, Mat
from .addcat import CategoryPresentation, presentation_from_json, validate_presentation
from .complexes import Complex, ChainMap, Triangle, cone, hom_kb, homotopic, is_iso_kb, shift
from .triangles import is_almost_vanishing, is_exact_triangle, scaling_test
from .center import Window, block_connectivity, res_ind_check, solve_center, solve_triangle_center
from .examples import Cyclic, DualNumbers, build_cyc, build_dn
from .pseudoid import ScalarSystemCyc, ScalarSystemDN, trivialization_certificate

__all__ = [
    "GF", "QQ", "Field", "Mat",
    "CategoryPresentation", "presentation_from_json", "validate_presentation",
    "Complex", "ChainMap", "Triangle", "cone", "hom_kb", "homotopic", "is_iso_kb", "shift",
    "is_almost_vanishing", "is_exact_triangle", "scaling_test",
    "Window", "block_connectivity", "res_ind_check", "solve_center", "solve_triangle_center",
    "Cyclic", "DualNumbers", "build_cyc", "build_dn",
    "ScalarSystemCyc", "ScalarSystemDN", "trivialization_certificate",
]
__version__ = "0.1.0"
