"""Exact toric K-stability invariants and numerical K-energy on Delzant polytopes."""

from . import catalog, kernels
from .errors import ToricStabError
from .lp import LinearProgram, solve
from .plconvex import AffineFunction, MaxAffinePL, MeshPL, is_convex
from .polytope import (
    DelzantPolytope,
    Facet,
    barycenter,
    boundary_area,
    check_delzant,
    mean_scalar,
    polytope,
    subdivide,
    volume,
)
from .stability import (
    build_test_config,
    delta_on_subdivision,
    delta_scan,
    donaldson_L,
    futaki_character,
    j_norm,
    stability_ratio,
)

__version__ = "0.1.0"
