"""Non-positively curved cubings of alternating link exteriors, their ideal
triangulations, and the volume/Chern-Simons computation from the associated
dilogarithm potential."""

from .cubing import (build_cubing, check_npc, dehn_complex, essential_edges_report,
                     family_paths, is_flag, is_local_geodesic, vertex_link)
from .diagram import (add_kink, braid_closure, checkerboard, label_quadrants, parse_pd,
                      valid_basepoints, validate)
from .potential import build_potential, complex_volume, grad_log, solve, SolverOptions
from .special import dilog, lobachevsky
from .triangulation import build_octahedral, collapse, edge_families, triangulation_census

__version__ = "0.1.0"

__all__ = [
    "parse_pd", "validate", "checkerboard", "label_quadrants", "valid_basepoints",
    "add_kink", "braid_closure",
    "build_cubing", "vertex_link", "is_flag", "check_npc", "dehn_complex",
    "family_paths", "is_local_geodesic", "essential_edges_report",
    "build_octahedral", "collapse", "edge_families", "triangulation_census",
    "dilog", "lobachevsky", "build_potential", "grad_log", "solve", "complex_volume",
    "SolverOptions",
]
