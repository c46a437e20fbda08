"""Laplacian spectra of iterated subdivisions of simplicial complexes."""

from .complex import (
    Complex,
    GluingSpec,
    SignedGraph,
    boundary_matrix,
    boundary_of_simplex,
    complex_laplacian_of_dual,
    down_laplacian,
    dual_graph,
    from_facets,
    full_laplacian,
    glue,
    signed_laplacian,
    simplex,
    up_laplacian,
)
from .spectral import StepFunction, eigenvalues_sym, l1_distance, quantile_function, wielandt_check
from .subdivide import SubdivisionKind, SubdivisionResult, iterate, q_ratio, subdivide

__all__ = [
    "Complex",
    "GluingSpec",
    "SignedGraph",
    "StepFunction",
    "SubdivisionKind",
    "SubdivisionResult",
    "boundary_matrix",
    "boundary_of_simplex",
    "complex_laplacian_of_dual",
    "down_laplacian",
    "dual_graph",
    "eigenvalues_sym",
    "from_facets",
    "full_laplacian",
    "glue",
    "iterate",
    "l1_distance",
    "q_ratio",
    "quantile_function",
    "signed_laplacian",
    "simplex",
    "subdivide",
    "up_laplacian",
    "wielandt_check",
]

__version__ = "0.1.0"
