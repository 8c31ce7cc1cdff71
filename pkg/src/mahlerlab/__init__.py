"""Numerical laboratory for volume products of centrally symmetric convex bodies."""

__version__ = "0.1.0"

from .body import (
    ConvexBody3,
    Direction,
    Ellipsoid,
    LinearMap3,
    LpBall,
    RadialField,
    SymmetricPolytope,
    TransformedBody,
    apply_linear,
    ball,
    boundary_map,
    cross_polytope,
    cube,
    gauge_radial,
    make_body,
    polar,
    sphere_point,
    support,
)
from .quadrature import (
    SphereGrid,
    make_grid,
    octant_volumes,
    plane_measures,
    polar_piece_volumes,
    projection_polygon,
    quarter_areas,
    santalo_point,
    section_polygon,
    volume,
    volume_product,
)

__all__ = [
    "ConvexBody3",
    "Direction",
    "Ellipsoid",
    "LinearMap3",
    "LpBall",
    "RadialField",
    "SphereGrid",
    "SymmetricPolytope",
    "TransformedBody",
    "apply_linear",
    "ball",
    "boundary_map",
    "cross_polytope",
    "cube",
    "gauge_radial",
    "make_body",
    "make_grid",
    "octant_volumes",
    "plane_measures",
    "polar",
    "polar_piece_volumes",
    "projection_polygon",
    "quarter_areas",
    "santalo_point",
    "section_polygon",
    "sphere_point",
    "support",
    "volume",
    "volume_product",
]
