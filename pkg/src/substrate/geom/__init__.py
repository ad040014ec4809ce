"""Exact geometric inflation rules, stone checks, metrics and SVG output."""
from .inflation import (
    InflationRule,
    Prototile,
    Tile,
    builtin_geometry,
    geometry_from_mapping,
    iterate,
    metrics,
    support_area,
    tile_counts,
    verify_stone,
)
from .quadfield import QuadNum, parse_quad
from .svg import inflated_boundary, render_svg

__all__ = [
    "InflationRule",
    "Prototile",
    "QuadNum",
    "Tile",
    "builtin_geometry",
    "geometry_from_mapping",
    "inflated_boundary",
    "iterate",
    "metrics",
    "parse_quad",
    "render_svg",
    "support_area",
    "tile_counts",
    "verify_stone",
]
