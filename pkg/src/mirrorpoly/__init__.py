"""Moduli spaces of mirror polyhedra realizing labeled ecimahedra."""

from .ecimahedron import BlockForest, NotEcimahedron, decompose, is_ecimahedron, sink_source_system
from .graph_model import (
    AngleLabel,
    LabeledPolyhedron,
    ValidationError,
    andreev_check,
    enumerate_prismatic_four_circuits,
    enumerate_three_circuits,
    validate,
)
from .moduli import (
    ModuliDescription,
    ModuliPoint,
    classify_moduli,
    coordinate_schema,
    counts,
    dimension,
    interval,
    random_point,
)
from .orientation import enumerate_admissible, is_admissible, kappa, kappa_fixed
from .realization import (
    MirrorRealization,
    RealizationError,
    glue,
    r_invariant,
    realize,
    realize_tetrahedron,
    realize_triangle,
    solve_exceptional_prism,
    solve_right_angle_prism,
    triangle_det_class,
    truncate_realization,
    truncation_plane,
    verify,
)

__all__ = [
    "AngleLabel",
    "BlockForest",
    "LabeledPolyhedron",
    "MirrorRealization",
    "ModuliDescription",
    "ModuliPoint",
    "NotEcimahedron",
    "RealizationError",
    "ValidationError",
    "andreev_check",
    "classify_moduli",
    "coordinate_schema",
    "counts",
    "decompose",
    "dimension",
    "enumerate_admissible",
    "enumerate_prismatic_four_circuits",
    "enumerate_three_circuits",
    "glue",
    "interval",
    "is_admissible",
    "is_ecimahedron",
    "kappa",
    "kappa_fixed",
    "r_invariant",
    "random_point",
    "realize",
    "realize_tetrahedron",
    "realize_triangle",
    "sink_source_system",
    "solve_exceptional_prism",
    "solve_right_angle_prism",
    "triangle_det_class",
    "truncate_realization",
    "truncation_plane",
    "validate",
]
