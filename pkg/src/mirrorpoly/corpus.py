"""Builders for the example graphs shipped with the package.

Run ``python -m mirrorpoly.corpus DIR`` to write every example as JSON.
"""

from __future__ import annotations

import itertools
import json
import math
import sys
from pathlib import Path

from .ecimahedron import tetrahedron, truncate
from .graph_model import AngleLabel, LabeledPolyhedron, validate

PI3 = AngleLabel.pi_over_m(3)
PI4 = AngleLabel.pi_over_m(4)
RIGHT = AngleLabel.right()

#: corners of the tetrahedron on faces 1..4, in truncation order
CORNERS = ("123", "124", "134", "234")


def rad(fraction_of_pi):
    return AngleLabel.from_radians(fraction_of_pi * math.pi)


def block(i, label=PI3):
    """T_i on tetra faces 1..4; the triangle cutting corner ``abc`` is named ``tabc``."""
    poly = tetrahedron(("1", "2", "3", "4"), label)
    for corner in CORNERS[:i]:
        poly = truncate(poly, corner, name="t" + corner)
    return poly


def block_with_special(i, k):
    """T_i with exactly ``k`` special circuits, all among its truncated corners.

    Edges 23, 24, 34 get pi/4 and the edges 1j are tuned so that the corners
    123, 124, 134 become spherical one after the other; ``k = 4`` uses pi/3
    everywhere, making all four corners affine.
    """
    if not 0 <= k <= i:
        raise ValueError("need 0 <= k <= i")
    if k == 4:
        return block(4, PI3)
    poly = block(i, PI4)
    weights = {
        0: {},
        1: {"2": 0.4, "3": 0.4, "4": 0.3},
        2: {"2": 0.45, "3": 0.35, "4": 0.35},
        3: {"2": 0.4, "3": 0.4, "4": 0.4},
    }[k]
    return poly.with_labels({("1", j): rad(w) for j, w in weights.items()})


def tetra_labels(poly, labels):
    """Assign labels to tetra edges given by a dict ``{"12": label}``."""
    return poly.with_labels({(k[0], k[1]): v for k, v in labels.items()})


def prism(lateral=(PI3, PI3, PI3), top=(RIGHT,) * 3, bottom=(RIGHT,) * 3):
    """Triangular prism with lateral faces 1, 2, 3 and triangles 4 (top), 5 (bottom).

    ``lateral`` labels edges 12, 23, 31; ``top``/``bottom`` label the edges of
    the triangles with faces 1, 2, 3 in that order.
    """
    faces = ("1", "2", "3", "4", "5")
    labels = {}
    for (a, b), lab in zip((("1", "2"), ("2", "3"), ("3", "1")), lateral):
        labels[frozenset((a, b))] = lab
    for tri, labs in (("4", top), ("5", bottom)):
        for f, lab in zip(("1", "2", "3"), labs):
            labels[frozenset((tri, f))] = lab
    vertices = tuple(
        frozenset((tri, a, b)) for tri in ("4", "5") for a, b in (("1", "2"), ("2", "3"), ("3", "1"))
    )
    return LabeledPolyhedron(faces, labels, vertices)


def exceptional_prism(theta12, theta23, theta31):
    """G_{a,b,c}: prism with all-order-2 triangles and the given lateral angles."""
    labs = [x if isinstance(x, AngleLabel) else AngleLabel.from_radians(x) for x in (theta12, theta23, theta31)]
    return prism(tuple(labs))


def cube():
    faces = ("top", "bottom", "north", "south", "east", "west")
    opposite = {frozenset(("top", "bottom")), frozenset(("north", "south")), frozenset(("east", "west"))}
    labels = {
        frozenset(p): RIGHT
        for p in itertools.combinations(faces, 2)
        if frozenset(p) not in opposite
    }
    vertices = tuple(
        frozenset(v)
        for v in itertools.product(("top", "bottom"), ("north", "south"), ("east", "west"))
    )
    return LabeledPolyhedron(faces, labels, vertices)


def _truncate_triangle(poly, tri):
    """Truncate the three vertices of a triangular face, which becomes a hexagon."""
    for vert in [v for v in poly.vertices if tri in v]:
        rest = "".join(sorted(vert - {tri}))
        poly = truncate(poly, vert, name=f"t{rest}{tri}")
    return poly


def two_blocks():
    """Two T_4 glued along the circuit 123.

    Faces 1, 2, 3 are shared, 4 is the fourth tetra face of the first block
    and 5 (a hexagon) the fourth tetra face of the second.
    """
    poly = block(4)
    poly = poly.relabel({f: ("5" if f == "t123" else f) for f in poly.faces})
    return _truncate_triangle(poly, "5")


def two_blocks_labeled(variant):
    """Two-block graph of the second figure family.

    ``variant`` 1 has 5 special circuits and no fully special block (kappa 32);
    variant 2 has a fully special first block plus 2 special circuits (kappa 56).
    """
    poly = two_blocks()
    if variant == 1:
        base, u1 = PI4, rad(3 / 8)
        u2 = {"15": rad(0.35), "25": rad(0.45), "35": rad(0.35)}
    elif variant == 2:
        base, u1 = PI3, PI3
        u2 = {"15": rad(0.3), "25": rad(0.4), "35": rad(0.3)}
    else:
        raise ValueError("variant is 1 or 2")
    labels = {"12": base, "23": base, "13": base, "14": u1, "24": u1, "34": u1}
    labels.update(u2)
    return tetra_labels(poly, labels)


def five_blocks(variant):
    """A central T_4 with a T_4 glued on each of its four truncation triangles.

    ``variant`` 1 makes every corner circuit affine (kappa 14 * 7^4);
    variant 2 makes the four internal circuits hyperbolic and the twelve
    outer corners affine (kappa 2^12 - 2).
    """
    poly = block(4)
    hexagons = {"t123": "5", "t124": "6", "t134": "7", "t234": "8"}
    poly = poly.relabel({f: hexagons.get(f, f) for f in poly.faces})
    for hexagon in ("5", "6", "7", "8"):
        poly = _truncate_triangle(poly, hexagon)
    if variant == 1:
        base, outer = PI3, PI3
    elif variant == 2:
        base, outer = PI4, rad(3 / 8)
    else:
        raise ValueError("variant is 1 or 2")
    labels = {a + b: base for a, b in itertools.combinations("1234", 2)}
    for hexagon, corner in zip("5678", ("123", "124", "134", "234")):
        for f in corner:
            labels[f + hexagon] = outer
    return tetra_labels(poly, labels)


def examples():
    """Every shipped example, keyed by file stem."""
    out = {
        "tetrahedron_pi3": block(0),
        "tetrahedron_pi4": block(0, PI4),
        "tetrahedron_two_opposite_right": tetra_labels(block(0), {"12": RIGHT, "34": RIGHT}),
        "tetrahedron_four_right": tetra_labels(
            block(0), {"12": RIGHT, "13": RIGHT, "14": RIGHT, "23": RIGHT}
        ),
        "prism_pi3": block(1),
        "prism_generic": prism((PI3, PI3, PI3), (PI3, PI3, PI3), (PI4, PI4, PI4)),
        "T2_pi3": block(2),
        "T3_pi3": block(3),
        "T4_pi3": block(4),
        "T4_pi4": block(4, PI4),
        "T4_right": block(4, RIGHT),
        "T4_opposite_right": tetra_labels(
            block(4, AngleLabel.pi_over_m(5)), {"12": RIGHT, "34": RIGHT}
        ),
        "fig1_kappa1": block(4, PI4),
        "fig1_kappa14": block(4, PI3),
        "fig2_kappa32": two_blocks_labeled(1),
        "fig2_kappa56": two_blocks_labeled(2),
        "fig3_kappa33614": five_blocks(1),
        "fig3_kappa4094": five_blocks(2),
        "exceptional_prism_2pi5": exceptional_prism(*(AngleLabel.from_radians(0.4 * math.pi),) * 3),
        "exceptional_prism_pi3": exceptional_prism(PI3, PI3, PI3),
        "exceptional_prism_pi4": exceptional_prism(PI4, PI4, PI4),
        "right_angle_prism": exceptional_prism(RIGHT, AngleLabel.pi_over_m(6), PI3),
        "cube": cube(),
    }
    # round-trip through validation so that every example is checked
    return {k: validate(v.to_json()) for k, v in out.items()}


def write_corpus(directory):
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for name, poly in examples().items():
        (directory / f"{name}.json").write_text(json.dumps(poly.to_json(), indent=2) + "\n")


if __name__ == "__main__":
    write_corpus(sys.argv[1] if len(sys.argv) > 1 else "corpus")
