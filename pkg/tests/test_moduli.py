import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mirrorpoly.corpus import PI3, RIGHT, block, rad, tetra_labels
from mirrorpoly.graph_model import AngleLabel, enumerate_three_circuits, three_circuit
from mirrorpoly.moduli import (
    ModuliPoint,
    classify_moduli,
    coordinate_schema,
    counts,
    dimension,
    interval,
    is_exceptional_prism,
    random_point,
)

# expected (variant, case, d, kappa) worked out by hand from the labels
EXPECTED = {
    "tetrahedron_pi3": ("Components", "1", 3, 1),
    "tetrahedron_two_opposite_right": ("Components", "1", 1, 1),
    "tetrahedron_four_right": ("Singleton", "2a", -1, None),
    "prism_pi3": ("Components", "1", 3, 2),
    "T4_pi3": ("Components", "1", 3, 14),
    "T4_pi4": ("Components", "1", 3, 1),
    "T4_right": ("Empty", "3b", -3, None),
    "exceptional_prism_2pi5": ("TwoPoints", "4c", 0, None),
    "exceptional_prism_pi3": ("Singleton", "4b", 0, None),
    "exceptional_prism_pi4": ("Empty", "4a", 0, None),
    "right_angle_prism": ("Singleton", "3a", -1, None),
}


@pytest.mark.parametrize("name", sorted(EXPECTED))
def test_classification_table(corpus, name):
    desc = classify_moduli(corpus[name])
    assert (desc.variant, desc.case, desc.d, desc.kappa) == EXPECTED[name]


def test_dimension_counts_non_right_edges():
    # T_4 has 18 edges, 12 of them on truncation triangles (order 2)
    assert dimension(block(4)) == 18 - 12 - 3
    assert dimension(tetra_labels(block(0), {"12": RIGHT})) == 5 - 3


def test_counts_on_blocks():
    assert counts(block(4)) == (4, 0)
    assert counts(block(4, RIGHT)) == (0, 4)


def test_interval_table():
    aff = three_circuit(block(1), ("1", "2", "3"))
    assert interval(aff).to_json() == {"kind": "outside", "r": 0.0}
    sph = three_circuit(block(1, rad(0.4)), ("1", "2", "3"))
    spec = interval(sph)
    assert spec.kind == "outside" and spec.r > 0
    assert spec.r + 1e-6 in spec and spec.r not in spec and 0.0 not in spec
    hyp = three_circuit(block(1, AngleLabel.pi_over_m(4)), ("1", "2", "3"))
    assert interval(hyp).kind == "reals"
    vertex = three_circuit(block(1), ("1", "2", "t123"))
    assert interval(vertex).kind == "zero"
    assert interval(three_circuit(block(1, RIGHT), ("1", "2", "3"))).kind == "empty"


def test_exceptional_prism_detection(corpus):
    assert is_exceptional_prism(corpus["exceptional_prism_pi3"]) == pytest.approx((math.pi / 3,) * 3)
    assert is_exceptional_prism(corpus["prism_pi3"]) is None


def test_schema_dimension_matches_d(corpus):
    for name, g in corpus.items():
        if name == "cube":
            continue
        desc = classify_moduli(g)
        if desc.variant == "Components":
            assert coordinate_schema(g).dimension() == desc.d, name


def test_three_right_angles_around_one_face():
    # Face 4 meets every other face at a right angle.  The circuit 123 is
    # right-angle free, so its R-invariant remains a free coordinate while
    # d(G) = 0.  The classification keeps the paper's answer (d = 0, one
    # component); the coordinate count records the extra parameter.
    g = tetra_labels(block(0), {"14": RIGHT, "24": RIGHT, "34": RIGHT})
    desc = classify_moduli(g)
    assert (desc.variant, desc.d, desc.kappa) == ("Components", 0, 1)
    assert coordinate_schema(g).dimension() == 1


LABELS = [RIGHT, PI3, AngleLabel.pi_over_m(4), AngleLabel.pi_over_m(5), rad(0.4), AngleLabel.pi_over_m(6)]


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 4), st.lists(st.integers(0, len(LABELS) - 1), min_size=18, max_size=18))
def test_classification_is_exhaustive(i, picks):
    base = block(i)
    g = base.with_labels({tuple(e): LABELS[k] for e, k in zip(base.edges, picks)})
    desc = classify_moduli(g)
    assert desc.variant in {"Empty", "Singleton", "TwoPoints", "Components"}
    if desc.variant == "Components":
        assert desc.d >= 0
        assert desc.kappa == 1 or desc.kappa % 2 == 0


def test_point_json_round_trip_and_orientation(corpus):
    g = corpus["fig2_kappa32"]
    schema = coordinate_schema(g)
    point = random_point(schema, np.random.default_rng(0))
    raw = point.to_json(schema)
    again = ModuliPoint.from_json(raw, schema)
    assert again.c3 == point.c3 and again.gluing == point.gluing
    # the reversed circuit carries the opposite value
    item = raw["C3"][0]
    flipped = {"C3": [{"circuit": item["circuit"][::-1], "value": item["value"]}] + raw["C3"][1:],
               "C3prime": raw["C3prime"]}
    back = ModuliPoint.from_json(flipped, schema)
    key = frozenset(item["circuit"])
    assert back.c3[key] == -point.c3[key]


def test_random_points_are_admissible(corpus):
    rng = np.random.default_rng(1)
    for name in ("T4_pi3", "fig2_kappa56", "fig3_kappa33614", "prism_generic"):
        schema = coordinate_schema(corpus[name])
        for _ in range(20):
            assert schema.violations(random_point(schema, rng)) == []


def test_violations_report_interval_and_sum(corpus):
    schema = coordinate_schema(corpus["T4_pi3"])
    point = random_point(schema, np.random.default_rng(2))
    key = next(iter(point.c3))
    point.c3[key] = 0.0
    found = schema.violations(point)
    assert any("interval" in v for v in found) and any("sum-zero" in v for v in found)


def test_schema_records_vertex_circuits_with_zero_interval():
    g = tetra_labels(block(1, PI3), {})
    schema = coordinate_schema(g)
    keys = {c.key for c in enumerate_three_circuits(g) if not c.right_angle}
    assert set(schema.c3) == keys
