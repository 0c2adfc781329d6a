import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mirrorpoly.corpus import PI3, PI4, RIGHT, block, cube, exceptional_prism, prism, rad
from mirrorpoly.graph_model import (
    AngleLabel,
    Geometry,
    ValidationError,
    andreev_check,
    angle_geometry,
    enumerate_prismatic_four_circuits,
    enumerate_three_circuits,
    r_threshold,
    three_circuit,
    validate,
)


class TestAngleLabel:
    @pytest.mark.parametrize("m, mu", [(2, 0), (3, 1), (4, 2), (6, 3)])
    def test_exact_mu_for_crystallographic_angles(self, m, mu):
        # 4 cos^2(pi/m) by hand: 0, 1, 2, 3
        assert AngleLabel.pi_over_m(m).mu == mu

    def test_generic_mu_matches_cosine(self):
        theta = 0.37 * math.pi
        assert AngleLabel.from_radians(theta).mu == pytest.approx(4 * math.cos(theta) ** 2, abs=1e-15)

    def test_half_pi_in_radians_is_a_right_angle(self):
        lab = AngleLabel.from_radians(math.pi / 2)
        assert lab.right_angle and lab.mu == 0

    def test_json_round_trip(self):
        for lab in (PI3, RIGHT, rad(0.41)):
            assert AngleLabel.from_json(lab.to_json()).theta == pytest.approx(lab.theta)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            AngleLabel.from_radians(2.0)


class TestGeometry:
    def test_three_pi_over_three_is_affine(self):
        assert angle_geometry((PI3, PI3, PI3), 3) == Geometry.AFFINE

    def test_classification_by_angle_sum(self):
        assert angle_geometry((PI4, PI4, PI4), 3) == Geometry.HYPERBOLIC
        assert angle_geometry((rad(0.4),) * 3, 3) == Geometry.SPHERICAL
        # four right angles sum to exactly 2 pi
        assert angle_geometry((RIGHT,) * 4, 4) == Geometry.AFFINE


class TestValidate:
    def test_corpus_round_trips(self, corpus):
        for g in corpus.values():
            again = validate(g.to_json())
            assert again.faces == g.faces
            assert set(again.vertices) == set(g.vertices)
            assert {k: v.mu for k, v in again.labels.items()} == {k: v.mu for k, v in g.labels.items()}

    def _tetra_raw(self):
        return block(0).to_json()

    def test_missing_field(self):
        with pytest.raises(ValidationError) as err:
            validate({"faces": ["1"]})
        assert err.value.errors

    def test_duplicate_face(self):
        raw = self._tetra_raw()
        raw["faces"].append("1")
        with pytest.raises(ValidationError, match="duplicate face"):
            validate(raw)

    def test_unknown_face_in_edge(self):
        raw = self._tetra_raw()
        raw["edges"].append({"f": ["1", "9"], "angle": "right"})
        with pytest.raises(ValidationError, match="unknown face"):
            validate(raw)

    def test_vertex_not_a_triple(self):
        raw = self._tetra_raw()
        raw["vertices"][0] = ["1", "2"]
        with pytest.raises(ValidationError, match="not a face triple"):
            validate(raw)

    def test_missing_vertex_breaks_euler(self):
        raw = self._tetra_raw()
        raw["vertices"].pop()
        with pytest.raises(ValidationError) as err:
            validate(raw)
        assert any("Euler" in e or "endpoints" in e for e in err.value.errors)

    def test_self_edge(self):
        raw = self._tetra_raw()
        raw["edges"].append({"f": ["2", "2"], "angle": "right"})
        with pytest.raises(ValidationError, match="itself"):
            validate(raw)


def _pairwise_adjacent_triples(g):
    """Independent oracle: all face triples whose three pairs are edges."""
    return {
        frozenset(t)
        for t in itertools.combinations(g.faces, 3)
        if all(frozenset(p) in g.labels for p in itertools.combinations(t, 2))
    }


class TestCircuits:
    def test_enumeration_matches_brute_force(self, corpus):
        for g in corpus.values():
            assert {c.key for c in enumerate_three_circuits(g)} == _pairwise_adjacent_triples(g)

    def test_prismatic_iff_not_a_vertex(self, corpus):
        for g in corpus.values():
            for c in enumerate_three_circuits(g):
                assert c.prismatic == (c.key not in set(g.vertices))

    def test_block_circuit_counts(self):
        # T_i: 4 tetra corners plus 3 vertex circuits per truncation triangle
        for i in range(5):
            circuits = enumerate_three_circuits(block(i))
            assert len(circuits) == 4 + 3 * i
            assert sum(c.prismatic for c in circuits) == i

    def test_essential_flags_on_prism(self):
        g = block(1)
        c = three_circuit(g, ("1", "2", "3"))
        # the circuit bounds triangles, and t123 carries only right angles
        assert c.prismatic and not c.combinatorially_essential and not c.essential
        g2 = prism((PI3, PI3, PI3), (PI3, PI3, PI3), (PI4, PI4, PI4))
        c2 = three_circuit(g2, ("1", "2", "3"))
        assert not c2.combinatorially_essential and c2.essential
        # a truncated corner always bounds its truncation triangle
        assert three_circuit(block(2), ("1", "2", "4")).combinatorially_essential is False
        assert three_circuit(block(4), ("1", "2", "3")).combinatorially_essential is False

    def test_r_threshold_zeroes_the_determinant(self):
        # closed-form determinant p e^{R/2} + p e^{-R/2} + 2 (Sigma - 4) vanishes at R = r
        for theta in (0.4, 0.45, 0.36):
            mu = 4 * math.cos(theta * math.pi) ** 2
            sigma, p = 3 * mu, mu ** 1.5
            r = r_threshold(sigma, p)
            det = p * math.exp(r / 2) + p * math.exp(-r / 2) + 2 * (sigma - 4)
            assert abs(det) < 1e-12
            assert r > 0

    def test_affine_threshold_is_zero(self):
        c = three_circuit(block(1), ("1", "2", "3"))
        assert c.geometry == Geometry.AFFINE and c.r_gamma == 0.0

    def test_cube_prismatic_four_circuits(self):
        # the three equators
        assert len(enumerate_prismatic_four_circuits(cube())) == 3

    def test_non_adjacent_triple_rejected(self):
        with pytest.raises(ValueError):
            three_circuit(cube(), ("top", "bottom", "east"))

    @settings(max_examples=30, deadline=None)
    @given(st.permutations(["a", "b", "c", "d", "e", "f", "g", "h"]))
    def test_relabeling_preserves_circuits(self, names):
        g = block(4)
        mapping = dict(zip(g.faces, names))
        h = g.relabel(mapping)
        assert {frozenset(mapping[f] for f in c.key) for c in enumerate_three_circuits(g)} == {
            c.key for c in enumerate_three_circuits(h)
        }


class TestRotation:
    def test_orient_circuit_keeps_region_on_the_left(self):
        g = block(1)
        left = g.orient_circuit(("1", "2", "3"), {"4"})
        right = g.orient_circuit(("1", "2", "3"), {"t123"})
        # opposite sides give opposite cyclic orders
        i = right.index(left[0])
        assert tuple(right[(i - k) % 3] for k in range(3)) == left


class TestAndreev:
    def test_tetrahedron_excluded(self):
        with pytest.raises(ValueError):
            andreev_check(block(0))

    def test_right_angled_cube_fails_on_equators(self):
        rep = andreev_check(cube())
        assert not rep.passed
        assert not rep.conditions["prismatic 4-circuits hyperbolic"]
        assert rep.conditions["non-prismatic 3-circuits spherical"]

    def test_hyperbolic_prism_passes(self):
        # lateral pi/4 (prismatic circuit hyperbolic); every vertex sums above pi
        rep = andreev_check(prism((PI4,) * 3, (RIGHT,) * 3, (rad(0.4),) * 3))
        assert rep.passed

    def test_exceptional_prism_fails_last_condition(self):
        rep = andreev_check(exceptional_prism(PI4, PI4, PI4))
        assert not rep.conditions["not an exceptional prism"]


def test_fraction_exposed_for_pi_over_m():
    assert PI3.fraction == Fraction(1, 3)
