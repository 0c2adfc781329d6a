"""Labeled valence-3 polyhedral graphs, their 3-circuits and 4-circuits.

A polyhedron is described by its faces (the order of the faces is the
marking), its edges (pairs of adjacent faces carrying a dihedral angle) and
its vertices (triples of faces).
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import networkx as nx

#: Tolerance used for angle comparisons when some label is given in radians.
ANGLE_TOL = 1e-12

_EXACT_MU = {2: 0.0, 3: 1.0, 4: 2.0, 6: 3.0}


class ValidationError(ValueError):
    """Raised when a raw graph description violates a structural invariant.

    The list of violated invariants is available as ``errors``.
    """

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class Geometry(str, Enum):
    SPHERICAL = "spherical"
    AFFINE = "affine"
    HYPERBOLIC = "hyperbolic"


@dataclass(frozen=True)
class AngleLabel:
    """Dihedral angle of an edge, either ``pi/m`` or an explicit value in radians.

    Use the constructors :meth:`pi_over_m`, :meth:`from_radians` and
    :meth:`right` rather than the raw fields.  A label given in radians
    within ``ANGLE_TOL`` of ``pi/2`` is normalized to ``pi/2`` exactly.
    """

    m: int | None = None
    radians: float | None = None

    @classmethod
    def pi_over_m(cls, m):
        m = int(m)
        if m < 2:
            raise ValueError(f"pi/m label needs m >= 2, got {m}")
        return cls(m=m)

    @classmethod
    def from_radians(cls, theta):
        theta = float(theta)
        if not (0.0 < theta <= math.pi / 2 + ANGLE_TOL):
            raise ValueError(f"dihedral angle must lie in (0, pi/2], got {theta}")
        if abs(theta - math.pi / 2) <= ANGLE_TOL:
            return cls(m=2)
        return cls(radians=theta)

    @classmethod
    def right(cls):
        return cls(m=2)

    @property
    def theta(self):
        if self.m is not None:
            return math.pi / self.m
        return self.radians

    @property
    def mu(self):
        """``4 cos^2(theta)``, exact for the common orders 2, 3, 4 and 6."""
        if self.m is not None and self.m in _EXACT_MU:
            return _EXACT_MU[self.m]
        return 4.0 * math.cos(self.theta) ** 2

    @property
    def right_angle(self):
        return self.m == 2

    @property
    def fraction(self):
        """``theta / pi`` as an exact fraction, or None for radian labels."""
        return Fraction(1, self.m) if self.m is not None else None

    def to_json(self):
        if self.m == 2:
            return "right"
        if self.m is not None:
            return {"pi_over_m": self.m}
        return {"radians": self.radians}

    @classmethod
    def from_json(cls, raw):
        if raw == "right":
            return cls.right()
        if isinstance(raw, Mapping):
            if "pi_over_m" in raw:
                m = raw["pi_over_m"]
                if isinstance(m, bool) or not isinstance(m, int):
                    raise ValueError(f"pi_over_m must be an integer, got {m!r}")
                return cls.pi_over_m(m)
            if "radians" in raw:
                return cls.from_radians(raw["radians"])
        raise ValueError(f"unrecognized angle label {raw!r}")

    def __repr__(self):
        if self.m is not None:
            return f"AngleLabel(pi/{self.m})"
        return f"AngleLabel({self.radians!r} rad)"


def angle_geometry(labels, k):
    """Compare the angle sum of a k-circuit with ``(k - 2) pi``.

    Exact rational arithmetic is used when every label is of the form pi/m.
    """
    fractions = [lab.fraction for lab in labels]
    if all(f is not None for f in fractions):
        diff = sum(fractions) - (k - 2)
        sign = (diff > 0) - (diff < 0)
    else:
        diff = sum(lab.theta for lab in labels) - (k - 2) * math.pi
        sign = 0 if abs(diff) <= ANGLE_TOL else (1 if diff > 0 else -1)
    return {1: Geometry.SPHERICAL, 0: Geometry.AFFINE, -1: Geometry.HYPERBOLIC}[sign]


def _pair(a, b):
    return frozenset((a, b))


@dataclass(frozen=True, eq=False)
class LabeledPolyhedron:
    """A labeled valence-3 polyhedral graph.

    Parameters
    ----------
    faces : tuple of str
        Face identifiers; their order is the marking.
    labels : mapping
        Maps each edge, a ``frozenset`` of two faces, to its AngleLabel.
    vertices : tuple of frozenset
        Each vertex is the set of the three faces containing it.

    Instances are normally produced by :func:`validate`.
    """

    faces: tuple
    labels: Mapping
    vertices: tuple

    @cached_property
    def rank(self):
        return {f: i for i, f in enumerate(self.faces)}

    @property
    def f(self):
        return len(self.faces)

    @property
    def e(self):
        return len(self.labels)

    @property
    def v(self):
        return len(self.vertices)

    @cached_property
    def edges(self):
        """Edges as face pairs sorted by marking, in marking order."""
        pairs = [tuple(self.sort(e)) for e in self.labels]
        return tuple(sorted(pairs, key=lambda p: (self.rank[p[0]], self.rank[p[1]])))

    def sort(self, faces):
        return sorted(faces, key=self.rank.__getitem__)

    def adjacent(self, a, b):
        return _pair(a, b) in self.labels

    def label(self, a, b):
        return self.labels[_pair(a, b)]

    def mu(self, a, b):
        """``mu`` of the edge between a and b, or None if they are not adjacent."""
        lab = self.labels.get(_pair(a, b))
        return None if lab is None else lab.mu

    def is_order_two(self, a, b):
        lab = self.labels.get(_pair(a, b))
        return lab is not None and lab.right_angle

    @cached_property
    def neighbors(self):
        out = {f: set() for f in self.faces}
        for e in self.labels:
            a, b = tuple(e)
            out[a].add(b)
            out[b].add(a)
        return {f: frozenset(n) for f, n in out.items()}

    @cached_property
    def endpoints(self):
        """Map from each edge to the two vertices at its ends."""
        out = {e: [] for e in self.labels}
        for vert in self.vertices:
            for a, b in itertools.combinations(vert, 2):
                out.setdefault(_pair(a, b), []).append(vert)
        return {e: tuple(vs) for e, vs in out.items()}

    def face_size(self, face):
        return len(self.neighbors[face])

    def triangles(self):
        return [f for f in self.faces if self.face_size(f) == 3]

    def is_tetrahedron(self):
        return self.f == 4

    @cached_property
    def dual_graph(self):
        g = nx.Graph()
        g.add_nodes_from(self.faces)
        g.add_edges_from(tuple(e) for e in self.labels)
        return g

    def sides(self, faces):
        """Connected components of the faces left after removing ``faces``."""
        sub = self.dual_graph.subgraph(set(self.faces) - set(faces))
        comps = [frozenset(c) for c in nx.connected_components(sub)]
        return sorted(comps, key=lambda c: min(self.rank[x] for x in c))

    @cached_property
    def rotation(self):
        """A coherent cyclic orientation of every vertex.

        Two vertices sharing an edge list its two faces in opposite cyclic
        directions; this is an orientation of the dual triangulation of the
        sphere.  The first vertex is oriented by marking order.
        """
        first = self.vertices[0]
        orient = {first: tuple(self.sort(first))}
        queue = deque([first])
        while queue:
            vert = queue.popleft()
            a, b, c = orient[vert]
            for x, y in ((a, b), (b, c), (c, a)):
                for other in self.endpoints[_pair(x, y)]:
                    if other == vert:
                        continue
                    (z,) = other - {x, y}
                    wanted = (y, x, z)
                    if other in orient:
                        if not _same_cycle(orient[other], wanted):
                            raise ValidationError(["surface is not orientable"])
                    else:
                        orient[other] = wanted
                        queue.append(other)
        return orient

    def orient_circuit(self, faces, region=frozenset()):
        """Orient a 3-circuit so that ``region`` lies on its left.

        ``region`` is a side of the circuit (a set of faces); an empty region
        stands for the vertex side of a circuit around a vertex.  The
        returned triple goes counterclockwise around the region.
        """
        r, s, t = self.sort(faces)
        region = frozenset(region)
        for vert in self.endpoints[_pair(r, s)]:
            (x,) = vert - {r, s}
            if (x in region) or (not region and x == t):
                return (r, s, t) if _has_arc(self.rotation[vert], r, s) else (s, r, t)
        raise ValueError(f"{region!r} is not a side of circuit {faces!r}")

    def with_labels(self, updates):
        """Copy with some edge labels replaced; keys are face pairs."""
        labels = dict(self.labels)
        for pair, lab in updates.items():
            key = _pair(*pair)
            if key not in labels:
                raise KeyError(f"faces {tuple(pair)!r} are not adjacent")
            labels[key] = lab if isinstance(lab, AngleLabel) else AngleLabel.from_json(lab)
        return LabeledPolyhedron(self.faces, labels, self.vertices)

    def relabel(self, mapping, order=None):
        """Rename faces through ``mapping``; ``order`` optionally gives the new marking."""
        faces = tuple(order) if order is not None else tuple(mapping[f] for f in self.faces)
        labels = {_pair(*(mapping[x] for x in e)): lab for e, lab in self.labels.items()}
        vertices = tuple(frozenset(mapping[x] for x in v) for v in self.vertices)
        return LabeledPolyhedron(faces, labels, vertices)

    def to_json(self):
        return {
            "faces": list(self.faces),
            "edges": [{"f": list(p), "angle": self.label(*p).to_json()} for p in self.edges],
            "vertices": [self.sort(v) for v in self.vertices],
        }

    @classmethod
    def from_json(cls, raw):
        return validate(raw)


def _has_arc(cycle, x, y):
    i = cycle.index(x)
    return cycle[(i + 1) % len(cycle)] == y


def _same_cycle(c1, c2):
    i = c1.index(c2[0])
    return all(c1[(i + k) % 3] == c2[k] for k in range(3))


def validate(raw):
    """Check a raw graph description and build a LabeledPolyhedron.

    Raises
    ------
    ValidationError
        With the full list of violated invariants.
    """
    errors = []
    try:
        faces = [str(f) for f in raw["faces"]]
        raw_edges = list(raw["edges"])
        raw_vertices = [list(v) for v in raw["vertices"]]
    except (KeyError, TypeError) as exc:
        raise ValidationError([f"missing or malformed field: {exc}"]) from None

    if len(set(faces)) != len(faces):
        errors.append("duplicate face identifier")
    known = set(faces)

    labels = {}
    for item in raw_edges:
        try:
            a, b = (str(x) for x in item["f"])
            lab = AngleLabel.from_json(item["angle"])
        except (KeyError, TypeError, ValueError) as exc:
            errors.append(f"malformed edge {item!r}: {exc}")
            continue
        if a == b:
            errors.append(f"edge joins face {a!r} to itself")
            continue
        if a not in known or b not in known:
            errors.append(f"edge {a!r}-{b!r} uses an unknown face")
            continue
        key = _pair(a, b)
        if key in labels:
            errors.append(f"duplicate face-pair edge {a!r}-{b!r}")
            continue
        labels[key] = lab

    vertices = []
    for item in raw_vertices:
        names = [str(x) for x in item]
        vert = frozenset(names)
        if len(names) != 3 or len(vert) != 3:
            errors.append(f"vertex not a face triple: {item!r}")
            continue
        if not vert <= known:
            errors.append(f"vertex {item!r} uses an unknown face")
            continue
        missing = [p for p in itertools.combinations(sorted(vert), 2) if _pair(*p) not in labels]
        if missing:
            errors.append(f"vertex {item!r} has non-adjacent faces {missing}")
            continue
        if vert in vertices:
            errors.append(f"duplicate vertex {item!r}")
            continue
        vertices.append(vert)

    if errors:
        raise ValidationError(errors)

    count = {key: 0 for key in labels}
    for vert in vertices:
        for p in itertools.combinations(vert, 2):
            count[_pair(*p)] += 1
    for key, n in count.items():
        if n != 2:
            a, b = sorted(key)
            errors.append(f"edge {a!r}-{b!r} has {n} endpoints instead of 2")

    incident = {f: 0 for f in faces}
    for key in labels:
        for x in key:
            incident[x] += 1
    for f, n in incident.items():
        if n < 3:
            errors.append(f"dangling face {f!r} with {n} edges")

    f, e, v = len(faces), len(labels), len(vertices)
    if v - e + f != 2:
        errors.append(f"Euler characteristic v - e + f = {v - e + f}, expected 2")
    if e % 3 != 0 or 3 * v != 2 * e:
        errors.append(f"valence-3 identity v = 2e/3 fails (v={v}, e={e})")

    if not errors:
        # the edges around each face must close up into a single cycle
        for face in faces:
            ring = nx.Graph()
            for vert in vertices:
                if face in vert:
                    ring.add_edge(*(vert - {face}))
            nbrs = {x for key in labels if face in key for x in key} - {face}
            if set(ring.nodes) != nbrs or not (
                nx.is_connected(ring) and all(d == 2 for _, d in ring.degree)
            ):
                errors.append(f"edges around face {face!r} do not form a single cycle")

    if errors:
        raise ValidationError(errors)
    poly = LabeledPolyhedron(tuple(faces), labels, tuple(vertices))
    poly.rotation  # raises on non-orientable input
    return poly


@dataclass(frozen=True)
class ThreeCircuit:
    """A triple of pairwise adjacent faces, with its derived data.

    ``faces`` are listed in marking order; ``orientation`` optionally holds a
    cyclic order of the same faces.
    """

    faces: tuple
    labels: tuple
    prismatic: bool
    combinatorially_essential: bool
    essential: bool
    orientation: tuple | None = None

    @property
    def key(self):
        return frozenset(self.faces)

    @property
    def right_angle(self):
        return any(lab.right_angle for lab in self.labels)

    @property
    def geometry(self):
        return angle_geometry(self.labels, 3)

    @property
    def sigma(self):
        return sum(lab.mu for lab in self.labels)

    @property
    def p(self):
        return math.sqrt(math.prod(lab.mu for lab in self.labels))

    @property
    def special(self):
        return self.prismatic and not self.right_angle and self.geometry != Geometry.HYPERBOLIC

    @property
    def r_gamma(self):
        """Threshold ``r_Gamma``; None unless affine or spherical without right angle."""
        if self.right_angle or self.geometry == Geometry.HYPERBOLIC:
            return None
        if self.geometry == Geometry.AFFINE:
            return 0.0
        return r_threshold(self.sigma, self.p)

    def oriented(self, orientation):
        if frozenset(orientation) != self.key:
            raise ValueError("orientation must use the circuit's faces")
        return replace(self, orientation=tuple(orientation))


def r_threshold(sigma, p):
    """``2 log((4 - sigma + sqrt((4 - sigma)^2 - p^2)) / p)``."""
    gap = 4.0 - sigma
    disc = max(gap * gap - p * p, 0.0)
    return 2.0 * math.log((gap + math.sqrt(disc)) / p)


def _circuit(poly, faces):
    faces = tuple(poly.sort(faces))
    r, s, t = faces
    labels = (poly.label(r, s), poly.label(s, t), poly.label(t, r))
    ends = [v for pair in ((r, s), (s, t), (t, r)) for v in poly.endpoints[_pair(*pair)]]
    prismatic = len(set(ends)) == 6
    comb = ess = False
    if prismatic:
        sides = poly.sides(faces)
        lone = [next(iter(c)) for c in sides if len(c) == 1]
        comb = not any(poly.face_size(x) == 3 for x in lone)
        ess = not any(
            poly.face_size(x) == 3 and all(poly.is_order_two(x, y) for y in faces) for x in lone
        )
    return ThreeCircuit(faces, labels, prismatic, comb, ess)


def enumerate_three_circuits(poly):
    """All 3-circuits of ``poly``, each unordered triple once, in marking order."""
    out = []
    for a, b, c in itertools.combinations(poly.faces, 3):
        if poly.adjacent(a, b) and poly.adjacent(b, c) and poly.adjacent(a, c):
            out.append(_circuit(poly, (a, b, c)))
    return out


def three_circuit(poly, faces):
    """The ThreeCircuit on the given faces."""
    faces = tuple(faces)
    for a, b in itertools.combinations(faces, 2):
        if not poly.adjacent(a, b):
            raise ValueError(f"faces {faces!r} are not pairwise adjacent")
    return _circuit(poly, faces)


@dataclass(frozen=True)
class FourCircuit:
    """A cyclic sequence of four faces with consecutive adjacency."""

    faces: tuple
    labels: tuple
    prismatic: bool

    @property
    def geometry(self):
        return angle_geometry(self.labels, 4)

    @property
    def right_angle(self):
        return any(lab.right_angle for lab in self.labels)


def _canonical_cycle(poly, cycle):
    k = len(cycle)
    i = min(range(k), key=lambda j: poly.rank[cycle[j]])
    fwd = tuple(cycle[(i + j) % k] for j in range(k))
    bwd = tuple(cycle[(i - j) % k] for j in range(k))
    return min(fwd, bwd, key=lambda c: [poly.rank[x] for x in c])


def enumerate_four_circuits(poly, prismatic_only=False):
    """4-circuits of ``poly``, each once up to rotation and reflection."""
    seen = {}
    for quad in itertools.combinations(poly.faces, 4):
        a = quad[0]
        for rest in itertools.permutations(quad[1:]):
            cycle = (a,) + rest
            pairs = [(cycle[i], cycle[(i + 1) % 4]) for i in range(4)]
            if not all(poly.adjacent(*p) for p in pairs):
                continue
            canon = _canonical_cycle(poly, cycle)
            if canon in seen:
                continue
            ends = [v for p in pairs for v in poly.endpoints[_pair(*p)]]
            prismatic = len(set(ends)) == 8
            labels = tuple(poly.label(canon[i], canon[(i + 1) % 4]) for i in range(4))
            seen[canon] = FourCircuit(canon, labels, prismatic)
    out = list(seen.values())
    if prismatic_only:
        out = [c for c in out if c.prismatic]
    return out


def enumerate_prismatic_four_circuits(poly):
    return enumerate_four_circuits(poly, prismatic_only=True)


def exceptional_prism_angles(poly):
    """Lateral angles of an exceptional prism, or None.

    An exceptional prism is a triangular prism whose two triangular faces
    carry only order-2 edges.  The three lateral labels are returned in the
    cyclic order of the lateral faces, starting from the first marked one.
    """
    if poly.f != 5:
        return None
    tris = poly.triangles()
    if len(tris) != 2 or poly.adjacent(*tris):
        return None
    lateral = [f for f in poly.faces if f not in tris]
    for tri in tris:
        if not all(poly.is_order_two(tri, x) for x in poly.neighbors[tri]):
            return None
    a, b, c = lateral
    return (poly.label(a, b), poly.label(b, c), poly.label(c, a))


@dataclass(frozen=True)
class AndreevReport:
    """Outcome of the four combinatorial conditions; ``failures`` names offenders."""

    conditions: dict = field(default_factory=dict)
    failures: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(self.conditions.values())

    def to_json(self):
        return {
            "passed": self.passed,
            "conditions": [
                {"name": k, "passed": v, "failures": self.failures.get(k, [])}
                for k, v in self.conditions.items()
            ],
        }


def andreev_check(poly):
    """Evaluate the combinatorial hypotheses of Andreev's theorem.

    Raises
    ------
    ValueError
        If ``poly`` is a tetrahedron, which the statement excludes.
    """
    if poly.is_tetrahedron():
        raise ValueError("Andreev statement excludes tetrahedra")
    circuits = enumerate_three_circuits(poly)
    bad_vertex = [list(c.faces) for c in circuits if not c.prismatic and c.geometry != Geometry.SPHERICAL]
    bad_prism3 = [list(c.faces) for c in circuits if c.prismatic and c.geometry != Geometry.HYPERBOLIC]
    bad_prism4 = [
        list(c.faces)
        for c in enumerate_prismatic_four_circuits(poly)
        if c.geometry != Geometry.HYPERBOLIC
    ]
    exceptional = exceptional_prism_angles(poly) is not None
    names = (
        "non-prismatic 3-circuits spherical",
        "prismatic 3-circuits hyperbolic",
        "prismatic 4-circuits hyperbolic",
        "not an exceptional prism",
    )
    fails = (bad_vertex, bad_prism3, bad_prism4, [list(poly.faces)] if exceptional else [])
    return AndreevReport(
        conditions={n: not f for n, f in zip(names, fails)},
        failures={n: f for n, f in zip(names, fails) if f},
    )
