"""Classification of the moduli space of mirror polyhedra realizing a labeled graph.

The answer is one of Empty, Singleton, TwoPoints or kappa copies of R^d;
in the last case :func:`coordinate_schema` describes the coordinates
(R-invariants of 3-circuits and 4-circuits plus gluing parameters) and the
region they range over.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import networkx as nx
import numpy as np

from .ecimahedron import circuit_side, decompose
from .graph_model import (
    Geometry,
    angle_geometry,
    enumerate_three_circuits,
    exceptional_prism_angles,
)
from .orientation import kappa as forest_kappa


def dimension(graph):
    """``d(G) = e_+ - 3`` where e_+ counts the edges not of order 2."""
    return sum(1 for lab in graph.labels.values() if not lab.right_angle) - 3


def counts(graph):
    """``(n, m)``: affine or spherical prismatic circuits without / with a right angle."""
    n = m = 0
    for c in enumerate_three_circuits(graph):
        if c.prismatic and c.geometry != Geometry.HYPERBOLIC:
            if c.right_angle:
                m += 1
            else:
                n += 1
    return n, m


@dataclass(frozen=True)
class IntervalSpec:
    """Allowed values of R on a circuit: ``empty``, ``zero``, ``reals`` or ``outside``.

    ``outside`` stands for R minus the closed segment [-r, r].
    """

    kind: str
    r: float | None = None

    def __contains__(self, x):
        if self.kind == "empty":
            return False
        if self.kind == "zero":
            return x == 0
        if self.kind == "reals":
            return True
        return abs(x) > self.r

    def to_json(self):
        out = {"kind": self.kind}
        if self.r is not None:
            out["r"] = self.r
        return out


def interval(circuit):
    """The interval table: where R_Gamma may range for a circuit of a realizable graph."""
    curved = circuit.geometry != Geometry.HYPERBOLIC
    if circuit.right_angle:
        if curved and circuit.prismatic:
            return IntervalSpec("empty")
        return IntervalSpec("zero")
    if curved and circuit.prismatic:
        return IntervalSpec("outside", circuit.r_gamma)
    return IntervalSpec("reals")


def is_exceptional_prism(graph):
    """Lateral angles (in radians) of an exceptional prism, or None."""
    labs = exceptional_prism_angles(graph)
    return None if labs is None else tuple(lab.theta for lab in labs)


@dataclass(frozen=True)
class ModuliDescription:
    """Answer of the classification: ``variant`` with the theorem case that fired."""

    variant: str
    case: str
    d: int
    n: int
    m: int
    kappa: int | None = None

    def to_json(self):
        out = {"case": self.case, "variant": self.variant, "d": self.d, "n": self.n, "m": self.m}
        if self.kappa is not None:
            out["kappa"] = self.kappa
        return out


def _sums_to_half_pi(a, b):
    fa, fb = a.fraction, b.fraction
    if fa is not None and fb is not None:
        return fa + fb == Fraction(1, 2)
    return abs(a.theta + b.theta - math.pi / 2) <= 1e-12


def classify_moduli(graph, forest=None):
    """Decide the shape of the moduli space.

    Raises
    ------
    NotEcimahedron
        If the graph does not decompose into fundamental blocks.
    """
    forest = forest or decompose(graph)
    d = dimension(graph)
    n, m = counts(graph)
    prism = exceptional_prism_angles(graph)
    if prism is not None and not any(lab.right_angle for lab in prism):
        geom = angle_geometry(prism, 3)
        variant, case = {
            Geometry.HYPERBOLIC: ("Empty", "4a"),
            Geometry.AFFINE: ("Singleton", "4b"),
            Geometry.SPHERICAL: ("TwoPoints", "4c"),
        }[geom]
        return ModuliDescription(variant, case, d, n, m)
    if m > 0:
        if prism is not None and _is_complementary_right_prism(prism):
            return ModuliDescription("Singleton", "3a", d, n, m)
        return ModuliDescription("Empty", "3b", d, n, m)
    if d < 0:
        if graph.is_tetrahedron():
            return ModuliDescription("Singleton", "2a", d, n, m)
        if prism is not None and sum(lab.right_angle for lab in prism) == 1:
            if angle_geometry(prism, 3) == Geometry.HYPERBOLIC:
                return ModuliDescription("Empty", "2b", d, n, m)
        raise ValueError("no case of the classification applies (d < 0)")
    return ModuliDescription("Components", "1", d, n, m, forest_kappa(forest))


def _is_complementary_right_prism(prism):
    rights = [lab for lab in prism if lab.right_angle]
    if len(rights) != 1:
        return False
    a, b = [lab for lab in prism if not lab.right_angle]
    return _sums_to_half_pi(a, b)


# --------------------------------------------------------------------------
# coordinates


@dataclass(frozen=True)
class C4Entry:
    block: int
    cycle: tuple


@dataclass(frozen=True)
class GluingEntry:
    """An essential circuit with its face sequence ``(left, s, ..., right)``.

    Usually a triple; when no triple avoids order-2 edges the middle part
    runs through two or three circuit faces.
    """

    circuit: tuple
    triple: tuple
    left_block: int
    right_block: int


@dataclass(frozen=True, eq=False)
class CoordinateSchema:
    """Coordinates on the moduli space of a graph in case 1 of the classification.

    ``c3`` maps each right-angle-free 3-circuit key to its sink-source
    orientation, ``c4`` lists the 4-circuits of blocks whose tetrahedron has
    two opposite order-2 edges, ``gluing`` the essential circuits with their
    face triples.  ``constraints`` lists, for each valence-4 node of F_G, the
    four circuit keys whose R-invariants sum to zero.
    """

    graph: object
    forest: object
    c3: dict
    intervals: dict
    c4: tuple
    gluing: tuple
    constraints: tuple

    def dimension(self):
        """Dimension of the coordinate space computed from the linear constraints."""
        keys = list(self.c3)
        if self.constraints:
            index = {k: i for i, k in enumerate(keys)}
            mat = np.zeros((len(self.constraints), len(keys)))
            for row, cons in enumerate(self.constraints):
                for k in cons:
                    mat[row, index[k]] = 1.0
            rank = np.linalg.matrix_rank(mat)
        else:
            rank = 0
        return len(keys) - rank + len(self.c4) + len(self.gluing)

    def violations(self, point, tol=1e-9):
        """Reasons why ``point`` is not an admissible coordinate vector."""
        out = []
        if set(point.c3) != set(self.c3):
            out.append("C3 values do not match the 3-circuits of the schema")
            return out
        if set(point.c4) != {e.block for e in self.c4}:
            out.append("C4 values do not match the schema")
        if set(point.gluing) != {frozenset(e.circuit) for e in self.gluing}:
            out.append("gluing values do not match the schema")
        for key, x in point.c3.items():
            spec = self.intervals[key]
            if x not in spec:
                out.append(f"interval violation on {list(self.c3[key])}: {x} not in {spec.to_json()}")
        for cons in self.constraints:
            total = sum(point.c3[k] for k in cons)
            if abs(total) > tol:
                names = [list(self.c3[k]) for k in cons]
                out.append(f"sum-zero violation {total:.3g} at block with corners {names}")
        return out

    def to_json(self):
        return {
            "C3": [
                {"circuit": list(o), "interval": self.intervals[k].to_json()}
                for k, o in self.c3.items()
            ],
            "C4": [{"block": e.block, "circuit": list(e.cycle)} for e in self.c4],
            "C3prime": [{"circuit": list(e.circuit), "triple": list(e.triple)} for e in self.gluing],
            "constraints": [[list(self.c3[k]) for k in cons] for cons in self.constraints],
            "dimension": self.dimension(),
        }


@dataclass
class ModuliPoint:
    """Coordinate values: ``c3`` and ``gluing`` keyed by circuit face sets, ``c4`` by block."""

    c3: dict = field(default_factory=dict)
    c4: dict = field(default_factory=dict)
    gluing: dict = field(default_factory=dict)

    def to_json(self, schema):
        return {
            "C3": [{"circuit": list(o), "value": self.c3[k]} for k, o in schema.c3.items()],
            "C4": [{"circuit": list(e.cycle), "value": self.c4[e.block]} for e in schema.c4],
            "C3prime": [
                {"circuit": list(e.circuit), "triple": list(e.triple), "value": self.gluing[frozenset(e.circuit)]}
                for e in schema.gluing
            ],
        }

    @classmethod
    def from_json(cls, raw, schema):
        """Read values; a circuit given with the opposite orientation has its value negated."""
        point = cls()
        for item in raw.get("C3", []):
            faces = tuple(str(f) for f in item["circuit"])
            key = frozenset(faces)
            if key not in schema.c3:
                raise ValueError(f"{list(faces)} is not a coordinate 3-circuit")
            point.c3[key] = _signed(item["value"], faces, schema.c3[key])
        by_cycle = {frozenset(e.cycle): e for e in schema.c4}
        for item in raw.get("C4", []):
            faces = tuple(str(f) for f in item["circuit"])
            entry = by_cycle.get(frozenset(faces))
            if entry is None:
                raise ValueError(f"{list(faces)} is not a coordinate 4-circuit")
            point.c4[entry.block] = _signed(item["value"], faces, entry.cycle)
        triples = {frozenset(e.circuit): e for e in schema.gluing}
        for item in raw.get("C3prime", []):
            key = frozenset(str(f) for f in item["circuit"])
            entry = triples.get(key)
            if entry is None:
                raise ValueError(f"{sorted(key)} is not a gluing circuit")
            value = float(item["value"])
            given = tuple(str(f) for f in item.get("triple", entry.triple))
            if given == entry.triple[::-1]:
                value = -value
            elif given != entry.triple:
                raise ValueError(f"triple {list(given)} differs from the schema's {list(entry.triple)}")
            point.gluing[key] = value
        return point


def _signed(value, given, reference):
    value = float(value)
    k = len(reference)
    i = reference.index(given[0])
    forward = all(reference[(i + j) % k] == given[j] for j in range(k))
    return value if forward else -value


def _c4_cycle(graph, tetra):
    """Oriented 4-circuit through the non-order-2 tetra edges, or None."""
    right = [p for p in itertools.combinations(tetra, 2) if graph.is_order_two(*p)]
    if len(right) != 2 or set(right[0]) & set(right[1]):
        return None
    (a, b), (c, d) = right
    cycle = (a, c, b, d)
    start = min(cycle, key=graph.rank.__getitem__)
    i = cycle.index(start)
    cycle = cycle[i:] + cycle[:i]
    if graph.rank[cycle[1]] > graph.rank[cycle[3]]:
        cycle = (cycle[0],) + cycle[1:][::-1]
    return cycle


def _gluing_triple(graph, orientation, left_faces, right_faces):
    """Shortest face sequence ``(l, s_1, ..., s_k, d)`` whose R-invariant is defined.

    The ``s_i`` are distinct faces of the circuit, ``l`` and ``d`` lie on the
    two sides; consecutive faces must not meet along an order-2 edge.
    Ties are broken in marking order.
    """
    def ok(a, b):
        return not (graph.adjacent(a, b) and graph.is_order_two(a, b))

    circuit = graph.sort(orientation)
    for k in (1, 2, 3):
        for path in itertools.permutations(circuit, k):
            if not all(ok(a, b) for a, b in zip(path, path[1:])):
                continue
            for left in graph.sort(left_faces):
                if not ok(left, path[0]):
                    continue
                for right in graph.sort(right_faces):
                    if ok(path[-1], right):
                        return (left, *path, right)
    return None


def coordinate_schema(graph, forest=None):
    """Coordinates of the moduli space for a graph in case 1 of the classification.

    Gluing triples are chosen among the faces of the two blocks adjacent to
    the essential circuit, so that later gluings cannot change them.
    """
    forest = forest or decompose(graph)
    c3 = {}
    intervals = {}
    for c in enumerate_three_circuits(graph):
        if c.right_angle:
            continue
        edge = forest.edge_by_key.get(c.key)
        if edge is None:
            raise ValueError(f"right-angle-free circuit {c.faces} is not a corner of any block")
        c3[c.key] = edge.orientation
        intervals[c.key] = interval(c)

    c4 = []
    for b in forest.blocks:
        cycle = _c4_cycle(graph, b.tetra)
        if cycle is not None:
            c4.append(C4Entry(b.index, cycle))

    gluing = []
    for e in forest.internal_edges():
        left = circuit_side(graph, e.orientation, "left")
        b1, b2 = forest.block(e.tail), forest.block(e.head)
        if set(b1.faces) - set(e.key) <= left:
            lb, rb = b1, b2
        else:
            lb, rb = b2, b1
        triple = _gluing_triple(
            graph, e.orientation, set(lb.faces) - set(e.key), set(rb.faces) - set(e.key)
        )
        if triple is None:
            raise ValueError(f"no face sequence detects the gluing along {e.orientation}")
        gluing.append(GluingEntry(e.orientation, triple, lb.index, rb.index))

    valence = forest.forest().valence()
    constraints = []
    for b in forest.blocks:
        if valence[b.name] == 4:
            constraints.append(tuple(e.key for e in forest.corner_edges(b)))
    return CoordinateSchema(graph, forest, c3, intervals, tuple(c4), tuple(gluing), tuple(constraints))


def _solved_edges(forest, intervals):
    """Assign to each valence-4 node of F_G one incident edge whose value it solves.

    A maximum-weight bipartite matching prefers edges ranging over all of R,
    so that sum-zero relations are not forced onto restricted circuits.
    """
    val = forest.valence()
    g = nx.Graph()
    for key, u, w in forest.edges:
        weight = 100 + (1 if intervals[key].kind == "reals" else 0)
        for node in (u, w):
            if val[node] == 4:
                g.add_edge(("node", node), ("edge", key), weight=weight)
    solved = {}
    for a, b in nx.max_weight_matching(g, maxcardinality=True):
        (kind_a, x), (_, y) = sorted((a, b), key=lambda t: t[0] != "node")
        solved[x] = y
    if len(solved) != sum(1 for n in forest.nodes if val[n] == 4):
        raise AssertionError("a forest always admits one solved edge per constrained node")
    return solved


def random_point(schema, rng, spread=2.0, max_tries=1000):
    """Sample a point of the coordinate space.

    Each sum-zero relation solves for one of its circuits (see
    :func:`_solved_edges`); every other circuit value is drawn in its
    interval, and samples that push a solved value out of its interval are
    redrawn.
    """
    forest = schema.forest.forest()
    solved = _solved_edges(forest, schema.intervals)
    inc = forest.incidence()
    by_edge = set(solved.values())
    for _ in range(max_tries):
        values = {k: _draw(schema.intervals[k], rng, spread) for k, _, _ in forest.edges if k not in by_edge}
        pending = dict(solved)
        while pending:
            progress = False
            for node, key in list(pending.items()):
                others = [k for k, _, _ in inc[node] if k != key]
                if all(k in values for k in others):
                    # the four corner values sum to zero in the sink-source orientation
                    values[key] = -sum(values[k] for k in others)
                    del pending[node]
                    progress = True
            if not progress:
                raise AssertionError("solved edges form a cycle")
        if all(values[k] in schema.intervals[k] for k in by_edge):
            break
    else:
        raise RuntimeError("could not sample a point of the coordinate space")
    point = ModuliPoint(c3={k: float(values[k]) for k in schema.c3})
    for e in schema.c4:
        point.c4[e.block] = float(rng.uniform(-spread, spread))
    for e in schema.gluing:
        point.gluing[frozenset(e.circuit)] = float(rng.uniform(-spread, spread))
    return point


def _draw(spec, rng, spread):
    if spec.kind == "zero":
        return 0.0
    if spec.kind == "outside":
        return float(rng.choice((-1.0, 1.0)) * (spec.r + rng.uniform(0.05, spread)))
    if spec.kind == "reals":
        return float(rng.uniform(-spread, spread))
    raise ValueError("cannot sample an empty interval")
