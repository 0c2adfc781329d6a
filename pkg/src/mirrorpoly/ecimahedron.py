"""Truncation, cutting along prismatic circuits and block decomposition.

An ecimahedron is cut along all of its combinatorially essential prismatic
3-circuits; every piece must then be a fundamental block T_i, a tetrahedron
truncated at i of its vertices.  The pieces and the circuits they are glued
along form the tree A_G.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import networkx as nx

from .graph_model import (
    AngleLabel,
    LabeledPolyhedron,
    enumerate_three_circuits,
    three_circuit,
)


class NotEcimahedron(ValueError):
    """The graph does not decompose into fundamental blocks."""


def _pair(a, b):
    return frozenset((a, b))


def _fresh(poly, stem):
    name, k = stem, 1
    while name in poly.rank:
        k += 1
        name = f"{stem}#{k}"
    return name


def truncate(poly, vertex, name=None):
    """Replace ``vertex`` (a face triple) by a triangular face with order-2 edges."""
    vertex = frozenset(vertex)
    if vertex not in poly.vertices:
        raise ValueError(f"{sorted(vertex)!r} is not a vertex")
    new = name or _fresh(poly, "x" + "".join(poly.sort(vertex)))
    if new in poly.rank:
        raise ValueError(f"face name {new!r} already used")
    labels = dict(poly.labels)
    for f in vertex:
        labels[_pair(new, f)] = AngleLabel.right()
    vertices = [v for v in poly.vertices if v != vertex]
    vertices += [frozenset({new, a, b}) for a, b in itertools.combinations(poly.sort(vertex), 2)]
    return LabeledPolyhedron(poly.faces + (new,), labels, tuple(vertices))


def circuit_side(poly, circuit, side):
    """Faces lying strictly on the ``left`` or ``right`` of an oriented circuit."""
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    sides = poly.sides(circuit)
    if len(sides) != 2:
        raise ValueError(f"circuit {tuple(circuit)!r} is not prismatic")
    left = [c for c in sides if _same_orientation(poly.orient_circuit(circuit, c), circuit)]
    (left,) = left
    (right,) = [c for c in sides if c != left]
    return left if side == "left" else right


def _same_orientation(a, b):
    i = b.index(a[0])
    return all(b[(i + k) % 3] == a[k] for k in range(3))


def cut_along(poly, circuit, side, name=None):
    """Cut along an oriented prismatic 3-circuit and cap the cut with a triangle.

    ``side`` is the side that is kept; ``"right"`` removes everything on the
    left of the circuit (the left is the region the circuit goes
    counterclockwise around).
    """
    circuit = tuple(circuit)
    if not three_circuit(poly, circuit).prismatic:
        raise ValueError(f"circuit {circuit!r} is not prismatic")
    keep = circuit_side(poly, circuit, side) | set(circuit)
    cap = name or _fresh(poly, "cap" + "".join(poly.sort(circuit)))
    faces = tuple(f for f in poly.faces if f in keep) + (cap,)
    labels = {e: lab for e, lab in poly.labels.items() if e <= keep}
    for f in circuit:
        labels[_pair(cap, f)] = AngleLabel.right()
    vertices = [v for v in poly.vertices if v <= keep]
    vertices += [frozenset({cap, a, b}) for a, b in itertools.combinations(circuit, 2)]
    return LabeledPolyhedron(faces, labels, tuple(vertices))


def tetrahedron(names=("1", "2", "3", "4"), label=None):
    """The tetrahedron with every edge labeled ``label`` (default pi/3)."""
    label = label or AngleLabel.pi_over_m(3)
    labels = {_pair(a, b): label for a, b in itertools.combinations(names, 2)}
    vertices = tuple(frozenset(c) for c in itertools.combinations(names, 3))
    return LabeledPolyhedron(tuple(names), labels, vertices)


def reference_block(i):
    """The fundamental block T_i on faces A, B, C, D (+ truncation triangles)."""
    poly = tetrahedron(("A", "B", "C", "D"))
    for corner in ("BCD", "ACD", "ABD", "ABC")[:i]:
        poly = truncate(poly, corner, name="X" + corner)
    return poly


_REFERENCE_DUALS = {i: reference_block(i).dual_graph for i in range(5)}


def block_kind(poly):
    """Index i such that ``poly`` is isomorphic to T_i, or None."""
    i = poly.f - 4
    if i not in _REFERENCE_DUALS:
        return None
    return i if nx.is_isomorphic(poly.dual_graph, _REFERENCE_DUALS[i]) else None


@dataclass(frozen=True)
class Block:
    """A fundamental block of the decomposition.

    ``tetra`` holds the four faces of the underlying tetrahedron in marking
    order.  ``truncations`` maps each truncated corner (a frozenset of three
    tetra faces) to the face cutting it off: a face of G, or the cap id of an
    internal circuit.  ``virtual`` blocks are the tetrahedra {r, s, t, X}
    attached to a truncation triangle X that is not all of order 2.
    """

    index: int
    kind: int
    faces: tuple
    tetra: tuple
    truncations: dict
    virtual: bool = False

    @property
    def name(self):
        return f"B{self.index}"

    @property
    def corners(self):
        return [frozenset(c) for c in itertools.combinations(self.tetra, 3)]


@dataclass(frozen=True)
class ForestEdge:
    """Edge of A_G, one per tetra-corner 3-circuit.

    ``tail`` and ``head`` follow the sink-source system: the edge points away
    from source blocks.  ``kind`` is ``"internal"``, ``"vertex"`` or
    ``"triangle"``.
    """

    circuit: object
    tail: str
    head: str
    kind: str
    orientation: tuple

    @property
    def key(self):
        return self.circuit.key

    @property
    def internal(self):
        return self.kind == "internal"

    @property
    def pruned(self):
        return self.circuit.right_angle

    @property
    def special(self):
        return self.circuit.special

    @property
    def essential(self):
        return self.circuit.essential


def cap_name(poly, circuit):
    return "cap(" + ",".join(poly.sort(circuit)) + ")"


@dataclass(frozen=True, eq=False)
class BlockForest:
    """The block tree A_G of an ecimahedron with its sink-source system."""

    graph: LabeledPolyhedron
    blocks: tuple
    leaves: tuple
    edges: tuple
    sources: frozenset

    @property
    def nodes(self):
        return tuple(b.name for b in self.blocks) + self.leaves

    def block(self, name):
        return self.blocks[int(name[1:])]

    @cached_property
    def edge_by_key(self):
        return {e.key: e for e in self.edges}

    def corner_edges(self, block):
        name = block.name
        return [e for e in self.edges if name in (e.tail, e.head)]

    def internal_edges(self):
        return [e for e in self.edges if e.internal]

    def tree(self):
        g = nx.MultiGraph()
        g.add_nodes_from(self.nodes)
        for e in self.edges:
            g.add_edge(e.tail, e.head, key=e.key)
        return g

    def forest(self):
        """The forest F_G as an orientation Forest (right-angle edges removed)."""
        from .orientation import Forest

        kept = [e for e in self.edges if not e.pruned]
        return Forest(
            nodes=self.nodes,
            edges=tuple((e.key, e.tail, e.head) for e in kept),
            special=frozenset(e.key for e in kept if e.special),
            order={e.key: tuple(sorted(self.graph.rank[f] for f in e.key)) for e in kept},
            labels={e.key: e.orientation for e in kept},
        )

    def block_side(self, block, circuit):
        """Faces of G on the side of ``circuit`` that contains ``block``."""
        (other,) = set(block.tetra) - set(circuit)
        for comp in self.graph.sides(circuit):
            if other in comp:
                return comp
        raise AssertionError("block face not found on either side")

    def to_json(self):
        g = self.graph
        return {
            "nodes": [
                {
                    "id": b.name,
                    "kind": f"T{b.kind}",
                    "faces": list(b.faces),
                    "tetrahedron": list(b.tetra),
                    "role": "source" if b.name in self.sources else "sink",
                    "virtual": b.virtual,
                }
                for b in self.blocks
            ]
            + [{"id": leaf, "kind": "leaf"} for leaf in self.leaves],
            "edges": [
                {
                    "circuit": list(e.orientation),
                    "from": e.tail,
                    "to": e.head,
                    "kind": e.kind,
                    "pruned": e.pruned,
                    "special": e.special,
                    "essential": e.essential,
                    "internal": e.internal,
                    "geometry": e.circuit.geometry.value,
                }
                for e in sorted(self.edges, key=lambda e: [g.rank[f] for f in e.circuit.faces])
            ],
        }


@dataclass(frozen=True)
class _Piece:
    poly: LabeledPolyhedron
    caps: dict  # cap face -> circuit key


def _split(pieces, circuit, graph):
    for i, piece in enumerate(pieces):
        if not set(circuit.faces) <= set(piece.poly.faces):
            continue
        cap = cap_name(graph, circuit.faces)
        out = []
        for comp in piece.poly.sides(circuit.faces):
            local = piece.poly.orient_circuit(circuit.faces, comp)
            part = cut_along(piece.poly, local, "left", name=cap)
            caps = {c: k for c, k in piece.caps.items() if c in part.rank}
            caps[cap] = circuit.key
            out.append(_Piece(part, caps))
        if len(out) != 2:
            raise NotEcimahedron(f"circuit {circuit.faces!r} does not separate its piece")
        return pieces[:i] + out + pieces[i + 1 :]
    raise NotEcimahedron(f"circuit {circuit.faces!r} not found in any piece")


def _truncation_triangles(piece, kind, graph):
    tris = piece.poly.triangles()
    if kind != 1:
        return tris if kind > 1 else []
    caps = [t for t in tris if t in piece.caps]
    if caps:
        return caps[:1]
    all_two = [t for t in tris if all(piece.poly.is_order_two(t, x) for x in piece.poly.neighbors[t])]
    if len(all_two) == 1:
        return all_two
    return [min(tris, key=graph.rank.__getitem__)]


def decompose(graph):
    """Decompose an ecimahedron into fundamental blocks and build A_G.

    Raises
    ------
    NotEcimahedron
        If some piece is not isomorphic to a fundamental block.
    """
    circuits = enumerate_three_circuits(graph)
    by_key = {c.key: c for c in circuits}
    pieces = [_Piece(graph, {})]
    for circuit in circuits:
        if circuit.combinatorially_essential:
            pieces = _split(pieces, circuit, graph)

    raw_blocks = []
    for piece in pieces:
        kind = block_kind(piece.poly)
        if kind is None:
            raise NotEcimahedron(
                f"piece with faces {sorted(piece.poly.faces)} is not a fundamental block"
            )
        tris = _truncation_triangles(piece, kind, graph)
        tetra = tuple(graph.sort(f for f in piece.poly.faces if f not in tris))
        if any(f in piece.caps for f in tetra):
            raise NotEcimahedron("cut triangle is not a truncation of its piece")
        truncations = {piece.poly.neighbors[x]: x for x in tris}
        raw_blocks.append((kind, tetra, truncations))

    # blocks attached to truncation triangles that are not all of order 2
    extra = []
    for kind, tetra, truncations in raw_blocks:
        for corner, x in list(truncations.items()):
            if x in graph.rank and by_key[corner].essential:
                cap = cap_name(graph, corner)
                truncations[corner] = cap
                extra.append((1, tuple(graph.sort(corner | {x})), {corner: cap}, True))
    raw_blocks = [(k, t, tr, False) for k, t, tr in raw_blocks] + extra
    raw_blocks.sort(key=lambda b: (b[3], [graph.rank[f] for f in b[1]]))

    blocks = []
    for i, (kind, tetra, truncations, virtual) in enumerate(raw_blocks):
        owned = set(tetra) | {x for x in truncations.values() if x in graph.rank}
        blocks.append(Block(i, kind, tuple(graph.sort(owned)), tetra, truncations, virtual))

    # A_G: corner circuits, shared between two blocks when internal
    owners = {}
    for b in blocks:
        for corner in b.corners:
            owners.setdefault(corner, []).append(b)
    leaves = []
    links = []
    for corner, bs in owners.items():
        if corner not in by_key:
            raise NotEcimahedron(f"tetra corner {sorted(corner)} is not a 3-circuit of G")
        if len(bs) > 2:
            raise NotEcimahedron(f"circuit {sorted(corner)} is a corner of {len(bs)} blocks")
        if len(bs) == 2:
            links.append((corner, bs[0], bs[1].name, "internal"))
        else:
            (b,) = bs
            x = b.truncations.get(corner)
            kind = "vertex" if x is None else "triangle"
            leaf = f"L{len(leaves)}"
            leaves.append(leaf)
            links.append((corner, b, leaf, kind))

    tree = nx.MultiGraph()
    tree.add_nodes_from([b.name for b in blocks] + leaves)
    tree.add_edges_from((b.name, other) for _, b, other, _ in links)
    if not nx.is_tree(tree):
        raise NotEcimahedron("block graph is not a tree")

    root = next(b for b in blocks if graph.faces[0] in b.faces)
    depth = nx.shortest_path_length(tree, root.name)
    sources = frozenset(n for n, d in depth.items() if d % 2 == 0 and n.startswith("B"))

    edges = []
    for corner, b, other, kind in links:
        side = _owner_side(graph, b, corner)
        around = graph.orient_circuit(corner, side)
        if b.name in sources:
            tail, head, orientation = b.name, other, around
        else:
            tail, head, orientation = other, b.name, (around[1], around[0], around[2])
        circuit = by_key[corner].oriented(orientation)
        edges.append(ForestEdge(circuit, tail, head, kind, orientation))
    edges.sort(key=lambda e: [graph.rank[f] for f in e.circuit.faces])
    return BlockForest(graph, tuple(blocks), tuple(leaves), tuple(edges), sources)


def _owner_side(graph, block, corner):
    (other,) = set(block.tetra) - set(corner)
    for comp in graph.sides(corner):
        if other in comp:
            return comp
    raise AssertionError("block face not on a side of its corner")


def is_ecimahedron(graph):
    try:
        decompose(graph)
    except NotEcimahedron:
        return False
    return True


def sink_source_system(forest):
    """Orientation of every corner circuit in the sink-source system.

    Source blocks see each of their corner circuits with the block on its
    left; sink blocks see them with the block on the right.  The second
    system is obtained by reversing every circuit.
    """
    return {e.key: e.orientation for e in forest.edges}
