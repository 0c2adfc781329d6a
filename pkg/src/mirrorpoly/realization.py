"""Explicit mirror polyhedra: reflection data, invariants, truncation and gluing.

A realization attaches to each face ``s`` a covector ``alpha_s`` and a vector
``v_s`` with ``alpha_s(v_s) = 2``; the reflection of the face is
``Id - alpha_s (x) v_s``.  Conventions: the polyhedron is the cone where every
``alpha_s`` is non-positive, the Cartan matrix is ``A[i, j] = alpha_i(v_j)``
and ``v_st = -alpha_t(v_s) = -A[t, s]``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from .ecimahedron import cap_name, decompose
from .moduli import ModuliPoint, classify_moduli, coordinate_schema

#: tolerance for equality checks on realizations
TOL = 1e-9


class RealizationError(ValueError):
    """The requested realization does not exist or the input is inconsistent."""


@dataclass(frozen=True, eq=False)
class MirrorRealization:
    """Per-face covectors ``alpha`` and vectors ``v`` (rows, in face order)."""

    faces: tuple
    alpha: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        alpha = np.asarray(self.alpha, dtype=float)
        v = np.asarray(self.v, dtype=float)
        if alpha.shape != v.shape or alpha.shape[0] != len(self.faces):
            raise ValueError("alpha and v must be (faces, dimension) arrays")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "v", v)

    @property
    def dim(self):
        return self.alpha.shape[1]

    @property
    def index(self):
        return {f: i for i, f in enumerate(self.faces)}

    def cartan(self):
        return self.alpha @ self.v.T

    def value(self, s, t):
        """``alpha_s(v_t)``."""
        i = self.index
        return float(self.alpha[i[s]] @ self.v[i[t]])

    def v_pair(self, s, t):
        """``v_st = -alpha_t(v_s)``."""
        return -self.value(t, s)

    def covector(self, s):
        return self.alpha[self.index[s]]

    def vector(self, s):
        return self.v[self.index[s]]

    def transformed(self, h):
        """Image under the linear map ``h``: ``v -> h v`` and ``alpha -> alpha h^-1``."""
        h = np.asarray(h, dtype=float)
        return MirrorRealization(self.faces, np.linalg.solve(h.T, self.alpha.T).T, self.v @ h.T)

    def rescaled(self, scales):
        """Rescale ``(alpha_s, v_s)`` to ``(alpha_s / c, c v_s)`` for ``scales[s] = c > 0``."""
        c = np.array([scales.get(f, 1.0) for f in self.faces])
        return MirrorRealization(self.faces, self.alpha / c[:, None], self.v * c[:, None])

    def normalized(self):
        """Same polyhedron in a balanced frame.

        Each face is rescaled so that ``|alpha_s| = |v_s|``, then the basis is
        changed by the symmetric ``h`` with ``h^-1 (alpha^T alpha) h^-1 =
        h (v^T v) h``, which keeps both arrays well conditioned.
        """
        c = np.sqrt(np.linalg.norm(self.alpha, axis=1) / np.linalg.norm(self.v, axis=1))
        Q = self.rescaled(dict(zip(self.faces, c)))
        h = _geometric_mean(Q.alpha.T @ Q.alpha, np.linalg.inv(Q.v.T @ Q.v))
        return Q.transformed(_sqrtm(h))

    def restricted(self, faces):
        i = self.index
        rows = [i[f] for f in faces]
        return MirrorRealization(tuple(faces), self.alpha[rows], self.v[rows])

    def with_faces(self, faces, alpha, v):
        return MirrorRealization(
            self.faces + tuple(faces),
            np.vstack([self.alpha] + [a[None, :] for a in alpha]),
            np.vstack([self.v] + [x[None, :] for x in v]),
        )

    def to_json(self):
        return {
            "dimension": self.dim,
            "faces": [
                {"face": f, "alpha": self.alpha[i].tolist(), "v": self.v[i].tolist()}
                for i, f in enumerate(self.faces)
            ],
        }

    @classmethod
    def from_json(cls, raw):
        items = raw["faces"]
        return cls(
            tuple(str(x["face"]) for x in items),
            np.array([x["alpha"] for x in items], dtype=float),
            np.array([x["v"] for x in items], dtype=float),
        )


def _sqrtm(m):
    w, u = np.linalg.eigh((m + m.T) / 2)
    return (u * np.sqrt(np.clip(w, 0, None))) @ u.T


def _geometric_mean(a, b):
    """Matrix geometric mean of two symmetric positive definite matrices."""
    ra = _sqrtm(a)
    ira = np.linalg.inv(ra)
    return ra @ _sqrtm(ira @ b @ ira) @ ra


# --------------------------------------------------------------------------
# invariants


def r_invariant(P, faces, right_angle_zero=False):
    """``log`` of the cyclic ratio ``prod alpha_fi(v_fi+1) / prod alpha_fi(v_fi-1)``.

    With ``right_angle_zero`` a vanishing factor yields 0, the convention for
    circuits with a right angle; otherwise it raises.
    """
    faces = tuple(faces)
    k = len(faces)
    num = [P.value(faces[i], faces[(i + 1) % k]) for i in range(k)]
    den = [P.value(faces[i], faces[(i - 1) % k]) for i in range(k)]
    scale = max(1.0, max(abs(x) for x in num + den))
    if any(abs(x) <= 1e-14 * scale for x in num + den):
        if right_angle_zero:
            return 0.0
        raise RealizationError("undefined invariant (order-2 contact)")
    ratio = math.prod(num) / math.prod(den)
    if ratio <= 0:
        raise RealizationError("cyclic ratio is not positive")
    return math.log(ratio)


def triangle_det_closed_form(mu12, mu23, mu31, R):
    """``p e^{R/2} + p e^{-R/2} + 2 (Sigma - 4)``."""
    p = math.sqrt(mu12 * mu23 * mu31)
    sigma = mu12 + mu23 + mu31
    return p * math.exp(R / 2) + p * math.exp(-R / 2) + 2.0 * (sigma - 4.0)


def circuit_determinant(P, faces):
    """Determinant of the three polars in a basis of the orientation opposite to
    the dual basis of the three covectors.  Invariant under positive rescalings.
    """
    rows = [P.index[f] for f in faces]
    A = P.cartan()[np.ix_(rows, rows)]
    return float(-np.linalg.det(A))


def triangle_det_class(mu12, mu23, mu31, R, tol=TOL):
    """Sign of the polar determinant of the realized triangle, from its vectors."""
    D = circuit_determinant(realize_triangle(mu12, mu23, mu31, R), ("1", "2", "3"))
    if abs(D) <= tol:
        return 0
    return 1 if D > 0 else -1


# --------------------------------------------------------------------------
# Cartan matrices in a spanning-tree gauge


def gauge_cartan(faces, mu, cycles):
    """Cartan matrix with prescribed mu's and cycle invariants.

    Parameters
    ----------
    faces : sequence
        Face identifiers; the first one roots the spanning tree.
    mu : dict
        ``frozenset({a, b}) -> mu_ab`` for every pair of faces.
    cycles : dict
        Oriented face cycles mapped to their R-invariants.

    Off-diagonal entries are ``A_ab = -sqrt(mu_ab) exp(w_ab)`` with
    ``w_ba = -w_ab``, ``w = 0`` on a breadth-first spanning tree of the pairs
    with ``mu > 0``; the remaining ``w`` solve ``2 sum w = R`` around the cycles.
    """
    faces = tuple(faces)
    n = len(faces)
    pos = {f: i for i, f in enumerate(faces)}
    live = nx.Graph()
    live.add_nodes_from(faces)
    live.add_edges_from(tuple(p) for p, m in mu.items() if m > 0)
    tree = set()
    for comp in sorted(nx.connected_components(live), key=lambda c: min(pos[f] for f in c)):
        root = min(comp, key=pos.__getitem__)
        # prefer a star around the root, as in the hand-written matrices
        for a, b in nx.bfs_edges(live, root, sort_neighbors=lambda ns: sorted(ns, key=pos.__getitem__)):
            tree.add(frozenset((a, b)))
    free = [tuple(sorted(e, key=pos.__getitem__)) for e in map(frozenset, live.edges) if e not in tree]
    free.sort(key=lambda e: (pos[e[0]], pos[e[1]]))
    col = {e: i for i, e in enumerate(free)}

    rows, rhs = [], []
    for cycle, value in cycles.items():
        row = np.zeros(len(free))
        k = len(cycle)
        for i in range(k):
            a, b = cycle[i], cycle[(i + 1) % k]
            if mu[frozenset((a, b))] <= 0:
                raise RealizationError(f"cycle {cycle} crosses an order-2 edge")
            if (a, b) in col:
                row[col[(a, b)]] += 1.0
            elif (b, a) in col:
                row[col[(b, a)]] -= 1.0
        rows.append(row)
        rhs.append(value / 2.0)

    w = np.zeros(len(free))
    if free:
        if not rows:
            raise RealizationError("coordinates do not determine the cycle variables")
        M, y = np.array(rows), np.array(rhs)
        if np.linalg.matrix_rank(M) < len(free):
            raise RealizationError("coordinates do not determine the cycle variables")
        w = np.linalg.lstsq(M, y, rcond=None)[0]
        if np.max(np.abs(M @ w - y)) > TOL * (1.0 + np.max(np.abs(y))):
            raise RealizationError("inconsistent coordinates (sum-zero violation)")
    elif any(abs(v) > TOL for v in rhs):
        raise RealizationError("coordinates given on cycles that carry no parameter")

    A = 2.0 * np.eye(n)
    for pair, m in mu.items():
        a, b = sorted(pair, key=pos.__getitem__)
        i, j = pos[a], pos[b]
        if m <= 0:
            continue
        omega = w[col[(a, b)]] if (a, b) in col else 0.0
        A[i, j] = -math.sqrt(m) * math.exp(omega)
        A[j, i] = -math.sqrt(m) * math.exp(-omega)
    return A


def from_cartan(faces, A):
    """Realization with ``alpha_i = -e_i*`` and ``v_j = -A[:, j]``."""
    n = len(faces)
    return MirrorRealization(tuple(faces), -np.eye(n), -np.asarray(A, dtype=float).T)


def realize_triangle(mu12, mu23, mu31, R=0.0):
    """Labeled triangle with invariant ``R`` on the circuit (1, 2, 3)."""
    mus = (mu12, mu23, mu31)
    if any(not 0 <= m < 4 for m in mus):
        raise RealizationError("mu values must lie in [0, 4)")
    if sum(m == 0 for m in mus) > 1:
        raise RealizationError("at most one right angle")
    faces = ("1", "2", "3")
    mu = {frozenset(("1", "2")): mu12, frozenset(("2", "3")): mu23, frozenset(("1", "3")): mu31}
    if min(mus) == 0:
        if R != 0:
            raise RealizationError("a triangle with a right angle has R = 0")
        cycles = {}
    else:
        cycles = {faces: R}
    return from_cartan(faces, gauge_cartan(faces, mu, cycles))


def tetra_case(graph, faces):
    """Case number (1 to 5) of a labeled tetrahedron by its order-2 edges."""
    right = [p for p in itertools.combinations(faces, 2) if graph.is_order_two(*p)]
    if not right:
        return 1
    if len(right) == 1:
        return 2
    if len(right) == 2:
        return 3 if set(right[0]) & set(right[1]) else 4
    return 5


def realize_tetrahedron(graph, coords, faces=None):
    """Mirror tetrahedron on four pairwise adjacent faces of ``graph``.

    ``coords`` maps oriented 3-circuits (and, in case 4, the 4-circuit) to
    their R-invariants.  In case 1 the four corner values must sum to zero
    once oriented as the boundary of the tetrahedron.
    """
    faces = tuple(faces if faces is not None else graph.faces)
    if len(faces) != 4:
        raise ValueError("a tetrahedron has four faces")
    mu = {frozenset(p): graph.mu(*p) for p in itertools.combinations(faces, 2)}
    if any(m is None for m in mu.values()):
        raise ValueError("tetrahedron faces must be pairwise adjacent")
    P = from_cartan(faces, gauge_cartan(faces, mu, {tuple(c): float(x) for c, x in coords.items()}))
    for cycle, x in coords.items():
        got = r_invariant(P, cycle)
        if abs(got - x) > 1e-8 * (1 + abs(x)):
            raise RealizationError(f"coordinate on {tuple(cycle)} not reproduced ({got} vs {x})")
    return P


# --------------------------------------------------------------------------
# vertices, truncation planes


def _null_vector(rows):
    _, s, vt = np.linalg.svd(np.asarray(rows, dtype=float))
    return vt[-1], s


def vertex_point(P, triple):
    """Unit representative of the vertex ``triple``, on the non-positive side of
    the other faces when such a choice exists (largest number of negatives)."""
    i = P.index
    x, _ = _null_vector([P.alpha[i[f]] for f in triple])
    others = [f for f in P.faces if f not in triple]
    vals = np.array([P.alpha[i[f]] @ x for f in others])
    if np.sum(vals < 0) < np.sum(vals > 0):
        x = -x
    return x


def _unit_rows(P):
    return P.alpha / np.linalg.norm(P.alpha, axis=1)[:, None]


def realized_vertices(P, tol=TOL):
    """Face triples whose common point lies in the closed cone of ``P``."""
    unit = _unit_rows(P)
    out = []
    for triple in itertools.combinations(range(len(P.faces)), 3):
        x, s = _null_vector(unit[list(triple)])
        if s[-1] <= tol:
            continue
        others = [k for k in range(len(P.faces)) if k not in triple]
        vals = unit[others] @ x
        if np.all(vals <= tol) or np.all(vals >= -tol):
            out.append(frozenset(P.faces[k] for k in triple))
    return out


CUTS = "CutsAlongCircuit"
MEETS = "MeetsOnlyVertex"
MISSES = "Misses"
CROSSES = "Crosses"
DEGENERATE = "Degenerate"


@dataclass(frozen=True)
class TruncationPlane:
    """The plane through three polars, with its position relative to the polyhedron.

    ``covector`` is None when the polars only span a line.
    """

    covector: np.ndarray | None
    report: str
    values: dict = field(default_factory=dict)


def truncation_plane(P, circuit, vertices=None, tol=TOL):
    """Plane spanned by the polars of a 3-circuit and how it meets ``P``.

    ``vertices`` are the face triples of ``P`` (computed from the
    realization when omitted).  Around a vertex the report is
    CutsAlongCircuit when the plane separates that vertex from the others,
    MeetsOnlyVertex when it passes through it, Misses when every vertex is on
    one side.  For a prismatic circuit the plane must separate the vertices on
    the two sides of the circuit.
    """
    circuit = tuple(circuit)
    i = P.index
    polars = np.array([P.v[i[f]] for f in circuit])
    beta, s = _null_vector(polars)
    if s[-1] <= tol * max(1.0, s[0]) or np.linalg.matrix_rank(polars, tol * max(1.0, s[0])) < 3:
        return TruncationPlane(None, DEGENERATE)
    if P.dim != 4:
        raise ValueError("truncation planes live in dimension 4")
    vertices = list(vertices) if vertices is not None else realized_vertices(P)
    values = {v: float(beta @ vertex_point(P, tuple(v))) for v in vertices}
    key = frozenset(circuit)
    if key in values:
        v0 = values[key]
        rest = [x for v, x in values.items() if v != key]
        if rest and all(x > tol for x in rest):
            sign = 1.0
        elif rest and all(x < -tol for x in rest):
            sign = -1.0
        else:
            return TruncationPlane(beta, CROSSES, values)
        if abs(v0) <= tol:
            report = MEETS
        elif v0 * sign < 0:
            report = CUTS
        else:
            report = MISSES
        return TruncationPlane(beta, report, values)
    left, right = _vertex_sides(P, circuit, vertices)
    lv = [values[v] for v in left]
    rv = [values[v] for v in right]
    if (all(x > tol for x in lv) and all(x < -tol for x in rv)) or (
        all(x < -tol for x in lv) and all(x > tol for x in rv)
    ):
        return TruncationPlane(beta, CUTS, values)
    every = lv + rv
    if all(x > tol for x in every) or all(x < -tol for x in every):
        return TruncationPlane(beta, MISSES, values)
    return TruncationPlane(beta, CROSSES, values)


def _vertex_sides(P, circuit, vertices):
    g = nx.Graph()
    g.add_nodes_from(P.faces)
    for v in vertices:
        g.add_edges_from(itertools.combinations(v, 2))
    comps = list(nx.connected_components(g.subgraph(set(P.faces) - set(circuit))))
    if len(comps) != 2:
        raise ValueError(f"circuit {circuit} does not separate the polyhedron")
    a, b = comps
    return [v for v in vertices if v & a], [v for v in vertices if v & b]


def truncate_realization(P, circuit, name, vertices=None, keep=None):
    """Add the face cutting ``P`` along the plane of a 3-circuit.

    Around a vertex the vertex is cut off.  For a prismatic circuit ``keep``
    names the faces on the side to keep; faces on the other side are removed.
    The new vector lies on the line where the three circuit covectors vanish,
    so the new edges are of order 2.
    """
    circuit = tuple(circuit)
    vertices = list(vertices) if vertices is not None else realized_vertices(P)
    plane = truncation_plane(P, circuit, vertices)
    if plane.report != CUTS:
        raise RealizationError(f"plane of {circuit} does not cut along the circuit ({plane.report})")
    beta = plane.covector
    i = P.index
    w, _ = _null_vector([P.alpha[i[f]] for f in circuit])
    key = frozenset(circuit)
    if key in plane.values:
        if plane.values[key] < 0:
            beta = -beta
        dropped = set()
    else:
        keep = set(keep)
        kept = [v for v in vertices if (v - key) & keep]
        if plane.values[kept[0]] > 0:
            beta = -beta
        dropped = set(P.faces) - keep - key
    if beta @ w < 0:
        w = -w
    v_new = 2.0 * w / (beta @ w)
    out = P.restricted([f for f in P.faces if f not in dropped])
    return out.with_faces([name], [beta], [v_new])


# --------------------------------------------------------------------------
# gluing


def canonical_frame(P, circuit, cap, side=1):
    """Change of basis sending the circuit covectors to ``-e_1*, -e_2*, -e_3*`` and
    the cap covector to ``side * e_4*``.

    The circuit faces are first rescaled so that their Cartan entries are
    symmetric along a spanning tree, which makes the frame depend only on the
    invariants of the circuit.
    """
    circuit = tuple(circuit)
    Q = _symmetrized(P, circuit)
    return Q.transformed(_frame_map(Q, circuit, cap, side))


def _symmetrized(P, circuit):
    """Rescale the circuit faces so that their Cartan entries are symmetric
    along a spanning tree of the non-zero ones."""
    A = P.cartan()
    i = P.index
    scale = {circuit[0]: 1.0}
    live = nx.Graph()
    live.add_nodes_from(circuit)
    live.add_edges_from(
        (a, b) for a, b in itertools.combinations(circuit, 2) if abs(A[i[a], i[b]]) > TOL
    )
    for comp in nx.connected_components(live):
        root = min(comp, key=circuit.index)
        scale[root] = 1.0
        for a, b in nx.bfs_edges(live, root):
            scale[b] = scale[a] * math.sqrt(A[i[b], i[a]] / A[i[a], i[b]])
    return P.rescaled(scale)


def _frame_map(Q, circuit, cap, side):
    M = np.array([Q.covector(f) for f in circuit] + [Q.covector(cap)])
    return np.diag([-1.0, -1.0, -1.0, float(side)]) @ M


def _gluing_terms(L, D, seq):
    """Coefficients ``K, a, b, c, d`` of the cyclic ratio ``K (a + y b) / (c + d / y)``.

    Only the factors between a face of L and a face of D depend on the
    scaling; ``u`` and ``w`` split a vector into its first three coordinates
    and its last one.
    """
    l, mid, d = seq[0], seq[1:-1], seq[-1]
    al, ad = L.covector(l), D.covector(d)
    vl, vd = L.vector(l), D.vector(d)
    u = np.array([1.0, 1.0, 1.0, 0.0])
    w = np.array([0.0, 0.0, 0.0, 1.0])
    forward = al @ L.vector(mid[0])
    backward = L.covector(mid[0]) @ vl
    for a, b in zip(mid, mid[1:]):
        forward *= L.value(a, b)
        backward *= L.value(b, a)
    forward *= L.covector(mid[-1]) @ vd
    backward *= ad @ L.vector(mid[-1])
    return forward / backward, ad @ (u * vl), ad @ (w * vl), al @ (u * vd), al @ (w * vd)


def _frames(L, D, circuit, cap):
    for a, b in itertools.combinations(circuit, 2):
        mu_l = L.value(a, b) * L.value(b, a)
        mu_d = D.value(a, b) * D.value(b, a)
        if abs(mu_l - mu_d) > 1e-7 * max(1.0, mu_l):
            raise RealizationError(f"dihedral data of {a}, {b} differ on the two sides")
    r_l = r_invariant(L, circuit, right_angle_zero=True)
    r_d = r_invariant(D, circuit, right_angle_zero=True)
    if abs(r_l - r_d) > 1e-7 * (1.0 + abs(r_l)):
        raise RealizationError(f"circuit invariants differ on the two sides ({r_l} vs {r_d})")
    return canonical_frame(L, circuit, cap, side=1), canonical_frame(D, circuit, cap, side=-1)


def _orient_triple(Lc, Dc, circuit, triple):
    triple = tuple(triple)
    l, mid, d = triple[0], triple[1:-1], triple[-1]
    if not mid or any(s not in circuit for s in mid):
        raise RealizationError("middle faces of the sequence must lie on the circuit")
    if l in circuit or d in circuit:
        raise RealizationError("end faces of the sequence must lie off the circuit")
    if l in Lc.index and d in Dc.index:
        return triple, 1.0
    if d in Lc.index and l in Dc.index:
        return triple[::-1], -1.0
    raise RealizationError("sequence must have one end face on each side of the circuit")


def gluing_parameter(L, D, circuit, target, triple, cap):
    """The ``lambda > 0`` for which the glued polyhedron has ``R_triple = target``.

    With ``y = lambda^4`` the cyclic ratio is ``K (a + y b) / (c + d / y)``;
    the equation ``K (a + y b) = e^target (c + d / y)`` is a quadratic in y.
    """
    circuit = tuple(circuit)
    Lc, Dc = _frames(L, D, circuit, cap)
    seq, sign = _orient_triple(Lc, Dc, circuit, triple)
    K, a, b, c, dd = _gluing_terms(Lc, Dc, seq)
    if not math.isfinite(K) or K <= 0:
        raise RealizationError("invalid face sequence (order-2 contact)")
    e = math.exp(sign * target)
    roots = np.roots([K * b, K * a - e * c, -e * dd])
    good = []
    for y in roots:
        if abs(y.imag) > 1e-12 * max(1.0, abs(y)) or y.real <= 0:
            continue
        y = y.real
        # both alpha_l(v_d) and alpha_d(v_l) must stay negative
        if a + y * b < 0 and c + dd / y < 0:
            good.append(y)
    if len(good) != 1:
        raise RealizationError(f"gluing equation has {len(good)} admissible roots")
    return good[0] ** 0.25


def glue_with(L, D, circuit, lam, cap):
    """Glue ``D`` to ``L`` along ``circuit`` after scaling by ``diag(lam, lam, lam, lam^-3)``."""
    circuit = tuple(circuit)
    _frames(L, D, circuit, cap)
    HL = _frame_map(_symmetrized(L, circuit), circuit, cap, 1)
    HD = _frame_map(_symmetrized(D, circuit), circuit, cap, -1)
    g = np.diag([lam, lam, lam, lam**-3])
    # L keeps its frame; only the new faces of D are moved, by HL^-1 g HD
    extra = [f for f in D.faces if f != cap and f not in circuit]
    if set(extra) & set(L.faces):
        raise RealizationError("the two sides share faces outside the circuit")
    moved = D.restricted(extra).transformed(np.linalg.solve(HL, g @ HD))
    left = L.restricted([f for f in L.faces if f != cap])
    return left.with_faces(extra, list(moved.alpha), list(moved.v))


def glue(L, D, circuit, target, triple, cap):
    """Glue two realizations along a circuit so that ``R_triple = target``.

    Both realizations carry the face ``cap`` cutting along ``circuit``; they
    lie on opposite sides of it.  The caps are removed from the result.
    """
    lam = gluing_parameter(L, D, circuit, target, triple, cap)
    return glue_with(L, D, circuit, lam, cap)


# --------------------------------------------------------------------------
# whole ecimahedra


def _block_realization(graph, block, schema, point):
    coords = {}
    for corner in block.corners:
        if corner in schema.c3:
            coords[schema.c3[corner]] = point.c3[corner]
    for entry in schema.c4:
        if entry.block == block.index:
            coords[entry.cycle] = point.c4[block.index]
    P = realize_tetrahedron(graph, coords, block.tetra)
    for corner in sorted(block.truncations, key=lambda c: sorted(graph.rank[f] for f in c)):
        P = truncate_realization(P, graph.sort(corner), block.truncations[corner])
    return P.normalized()


def realize(graph, point, schema=None):
    """Mirror polyhedron with the given coordinates.

    Each block is realized from its circuit invariants, truncated at its
    truncated corners, and the blocks are glued along the essential circuits
    with the prescribed gluing invariants.

    Raises
    ------
    RealizationError
        On an interval or sum-zero violation, or outside case 1 of the
        classification.
    """
    forest = schema.forest if schema is not None else decompose(graph)
    desc = classify_moduli(graph, forest)
    if desc.variant != "Components":
        raise RealizationError(f"moduli space is {desc.variant} (case {desc.case}); use the prism solvers")
    schema = schema or coordinate_schema(graph, forest)
    problems = schema.violations(point)
    if problems:
        raise RealizationError("; ".join(problems))
    parts = {b.index: _block_realization(graph, b, schema, point) for b in forest.blocks}
    entries = {frozenset(e.circuit): e for e in schema.gluing}

    tree = nx.Graph()
    tree.add_nodes_from(parts)
    for e in forest.internal_edges():
        tree.add_edge(forest.block(e.tail).index, forest.block(e.head).index, key=e.key)
    P = parts[0]
    for parent, child in nx.bfs_edges(tree, 0):
        key = tree.edges[parent, child]["key"]
        entry = entries[key]
        P = glue(P, parts[child], entry.circuit, point.gluing[key], entry.triple, cap_name(graph, key))
        P = P.normalized()
    return P.restricted(graph.faces)


def coordinates(P, schema):
    """Recompute the coordinates of a realization."""
    point = ModuliPoint()
    for key, orient in schema.c3.items():
        point.c3[key] = r_invariant(P, orient)
    for entry in schema.c4:
        point.c4[entry.block] = r_invariant(P, entry.cycle)
    for entry in schema.gluing:
        point.gluing[frozenset(entry.circuit)] = r_invariant(P, entry.triple)
    return point


# --------------------------------------------------------------------------
# prisms


def _prism_realization(v12, v13, v21, v23, v31, v32, faces):
    alpha = np.array(
        [
            [-1.0, 0.0, 0.0, 0.0],
            [0.0, -1.0, 0.0, 0.0],
            [0.0, 0.0, -1.0, 0.0],
            [0.0, 0.0, 0.0, -1.0],
            [-1.0, -1.0, -1.0, 1.0],
        ]
    )
    v = np.array(
        [
            [-2.0, v12, v13, 0.0],
            [v21, -2.0, v23, 0.0],
            [v31, v32, -2.0, 0.0],
            [0.0, 0.0, 0.0, -2.0],
            [0.0, 0.0, 0.0, 2.0],
        ]
    )
    return MirrorRealization(tuple(faces), alpha, v)


def solve_exceptional_prism(mu12, mu23, mu31, tol=1e-12, faces=("1", "2", "3", "4", "5")):
    """All mirror realizations of the exceptional prism with the given lateral mu's.

    Faces 1, 2, 3 are lateral and 4, 5 the triangles.  With ``x = v_12`` the
    closing condition reduces to ``x^2 - 2 sigma x + p = 0`` on ``(mu12/2, 2)``.
    """
    if any(not 0 < m < 4 for m in (mu12, mu23, mu31)):
        raise RealizationError("lateral mu values must lie in (0, 4)")
    sigma = -(mu23 + mu31 - mu12 - 4.0) / (4.0 - mu23)
    p = mu12 * (4.0 - mu31) / (4.0 - mu23)
    disc = sigma * sigma - p
    if disc < -tol * max(1.0, sigma * sigma):
        return []
    if abs(disc) <= tol * max(1.0, sigma * sigma):
        roots = [sigma]
    else:
        r = math.sqrt(disc)
        roots = [sigma - r, sigma + r]
    out = []
    for x in roots:
        if not mu12 / 2 < x < 2:
            continue
        v21 = mu12 / x
        v23 = 2.0 - v21
        v32 = mu23 / v23
        v31 = 2.0 - v32
        v13 = 2.0 - x
        if min(v23, v31, v13) <= 0:
            continue
        out.append(_prism_realization(x, v13, v21, v23, v31, v32, faces))
    return out


def solve_right_angle_prism(alpha, beta=None, tol=TOL, faces=("1", "2", "3", "4", "5")):
    """Realization of the prism with lateral angles 12 = pi/2, 13 = alpha, 23 = beta.

    ``beta`` defaults to ``pi/2 - alpha``; any other value leaves no
    realization and None is returned.
    """
    if not 0 < alpha < math.pi / 2:
        raise ValueError("alpha must lie in (0, pi/2)")
    beta = math.pi / 2 - alpha if beta is None else beta
    mu13 = 4.0 * math.cos(alpha) ** 2
    mu23 = 4.0 * math.cos(beta) ** 2
    if abs(mu13 + mu23 - 4.0) > tol:
        return None
    return _prism_realization(0.0, 2.0, 0.0, 2.0, mu13 / 2.0, mu23 / 2.0, faces)


def _prism_faces(graph):
    tris = graph.triangles()
    lateral = [f for f in graph.faces if f not in tris]
    return lateral, list(graph.sort(tris))


def realize_isolated(graph):
    """Every realization of a graph whose moduli space is finite.

    Covers the exceptional prisms, the prism with lateral angles pi/2,
    alpha, pi/2 - alpha and tetrahedra with d < 0; the empty cases give [].
    """
    desc = classify_moduli(graph)
    if desc.variant == "Empty":
        return []
    if desc.case == "2a":
        return [realize_tetrahedron(graph, {})]
    if desc.case in ("4b", "4c"):
        (a, b, c), tris = _prism_faces(graph)
        sols = solve_exceptional_prism(
            graph.mu(a, b), graph.mu(b, c), graph.mu(c, a), faces=(a, b, c, *tris)
        )
        return [P.restricted(graph.faces) for P in sols]
    if desc.case == "3a":
        lateral, tris = _prism_faces(graph)
        # rotate so that the right angle sits between the first two faces
        while not graph.is_order_two(lateral[0], lateral[1]):
            lateral = lateral[1:] + lateral[:1]
        a, b, c = lateral
        P = solve_right_angle_prism(
            graph.label(a, c).theta, graph.label(b, c).theta, faces=(a, b, c, *tris)
        )
        return [] if P is None else [P.restricted(graph.faces)]
    raise RealizationError(f"moduli space is {desc.variant}; coordinates are needed")


# --------------------------------------------------------------------------
# verification


@dataclass
class VerifyReport:
    """Itemized outcome of the checks; ``failures`` lists the failed ones."""

    checks: list = field(default_factory=list)
    max_residual: float = 0.0

    def add(self, name, ok, detail=""):
        self.checks.append({"check": name, "passed": bool(ok), "detail": detail})

    @property
    def failures(self):
        return [c for c in self.checks if not c["passed"]]

    @property
    def passed(self):
        return not self.failures

    def to_json(self):
        return {"passed": self.passed, "max_residual": self.max_residual, "failures": self.failures,
                "checked": len(self.checks)}


def verify(P, graph, tol=TOL, margin=1e-12):
    """Check the mirror-polyhedron conditions of a realization of ``graph``.

    ``tol`` bounds the relative residuals of the equalities and ``margin``
    the strict inequalities at vertices (unit covectors, unit vertex points).
    """
    rep = VerifyReport()
    if set(P.faces) != set(graph.faces):
        rep.add("faces", False, "realization faces differ from the graph faces")
        return rep
    A = P.cartan()
    i = P.index
    # residuals are measured against |alpha_s| |v_t|, the size of the
    # rounding error in alpha_s(v_t), so rescalings and frames do not matter
    scale = np.outer(np.linalg.norm(P.alpha, axis=1), np.linalg.norm(P.v, axis=1))
    resid = 0.0
    for f in P.faces:
        k = i[f]
        r = abs(A[k, k] - 2.0) / scale[k, k]
        resid = max(resid, r)
        if r > tol:
            rep.add("alpha_s(v_s) = 2", False, f"face {f}: {A[k, k]}")
    for a, b in itertools.permutations(P.faces, 2):
        v_ba = -A[i[a], i[b]]
        lab = graph.labels.get(frozenset((a, b)))
        r = abs(v_ba) / scale[i[a], i[b]]
        if lab is not None and lab.right_angle:
            resid = max(resid, r)
            if r > tol:
                rep.add("order-2 zeros", False, f"v_{b}{a} = {v_ba}")
        elif v_ba <= 0 or r <= tol:
            rep.add("v_ts > 0", False, f"v_{b}{a} = {v_ba}")
    for pair, lab in graph.labels.items():
        a, b = (i[f] for f in pair)
        prod = A[a, b] * A[b, a]
        r = abs(prod - lab.mu) / (scale[a, b] * scale[b, a])
        resid = max(resid, r)
        if r > tol:
            rep.add("v_st v_ts = mu", False, f"{graph.sort(pair)}: {prod} vs {lab.mu}")
    rank = np.linalg.matrix_rank(P.alpha)
    if rank != P.dim:
        rep.add("covector rank", False, f"rank {rank} < {P.dim}")
    unit = _unit_rows(P)
    points = []
    for vert in graph.vertices:
        x = vertex_point(P, tuple(vert))
        rows = [i[f] for f in vert]
        on = np.max(np.abs(unit[rows] @ x))
        others = [k for k, f in enumerate(P.faces) if f not in vert]
        worst = np.max(unit[others] @ x) if others else -1.0
        resid = max(resid, on)
        if on > tol or worst >= -margin:
            rep.add("vertex in convex position", False, f"{graph.sort(vert)}: max other {worst:.3g}")
        points.append(x)
    spurious = set(realized_vertices(P, margin)) - set(graph.vertices)
    if spurious:
        rep.add("no extra vertices", False, f"{[graph.sort(v) for v in spurious]}")
    phi = -unit.sum(axis=0)
    if points and min(phi @ x for x in points) <= 0:
        rep.add("proper convexity", False, "no positive covector on all vertices")
    rep.max_residual = float(resid)
    rep.add("all conditions", not rep.failures)
    return rep
