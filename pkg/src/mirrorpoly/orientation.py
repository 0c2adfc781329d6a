"""Admissible partial orientations of a forest and the count kappa.

Edges of a :class:`Forest` are stored as ``(key, tail, head)``.  A sign
``+1`` orients an edge from tail to head, ``-1`` from head to tail.  An
orientation is admissible when no node of valence exactly 4 is a sink or a
source.  Only the special edges are prescribed by a partial orientation;
the ordinary edges may be oriented freely to reach admissibility.

Extension existence is a conjunction of 4-literal clauses, so it is decided
by dynamic programming on each tree rather than by a SAT reduction.  For a
subtree hanging from an edge, the state is the set of signs of that edge
which the subtree can accommodate.
"""

from __future__ import annotations

import itertools
from collections import Counter, defaultdict
from dataclasses import dataclass, field

import numpy as np

DEFAULT_MAX_SPECIAL = 24

_BOTH = frozenset((1, -1))


@dataclass(frozen=True, eq=False)
class Forest:
    """A forest with special edges.

    ``order`` gives the enumeration order of edge keys and ``labels`` their
    display names.
    """

    nodes: tuple
    edges: tuple
    special: frozenset = frozenset()
    order: dict = field(default_factory=dict)
    labels: dict = field(default_factory=dict)

    def __post_init__(self):
        keys = [k for k, _, _ in self.edges]
        if len(set(keys)) != len(keys):
            raise ValueError("edge keys must be unique")
        if not self.special <= set(keys):
            raise ValueError("special edges must be edges of the forest")

    def valence(self):
        deg = Counter()
        for _, u, w in self.edges:
            deg[u] += 1
            deg[w] += 1
        return deg

    def special_keys(self):
        """Special edge keys in enumeration order."""
        return sorted(self.special, key=lambda k: self.order.get(k, k))

    def incidence(self):
        out = defaultdict(list)
        for key, u, w in self.edges:
            out[u].append((key, w, u))
            out[w].append((key, u, u))
        return out


def as_forest(obj):
    """Accept either a Forest or a BlockForest."""
    return obj if isinstance(obj, Forest) else obj.forest()


def _fixed_signs(forest, partial):
    fixed = {}
    for key, sign in partial.items():
        s = _sign(sign)
        fixed[key] = frozenset((s,))
    return fixed


def _sign(value):
    if value in (1, "+", True):
        return 1
    if value in (-1, "-", False):
        return -1
    raise ValueError(f"direction must be +1/-1 or '+'/'-', got {value!r}")


def _count(forest, allowed):
    """Number of assignments of the edges in ``allowed``'s domain admitting an
    admissible extension.

    ``allowed[key]`` is the set of signs permitted for a counted edge;
    edges absent from ``allowed`` are existential (ordinary).
    """
    inc = forest.incidence()
    val = forest.valence()
    seen = set()
    total = 1
    for root in forest.nodes:
        if root in seen:
            continue
        total *= _count_tree(root, inc, val, allowed, seen)
        if total == 0:
            return 0
    return total


def _node_ok(node, signs, val):
    """Constraint at ``node`` given ``(sign, tail)`` pairs of all incident edges."""
    if val[node] != 4:
        return True
    outs = [(s == 1) == (tail == node) for s, tail in signs]
    return any(outs) and not all(outs)


def _combine(node, parent, children, val):
    """Profile table of ``node`` given its children tables.

    Returns a Counter mapping frozenset(feasible parent signs) -> count.
    ``parent`` is ``(key, tail, counted_signs or None)``.
    """
    out = Counter()
    tables = [list(t.items()) for _, _, t in children]
    for combo in itertools.product(*tables):
        weight = 1
        for _, c in combo:
            weight *= c
        if weight == 0:
            continue
        options = [prof for prof, _ in combo]
        if any(not o for o in options):
            continue
        tails = [tail for _, tail, _ in children]

        def feasible(extra):
            for pick in itertools.product(*options):
                signs = list(zip(pick, tails)) + extra
                if _node_ok(node, signs, val):
                    return True
            return False

        if parent is None:
            if feasible([]):
                out[frozenset()] += weight
            continue
        _, ptail, counted = parent
        if counted is None:
            prof = frozenset(s for s in (1, -1) if feasible([(s, ptail)]))
            out[prof] += weight
        else:
            for s in counted:
                prof = frozenset((s,)) if feasible([(s, ptail)]) else frozenset()
                out[prof] += weight
    return out


def _count_tree(root, inc, val, allowed, seen):
    order = []
    parent_of = {root: None}
    stack = [root]
    seen.add(root)
    while stack:
        node = stack.pop()
        order.append(node)
        for key, other, tail in inc[node]:
            if parent_of[node] is not None and key == parent_of[node][0]:
                continue
            if other in seen:
                raise ValueError("graph is not a forest")
            seen.add(other)
            parent_of[other] = (key, tail)
            stack.append(other)
    tables = {}
    for node in reversed(order):
        children = []
        for key, other, tail in inc[node]:
            if parent_of[other] is not None and parent_of[other][0] == key and other != node:
                children.append((key, tail, tables.pop((other, key))))
        p = parent_of[node]
        if p is None:
            res = _combine(node, None, children, val)
            return sum(res.values())
        key, tail = p
        counted = allowed.get(key)
        tables[(node, key)] = _combine(node, (key, tail, counted), children, val)
    raise AssertionError("unreachable")


def is_admissible(forest, partial):
    """Whether a partial orientation extends to an admissible global one.

    ``partial`` maps special edge keys to ``+1``/``-1`` (or ``'+'``/``'-'``).
    """
    forest = as_forest(forest)
    missing = forest.special - set(partial)
    if missing:
        raise ValueError(f"partial orientation misses special edges {sorted(map(str, missing))}")
    return _count(forest, _fixed_signs(forest, partial)) > 0


def kappa(forest):
    """Number of admissible partial orientations of the special edges."""
    forest = as_forest(forest)
    return _count(forest, {k: _BOTH for k in forest.special})


def kappa_fixed(forest, key, direction):
    """Admissible partial orientations giving ``direction`` to the special edge ``key``."""
    forest = as_forest(forest)
    if key not in forest.special:
        raise ValueError(f"edge {key!r} is not special")
    allowed = {k: _BOTH for k in forest.special}
    allowed[key] = frozenset((_sign(direction),))
    return _count(forest, allowed)


def enumerate_admissible(forest, max_special=DEFAULT_MAX_SPECIAL):
    """All admissible partial orientations, lexicographic with ``+`` before ``-``.

    Branches are pruned as soon as a prefix admits no admissible completion.
    """
    forest = as_forest(forest)
    keys = forest.special_keys()
    if len(keys) > max_special:
        raise ValueError(f"{len(keys)} special edges exceed the cap of {max_special}")
    out = []

    def extend(prefix):
        allowed = {k: frozenset((s,)) for k, s in prefix.items()}
        # unassigned special edges behave like ordinary ones
        if _count(forest, allowed) == 0:
            return
        if len(prefix) == len(keys):
            out.append(dict(prefix))
            return
        key = keys[len(prefix)]
        for s in (1, -1):
            prefix[key] = s
            extend(prefix)
            del prefix[key]

    extend({})
    return out


def reversed_orientation(partial):
    return {k: -_sign(s) for k, s in partial.items()}


def brute_force_kappa(forest):
    """Count admissible partial orientations by enumerating all 2^edges orientations."""
    forest = as_forest(forest)
    keys = [k for k, _, _ in forest.edges]
    n = len(keys)
    if n == 0:
        return 1
    index = {k: i for i, k in enumerate(keys)}
    bits = (np.arange(2**n)[:, None] >> np.arange(n)[None, :]) & 1  # 1 means +
    ok = np.ones(2**n, dtype=bool)
    val = forest.valence()
    for node, deg in val.items():
        if deg != 4:
            continue
        cols = []
        for key, u, w in forest.edges:
            if node == u:
                cols.append(bits[:, index[key]] == 1)
            elif node == w:
                cols.append(bits[:, index[key]] == 0)
        outs = np.stack(cols, axis=1)
        ok &= outs.any(axis=1) & ~outs.all(axis=1)
    special = [index[k] for k in forest.special]
    if not special:
        return int(ok.any())
    weights = 1 << np.arange(len(special))
    codes = (bits[ok][:, special] * weights).sum(axis=1)
    return int(np.unique(codes).size)


def orientation_to_json(forest, partial):
    """``[{"circuit": [...], "dir": "+"|"-"}]`` in enumeration order."""
    forest = as_forest(forest)
    return [
        {"circuit": _circuit_label(forest, k), "dir": "+" if _sign(partial[k]) == 1 else "-"}
        for k in forest.special_keys()
    ]


def _circuit_label(forest, key):
    names = getattr(forest, "labels", None)
    if names and key in names:
        return list(names[key])
    return sorted(key) if isinstance(key, frozenset) else key
