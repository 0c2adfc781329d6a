import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mirrorpoly.corpus import PI3, block, cube, five_blocks, prism, two_blocks
from mirrorpoly.ecimahedron import (
    NotEcimahedron,
    block_kind,
    circuit_side,
    cut_along,
    decompose,
    is_ecimahedron,
    reference_block,
    sink_source_system,
    tetrahedron,
    truncate,
)


def test_truncate_counts():
    g = tetrahedron()
    h = truncate(g, g.vertices[0], name="x")
    assert (h.f, h.e, len(h.vertices)) == (g.f + 1, g.e + 3, len(g.vertices) + 2)
    assert all(h.is_order_two("x", f) for f in h.neighbors["x"])


def test_truncate_rejects_missing_vertex():
    with pytest.raises(ValueError):
        truncate(tetrahedron(), frozenset({"1", "2", "9"}))


@pytest.mark.parametrize("i", range(5))
def test_block_kind_of_reference_blocks(i):
    assert block_kind(reference_block(i)) == i
    assert block_kind(block(i)) == i


def test_cube_is_not_a_block_nor_an_ecimahedron():
    assert block_kind(cube()) is None
    with pytest.raises(NotEcimahedron):
        decompose(cube())
    assert not is_ecimahedron(cube())


def test_circuit_sides_partition_the_faces():
    g = two_blocks()
    left = circuit_side(g, ("1", "2", "3"), "left")
    right = circuit_side(g, ("1", "2", "3"), "right")
    assert left | right == set(g.faces) - {"1", "2", "3"}
    assert not left & right


def test_cut_along_gives_blocks():
    g = two_blocks()
    pieces = [cut_along(g, ("1", "2", "3"), side) for side in ("left", "right")]
    assert sorted(block_kind(p) for p in pieces) == [4, 4]


@pytest.mark.parametrize(
    "graph, n_blocks",
    [(block(0), 1), (block(3), 1), (block(4), 1), (two_blocks(), 2), (five_blocks(1), 5)],
)
def test_block_counts(graph, n_blocks):
    forest = decompose(graph)
    assert len(forest.blocks) == n_blocks


def test_label_essential_prism_gets_a_virtual_block():
    g = prism((PI3, PI3, PI3), (PI3, PI3, PI3), (PI3, PI3, PI3))
    forest = decompose(g)
    assert len(forest.blocks) == 2
    assert sum(b.virtual for b in forest.blocks) == 1


def _check_tree(forest):
    tree = forest.tree()
    assert nx.is_connected(tree)
    assert tree.number_of_edges() == tree.number_of_nodes() - 1
    for b in forest.blocks:
        assert tree.degree(b.name) == 4


def test_block_tree_shape(corpus):
    for name, g in corpus.items():
        if name == "cube":
            continue
        _check_tree(decompose(g))


def test_sink_source_system(corpus):
    for name, g in corpus.items():
        if name == "cube":
            continue
        forest = decompose(g)
        for b in forest.blocks:
            heads = {e.head == b.name for e in forest.corner_edges(b)}
            # every block is a sink (all heads) or a source (all tails)
            assert len(heads) == 1
            assert (b.name in forest.sources) == (heads == {False})
        orient = sink_source_system(forest)
        assert set(orient) == {e.key for e in forest.edges}


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(min_value=0, max_value=10_000), min_size=0, max_size=5))
def test_random_truncations_stay_ecimahedra(picks):
    g = tetrahedron(label=PI3)
    for k, pick in enumerate(picks):
        vertex = sorted(g.vertices, key=g.sort)[pick % len(g.vertices)]
        g = truncate(g, vertex, name=f"x{k}")
    forest = decompose(g)
    _check_tree(forest)
    # each block has one tetrahedron and truncations add faces one by one
    assert sum(len(b.faces) for b in forest.blocks) >= g.f


def test_json_export_lists_nodes_and_edges():
    out = decompose(two_blocks()).to_json()
    assert {n["id"] for n in out["nodes"]} >= {"B0", "B1"}
    assert out["edges"]
