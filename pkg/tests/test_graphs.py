import random

import pytest
from oracles import count_linear_extensions

from ibltransfer.corolla import Corolla, corollas_up_to
from ibltransfer.graphs import (
    LeveledGraph,
    PortGraph,
    canonical_form,
    enumerate_leveled_graphs,
    equals,
    levelizations,
    linear_extensions,
)
from ibltransfer.suspension import evaluate_graph_sign


def test_counts():
    assert len(enumerate_leveled_graphs(2, 1, 0)) == 1
    assert len(enumerate_leveled_graphs(1, 1, 1)) == 2
    g6 = enumerate_leveled_graphs(2, 2, 0)
    assert len(g6) == 6
    assert sorted(g.n_vertices for g in g6) == [1, 2, 2, 2, 2, 2]
    with pytest.raises(ValueError):
        enumerate_leveled_graphs(2, 2, 0, max_weight=1)


@pytest.mark.parametrize("c", corollas_up_to(4))
def test_enumeration_properties(c):
    gs = enumerate_leveled_graphs(*c)
    assert len(set(canonical_form(g) for g in gs)) == len(gs)
    for g in gs:
        assert g.is_leveled()
        assert g.n_vertices <= c.weight
        assert all(v.weight >= 1 for v in g.vertices)
        assert g.boundary() == c
        assert evaluate_graph_sign(g)[1] == c
        assert canonical_form(g) == g


def _shuffle_ports(g, rng):
    """Same graph with ports permuted at every vertex."""
    pin = [rng.sample(range(v.k), v.k) for v in g.vertices]
    pout = [rng.sample(range(v.l), v.l) for v in g.vertices]
    ins = [[None] * v.k for v in g.vertices]
    outs = [[None] * v.l for v in g.vertices]

    def m(p, table):
        return p if isinstance(p, int) else (p[0], table[p[0]][p[1]])
    for v in range(g.n_vertices):
        for i, p in enumerate(g.ins[v]):
            ins[v][pin[v][i]] = m(p, pout)
        for j, p in enumerate(g.outs[v]):
            outs[v][pout[v][j]] = m(p, pin)
    return type(g)(g.vertices, ins, outs)


def test_canonical_form_port_and_edge_invariance():
    rng = random.Random(1)
    for g in enumerate_leveled_graphs(2, 2, 1):
        h = _shuffle_ports(g, rng)
        assert canonical_form(h) == canonical_form(g)
        assert canonical_form(canonical_form(h)) == canonical_form(h)
        edges = {rng.random(): e for e in g.edges()}
        again = LeveledGraph.from_edges(g.vertices, edges, g.in_legs(), g.out_legs())
        assert canonical_form(again) == canonical_form(g)


def test_leg_labels_matter():
    g = next(g for g in enumerate_leveled_graphs(2, 2, 0)
             if g.n_vertices == 2 and 0 in g.ins[0] + g.ins[1] and len(g.in_legs()) == 2
             and g.in_legs()[0][0] != g.in_legs()[1][0])
    swapped = LeveledGraph(g.vertices, [[1 - p if isinstance(p, int) else p for p in x] for x in g.ins],
                           g.outs)
    assert not equals(g, swapped)


def test_levelizations():
    assert len(levelizations(PortGraph.single((2, 2, 0)))) == 1
    # two incomparable tops feeding one bottom vertex
    g = PortGraph([(2, 1, 0), (1, 1, 1), (1, 1, 1)], [[(1, 0), (2, 0)], [0], [1]],
                  [[0], [(0, 0)], [(0, 1)]])
    below = [set(g.below(v)) for v in range(3)]
    assert len(levelizations(g)) == count_linear_extensions(below) == 2
    chain = PortGraph([(1, 1, 1)] * 3, [[(1, 0)], [(2, 0)], [0]], [[0], [(0, 0)], [(1, 0)]])
    assert len(linear_extensions(chain)) == 1


def test_levelizations_random():
    rng = random.Random(7)
    gs = [g for g in enumerate_leveled_graphs(2, 3, 1) if g.n_vertices == 4]
    for g in rng.sample(gs, 20):
        below = [set(g.below(v)) for v in range(g.n_vertices)]
        assert len(linear_extensions(g)) == count_linear_extensions(below)


def test_unleveled_canonical_merges_levelings():
    gs = enumerate_leveled_graphs(2, 2, 1)
    unlev = {canonical_form(PortGraph(*g.key())) for g in gs}
    assert len(unlev) < len(gs)
    for u in unlev:
        assert Corolla(*u.boundary()) == (2, 2, 1)
