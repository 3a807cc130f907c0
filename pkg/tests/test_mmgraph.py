import math

import numpy as np
import pytest

from barylab import graphs, hyperboloid as hyp
from barylab.errors import (
    DisconnectedCoverError,
    GraphLookupError,
    WindowSaturationError,
)
from barylab.mmgraph import (
    MMGraph,
    ball_measure,
    build_cover,
    lipschitz_constant,
    volume_entropy,
)

from oracles import regular_tree_ball_mass

RNG = np.random.default_rng(3)


def test_ball_measure_trivial_cases():
    g = graphs.path_graph(20)
    assert ball_measure(g, 10, 0.0) == 1.0
    assert ball_measure(g, 10, 100.0) == g.total_measure
    with pytest.raises(GraphLookupError):
        ball_measure(g, "nope", 1.0)


def test_ball_measure_matches_tree_closed_form():
    g = graphs.regular_tree(3, 9)
    for R in range(0, 9):
        assert ball_measure(g, 0, R) == regular_tree_ball_mass(3, R)


def test_ball_measure_nondecreasing():
    g = graphs.tutte_coxeter_graph()
    masses = [ball_measure(g, 0, r) for r in np.linspace(0, 5, 21)]
    assert all(b >= a for a, b in zip(masses, masses[1:]))


def test_volume_entropy_trees():
    g3 = graphs.regular_tree(3, 14)
    est3 = volume_entropy(g3, 0, 4, 12)
    assert abs(est3.h - math.log(2)) < 0.02 * math.log(2)
    g4 = graphs.regular_tree(4, 10)
    est4 = volume_entropy(g4, 0, 3, 9)
    assert abs(est4.h - math.log(3)) < 0.02 * math.log(3)


def test_volume_entropy_path_is_flat():
    g = graphs.path_graph(200)
    est = volume_entropy(g, 100, 10, 60)
    assert abs(est.h) < 0.05


def test_volume_entropy_basepoint_independence():
    g = graphs.regular_tree(3, 14)
    shallow = [v for v in g.vertices if g.dijkstra(0, cutoff=2).get(v) is not None]
    picks = RNG.choice(shallow, size=5, replace=False)
    ests = [volume_entropy(g, int(v), 4, 12) for v in picks]
    for e in ests[1:]:
        assert abs(e.h - ests[0].h) <= 2 * (e.residual + ests[0].residual) + 1e-12


def test_volume_entropy_saturation_error():
    g = graphs.path_graph(30)
    with pytest.raises(WindowSaturationError):
        volume_entropy(g, 15, 5, 40)


def test_cover_trivial_voltage_disconnected():
    base = graphs.rose_graph(2)
    with pytest.raises(DisconnectedCoverError) as exc:
        build_cover(base, {0: (0, 1, 2), 1: (0, 1, 2)})
    assert len(exc.value.components) == 3


def test_cover_single_loop_cycle():
    base = MMGraph([0], [(0, 0, 1.0)])
    cover = build_cover(base, {0: (1, 2, 3, 4, 0)})
    assert cover.total.n == 5
    assert sorted(cover.total.dijkstra((0, 0)).values()) == [0, 1, 1, 2, 2]
    cover.validate()
    assert len(cover.deck) == 5  # cyclic deck group


def test_cover_measure_lifts_base_measure():
    base = MMGraph([0, 1], [(0, 1, 1.0), (0, 1, 2.0)], {0: 2.0, 1: 3.0})
    cover = build_cover(base, {0: (1, 0), 1: (0, 1)})
    for (v, s), w in cover.total.measure.items():
        assert w == base.measure[v]
    # fiber carries k times the base mass
    assert cover.total.total_measure == 2 * base.total_measure
    cover.validate()


def test_cover_deck_action_random_voltages():
    base = graphs.heawood_graph()
    for trial in range(5):
        rng = np.random.default_rng(100 + trial)
        k = 3
        voltage = {}
        for e in range(len(base.edges)):
            voltage[e] = tuple(rng.permutation(k))
        try:
            cover = build_cover(base, voltage)
        except DisconnectedCoverError:
            continue
        cover.validate()
        for phi in cover.deck:
            for w in cover.total.vertices:
                assert cover.projection[phi[w]] == cover.projection[w]


def test_cover_fibers_constant_cardinality():
    base = graphs.heawood_graph()
    voltage = {0: (1, 2, 0)}
    cover = build_cover(base, voltage)
    fibers = {}
    for w, v in cover.projection.items():
        fibers.setdefault(v, 0)
        fibers[v] += 1
    assert set(fibers.values()) == {3}


def test_cover_balls_match_base_below_girth():
    # covers are local isometries: ball masses agree under the girth scale,
    # so entropy estimates in such windows agree exactly
    base = graphs.tutte_coxeter_graph()  # girth 8
    voltage = {e: ((1, 0) if e % 3 == 0 else (0, 1)) for e in range(len(base.edges))}
    cover = build_cover(base, voltage)
    hb = volume_entropy(base, 0, 1, 3)
    ht = volume_entropy(cover.total, (0, 0), 1, 3)
    assert ht.h >= hb.h - 2 * (hb.residual + ht.residual) - 1e-12
    for r in (1, 2, 3):
        assert ball_measure(base, 0, r) == ball_measure(cover.total, (0, 0), r)


def test_lipschitz_constant_identity_and_constant():
    g = graphs.cycle_graph(12)

    def graph_metric(u, v):
        return g.distance(u, v)

    assert lipschitz_constant(lambda v: v, g, graph_metric, mode="all") == 1.0
    assert lipschitz_constant(lambda v: 0, g, graph_metric, mode="all") == 0.0


def test_lipschitz_edge_bound_dominates_all_pairs():
    g = graphs.tutte_coxeter_graph()
    rng = np.random.default_rng(17)
    coords = {v: hyp.random_point(rng, 3, 1.0) for v in g.vertices}

    def target_metric(a, b):
        return float(hyp.dist(np.asarray(a), np.asarray(b)))

    f = {v: tuple(coords[v]) for v in g.vertices}
    lip_all = lipschitz_constant(f, g, target_metric, mode="all")
    lip_edges = lipschitz_constant(f, g, target_metric, mode="edges")
    assert lip_all <= lip_edges + 1e-12


def test_graph_json_roundtrip():
    g = MMGraph(["a", "b", "c"], [("a", "b", 1.5), ("b", "c", 0.5)], {"a": 2.0, "b": 1.0, "c": 0.25})
    g2 = MMGraph.from_json(g.to_json())
    assert g2.vertices == g.vertices
    assert g2.edges == g.edges
    assert g2.measure == g.measure
    gi = graphs.cycle_graph(5)
    gi2 = MMGraph.from_json(gi.to_json())
    assert gi2.vertices == gi.vertices


def test_graph_validation_errors():
    with pytest.raises(ValueError):
        MMGraph([0, 1], [(0, 1, 0.0)])  # zero length
    with pytest.raises(ValueError):
        MMGraph([0, 1], [])  # disconnected
    with pytest.raises(GraphLookupError):
        MMGraph([0], [(0, 1, 1.0)])


def test_ball_net_connected_and_embedded():
    g, emb = graphs.hyperbolic_ball_net(np.random.default_rng(5), n=3, radius=1.5,
                                        spacing=0.45)
    assert g.n > 50
    # edge lengths match hyperbolic distances of endpoint embeddings
    for u, v, length in g.edges[:40]:
        assert abs(length - hyp.dist(emb[u], emb[v])) < 1e-9


def test_rotation_symmetric_net_deck_exactness():
    g, emb, deck, rot = graphs.rotation_symmetric_net(
        np.random.default_rng(6), order=4, n=3, radius=1.5, spacing=0.45)
    # deck is a graph automorphism with exactly equal edge lengths
    edge_set = {}
    for u, v, length in g.edges:
        edge_set[frozenset((u, v))] = length
    for key, length in edge_set.items():
        u, v = tuple(key)
        assert edge_set[frozenset((deck[u], deck[v]))] == length
    # embedding intertwines the deck map and the rotation isometry
    for w in g.vertices:
        assert hyp.dist(emb[deck[w]], hyp.project_to_sheet(rot @ emb[w])) < 1e-12
