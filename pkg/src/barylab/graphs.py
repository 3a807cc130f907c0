"""Graph fixtures: trees, paths, cycles, roses, cage graphs and epsilon-nets
of hyperbolic balls (with an optional rotational symmetry giving an exact
deck action paired with a target isometry).
"""

from __future__ import annotations

import math

import numpy as np

from . import hyperboloid as hyp
from .mmgraph import MMGraph


def regular_tree(k: int, depth: int, edge_length: float = 1.0) -> MMGraph:
    """k-regular tree truncated at the given depth, unit vertex measure.

    Interior vertices have degree k; the root sees the exact infinite-tree
    ball counts up to radius `depth`.
    """
    if k < 2 or depth < 1:
        raise ValueError("need k >= 2 and depth >= 1")
    vertices = [0]
    edges = []
    frontier = [0]
    next_id = 1
    for level in range(depth):
        new_frontier = []
        for v in frontier:
            children = k if level == 0 else k - 1
            for _ in range(children):
                vertices.append(next_id)
                edges.append((v, next_id, edge_length))
                new_frontier.append(next_id)
                next_id += 1
        frontier = new_frontier
    return MMGraph(vertices, edges)


def path_graph(n: int, edge_length: float = 1.0) -> MMGraph:
    return MMGraph(list(range(n)), [(i, i + 1, edge_length) for i in range(n - 1)])


def cycle_graph(n: int, edge_length: float = 1.0) -> MMGraph:
    edges = [(i, (i + 1) % n, edge_length) for i in range(n)]
    return MMGraph(list(range(n)), edges)


def rose_graph(petals: int, edge_length: float = 1.0) -> MMGraph:
    """Single vertex with `petals` loops; universal cover is the 2p-regular tree."""
    return MMGraph([0], [(0, 0, edge_length) for _ in range(petals)])


def lcf_graph(n: int, pattern, repeats: int, edge_length: float = 1.0) -> MMGraph:
    """Cubic graph from LCF notation: an n-cycle plus chords i -> i + a."""
    if len(pattern) * repeats != n:
        raise ValueError("pattern length times repeats must equal n")
    edges = [(i, (i + 1) % n, edge_length) for i in range(n)]
    seen = set()
    for i in range(n):
        a = pattern[i % len(pattern)]
        j = (i + a) % n
        key = (min(i, j), max(i, j))
        if key not in seen:
            seen.add(key)
            edges.append((i, j, edge_length))
    return MMGraph(list(range(n)), edges)


def tutte_coxeter_graph(edge_length: float = 1.0) -> MMGraph:
    """The 30-vertex cubic cage of girth 8; balls match the 3-regular tree
    exactly up to radius 3."""
    return lcf_graph(30, [-13, -9, 7, -7, 9, 13], 5, edge_length)


def heawood_graph(edge_length: float = 1.0) -> MMGraph:
    """The 14-vertex cubic cage of girth 6."""
    return lcf_graph(14, [5, -5], 7, edge_length)


# ---------------------------------------------------------------------------
# hyperbolic ball nets
# ---------------------------------------------------------------------------

def _greedy_net(points, spacing):
    kept = []
    buf = np.empty_like(points)
    for idx, p in enumerate(points):
        if kept:
            d = hyp.dist_many(p, buf[: len(kept)])
            if np.min(d) < spacing:
                continue
        buf[len(kept)] = p
        kept.append(idx)
    return kept


def ball_volume(n, radius):
    """Volume of a radius-R ball in H^n (unit-sphere area times sinh integral)."""
    omega = 2.0 * math.pi ** (n / 2) / math.gamma(n / 2)
    grid = np.linspace(0, radius, 4096)
    return float(omega * np.trapezoid(np.sinh(grid) ** (n - 1), grid))


def _sample_ball(rng, n, radius, count):
    """Points roughly uniform in a hyperbolic ball: sinh^(n-1) radial law."""
    pts = np.empty((count, n + 1))
    o = hyp.basepoint(n)
    grid = np.linspace(0, radius, 4096)
    density = np.sinh(grid) ** (n - 1)
    cdf = np.cumsum(density)
    cdf /= cdf[-1]
    for i in range(count):
        u = rng.normal(size=n)
        u /= np.linalg.norm(u)
        r = float(np.interp(rng.uniform(), cdf, grid))
        v = np.zeros(n + 1)
        v[1:] = r * u
        pts[i] = hyp.exp(o, v)
    return pts


def hyperbolic_ball_net(rng, n=3, radius=2.0, spacing=0.35, edge_factor=2.0,
                        oversample=30):
    """Epsilon-net of a hyperbolic ball as a metric measure graph.

    Returns (graph, embedding) where embedding maps vertex ids to H^n
    coordinate arrays; vertices carry unit measure, edges join net points
    within edge_factor * spacing and carry their exact hyperbolic length.
    """
    target = max(200, int(oversample * ball_volume(n, radius) / spacing**n))
    samples = _sample_ball(rng, n, radius, target)
    kept = _greedy_net(samples, spacing)
    coords = samples[kept]
    m = len(coords)
    edges = []
    threshold = edge_factor * spacing
    for i in range(m):
        d = hyp.dist_many(coords[i], coords[i + 1:])
        for off in np.nonzero(d <= threshold)[0]:
            j = i + 1 + int(off)
            edges.append((i, j, float(d[off])))
    graph = MMGraph(list(range(m)), edges)
    embedding = {i: coords[i] for i in range(m)}
    return graph, embedding


def rotation_symmetric_net(rng, order=4, n=3, radius=2.0, spacing=0.35,
                           edge_factor=2.0, oversample=30):
    """Ball net invariant under a cyclic rotation, with the exact deck data.

    The net is built from orbits of a rotation by 2*pi/order in the last two
    coordinates.  Edge lengths and the vertex permutation `deck` are
    replicated across orbits, so the deck map preserves the graph exactly
    (not just to rounding).  Returns (graph, embedding, deck, rotation_matrix).
    """
    if order < 2:
        raise ValueError("order must be >= 2")
    rot = hyp.rotation(2 * math.pi / order, n, i=n - 1, j=n)
    target = max(200, int(oversample * ball_volume(n, radius) / spacing**n / order))
    samples = _sample_ball(rng, n, radius, target)
    # orbit representatives kept when the whole orbit is spacing-separated
    orbits = []
    buf = np.empty((len(samples) * order, n + 1))
    filled = 0
    for p in samples:
        orbit = [p]
        for _ in range(order - 1):
            orbit.append(hyp.project_to_sheet(rot @ orbit[-1]))
        orbit = np.array(orbit)
        ok = True
        if filled:
            for q in orbit:
                if np.min(hyp.dist_many(q, buf[:filled])) < spacing:
                    ok = False
                    break
        if ok:
            # the orbit must also be internally separated
            for a in range(order):
                for b in range(a + 1, order):
                    if hyp.dist(orbit[a], orbit[b]) < spacing:
                        ok = False
                        break
                if not ok:
                    break
        if ok:
            orbits.append(orbit)
            buf[filled:filled + order] = orbit
            filled += order
    vertices = [(o, s) for o in range(len(orbits)) for s in range(order)]
    embedding = {(o, s): orbits[o][s] for o, s in vertices}
    # representative edges computed once per orbit pair, then rotated, so the
    # edge set and lengths are exactly invariant under the deck permutation
    edges = []
    threshold = edge_factor * spacing
    n_orb = len(orbits)
    for o1 in range(n_orb):
        p = orbits[o1][0]
        for o2 in range(o1, n_orb):
            d = hyp.dist_many(p, orbits[o2])
            for s in range(order):
                if d[s] > threshold:
                    continue
                if o1 == o2:
                    # orbit-internal chord of step s: count each pair once
                    if s == 0 or s > order - s:
                        continue
                    shifts = range(order // 2) if 2 * s == order else range(order)
                else:
                    shifts = range(order)
                for shift in shifts:
                    a = (o1, shift)
                    b = (o2, (s + shift) % order)
                    edges.append((a, b, float(d[s])))
    graph = MMGraph(vertices, edges)
    deck = {(o, s): (o, (s + 1) % order) for o, s in vertices}
    return graph, embedding, deck, rot
