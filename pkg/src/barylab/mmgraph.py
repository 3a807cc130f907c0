"""Metric measure graphs: shortest-path metric, vertex measures, finite
covers with deck actions, ball growth and volume-entropy estimation.

Graphs are immutable after construction.  Covers are built from voltage
assignments (a permutation of the sheet set per base edge), which gives a
programmable deck group with the covering property holding by construction;
deck transformations are recovered from the centralizer of the monodromy
group, conjugated along a spanning tree.
"""

from __future__ import annotations

import heapq
import itertools
import json
from dataclasses import dataclass

import numpy as np

from .errors import (
    DisconnectedCoverError,
    GraphLookupError,
    WindowSaturationError,
)


class MMGraph:
    """Connected weighted graph with a nonnegative vertex measure."""

    def __init__(self, vertices, edges, measure=None):
        self.vertices = list(vertices)
        self.index = {v: i for i, v in enumerate(self.vertices)}
        if len(self.index) != len(self.vertices):
            raise ValueError("duplicate vertex ids")
        self.edges = []
        self._adj = [[] for _ in self.vertices]
        for u, v, length in edges:
            if u not in self.index or v not in self.index:
                raise GraphLookupError(f"edge ({u!r}, {v!r}) references unknown vertex")
            length = float(length)
            if length <= 0:
                raise ValueError("edge lengths must be positive")
            e = len(self.edges)
            self.edges.append((u, v, length))
            iu, iv = self.index[u], self.index[v]
            self._adj[iu].append((iv, length, e))
            if iu != iv:
                self._adj[iv].append((iu, length, e))
        if measure is None:
            measure = {v: 1.0 for v in self.vertices}
        self.measure = {v: float(measure.get(v, 0.0)) for v in self.vertices}
        self._measure_arr = np.array([self.measure[v] for v in self.vertices])
        if np.any(self._measure_arr < 0):
            raise ValueError("vertex measures must be nonnegative")
        if self.total_measure <= 0:
            raise ValueError("total measure must be positive")
        if not self._is_connected():
            raise ValueError("graph must be connected")

    # -- basic queries ------------------------------------------------------

    @property
    def n(self):
        return len(self.vertices)

    @property
    def total_measure(self):
        return float(np.sum(self._measure_arr))

    def neighbors(self, v):
        return [(self.vertices[i], length) for i, length, _ in self._adj[self.index[v]]]

    def degree(self, v):
        i = self.index[v]
        return sum(2 if j == i else 1 for j, _, _ in self._adj[i])

    def _is_connected(self):
        if not self.vertices:
            return False
        seen = {0}
        stack = [0]
        while stack:
            i = stack.pop()
            for j, _, _ in self._adj[i]:
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        return len(seen) == self.n

    def dijkstra(self, source, cutoff=None):
        """Distances from `source`; vertices beyond `cutoff` are omitted."""
        if source not in self.index:
            raise GraphLookupError(f"unknown vertex {source!r}")
        dist = {}
        heap = [(0.0, self.index[source])]
        while heap:
            d, i = heapq.heappop(heap)
            if i in dist:
                continue
            if cutoff is not None and d > cutoff:
                continue
            dist[i] = d
            for j, length, _ in self._adj[i]:
                if j not in dist:
                    nd = d + length
                    if cutoff is None or nd <= cutoff:
                        heapq.heappush(heap, (nd, j))
        return {self.vertices[i]: d for i, d in dist.items()}

    def distance(self, u, v):
        return self.dijkstra(u)[v]

    def eccentricity(self, v):
        return max(self.dijkstra(v).values())

    # -- serialization ------------------------------------------------------

    def to_json(self):
        return json.dumps(
            {
                "vertices": self.vertices,
                "edges": [[u, v, length] for u, v, length in self.edges],
                "measure": {str(v): w for v, w in self.measure.items()},
            }
        )

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        vertices = data["vertices"]
        by_str = {str(v): v for v in vertices}
        measure = {by_str[k]: w for k, w in data.get("measure", {}).items()}

        def _vid(x):
            return by_str.get(str(x), x)

        edges = [(_vid(u), _vid(v), length) for u, v, length in data["edges"]]
        return cls(vertices, edges, measure or None)


# ---------------------------------------------------------------------------
# growth and entropy
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EntropyEstimate:
    """Least-squares growth rate of log ball mass over a finite window.

    The limit definition is unreachable at finite scale; `residual` (the
    regression RMS) quantifies how trustworthy the window was.
    """

    h: float
    window: tuple
    residual: float


def ball_measure(g: MMGraph, x, R: float) -> float:
    """Total vertex measure within shortest-path distance R of x."""
    if R < 0:
        raise ValueError("radius must be nonnegative")
    dist = g.dijkstra(x, cutoff=R)
    return float(sum(g.measure[v] for v, d in dist.items() if d <= R))


def volume_entropy(g: MMGraph, x, r_min: float, r_max: float, step: float = 1.0) -> EntropyEstimate:
    """Regression estimate of the exponential growth rate of ball masses.

    Samples radii r_min, r_min+step, ..., r_max (unit step by default).
    Raises WindowSaturationError when the largest ball already swallows the
    whole graph, in which case the window says nothing about growth.
    """
    if not (r_max > r_min >= 0):
        raise ValueError("window must satisfy r_max > r_min >= 0")
    dist = g.dijkstra(x)
    radii = []
    r = r_min
    while r <= r_max + 1e-12:
        radii.append(r)
        r += step
    masses = []
    dist_items = sorted(dist.items(), key=lambda kv: kv[1])
    total = g.total_measure
    k = 0
    acc = 0.0
    for r in radii:
        while k < len(dist_items) and dist_items[k][1] <= r:
            acc += g.measure[dist_items[k][0]]
            k += 1
        masses.append(acc)
    if masses[-1] >= total:
        raise WindowSaturationError(
            f"ball of radius {radii[-1]} contains the whole graph; shrink the window"
        )
    if min(masses) <= 0:
        raise ValueError("empty ball in window; increase r_min")
    ys = np.log(np.array(masses))
    xs = np.array(radii)
    slope, intercept = np.polyfit(xs, ys, 1)
    fit = slope * xs + intercept
    residual = float(np.sqrt(np.mean((ys - fit) ** 2)))
    return EntropyEstimate(float(slope), (r_min, r_max), residual)


def lipschitz_constant(f, domain: MMGraph, target_metric, mode: str = "all") -> float:
    """Largest ratio target_metric(f u, f v) / d(u, v).

    mode="all" maximizes over all vertex pairs; mode="edges" only over
    edges, which upper-bounds the all-pairs value for shortest-path metrics.
    """
    fmap = f if callable(f) else f.__getitem__
    if mode == "edges":
        best = 0.0
        for u, v, length in domain.edges:
            if u == v:
                continue
            best = max(best, target_metric(fmap(u), fmap(v)) / length)
        return best
    if mode != "all":
        raise ValueError("mode must be 'all' or 'edges'")
    best = 0.0
    for u in domain.vertices:
        dist = domain.dijkstra(u)
        fu = fmap(u)
        for v, d in dist.items():
            if v == u or d <= 0:
                continue
            best = max(best, target_metric(fu, fmap(v)) / d)
    return best


# ---------------------------------------------------------------------------
# covers
# ---------------------------------------------------------------------------

def _compose(p, q):
    """Permutation composition p after q (tuples in one-line notation)."""
    return tuple(p[q[i]] for i in range(len(p)))


def _inverse(p):
    inv = [0] * len(p)
    for i, pi in enumerate(p):
        inv[pi] = i
    return tuple(inv)


@dataclass
class CoverMap:
    """A k-sheeted covering of graphs with its deck transformations.

    `projection` maps total vertices to base vertices; every map in `deck`
    is a measure-preserving graph automorphism commuting with the
    projection.  Fibers all have cardinality `sheets`.
    """

    total: MMGraph
    base: MMGraph
    projection: dict
    deck: list
    sheets: int

    def validate(self, tol=1e-12):
        """Check the covering and deck properties explicitly."""
        fibers = {}
        for w, v in self.projection.items():
            fibers.setdefault(v, []).append(w)
        sizes = {len(ws) for ws in fibers.values()}
        if sizes != {self.sheets}:
            raise ValueError(f"fiber cardinalities {sizes} != sheets {self.sheets}")
        for w in self.total.vertices:
            star = sorted(
                (self.projection[nb], round(length, 12))
                for nb, length in _half_edge_star(self.total, w)
            )
            base_star = sorted(
                (nb, round(length, 12))
                for nb, length in _half_edge_star(self.base, self.projection[w])
            )
            if star != base_star:
                raise ValueError(f"projection is not a local bijection at {w!r}")
        for phi in self.deck:
            for w in self.total.vertices:
                if self.projection[phi[w]] != self.projection[w]:
                    raise ValueError("deck map does not commute with projection")
                if abs(self.total.measure[phi[w]] - self.total.measure[w]) > tol:
                    raise ValueError("deck map does not preserve the measure")
        return True


def _half_edge_star(g: MMGraph, v):
    """Half-edges at v: a loop contributes two entries."""
    star = []
    for u, w, length in g.edges:
        if u == v:
            star.append((w, length))
        if w == v:
            star.append((u, length))
    return star


def build_cover(base: MMGraph, voltage: dict) -> CoverMap:
    """k-sheeted cover from a voltage assignment.

    `voltage` maps edge indices of `base` to permutations of range(k) in
    one-line notation; missing edges get the identity.  Lifted edges keep
    their length, lifted vertices carry the base vertex measure (so a fiber
    carries k times the base mass).  Raises DisconnectedCoverError if the
    voltages do not act transitively enough to connect the total graph.
    """
    if not voltage:
        raise ValueError("voltage assignment is empty")
    k = len(next(iter(voltage.values())))
    perms = {}
    for e, p in voltage.items():
        p = tuple(p)
        if sorted(p) != list(range(k)):
            raise ValueError(f"voltage for edge {e} is not a permutation of range({k})")
        perms[e] = p
    ident = tuple(range(k))
    for e in range(len(base.edges)):
        perms.setdefault(e, ident)

    vertices = [(v, s) for v in base.vertices for s in range(k)]
    edges = []
    for e, (u, v, length) in enumerate(base.edges):
        p = perms[e]
        for s in range(k):
            edges.append(((u, s), (v, p[s]), length))
    measure = {(v, s): base.measure[v] for v, s in vertices}

    # connectivity check before constructing (MMGraph refuses disconnected)
    comp = _components(vertices, edges)
    if len(comp) > 1:
        raise DisconnectedCoverError(
            f"voltage cover splits into {len(comp)} components", components=comp
        )
    total = MMGraph(vertices, edges, measure)
    projection = {(v, s): v for v, s in vertices}
    deck = _deck_transformations(base, perms, k)
    return CoverMap(total=total, base=base, projection=projection, deck=deck, sheets=k)


def _components(vertices, edges):
    adj = {v: [] for v in vertices}
    for u, v, _ in edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = set()
    comps = []
    for v in vertices:
        if v in seen:
            continue
        comp = []
        stack = [v]
        seen.add(v)
        while stack:
            w = stack.pop()
            comp.append(w)
            for nb in adj[w]:
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        comps.append(comp)
    return comps


def _deck_transformations(base: MMGraph, perms: dict, k: int, max_sheets=8):
    """Deck maps (v, s) -> (v, (t_v delta t_v^-1)(s)) for delta in the
    centralizer of the monodromy group, found by brute force over S_k."""
    if k > max_sheets:
        return []
    root = base.vertices[0]
    ident = tuple(range(k))
    tree_voltage = {root: ident}
    stack = [root]
    non_tree = set(range(len(base.edges)))
    incident = {v: [] for v in base.vertices}
    for e, (u, v, _) in enumerate(base.edges):
        incident[u].append((e, v, False))
        incident[v].append((e, u, True))
    while stack:
        u = stack.pop()
        for e, v, reverse in incident[u]:
            if v in tree_voltage:
                continue
            p = perms[e]
            if reverse:
                p = _inverse(p)
            tree_voltage[v] = _compose(p, tree_voltage[u])
            non_tree.discard(e)
            stack.append(v)
    loops = []
    for e in non_tree:
        u, v, _ = base.edges[e]
        lam = _compose(_inverse(tree_voltage[v]), _compose(perms[e], tree_voltage[u]))
        loops.append(lam)
    monodromy = _closure(loops, k)
    deck = []
    for delta in itertools.permutations(range(k)):
        if all(_compose(delta, g) == _compose(g, delta) for g in monodromy):
            phi = {}
            for v in base.vertices:
                t = tree_voltage[v]
                conj = _compose(t, _compose(delta, _inverse(t)))
                for s in range(k):
                    phi[(v, s)] = (v, conj[s])
            deck.append(phi)
    return deck


def _closure(gens, k, cap=40320):
    ident = tuple(range(k))
    group = {ident}
    frontier = [ident]
    gens = [tuple(g) for g in gens]
    while frontier:
        nxt = []
        for g in frontier:
            for h in gens:
                gh = _compose(g, h)
                if gh not in group:
                    group.add(gh)
                    nxt.append(gh)
                    if len(group) > cap:
                        raise ValueError("monodromy group too large to enumerate")
        frontier = nxt
    return group
