"""JSON loaders for the CLI input formats.

Formats:

- point: JSON array of n+1 reals; isometry: JSON array of rows.
- measure: {"atoms": [{"site": <id or coords>, "w": <real>}]}.
- graph: {"vertices": [...], "edges": [[u, v, len], ...], "measure": {v: w}}.
- voltage: {"<edge index>": [one-line permutation]} (0- or 1-based).
- simplicial map: {"domain": <complex>, "target": <complex>,
  "vertex_map": {str(v): image}} with complex
  {"dim": n, "simplices": [[v, ...], ...], "charts": [...]} (charts optional).
- subgroup: {"rank": r, "generators": ["abA", ...]}.
"""

from __future__ import annotations

import json

import numpy as np

from .indices.simplicial import Pseudomanifold, SimplicialMap
from .measures import DiscreteMeasure
from .mmgraph import MMGraph


def load_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def load_graph(path) -> MMGraph:
    with open(path, "r", encoding="utf-8") as fh:
        return MMGraph.from_json(fh.read())


def load_measure(path) -> DiscreteMeasure:
    with open(path, "r", encoding="utf-8") as fh:
        return DiscreteMeasure.from_json(fh.read())


def load_voltage(data):
    """Voltage dict from parsed JSON; accepts 0- or 1-based permutations."""
    out = {}
    for key, perm in data.items():
        perm = list(perm)
        base = min(perm)
        if base == 1:
            perm = [p - 1 for p in perm]
        out[int(key)] = tuple(perm)
    return out


def _freeze_vertex(v):
    return tuple(v) if isinstance(v, list) else v


def load_complex(data) -> Pseudomanifold:
    simplices = [tuple(_freeze_vertex(v) for v in s) for s in data["simplices"]]
    charts = data.get("charts")
    if charts is not None:
        charts = [np.array(c, dtype=float) for c in charts]
    return Pseudomanifold(data["dim"], simplices, charts,
                          closed=data.get("closed", True))


def load_simplicial_map(data) -> SimplicialMap:
    domain = load_complex(data["domain"])
    target = load_complex(data["target"])
    by_str = {str(v): v for v in domain.vertices}
    tgt_by_str = {str(v): v for v in target.vertices}
    vmap = {}
    for k, img in data["vertex_map"].items():
        img = _freeze_vertex(img)
        vmap[by_str[k]] = tgt_by_str.get(str(img), img)
    return SimplicialMap(domain, target, vmap)


def load_embedding(data):
    """Vertex->coords map keyed by str(vertex), parallel to a graph."""
    return {k: np.array(v, dtype=float) for k, v in data.items()}
