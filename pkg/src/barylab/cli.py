"""Command-line front end: JSON in, CSV/JSON out, deterministic under --seed.

Commands: entropy, barycenter, wasserstein, naturalmap, bcg, indices,
coarea.  Global flags: --seed, --tol, --threads, --out-dir.  Exit codes:
0 success, 1 assertion or bound violation, 2 input error.  Every report
embeds the tool version and a digest of the effective configuration, and
contains no timestamps, so identical invocations produce identical bytes.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys

import numpy as np

from . import __version__, graphs, hyperboloid as hyp
from .barycenter import barycenter
from .bcg import bcg_scan
from .errors import BarylabError, BoundViolationError, SolverFailureError
from .indices import coarea_check, ind_H_degree, pre_count, stallings_index
from .indices import fixtures as index_fixtures
from .io import (
    load_embedding,
    load_graph,
    load_json,
    load_measure,
    load_simplicial_map,
)
from .mmgraph import volume_entropy
from .naturalmap import NaturalMapConfig, entropy_volume_report, natural_map_point, run_natural_map
from .transport import wasserstein1


def _digest(config) -> str:
    blob = json.dumps(config, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _stamp(config):
    return {"version": __version__, "config_digest": _digest(config)}


def _write(path, text):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _fmt(x):
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _csv(rows, header):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(x) for x in row))
    return "\n".join(lines) + "\n"


def _print_json(payload):
    sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_entropy(args):
    g = load_graph(args.graph)
    basepoint = args.basepoint if args.basepoint is not None else str(g.vertices[0])
    by_str = {str(v): v for v in g.vertices}
    x = by_str.get(basepoint, basepoint)
    est = volume_entropy(g, x, args.rmin, args.rmax, step=args.step)
    config = {"command": "entropy", "graph": args.graph, "basepoint": str(x),
              "rmin": args.rmin, "rmax": args.rmax, "step": args.step}
    dist = g.dijkstra(x)
    rows = []
    r = args.rmin
    items = sorted(dist.items(), key=lambda kv: kv[1])
    while r <= args.rmax + 1e-12:
        mass = sum(g.measure[v] for v, d in items if d <= r)
        rows.append((r, math.log(mass)))
        r += args.step
    out = os.path.join(args.out_dir, "entropy.csv")
    _write(out, f"# barylab {__version__} config {_digest(config)}\n"
           + _csv(rows, ["R", "log_mass"]))
    _print_json({**_stamp(config), "h": est.h, "window": list(est.window),
                 "residual": est.residual, "csv": out})
    return 0


def cmd_barycenter(args):
    nu = load_measure(args.measure)
    res = barycenter(nu, tol=args.tol)
    config = {"command": "barycenter", "measure": args.measure, "tol": args.tol}
    _print_json({**_stamp(config),
                 "point": [float(c) for c in res.coords],
                 "gradient_norm": res.gradient_norm,
                 "iterations": res.iterations,
                 "objective": res.objective})
    return 0


def cmd_wasserstein(args):
    mu = load_measure(args.mu)
    nu = load_measure(args.nu)
    if args.graph:
        g = load_graph(args.graph)
        by_str = {str(v): v for v in g.vertices}

        def metric(a, b):
            da = g.dijkstra(by_str.get(str(a), a))
            return da[by_str.get(str(b), b)]
    else:
        def metric(a, b):
            return float(hyp.dist(np.array(a), np.array(b)))

    value, plan = wasserstein1(mu, nu, metric=metric)
    config = {"command": "wasserstein", "mu": args.mu, "nu": args.nu,
              "graph": args.graph}
    out = os.path.join(args.out_dir, "plan.csv")
    _write(out, f"# barylab {__version__} config {_digest(config)}\n"
           + _csv(plan.flows, ["source", "target", "mass"]))
    _print_json({**_stamp(config), "w1": value, "plan": out,
                 "flows": len(plan.flows)})
    return 0


def _build_naturalmap_fixture(spec, seed):
    kind = spec.get("type", "rotation_net")
    rng = np.random.default_rng(seed)
    if kind == "ball_net":
        g, emb = graphs.hyperbolic_ball_net(
            rng, n=spec.get("dim", 3), radius=spec.get("radius", 2.0),
            spacing=spec.get("spacing", 0.3),
            edge_factor=spec.get("edge_factor", 2.0))
        return g, emb, None, None
    if kind == "rotation_net":
        g, emb, deck, rot = graphs.rotation_symmetric_net(
            rng, order=spec.get("order", 4), n=spec.get("dim", 3),
            radius=spec.get("radius", 2.0), spacing=spec.get("spacing", 0.3),
            edge_factor=spec.get("edge_factor", 2.0))
        return g, emb, deck, rot
    raise ValueError(f"unknown naturalmap fixture type {kind!r}")


def cmd_naturalmap(args):
    config = load_json(args.config)
    seed = args.seed
    if "fixture" in config:
        cover, emb, deck, rot = _build_naturalmap_fixture(config["fixture"], seed)
    else:
        cover = load_graph(config["graph"])
        emb = load_embedding(load_json(config["embedding"]))
        emb = {v: emb[str(v)] for v in cover.vertices}
        deck = rot = None
    ew = config.get("entropy", {})
    base = min(cover.vertices,
               key=lambda v: float(hyp.dist(emb[v], hyp.basepoint(len(emb[v]) - 1))))
    est = volume_entropy(cover, base, ew.get("r_min", 0.8),
                         ew.get("r_max", 1.8), step=ew.get("step", 0.25))
    h_est = config.get("h_override", est.h)
    if "s_values" in config:
        s_values = list(config["s_values"])
    else:
        s_values = [f * h_est for f in config.get("s_factors", [1.1, 1.5, 2.0])]
    floor = h_est + 3 * est.residual
    bad = [s for s in s_values if s <= floor]
    if bad:
        raise BarylabError(
            f"s values {bad} do not exceed h_est + 3*residual = {floor:.4f}"
        )
    cfg = NaturalMapConfig(
        s=s_values[0],
        truncation_radius=config.get("truncation_radius", 4.0),
        h_estimate=h_est,
        h_residual=est.residual,
        tail_tolerance=config.get("tail_tolerance", 2.0),
    )
    if "sample_points" in config:
        by_str = {str(v): v for v in cover.vertices}
        samples = [by_str.get(str(v), v) for v in config["sample_points"]]
    else:
        k = config.get("num_samples", 12)
        dist0 = cover.dijkstra(base)
        samples = sorted(cover.vertices, key=lambda v: (dist0[v], str(v)))[:k]
    run = run_natural_map(cover, emb, cfg, samples, s_values=s_values,
                          mesh_radius=config.get("mesh_radius"))
    n = run.records[0].tensors.dim
    h0 = n - 1
    report = entropy_volume_report(run, h0=h0)
    rows = []
    violations = 0
    for r in run.records:
        bound = r.jac_bound(h0)
        gap = bound - r.jac_formula
        if (abs(r.trace_H - 1) > 1e-8 or r.min_eig_K_minus_ImH < -1e-8
                or r.det_B > n**-n * (1 + 1e-6) or gap < -1e-6 * bound):
            violations += 1
        rows.append((
            str(r.x), r.s, *[float(c) for c in r.point], r.trace_H,
            r.h_deviation, r.det_K, r.jac_formula, r.jac_mesh, bound, gap,
            r.tensors.eta_mass, r.tensors.tail_bound,
            r.tensors.excluded_mass, r.cond, r.det_B, r.cs_gap,
        ))
    equivariance = None
    if deck is not None:
        devs = []
        for x in samples[: min(4, len(samples))]:
            fx, _ = natural_map_point(cover, emb, x, cfg)
            fgx, _ = natural_map_point(cover, emb, deck[x], cfg)
            devs.append(float(hyp.dist(fgx.coords,
                                       hyp.project_to_sheet(rot @ fx.coords))))
        equivariance = max(devs)
        if equivariance > 1e-6:
            violations += 1
    header = (["x", "s"] + [f"F{i}" for i in range(n + 1)]
              + ["trace_H", "H_dev", "det_K", "jac_formula", "jac_mesh",
                 "bound", "gap", "eta_mass", "tail_bound", "excluded_mass",
                 "cond_LK", "det_B", "cs_gap"])
    run_csv = os.path.join(args.out_dir, "naturalmap_run.csv")
    _write(run_csv, f"# barylab {__version__} config {_digest(config)}\n"
           + _csv(rows, header))
    summary = {
        **_stamp(config),
        "h_estimate": h_est,
        "h_residual": est.residual,
        "vertices": cover.n,
        "samples": [str(x) for x in samples],
        "s_values": s_values,
        "per_s": report,
        "equivariance": equivariance,
        "violations": violations,
        "run_csv": run_csv,
    }
    out = os.path.join(args.out_dir, "naturalmap_summary.json")
    _write(out, json.dumps(summary, indent=2, sort_keys=True, default=float) + "\n")
    _print_json(summary)
    return 1 if violations else 0


def cmd_bcg(args):
    if args.N < 3:
        raise BarylabError("the determinant inequality needs N >= 3")
    config = {"command": "bcg", "N": args.N, "d": args.d,
              "count": args.count, "seed": args.seed}
    report = bcg_scan(args.N, args.d, args.count, rng=args.seed,
                      threads=args.threads)
    rows = []
    for i in range(report.count):
        rows.append((
            i, *[float(e) for e in report.eigenvalues[i]],
            float(report.ratios[i]), report.bound,
            float(report.deficits[i]),
            report.bound - float(report.ratios[i]),
        ))
    header = (["sample"] + [f"mu{j}" for j in range(args.N)]
              + ["ratio", "bound", "deficit", "margin"])
    out = os.path.join(args.out_dir, "bcg_scan.csv")
    _write(out, f"# barylab {__version__} config {_digest(config)}\n"
           + _csv(rows, header))
    _print_json({**_stamp(config), **report.summary(), "csv": out})
    return 0


def cmd_indices(args):
    data = load_json(args.input)
    config = {"command": "indices", "input": args.input, "mode": args.mode,
              "samples": args.samples, "seed": args.seed}
    out = dict(_stamp(config))
    smap = None
    if "fixture" in data:
        spec = data["fixture"]
        kind = spec.get("type")
        if kind == "torus_cover":
            smap = index_fixtures.torus_cover_map(spec.get("k", 2))
            data.setdefault("subgroup", {
                "rank": 2,
                "generators": index_fixtures.cyclic_cover_subgroup(spec.get("k", 2)),
            })
        elif kind == "sphere_double_wrap":
            smap = index_fixtures.sphere_double_wrap()
            data.setdefault("declared_ind_pi", 1)
        elif kind == "octahedron_identity":
            sphere = index_fixtures.octahedron()
            from .indices.simplicial import SimplicialMap

            smap = SimplicialMap(sphere, sphere, {v: v for v in sphere.vertices})
        else:
            raise ValueError(f"unknown indices fixture type {kind!r}")
    elif "simplicial_map" in data:
        smap = load_simplicial_map(data["simplicial_map"])
    if smap is not None and args.mode in ("pre", "all"):
        out["pre"] = pre_count(smap, args.samples, rng=args.seed)
    if smap is not None and args.mode in ("degree", "indh", "all"):
        out["ind_H"] = ind_H_degree(smap, rng=args.seed)
    if args.mode in ("indpi", "all"):
        if "subgroup" in data:
            sg = data["subgroup"]
            out["ind_pi"] = stallings_index(sg["generators"], sg["rank"])
        elif "declared_ind_pi" in data:
            out["ind_pi"] = data["declared_ind_pi"]
    if args.mode == "all" and "pre" in out and "ind_H" in out:
        consistent = out["pre"] >= out["ind_H"] - 1e-9
        if "ind_pi" in out and out["ind_pi"] > 0:
            consistent = consistent and out["ind_H"] % out["ind_pi"] == 0
            consistent = consistent and out["pre"] >= out["ind_pi"] - 1e-9
        out["consistency"] = "OK" if consistent else "VIOLATED"
    _print_json(out)
    if out.get("consistency") == "VIOLATED":
        return 1
    return 0


def cmd_coarea(args):
    data = load_json(args.input)
    config = {"command": "coarea", "input": args.input,
              "samples": args.samples, "seed": args.seed}
    if "fixture" in data:
        spec = data["fixture"]
        kind = spec.get("type")
        if kind == "identity_pl":
            fmap = index_fixtures.identity_pl_map(spec.get("m", 4))
        elif kind == "jittered_pl":
            fmap = index_fixtures.jittered_pl_map(
                spec.get("m", 6), spec.get("amplitude", 0.8), rng=args.seed)
        elif kind == "torus_cover":
            fmap = index_fixtures.torus_cover_map(spec.get("k", 2))
        elif kind == "octahedron_identity":
            sphere = index_fixtures.octahedron()
            from .indices.simplicial import SimplicialMap

            fmap = SimplicialMap(sphere, sphere, {v: v for v in sphere.vertices})
        else:
            raise ValueError(f"unknown coarea fixture type {kind!r}")
    else:
        fmap = load_simplicial_map(data["simplicial_map"])
    report = coarea_check(fmap, samples=args.samples, rng=args.seed)
    _print_json({**_stamp(config), **report})
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog="barylab",
        description="barycenter / natural-map numerical laboratory",
    )
    parser.add_argument("--seed", type=int, default=0,
                        help="seed determining every stochastic choice")
    parser.add_argument("--tol", type=float, default=1e-9,
                        help="solver tolerance where applicable")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker threads for scans (results unchanged)")
    parser.add_argument("--out-dir", default=".",
                        help="directory for CSV/JSON artifacts")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("entropy", help="volume entropy of a graph")
    p.add_argument("graph")
    p.add_argument("--basepoint", default=None)
    p.add_argument("--rmin", type=float, required=True)
    p.add_argument("--rmax", type=float, required=True)
    p.add_argument("--step", type=float, default=1.0)
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("barycenter", help="d^2-barycenter of a measure on H^n")
    p.add_argument("measure")
    p.set_defaults(func=cmd_barycenter)

    p = sub.add_parser("wasserstein", help="exact W1 between measures")
    p.add_argument("mu")
    p.add_argument("nu")
    p.add_argument("--graph", default=None,
                   help="graph whose shortest-path metric to use for id sites")
    p.set_defaults(func=cmd_wasserstein)

    p = sub.add_parser("naturalmap", help="full natural-map pipeline run")
    p.add_argument("config")
    p.set_defaults(func=cmd_naturalmap)

    p = sub.add_parser("bcg", help="determinant inequality scan")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--count", type=int, default=10_000)
    p.set_defaults(func=cmd_bcg)

    p = sub.add_parser("indices", help="preimage/degree/subgroup indices")
    p.add_argument("input")
    p.add_argument("--mode", default="all",
                   choices=["pre", "degree", "indh", "indpi", "all"])
    p.add_argument("--samples", type=int, default=200)
    p.set_defaults(func=cmd_indices)

    p = sub.add_parser("coarea", help="coarea identity check")
    p.add_argument("input")
    p.add_argument("--samples", type=int, default=10_000)
    p.set_defaults(func=cmd_coarea)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    os.makedirs(args.out_dir, exist_ok=True)
    try:
        return args.func(args)
    except (BoundViolationError, SolverFailureError) as exc:
        sys.stderr.write(f"violation: {exc}\n")
        return 1
    except (BarylabError, ValueError, KeyError, OSError,
            json.JSONDecodeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
