"""The natural-map pipeline on a truncated cover.

For a basepoint x of a metric measure graph (standing in for a cover of the
source space) and a vertex embedding f into H^n (the lifted comparison
map), the pipeline:

1. builds the exponentially weighted measure mu with density
   measure(z) * exp(-s * d(x, z)) on the truncated ball, with a geometric
   tail bound certifying the truncation;
2. pushes mu forward along f and takes the d^2-barycenter, giving the
   natural map value F_s(x);
3. assembles, at y = F_s(x), the distance-weighted probability measure eta
   (density rho_z(y) against the pushforward) and its moment tensors

   - H: average of outer products of the unit directions from y to the
     atoms (symmetric PSD, unit trace),
   - K: average Hessian of the distance functions (equals
     coth(rho) * (I - g g^T) per atom in curvature -1),
   - L: average of (1/rho) g g^T,
   - A: average of g tensor G, coupling target directions with the
     discrete source gradients G of z -> d(x, .),
   - B: average of G G^T (trace <= 1 since |G| <= 1);

4. evaluates the differential formula s * (L + K)^{-1} A, its determinant
   (the Jacobian estimate), a mesh-scale Jacobian from convex-hull volume
   ratios, and the determinant inequality chain that bounds the Jacobian by
   (s / (N - 1))^N.

The source gradients G are least-squares fits of directional difference
quotients over the one-ring of x, in a local chart obtained by classical
MDS on graph distances; they are clipped to unit norm, the one property the
continuum construction guarantees.  Atoms closer than an exclusion
threshold to y are dropped from eta (the 1/rho and coth singularities),
with the excluded mass reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import hyperboloid as hyp
from .barycenter import barycenter
from .errors import (
    ConfigurationError,
    DegeneratePointError,
    RankDeficiencyError,
    TruncationError,
)
from .measures import DiscreteMeasure
from .mmgraph import MMGraph


@dataclass
class NaturalMapConfig:
    """Parameters of one natural-map evaluation.

    `s` must exceed the entropy estimate by three residuals (finite total
    mass of the weighted measure needs s above the growth rate; the margin
    covers window error).  `tail_tolerance` is the admissible certified
    tail mass beyond the truncation radius as a fraction of retained mass.
    """

    s: float
    truncation_radius: float
    h_estimate: float
    h_residual: float = 0.0
    tail_tolerance: float = 1e-3
    solver_tol: float = 1e-9
    exclusion_threshold: float = 1e-9
    chart_rank_tol: float = 1e-8

    def __post_init__(self):
        floor = self.h_estimate + 3.0 * self.h_residual
        if not self.s > floor:
            raise ConfigurationError(
                f"s = {self.s} must exceed h_estimate + 3*residual = {floor}"
            )
        if self.truncation_radius <= 0:
            raise ConfigurationError("truncation radius must be positive")

    def with_s(self, s):
        return NaturalMapConfig(
            s=s,
            truncation_radius=self.truncation_radius,
            h_estimate=self.h_estimate,
            h_residual=self.h_residual,
            tail_tolerance=self.tail_tolerance,
            solver_tol=self.solver_tol,
            exclusion_threshold=self.exclusion_threshold,
            chart_rank_tol=self.chart_rank_tol,
        )


def s_grid(h_estimate: float, levels: int = 7):
    """Geometric approach grid s_k = h * (1 + 2^-k), k = 0..levels-1."""
    return [h_estimate * (1.0 + 2.0 ** (-k)) for k in range(levels)]


# ---------------------------------------------------------------------------
# the weighted measure and its truncation certificate
# ---------------------------------------------------------------------------

def exponential_tail_bound(dists, masses, s, h, eps, radius):
    """Geometric bound on the mass beyond `radius`.

    Fits the constant C of the envelope C * exp((h + eps - s) * r) to the
    observed integer annulus masses, then sums the geometric series past
    the truncation radius.
    """
    q = h + eps - s
    if q >= 0:
        raise ConfigurationError("tail bound needs s > h + eps")
    weights = masses * np.exp(-s * dists)
    r_max = float(np.max(dists)) if len(dists) else 0.0
    annuli = np.arange(1.0, max(2.0, math.ceil(r_max) + 1))
    C = 0.0
    for i in annuli:
        sel = (dists > i - 1.0) & (dists <= i)
        a_i = float(np.sum(weights[sel]))
        if a_i > 0:
            C = max(C, a_i / math.exp(q * i))
    if C == 0.0:
        return 0.0, 0.0
    tail = C * math.exp(q * (math.floor(radius) + 1)) / (1.0 - math.exp(q))
    return tail, C


def mu_x_s(cover: MMGraph, x, cfg: NaturalMapConfig, dists=None):
    """Exponentially weighted measure on the truncated ball about x.

    Returns (measure, tail_bound).  The tail bound is an absolute mass; it
    is accepted when below tail_tolerance times the retained mass (a
    relative criterion, so one tolerance works across fixture scales).
    Raises TruncationError with a suggested radius otherwise.
    """
    if dists is None:
        dists = cover.dijkstra(x)
    verts = list(dists.keys())
    d = np.array([dists[v] for v in verts])
    m = np.array([cover.measure[v] for v in verts])
    eps = min(3.0 * cfg.h_residual + 1e-6, 0.5 * (cfg.s - cfg.h_estimate))
    tail, C = exponential_tail_bound(d, m, cfg.s, cfg.h_estimate, eps, cfg.truncation_radius)
    inside = d <= cfg.truncation_radius
    atoms = [verts[i] for i in np.nonzero(inside)[0]]
    weights = m[inside] * np.exp(-cfg.s * d[inside])
    retained = float(np.sum(weights))
    if tail > cfg.tail_tolerance * retained:
        q = cfg.h_estimate + eps - cfg.s
        suggested = math.log(
            cfg.tail_tolerance * retained * (1.0 - math.exp(q)) / C
        ) / q
        raise TruncationError(
            f"certified tail {tail:.3e} exceeds tolerance "
            f"{cfg.tail_tolerance:.3e} x retained mass {retained:.3e}",
            tail_bound=tail,
            suggested_radius=float(suggested),
        )
    return DiscreteMeasure(atoms, weights), tail


# ---------------------------------------------------------------------------
# F_s and the tensors
# ---------------------------------------------------------------------------

def _embedding_fn(f_tilde):
    if callable(f_tilde):
        return f_tilde
    return lambda v: f_tilde[v]


def pushforward_with_fibers(mu: DiscreteMeasure, f_tilde):
    """Group mu atoms by image point; returns (sites, weights, fiber lists)."""
    emb = _embedding_fn(f_tilde)
    groups = {}
    for idx, (v, w) in enumerate(zip(mu.sites, mu.weights)):
        key = tuple(float(c) for c in emb(v))
        if key not in groups:
            groups[key] = [0.0, []]
        groups[key][0] += float(w)
        groups[key][1].append(idx)
    sites = list(groups.keys())
    weights = np.array([groups[s][0] for s in sites])
    fibers = [groups[s][1] for s in sites]
    return sites, weights, fibers


def natural_map_point(cover: MMGraph, f_tilde, x, cfg: NaturalMapConfig, dists=None):
    """F_s(x): the barycenter of the normalized pushforward measure.

    Returns (HPoint, info) with the measure, tail bound and solver record
    in `info`.
    """
    mu, tail = mu_x_s(cover, x, cfg, dists=dists)
    sites, weights, _ = pushforward_with_fibers(mu, f_tilde)
    sigma = DiscreteMeasure(sites, weights)
    res = barycenter(sigma.normalize(), tol=cfg.solver_tol)
    info = {"mu": mu, "sigma": sigma, "tail_bound": tail, "solver": res}
    return res.point, info


def local_chart(cover: MMGraph, x, neighbor_dists, dim, rank_tol=1e-8):
    """Chart coordinates of the one-ring of x by classical MDS.

    `neighbor_dists` maps each neighbor u to its full distance dict (used
    for the pairwise one-ring distances).  Returns (neighbors, M) with M
    the (k, dim) matrix of chart positions; raises RankDeficiencyError when
    the one-ring does not span `dim` directions.
    """
    neighbors = sorted(neighbor_dists.keys(), key=lambda u: str(u))
    k = len(neighbors)
    if k < dim:
        raise RankDeficiencyError(
            f"vertex {x!r} has {k} neighbors; chart needs at least {dim}"
        )
    d_x = np.array([neighbor_dists[u][x] for u in neighbors])
    gram = np.empty((k, k))
    for a, u in enumerate(neighbors):
        du = neighbor_dists[u]
        for b, v in enumerate(neighbors):
            d_uv = du[v]
            gram[a, b] = 0.5 * (d_x[a] ** 2 + d_x[b] ** 2 - d_uv**2)
    vals, vecs = np.linalg.eigh(gram)
    order = np.argsort(vals)[::-1]
    vals, vecs = vals[order], vecs[:, order]
    if vals[dim - 1] <= rank_tol * max(vals[0], 1e-300):
        raise RankDeficiencyError(
            f"one-ring of {x!r} spans fewer than {dim} directions "
            f"(eigenvalues {vals[:dim]})"
        )
    M = vecs[:, :dim] * np.sqrt(np.maximum(vals[:dim], 0.0))
    return neighbors, M


def source_gradients(cover: MMGraph, x, mu: DiscreteMeasure, fibers, dim,
                     dists_x, neighbor_dists, rank_tol=1e-8):
    """Per-image-atom discrete gradients G of z -> d(x, .), clipped to unit norm.

    Each cover atom x' contributes the least-squares fit of the directional
    differences d(u, x') - d(x, x') over the chart positions of the
    neighbors u; fibers are then averaged with the mu weights.
    """
    neighbors, M = local_chart(cover, x, neighbor_dists, dim, rank_tol)
    pinv = np.linalg.pinv(M)
    atoms = mu.sites
    base = np.array([dists_x[v] for v in atoms])
    diffs = np.empty((len(neighbors), len(atoms)))
    for a, u in enumerate(neighbors):
        du = neighbor_dists[u]
        diffs[a] = np.array([du[v] for v in atoms]) - base
    G = (pinv @ diffs).T  # (num mu atoms, dim)
    norms = np.linalg.norm(G, axis=1)
    G /= np.maximum(norms, 1.0)[:, None]
    mu_w = mu.weights
    G_fiber = np.empty((len(fibers), dim))
    for j, members in enumerate(fibers):
        w = mu_w[members]
        G_fiber[j] = (w @ G[members]) / np.sum(w)
    norms = np.linalg.norm(G_fiber, axis=1)
    G_fiber /= np.maximum(norms, 1.0)[:, None]
    return G_fiber


@dataclass
class TensorSet:
    """The moment tensors of eta at y = F_s(x), in an orthonormal frame."""

    y: np.ndarray
    frame: np.ndarray
    H: np.ndarray
    K: np.ndarray
    L: np.ndarray
    A: np.ndarray
    B: np.ndarray
    eta_mass: float
    excluded_mass: float
    tail_bound: float

    @property
    def dim(self):
        return self.H.shape[0]


def assemble_tensors(cover: MMGraph, f_tilde, x, cfg: NaturalMapConfig,
                     dists=None, neighbor_dists=None) -> TensorSet:
    """Build the full tensor set at the natural-map image of x."""
    emb = _embedding_fn(f_tilde)
    dim = len(np.asarray(emb(x))) - 1
    if dists is None:
        dists = cover.dijkstra(x)
    mu, tail = mu_x_s(cover, x, cfg, dists=dists)
    sites, weights, fibers = pushforward_with_fibers(mu, f_tilde)
    sigma = DiscreteMeasure(sites, weights)
    res = barycenter(sigma.normalize(), tol=cfg.solver_tol)
    y = res.coords

    Z = np.array([list(site) for site in sites])
    rho = hyp.dist_many(y, Z)
    keep = rho >= cfg.exclusion_threshold
    excluded = float(np.sum(weights[~keep]))
    Zk, rhok, wk = Z[keep], rho[keep], weights[keep]
    fibers_kept = [f for f, k in zip(fibers, keep) if k]

    eta_hat = rhok * wk
    eta_mass = float(np.sum(eta_hat))
    eta = eta_hat / eta_mass

    frame = hyp.tangent_frame(y)
    logs = hyp.log_many(y, Zk)
    g_unit = -logs / rhok[:, None]
    g_hat = hyp.frame_coords(frame, g_unit)  # (m, dim), unit rows

    coth = 1.0 / np.tanh(rhok)
    H = (g_hat * eta[:, None]).T @ g_hat
    K = float(np.sum(eta * coth)) * np.eye(dim) - (g_hat * (eta * coth)[:, None]).T @ g_hat
    L = (g_hat * (eta / rhok)[:, None]).T @ g_hat

    if neighbor_dists is None:
        neighbor_dists = {
            u: cover.dijkstra(u) for u, _ in cover.neighbors(x) if u != x
        }
    G = source_gradients(cover, x, mu, fibers_kept, dim, dists, neighbor_dists,
                         rank_tol=cfg.chart_rank_tol)
    A = (g_hat * eta[:, None]).T @ G
    B = (G * eta[:, None]).T @ G
    return TensorSet(
        y=y, frame=frame, H=H, K=K, L=L, A=A, B=B,
        eta_mass=eta_mass, excluded_mass=excluded, tail_bound=tail,
    )


def jacobian_formula(H, K, L, A, s):
    """|det(s * (L + K)^{-1} A)| and the condition number of L + K."""
    LK = L + K
    cond = float(np.linalg.cond(LK))
    if not np.isfinite(cond) or cond > 1e14:
        raise DegeneratePointError(f"L + K numerically singular (cond {cond:.3e})")
    M = s * np.linalg.solve(LK, A)
    return abs(float(np.linalg.det(M))), cond


def cauchy_schwarz_gap(tensors: TensorSet):
    """Minimum eigenvalue of B - A^T H^+ A (>= 0 up to rounding).

    This is the positive-semidefinite form of the bilinear Cauchy-Schwarz
    bound coupling A to H and B; it implies det(A)^2 <= det(H) det(B).
    """
    Hp = np.linalg.pinv(tensors.H, hermitian=True)
    gap = tensors.B - tensors.A.T @ Hp @ tensors.A
    return float(np.min(np.linalg.eigvalsh(0.5 * (gap + gap.T))))


def jacobian_mesh(cover: MMGraph, point_map, x, r, dim=None):
    """Mesh-scale Jacobian: image hull volume / source hull volume on B(x, r).

    The image cloud is charted in the tangent space at the image of x, the
    source cloud by classical MDS on its pairwise graph distances; both
    volumes come from convex hulls.  O(r)-accurate at best; returns
    (value, rank_ok) and value 0.0 with rank_ok=False on degenerate clouds.
    """
    from scipy.spatial import ConvexHull, QhullError

    emb = _embedding_fn(point_map)
    center_img = np.asarray(emb(x), dtype=float)
    if dim is None:
        dim = len(center_img) - 1
    ball = cover.dijkstra(x, cutoff=r)
    verts = sorted(ball.keys(), key=lambda v: (ball[v], str(v)))
    if len(verts) < dim + 1:
        return 0.0, False
    imgs = np.array([emb(v) for v in verts])
    tangent = hyp.frame_coords(hyp.tangent_frame(center_img),
                               hyp.log_many(center_img, imgs))
    # source chart: MDS on pairwise distances within the ball
    pair = np.empty((len(verts), len(verts)))
    for a, u in enumerate(verts):
        du = cover.dijkstra(u, cutoff=2.0 * r + 1e-9)
        for b, v in enumerate(verts):
            pair[a, b] = du.get(v, 2.0 * r)
    sq = pair**2
    row = sq.mean(axis=1)
    gram = -0.5 * (sq - row[:, None] - row[None, :] + sq.mean())
    vals, vecs = np.linalg.eigh(gram)
    order = np.argsort(vals)[::-1]
    vals, vecs = vals[order], vecs[:, order]
    if vals[dim - 1] <= 1e-9 * max(vals[0], 1e-300):
        return 0.0, False
    source = vecs[:, :dim] * np.sqrt(np.maximum(vals[:dim], 0.0))
    sing = np.linalg.svd(tangent - tangent.mean(axis=0), compute_uv=False)
    if len(sing) < dim or sing[dim - 1] <= 1e-9 * max(sing[0], 1e-300):
        return 0.0, False
    try:
        vol_img = ConvexHull(tangent).volume
        vol_src = ConvexHull(source).volume
    except QhullError:
        return 0.0, False
    if vol_src <= 0:
        return 0.0, False
    return float(vol_img / vol_src), True


# ---------------------------------------------------------------------------
# full runs
# ---------------------------------------------------------------------------

@dataclass
class PointRecord:
    """Diagnostics of one (sample point, s) evaluation."""

    x: object
    s: float
    point: np.ndarray
    tensors: TensorSet
    jac_formula: float
    jac_mesh: float
    mesh_rank_ok: bool
    cond: float
    cs_gap: float
    measure: float = 1.0

    @property
    def trace_H(self):
        return float(np.trace(self.tensors.H))

    @property
    def h_deviation(self):
        n = self.tensors.dim
        return float(np.linalg.norm(self.tensors.H - np.eye(n) / n))

    @property
    def det_K(self):
        return float(np.linalg.det(self.tensors.K))

    @property
    def det_B(self):
        return float(np.linalg.det(self.tensors.B))

    @property
    def min_eig_K_minus_ImH(self):
        t = self.tensors
        n = t.dim
        return float(np.min(np.linalg.eigvalsh(t.K - (np.eye(n) - t.H))))

    def jac_bound(self, h0):
        return (self.s / h0) ** self.tensors.dim


@dataclass
class NaturalMapRun:
    """All point records of a run plus the window data used to gate s."""

    records: list
    h_estimate: float
    h_residual: float
    total_measure: float
    sample_measure: float

    def for_s(self, s):
        return [r for r in self.records if r.s == s]

    @property
    def s_values(self):
        seen = []
        for r in self.records:
            if r.s not in seen:
                seen.append(r.s)
        return seen


def run_natural_map(cover: MMGraph, f_tilde, base_cfg: NaturalMapConfig,
                    sample_points, s_values=None, mesh_radius=None) -> NaturalMapRun:
    """Evaluate the pipeline at each sample point for each s.

    Graph distances from each sample point and its one-ring are computed
    once and shared across the s grid.
    """
    emb = _embedding_fn(f_tilde)
    s_values = list(s_values) if s_values is not None else [base_cfg.s]
    records = []
    sample_measure = 0.0
    for x in sample_points:
        sample_measure += cover.measure[x]
        dists = cover.dijkstra(x)
        neighbor_dists = {u: cover.dijkstra(u) for u, _ in cover.neighbors(x) if u != x}
        for s in s_values:
            cfg = base_cfg.with_s(s)
            tensors = assemble_tensors(cover, f_tilde, x, cfg,
                                       dists=dists, neighbor_dists=neighbor_dists)
            jac, cond = jacobian_formula(tensors.H, tensors.K, tensors.L, tensors.A, s)
            if mesh_radius is not None:
                jm, rank_ok = jacobian_mesh(cover, emb, x, mesh_radius,
                                            dim=tensors.dim)
            else:
                jm, rank_ok = float("nan"), True
            records.append(PointRecord(
                x=x, s=s, point=tensors.y, tensors=tensors,
                jac_formula=jac, jac_mesh=jm, mesh_rank_ok=rank_ok,
                cond=cond, cs_gap=cauchy_schwarz_gap(tensors),
                measure=cover.measure[x],
            ))
    return NaturalMapRun(
        records=records,
        h_estimate=base_cfg.h_estimate,
        h_residual=base_cfg.h_residual,
        total_measure=cover.total_measure,
        sample_measure=sample_measure,
    )


def entropy_volume_report(run: NaturalMapRun, h0: float):
    """Quadrature of the Jacobian against the bound (s/h0)^N * m(X).

    Returns one dict per s value: the sample-quadrature integral, the
    bound, their gap, the worst pointwise bound violation, and the
    H -> I/N monitor value max_x |H - I/N|_F.
    """
    out = []
    for s in run.s_values:
        recs = run.for_s(s)
        n = recs[0].tensors.dim
        scale = run.total_measure / run.sample_measure
        integral = scale * sum(r.jac_formula * r.measure for r in recs)
        bound = (s / h0) ** n * run.total_measure
        per_point_bound = (s / h0) ** n
        worst = max(r.jac_formula - per_point_bound for r in recs)
        out.append({
            "s": s,
            "integral_jac": integral,
            "bound": bound,
            "gap": bound - integral,
            "max_pointwise_violation": worst,
            "h_monitor": max(r.h_deviation for r in recs),
            "records": len(recs),
        })
    return out
