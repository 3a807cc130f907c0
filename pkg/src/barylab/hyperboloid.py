"""Real hyperbolic space H^n in the hyperboloid (Lorentz) model.

Points live on the upper sheet of {x : <x,x>_M = -1} in Minkowski space
R^{n,1} with signature (-,+,...,+).  Distances, geodesics, exponential and
logarithm maps, the gradient and Hessian of the distance function, and
Lorentz isometries are all closed-form; every operation re-projects its
output so the sheet constraint drifts by less than ~1e-15 per call.

The dimension n >= 2 is a runtime parameter (the length of a coordinate
vector is n+1).  Two API levels are provided: typed wrappers (`HPoint`,
`HTangent`, `HIsometry`) that validate their invariants on construction,
and raw ``numpy`` functions operating on coordinate arrays, used by the
inner loops of the barycenter and natural-map pipelines.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateGradientError,
    InvalidPointError,
    SingularHessianError,
)


@dataclass
class Tolerances:
    """Default validation tolerances; mutate the module-level ``TOL`` to override."""

    sheet: float = 1e-10          # |<x,x>_M + 1| on points
    tangency: float = 1e-10       # |<base,v>_M| on tangent vectors
    isometry: float = 1e-9        # entrywise |L^T J L - J|
    ill_conditioned: float = 1e-9  # -<p,q>_M may not drop below 1 - this
    coincident: float = 1e-12     # points closer than this are "equal" for grad/hess


TOL = Tolerances()


# ---------------------------------------------------------------------------
# raw array layer
# ---------------------------------------------------------------------------

def minkowski_dot(u, v):
    """Minkowski inner product -u0*v0 + sum_i ui*vi (broadcasts over rows)."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return -u[..., 0] * v[..., 0] + np.sum(u[..., 1:] * v[..., 1:], axis=-1)


def project_to_sheet(x):
    """Rescale onto the unit hyperboloid, flipping to the upper sheet."""
    x = np.asarray(x, dtype=float)
    nrm = -minkowski_dot(x, x)
    if np.any(nrm <= 0):
        raise InvalidPointError("coordinates are not timelike; cannot project to sheet")
    y = x / np.sqrt(nrm)[..., None]
    sign = np.where(y[..., 0] > 0, 1.0, -1.0)
    return y * sign[..., None]


def check_point(x, tol=None):
    """Validate the sheet constraint; returns the array unchanged."""
    x = np.asarray(x, dtype=float)
    tol = TOL.sheet if tol is None else tol
    err = np.abs(minkowski_dot(x, x) + 1.0)
    if np.any(err > tol) or np.any(x[..., 0] <= 0):
        raise InvalidPointError(
            f"point violates hyperboloid constraint (max error {float(np.max(err)):.3e})"
        )
    return x


def tangent_project(p, v):
    """Project an ambient vector onto the tangent space at p."""
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    return v + minkowski_dot(p, v)[..., None] * p


def basepoint(n):
    """The point (1, 0, ..., 0) of H^n."""
    o = np.zeros(n + 1)
    o[0] = 1.0
    return o


def dist(p, q):
    """Geodesic distance.

    Uses d = 2*asinh(|p-q|_M / 2), which is exact on the hyperboloid and
    avoids the catastrophic cancellation of acosh(-<p,q>_M) near zero.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    mu = -minkowski_dot(p, q)
    if np.any(mu < 1.0 - TOL.ill_conditioned):
        raise InvalidPointError(
            f"-<p,q>_M = {float(np.min(mu)):.12f} < 1; inputs are off the sheet"
        )
    chord_sq = np.maximum(minkowski_dot(p - q, p - q), 0.0)
    return 2.0 * np.arcsinh(0.5 * np.sqrt(chord_sq))


def exp(p, v):
    """Geodesic starting at p with initial velocity v, evaluated at time 1."""
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    theta = np.sqrt(np.maximum(minkowski_dot(v, v), 0.0))
    if np.ndim(theta) == 0:
        if theta < 1e-300:
            return p.copy()
        out = math.cosh(theta) * p + (math.sinh(theta) / theta) * v
        return project_to_sheet(out)
    safe = np.where(theta < 1e-300, 1.0, theta)
    out = np.cosh(theta)[..., None] * p + (np.sinh(safe) / safe)[..., None] * v
    return project_to_sheet(out)


def log(p, q):
    """Tangent vector at p whose exponential is q; |log(p,q)|_M = dist(p,q)."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    mu = -minkowski_dot(p, q)
    d = dist(p, q)
    if np.ndim(d) == 0:
        if d < 1e-300:
            return np.zeros_like(p)
        factor = d / math.sqrt(max(mu * mu - 1.0, 1e-300))
        return tangent_project(p, factor * (q - mu * p))
    sinh_d = np.sqrt(np.maximum(mu * mu - 1.0, 0.0))
    factor = np.where(sinh_d < 1e-300, 1.0, d / np.where(sinh_d < 1e-300, 1.0, sinh_d))
    return tangent_project(p, factor[..., None] * (q - mu[..., None] * p))


def log_many(p, Q):
    """Log map from a single point p to each row of Q; returns (m, n+1)."""
    p = np.asarray(p, dtype=float)
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    mu = -minkowski_dot(Q, p)
    chord_sq = np.maximum(minkowski_dot(Q - p, Q - p), 0.0)
    d = 2.0 * np.arcsinh(0.5 * np.sqrt(chord_sq))
    sinh_d = np.sqrt(np.maximum(mu * mu - 1.0, 0.0))
    factor = np.where(sinh_d < 1e-300, 1.0, d / np.where(sinh_d < 1e-300, 1.0, sinh_d))
    V = factor[:, None] * (Q - mu[:, None] * p)
    return V + minkowski_dot(p, V)[:, None] * p


def dist_many(p, Q):
    """Distance from p to each row of Q."""
    p = np.asarray(p, dtype=float)
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    chord_sq = np.maximum(minkowski_dot(Q - p, Q - p), 0.0)
    return 2.0 * np.arcsinh(0.5 * np.sqrt(chord_sq))


def tangent_frame(p):
    """Deterministic Minkowski-orthonormal basis of T_p H^n, shape (n, n+1).

    Gram-Schmidt of the spatial coordinate axes projected to the tangent
    space; always full rank because projection only kills the p direction.
    """
    p = np.asarray(p, dtype=float)
    n = p.shape[-1] - 1
    frame = []
    for i in range(1, n + 1):
        e = np.zeros(n + 1)
        e[i] = 1.0
        u = tangent_project(p, e)
        for f in frame:
            u = u - minkowski_dot(u, f) * f
        nrm = math.sqrt(max(minkowski_dot(u, u), 0.0))
        if nrm < 1e-12:
            raise InvalidPointError("degenerate tangent frame; point far off the sheet?")
        frame.append(u / nrm)
    return np.array(frame)


def grad_dist(y, z):
    """Unit tangent at y pointing away from z (the gradient of d(., z))."""
    d = dist(y, z)
    if d < TOL.coincident:
        raise DegenerateGradientError("gradient of distance undefined at coincident points")
    return -log(y, z) / d


def hess_dist_matrix(y, z, frame=None):
    """Hessian of d(., z) at y as an (n, n) matrix in an orthonormal frame.

    In curvature -1 the Hessian is coth(d) * (I - g g^T) where g is the unit
    radial direction: eigenvalue 0 along g, coth(d) on its orthocomplement.
    Returns (matrix, frame).
    """
    d = float(dist(y, z))
    if d < TOL.coincident:
        raise SingularHessianError("Hessian of distance singular at coincident points")
    if frame is None:
        frame = tangent_frame(np.asarray(y, dtype=float))
    g = grad_dist(y, z)
    g_cof = frame @ (_j_matrix(frame.shape[1] - 1) @ g)
    n = frame.shape[0]
    coth = 1.0 / math.tanh(d)
    return coth * (np.eye(n) - np.outer(g_cof, g_cof)), frame


def _j_matrix(n):
    j = np.eye(n + 1)
    j[0, 0] = -1.0
    return j


def frame_coords(frame, v):
    """Coordinates of tangent vector(s) v in a Minkowski-orthonormal frame."""
    J = _j_matrix(frame.shape[1] - 1)
    return np.asarray(v, dtype=float) @ (J @ frame.T)


def random_point(rng, n, radius=1.0):
    """Point at a uniform-direction, uniform-radius position within `radius` of the basepoint."""
    u = rng.normal(size=n)
    u /= np.linalg.norm(u)
    t = radius * rng.uniform()
    v = np.zeros(n + 1)
    v[1:] = t * u
    return exp(basepoint(n), v)


def random_isometry(rng, n, spread=1.0):
    """Haar-ish random Lorentz matrix preserving the upper sheet.

    Minkowski Gram-Schmidt applied to a random timelike first column and
    random Gaussian spatial columns.
    """
    s = spread * rng.normal(size=n)
    cols = [np.concatenate(([math.sqrt(1.0 + float(s @ s))], s))]
    signs = [-1.0]
    while len(cols) < n + 1:
        u = rng.normal(size=n + 1)
        for c, sg in zip(cols, signs):
            u = u - sg * minkowski_dot(u, c) * c
        nrm_sq = minkowski_dot(u, u)
        if nrm_sq < 1e-10:
            continue
        cols.append(u / math.sqrt(nrm_sq))
        signs.append(1.0)
    return np.column_stack(cols)


def boost(t, n, axis=1):
    """Lorentz boost of rapidity t along a spatial axis."""
    m = np.eye(n + 1)
    m[0, 0] = m[axis, axis] = math.cosh(t)
    m[0, axis] = m[axis, 0] = math.sinh(t)
    return m


def rotation(theta, n, i=1, j=2):
    """Rotation by theta in the (x_i, x_j) spatial plane."""
    m = np.eye(n + 1)
    m[i, i] = m[j, j] = math.cos(theta)
    m[i, j] = -math.sin(theta)
    m[j, i] = math.sin(theta)
    return m


def check_isometry(matrix, tol=None):
    """Validate L^T J L = J and upper-sheet preservation."""
    matrix = np.asarray(matrix, dtype=float)
    tol = TOL.isometry if tol is None else tol
    n = matrix.shape[0] - 1
    J = _j_matrix(n)
    err = np.max(np.abs(matrix.T @ J @ matrix - J))
    if err > tol:
        raise InvalidPointError(f"matrix does not preserve the Minkowski form (error {err:.3e})")
    if matrix[0, 0] <= 0:
        raise InvalidPointError("matrix swaps the hyperboloid sheets")
    return matrix


# ---------------------------------------------------------------------------
# typed layer
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HPoint:
    """A point of H^n; `coords` are the n+1 Minkowski coordinates."""

    coords: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coords", check_point(np.asarray(self.coords, dtype=float)))

    @property
    def n(self):
        return self.coords.shape[0] - 1

    @classmethod
    def origin(cls, n):
        return cls(basepoint(n))

    def to_json(self):
        return json.dumps(self.coords.tolist())

    @classmethod
    def from_json(cls, text):
        return cls(np.array(json.loads(text), dtype=float))


@dataclass(frozen=True)
class HTangent:
    """A tangent vector `vec` at `base`, Minkowski-orthogonal to it."""

    base: HPoint
    vec: np.ndarray

    def __post_init__(self):
        vec = np.asarray(self.vec, dtype=float)
        if abs(minkowski_dot(self.base.coords, vec)) > TOL.tangency:
            raise InvalidPointError("vector is not tangent to the hyperboloid at base")
        object.__setattr__(self, "vec", vec)

    @property
    def norm(self):
        return math.sqrt(max(minkowski_dot(self.vec, self.vec), 0.0))


@dataclass(frozen=True)
class HIsometry:
    """A Lorentz matrix preserving the Minkowski form and the upper sheet."""

    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", check_isometry(np.asarray(self.matrix, dtype=float)))

    def to_json(self):
        return json.dumps(self.matrix.tolist())

    @classmethod
    def from_json(cls, text):
        return cls(np.array(json.loads(text), dtype=float))

    def __matmul__(self, other):
        return HIsometry(self.matrix @ other.matrix)


def distance(p: HPoint, q: HPoint) -> float:
    """Geodesic distance between two points."""
    return float(dist(p.coords, q.coords))


def exp_map(v: HTangent) -> HPoint:
    """Endpoint of the geodesic with initial data v."""
    return HPoint(exp(v.base.coords, v.vec))


def log_map(p: HPoint, q: HPoint) -> HTangent:
    """Initial velocity of the geodesic from p to q."""
    return HTangent(p, log(p.coords, q.coords))


def grad_distance(y: HPoint, z: HPoint) -> HTangent:
    """Unit gradient of d(., z) at y; points away from z."""
    return HTangent(y, grad_dist(y.coords, z.coords))


def hess_distance(y: HPoint, z: HPoint, frame=None):
    """Hessian of d(., z) at y; see `hess_dist_matrix`."""
    return hess_dist_matrix(y.coords, z.coords, frame=frame)


def apply_isometry(g: HIsometry, p: HPoint) -> HPoint:
    """Image of p under the isometry, re-projected to the sheet."""
    return HPoint(project_to_sheet(g.matrix @ p.coords))
