"""Laboratory for the Besson-Courtois-Gallot determinant inequality.

For positive definite trace-one H (N >= 3) and orthogonal almost-complex
structures J_1..J_{d-1} (J^2 = -I),

    det(H) / det(I - H - sum_i J_i H J_i)^2  <=  (N / (N + d - 2)^2)^N,

with equality exactly at H = I/N.  The sharper form carries a quadratic
deficit factor (1 - A * sum_j (mu_j - 1/N)^2)^2 for some positive constant
A that is not constructive; scans report an empirical infimum for it,
clearly labeled as empirical.

The scan hammers the inequality with Wishart-normalized samples,
Dirichlet-spectrum samples in Haar-random frames, and boundary-hugging
spectra (one eigenvalue pushed toward 1), the known hard region.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import BoundViolationError, OutsideDomainError

SAMPLERS = ("wishart", "dirichlet", "boundary")
VIOLATION_RTOL = 1e-9


# ---------------------------------------------------------------------------
# structures
# ---------------------------------------------------------------------------

def _quaternion_units():
    i = np.array([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]], dtype=float)
    j = np.array([[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]], dtype=float)
    k = i @ j
    return [i, j, k]


_OCTONION_TRIPLES = [(1, 2, 3), (1, 4, 5), (1, 7, 6), (2, 4, 6),
                     (2, 5, 7), (3, 4, 7), (3, 6, 5)]


def _octonion_units():
    mats = []
    for i in range(1, 8):
        L = np.zeros((8, 8))
        L[i, 0] = 1.0
        L[0, i] = -1.0
        for a, b, c in _OCTONION_TRIPLES:
            table = {(a, b): (c, 1), (b, c): (a, 1), (c, a): (b, 1),
                     (b, a): (c, -1), (c, b): (a, -1), (a, c): (b, -1)}
            for (p, q), (r, sign) in table.items():
                if p == i:
                    L[r, q] = sign
        mats.append(L)
    return mats


def canonical_structures(N: int, d: int):
    """Block-diagonal standard complex/quaternionic/octonionic structures.

    d=1 returns []; d=2 needs N even, d=4 needs 4 | N, d=8 needs 8 | N.
    The octonionic case is included for experimentation only.
    """
    if d == 1:
        return []
    if d == 2:
        if N % 2:
            raise ValueError("d=2 needs even N")
        half = N // 2
        J = np.zeros((N, N))
        J[:half, half:] = -np.eye(half)
        J[half:, :half] = np.eye(half)
        return [J]
    if d == 4:
        if N % 4:
            raise ValueError("d=4 needs N divisible by 4")
        blocks = _quaternion_units()
    elif d == 8:
        if N % 8:
            raise ValueError("d=8 needs N divisible by 8")
        blocks = _octonion_units()
    else:
        raise ValueError("d must be one of 1, 2, 4, 8")
    reps = N // blocks[0].shape[0]
    out = []
    for b in blocks:
        J = np.zeros((N, N))
        for r in range(reps):
            lo = r * b.shape[0]
            J[lo:lo + b.shape[0], lo:lo + b.shape[0]] = b
        out.append(J)
    return out


@dataclass
class SpectralInput:
    """A validated (H, J_1..J_{d-1}) pair for the determinant inequality."""

    N: int
    d: int
    H: np.ndarray
    J: list = field(default_factory=list)

    def __post_init__(self):
        if self.N < 3:
            raise ValueError("the inequality needs N >= 3")
        if self.d not in (1, 2, 4, 8):
            raise ValueError("d must be one of 1, 2, 4, 8")
        H = np.asarray(self.H, dtype=float)
        if H.shape != (self.N, self.N):
            raise ValueError("H has wrong shape")
        if np.max(np.abs(H - H.T)) > 1e-10:
            raise ValueError("H must be symmetric")
        if abs(np.trace(H) - 1.0) > 1e-10:
            raise ValueError("H must have unit trace")
        if np.min(np.linalg.eigvalsh(H)) <= 0:
            raise ValueError("H must be positive definite")
        if len(self.J) != self.d - 1:
            raise ValueError(f"expected {self.d - 1} structures, got {len(self.J)}")
        for Ji in self.J:
            Ji = np.asarray(Ji, dtype=float)
            if np.max(np.abs(Ji.T @ Ji - np.eye(self.N))) > 1e-9:
                raise ValueError("J must be orthogonal")
            if np.max(np.abs(Ji @ Ji + np.eye(self.N))) > 1e-9:
                raise ValueError("J^2 must equal -I")
        self.H = H
        self.J = [np.asarray(Ji, dtype=float) for Ji in self.J]


def bcg_bound(N: int, d: int = 1) -> float:
    """(N / (N + d - 2)^2)^N, the sharp constant; equality iff H = I/N."""
    if N < 3:
        raise ValueError("the inequality needs N >= 3")
    if d not in (1, 2, 4, 8):
        raise ValueError("d must be one of 1, 2, 4, 8")
    return (N / (N + d - 2) ** 2) ** N


def denominator_matrix(H, J):
    D = np.eye(H.shape[0]) - H
    for Ji in J:
        D = D - Ji @ H @ Ji
    return D


def bcg_ratio(inp: SpectralInput) -> float:
    """det(H) / det(I - H - sum J H J)^2 for a validated input."""
    D = denominator_matrix(inp.H, inp.J)
    eig = np.linalg.eigvalsh(D)
    if eig[0] <= 0:
        raise OutsideDomainError(
            f"denominator matrix not positive definite (min eig {eig[0]:.3e})"
        )
    return float(np.linalg.det(inp.H) / np.linalg.det(D) ** 2)


# ---------------------------------------------------------------------------
# samplers
# ---------------------------------------------------------------------------

def _sample_wishart(rng, N, count):
    G = rng.normal(size=(count, N, N))
    H = G @ np.swapaxes(G, 1, 2)
    H += 1e-10 * np.eye(N)
    tr = np.trace(H, axis1=1, axis2=2)
    return H / tr[:, None, None]

def _haar_frames(rng, N, count):
    G = rng.normal(size=(count, N, N))
    Q, R = np.linalg.qr(G)
    sign = np.sign(np.einsum("...ii->...i", R))
    sign[sign == 0] = 1.0
    return Q * sign[:, None, :]


def _sample_dirichlet(rng, N, count):
    eigs = rng.dirichlet(np.full(N, 1.0), size=count)
    eigs = np.maximum(eigs, 1e-12)
    eigs /= eigs.sum(axis=1, keepdims=True)
    Q = _haar_frames(rng, N, count)
    return np.einsum("cij,cj,ckj->cik", Q, eigs, Q)


def _sample_boundary(rng, N, count):
    """One eigenvalue pushed toward 1: the hard region of the inequality."""
    top = 1.0 - 10.0 ** rng.uniform(-6, -0.7, size=count)
    rest = rng.dirichlet(np.full(N - 1, 1.0), size=count) * (1.0 - top)[:, None]
    rest = np.maximum(rest, 1e-14)
    eigs = np.concatenate([top[:, None], rest], axis=1)
    eigs /= eigs.sum(axis=1, keepdims=True)
    Q = _haar_frames(rng, N, count)
    return np.einsum("cij,cj,ckj->cik", Q, eigs, Q)


_SAMPLER_FNS = {
    "wishart": _sample_wishart,
    "dirichlet": _sample_dirichlet,
    "boundary": _sample_boundary,
}


# ---------------------------------------------------------------------------
# scan
# ---------------------------------------------------------------------------

@dataclass
class ScanReport:
    """Outcome of a sampling scan of the inequality."""

    N: int
    d: int
    count: int
    bound: float
    max_ratio: float
    argmax_spectrum: np.ndarray
    empirical_A: float
    violations: int
    outside_domain: int
    eigenvalues: np.ndarray
    ratios: np.ndarray
    deficits: np.ndarray

    @property
    def margins(self):
        return self.bound - self.ratios

    def summary(self):
        return {
            "N": self.N,
            "d": self.d,
            "count": self.count,
            "bound": self.bound,
            "max_ratio": self.max_ratio,
            "argmax_spectrum": [float(x) for x in self.argmax_spectrum],
            "empirical_A": self.empirical_A,
            "violations": self.violations,
            "outside_domain": self.outside_domain,
        }


def _scan_block(N, d, size, rng, samplers, structures, bound):
    per = max(1, size // len(samplers))
    blocks = []
    for name in samplers:
        take = per if name != samplers[-1] else size - per * (len(samplers) - 1)
        blocks.append(_SAMPLER_FNS[name](rng, N, take))
    H = np.concatenate(blocks, axis=0)
    D = np.eye(N)[None, :, :] - H
    for Ji in structures:
        D = D - np.einsum("ij,cjk,kl->cil", Ji, H, Ji)
    d_eigs = np.linalg.eigvalsh(D)
    ok = d_eigs[:, 0] > 0
    ratios = np.full(size, np.nan)
    ratios[ok] = np.linalg.det(H[ok]) / np.linalg.det(D[ok]) ** 2
    eigs = np.linalg.eigvalsh(H)
    deficits = np.sum((eigs - 1.0 / N) ** 2, axis=1)
    bad = ok & (ratios > bound * (1.0 + VIOLATION_RTOL))
    if np.any(bad):
        b = int(np.nonzero(bad)[0][0])
        payload = {
            "N": N, "d": d,
            "H": H[b].tolist(),
            "ratio": float(ratios[b]),
            "bound": bound,
        }
        raise BoundViolationError(
            f"determinant inequality violated: ratio {ratios[b]!r} > bound {bound!r}\n"
            + json.dumps(payload),
            counterexample=payload,
        )
    return eigs, ratios, deficits, int(np.sum(~ok))


def bcg_scan(N: int, d: int, count: int, rng=None, samplers=SAMPLERS,
             J=None, chunk=20_000, threads: int = 1) -> ScanReport:
    """Sample `count` inputs and verify the inequality on each.

    Any ratio above bound * (1 + 1e-9) aborts with the counterexample
    serialized in the exception.  The empirical deficit constant is the
    infimum over samples of (1 - sqrt(ratio/bound)) / sum_j (mu_j - 1/N)^2.
    Chunks carry independently spawned RNG streams and are merged in chunk
    order, so results are byte-identical for any thread count.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    bound = bcg_bound(N, d)
    structures = canonical_structures(N, d) if J is None else list(J)
    SpectralInput(N, d, np.eye(N) / N, structures)  # validates the J set
    sizes = []
    remaining = count
    while remaining > 0:
        c = min(chunk, remaining)
        sizes.append(c)
        remaining -= c
    if isinstance(rng, np.random.Generator):
        seeds = rng.spawn(len(sizes))
    else:
        seeds = np.random.SeedSequence(rng if rng is not None else 0).spawn(len(sizes))
        seeds = [np.random.default_rng(s) for s in seeds]
    jobs = list(zip(sizes, seeds))
    if threads > 1 and len(jobs) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(
                lambda job: _scan_block(N, d, job[0], job[1], samplers, structures, bound),
                jobs,
            ))
    else:
        results = [_scan_block(N, d, c, g, samplers, structures, bound)
                   for c, g in jobs]
    eigs_all = np.concatenate([r[0] for r in results], axis=0)
    ratios_all = np.concatenate([r[1] for r in results])
    deficits_all = np.concatenate([r[2] for r in results])
    outside = sum(r[3] for r in results)
    finite = np.isfinite(ratios_all)
    idx = int(np.nanargmax(np.where(finite, ratios_all, -np.inf)))
    meaningful = finite & (deficits_all > 1e-12) & (ratios_all <= bound)
    if np.any(meaningful):
        a_vals = (1.0 - np.sqrt(ratios_all[meaningful] / bound)) / deficits_all[meaningful]
        empirical_A = float(np.min(a_vals))
    else:
        empirical_A = float("nan")
    return ScanReport(
        N=N, d=d, count=count, bound=bound,
        max_ratio=float(ratios_all[idx]),
        argmax_spectrum=eigs_all[idx],
        empirical_A=empirical_A,
        violations=0,
        outside_domain=outside,
        eigenvalues=eigs_all,
        ratios=ratios_all,
        deficits=deficits_all,
    )


def ratio_line_scan(N, direction, t_max=None, steps=100):
    """Ratio along H_t = I/N + t * diag(direction), d = 1.

    `direction` must be trace-free; t_max defaults to the largest t keeping
    the spectrum inside (0, 0.41), where the log-ratio is concave in t and
    hence decreasing away from the maximum at t = 0.
    """
    direction = np.asarray(direction, dtype=float)
    if abs(np.sum(direction)) > 1e-12:
        raise ValueError("direction must be trace-free")
    scale = np.max(np.abs(direction))
    if scale == 0:
        raise ValueError("direction must be nonzero")
    if t_max is None:
        up = (0.41 - 1.0 / N) / np.max(direction) if np.max(direction) > 0 else np.inf
        down = (1.0 / N - 1e-6) / -np.min(direction) if np.min(direction) < 0 else np.inf
        t_max = 0.999 * min(up, down)
    ts = np.linspace(0.0, t_max, steps)
    vals = []
    for t in ts:
        eigs = 1.0 / N + t * direction
        ratio = float(np.prod(eigs) / np.prod(1.0 - eigs) ** 2)
        vals.append(ratio)
    return ts, np.array(vals)
