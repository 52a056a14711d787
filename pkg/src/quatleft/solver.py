"""Numerical left-eigenvalue solver.

Multistart damped Gauss-Newton on the four real polynomial equations, a
polishing pass on the eigenpair equations (A − λI)v = 0, certification by
the smallest singular value of the numeric pencil, and classification of
rank-deficient roots into isolated points and continua.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .charpoly import CharSystem, build_char_system
from .errors import ManifoldCollapse, NoConvergence
from .mpoly import LAMBDA, CompiledPolys, MultiPoly4
from .quaternion import Quaternion, QuaternionMatrix, matvec_array, qmul_array
from .representation import get_form, p_map_float
from . import spectra

CHUNK = 256
ARMIJO_STEPS = 12
ARMIJO_C = 1e-4
RANK_REL = 1e-6
POLISH_ITERS = 12
# stalled Newton endpoints worth handing to the eigenpair polish: Gauss-Newton
# on the four minors stalls at critical points of |F|^2 near roots where the
# minors vanish to high order, while the eigenpair system stays well posed
RESCUE_REL = 1e-3
RESCUE_CLUSTER = 1e-3
RESCUE_MAX = 256
# eigenpair Newton from raw starts: roots where the minors vanish to high
# order (eigenvalues of a diagonal block, say) have almost no basin for
# Newton on the minors but a wide one for the bilinear eigenpair system
PAIR_ITERS = 40
UNITS = np.eye(4)
BASIS = np.array([np.array(b, dtype=float) for b in get_form(1).basis])


@dataclass(frozen=True)
class SolveConfig:
    tol_residual: float = 1e-10
    tol_newton: float = 1e-12
    tol_cluster: float = 1e-7
    n_starts: int = 2000
    max_iter: int = 100
    rng_seed: int = 0
    search_radius_scale: float = 1.25
    manifold_samples: int = 50
    pair_starts: int = 200

    def __post_init__(self):
        for name in ("tol_residual", "tol_newton", "tol_cluster", "search_radius_scale"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.n_starts < 1:
            raise ValueError("n_starts must be at least 1")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.pair_starts < 0:
            raise ValueError("pair_starts must be nonnegative")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class EigenCertificate:
    lam: np.ndarray
    newton_residual: float
    pencil_sigma_min: float
    eigenvector: np.ndarray
    vector_residual: float
    jacobian_rank: int | None
    scale: float
    tol: float
    raw_jacobian_rank: int | None = None

    @property
    def accepted(self) -> bool:
        bound = self.tol * self.scale
        return self.pencil_sigma_min < bound and self.vector_residual < bound

    @property
    def quaternion(self) -> Quaternion:
        return Quaternion(*(float(x) for x in self.lam))


@dataclass
class SolutionSet:
    isolated: list[EigenCertificate] = field(default_factory=list)
    manifold_points: list[EigenCertificate] = field(default_factory=list)
    manifold_flag: bool = False
    annulus: spectra.AnnulusBound | None = None
    stats: dict = field(default_factory=dict)

    def all_points(self) -> list[EigenCertificate]:
        return self.isolated + self.manifold_points

    def eigenvalues(self) -> np.ndarray:
        return np.array([c.lam for c in self.isolated]).reshape(-1, 4)


# -- polynomial system -----------------------------------------------------


def system_polys(cs: CharSystem) -> list[MultiPoly4]:
    """The equations fed to Newton; for m = 1 the components of a₁₁ − λ."""
    if cs.trivial is not None:
        return [MultiPoly4.const(c) - LAMBDA[i] for i, c in enumerate(cs.trivial.coeffs)]
    return list(cs.equations)


class _System:
    def __init__(self, A: QuaternionMatrix, cs: CharSystem | None = None):
        self.A = A
        self.cs = cs if cs is not None else build_char_system(A)
        self.polys = system_polys(self.cs)
        self.compiled = CompiledPolys(self.polys)
        coefs = [abs(float(c)) for p in self.polys for c in p.packed_terms().values()]
        self.fscale = max([1.0] + coefs)
        self.PA = p_map_float(A)
        self.Aarr = A.to_array()
        self.sigma_max = float(np.linalg.svd(self.PA, compute_uv=False)[0]) if self.PA.size else 0.0
        self.scale = max(1.0, self.sigma_max)

    def residual(self, x: np.ndarray) -> float:
        return float(np.abs(self.compiled.values(np.asarray(x, float)[None, :])[0]).max())

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        return self.compiled.values_and_jacobians(np.asarray(x, float)[None, :])[1][0]


def jacobian_rank(J: np.ndarray) -> int:
    s = np.linalg.svd(J, compute_uv=False)
    if s.size == 0:
        return 0
    thr = RANK_REL * max(1.0, float(s[0]))
    return int((s > thr).sum())


# -- Newton ----------------------------------------------------------------


def _newton_chunk(compiled: CompiledPolys, X: np.ndarray, cfg: SolveConfig, fscale: float, bound: float):
    """Damped Gauss-Newton from every row of X; returns final points, final
    residual ∞-norms and a converged mask."""
    X = X.copy()
    n = X.shape[0]
    active = np.ones(n, dtype=bool)
    conv = np.zeros(n, dtype=bool)
    F, J = compiled.values_and_jacobians(X)
    f2 = (F * F).sum(axis=1)
    ts = 0.5 ** np.arange(ARMIJO_STEPS)
    for _it in range(cfg.max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        Fa, Ja = F[idx], J[idx]
        small = np.abs(Fa).max(axis=1) <= cfg.tol_newton * fscale
        conv[idx[small]] = True
        active[idx[small]] = False
        idx = idx[~small]
        if idx.size == 0:
            break
        Fa, Ja = F[idx], J[idx]
        D = -np.einsum("nij,nj->ni", np.linalg.pinv(Ja), Fa)
        dn = np.linalg.norm(D, axis=1)
        cap = np.maximum(bound, 1.0)
        D *= np.minimum(1.0, cap / np.maximum(dn, 1e-300))[:, None]
        # backtracking: each halving is evaluated only where still needed
        Xa, f2a = X[idx], f2[idx]
        first = np.full(idx.size, ARMIJO_STEPS - 1)
        has = np.zeros(idx.size, dtype=bool)
        last_f2 = np.empty(idx.size)
        todo = np.arange(idx.size)
        for s_i, t in enumerate(ts):
            Ft = compiled.values(Xa[todo] + t * D[todo])
            f2t = (Ft * Ft).sum(axis=1)
            ok = f2t <= (1.0 - ARMIJO_C * t) * f2a[todo]
            first[todo[ok]] = s_i
            has[todo[ok]] = True
            last_f2[todo] = f2t
            todo = todo[~ok]
            if not todo.size:
                break
        improved = has | (last_f2 < f2a)
        move = has | improved
        sel = idx[move]
        step = ts[first[move]][:, None] * D[move]
        X[sel] += step
        Fn, Jn = compiled.values_and_jacobians(X[sel])
        F[sel], J[sel] = Fn, Jn
        f2[sel] = (Fn * Fn).sum(axis=1)
        # stalled or converged by step size
        stepn = np.linalg.norm(step, axis=1)
        tiny = stepn <= cfg.tol_newton * np.maximum(1.0, np.linalg.norm(X[sel], axis=1))
        conv[sel[tiny]] = np.abs(F[sel[tiny]]).max(axis=1) <= 1e-6 * fscale
        active[sel[tiny]] = False
        active[idx[~move]] = False
        far = np.linalg.norm(X, axis=1) > 10.0 * cap
        active &= ~far
    res = np.abs(F).max(axis=1)
    conv |= res <= cfg.tol_newton * fscale
    conv &= np.isfinite(res) & (np.linalg.norm(X, axis=1) <= 10.0 * max(bound, 1.0))
    return X, res, conv


def _thread_count() -> int:
    env = os.environ.get("QS_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def run_newton(compiled: CompiledPolys, X: np.ndarray, cfg: SolveConfig, fscale: float, bound: float):
    """Newton on fixed-size chunks so results do not depend on the thread
    count; chunks are merged back in start order."""
    chunks = [X[i:i + CHUNK] for i in range(0, X.shape[0], CHUNK)]
    threads = min(_thread_count(), len(chunks))
    work = lambda C: _newton_chunk(compiled, C, cfg, fscale, bound)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, chunks))
    else:
        parts = [work(C) for C in chunks]
    return (
        np.concatenate([p[0] for p in parts]),
        np.concatenate([p[1] for p in parts]),
        np.concatenate([p[2] for p in parts]),
    )


# -- eigenpair polishing ---------------------------------------------------


def _pencil(PA: np.ndarray, lam: np.ndarray) -> np.ndarray:
    m = PA.shape[0] // 4
    Q = np.tensordot(lam, BASIS, axes=1)
    return PA - np.kron(np.eye(m), Q)


def _null_vector(P: np.ndarray) -> tuple[float, np.ndarray]:
    _, s, Vt = np.linalg.svd(P)
    return float(s[-1]), Vt[-1]


def _left_blocks(c: np.ndarray) -> np.ndarray:
    """Real 4×4m matrix of v ↦ Σ conj(c_i)·v_i."""
    cc = c.copy()
    cc[:, 1:] *= -1
    return np.hstack([np.tensordot(q, BASIS, axes=1) for q in cc])


def polish_pair(Aarr: np.ndarray, PA: np.ndarray, lam: np.ndarray, iters: int = POLISH_ITERS) -> np.ndarray:
    """Newton on (A − λI)v = 0 with the gauge Σ conj(c_i)v_i = 1; returns an
    improved λ (or the input when polishing does not help)."""
    m = Aarr.shape[0]
    lam = np.asarray(lam, float).copy()
    s0, y = _null_vector(_pencil(PA, lam))
    v = y.reshape(m, 4)
    c = v / (v * v).sum()
    G = _left_blocks(c)
    best_lam, best_s = lam.copy(), s0
    for _ in range(iters):
        r = matvec_array(Aarr, v) - qmul_array(lam[None, :], v)
        g = (G @ v.reshape(-1)) - np.array([1.0, 0, 0, 0])
        R = np.concatenate([r.reshape(-1), g])
        if np.abs(R).max() < 1e-15:
            break
        Jl = np.stack([-qmul_array(UNITS[k][None, :], v).reshape(-1) for k in range(4)], axis=1)
        Jv = _pencil(PA, lam)
        Jac = np.block([[Jl, Jv], [np.zeros((4, 4)), G]])
        step = np.linalg.lstsq(Jac, -R, rcond=None)[0]
        lam = lam + step[:4]
        v = v + step[4:].reshape(m, 4)
        if np.linalg.norm(step) < 1e-16 * max(1.0, np.linalg.norm(lam)):
            break
    s1 = _null_vector(_pencil(PA, lam))[0]
    if np.all(np.isfinite(lam)) and s1 <= best_s:
        return lam
    return best_lam


# -- certification ---------------------------------------------------------


def _certify(sysm: _System, lam: np.ndarray, tol: float) -> EigenCertificate:
    lam = np.asarray(lam, float)
    s, y = _null_vector(_pencil(sysm.PA, lam))
    v = y.reshape(sysm.A.rows, 4)
    r = matvec_array(sysm.Aarr, v) - qmul_array(lam[None, :], v)
    vres = float(np.linalg.norm(r) / max(np.linalg.norm(v), 1e-300))
    J = sysm.jacobian(lam)
    rk = jacobian_rank(J)
    return EigenCertificate(lam, sysm.residual(lam), s, v, vres, rk, sysm.scale, tol, rk)


def verify_left_eigenvalue(A: QuaternionMatrix, lam, tol: float = 1e-10, system: CharSystem | None = None) -> EigenCertificate:
    """Certificate for a proposed left eigenvalue; never raises on
    rejection, the verdict is in ``accepted``."""
    if not A.is_square:
        raise ValueError(f"left eigenvalues need a square matrix, got {A.shape}")
    q = np.array([float(x) for x in Quaternion.coerce(lam).coeffs]) if not isinstance(lam, np.ndarray) else lam.astype(float)
    return _certify(_System(A, system), q, tol)


# -- clustering ------------------------------------------------------------


class _Clusters:
    """Representatives kept in a growing array so membership tests are
    vectorised."""

    def __init__(self, tol: float):
        self.tol = tol
        self.pts = np.empty((0, 4))

    def near(self, x: np.ndarray) -> bool:
        if not len(self.pts):
            return False
        return bool(np.any(np.all(np.abs(self.pts - x) < self.tol, axis=1)))

    def add(self, x: np.ndarray) -> bool:
        """Add x unless it duplicates a representative; report whether added."""
        if self.near(x):
            return False
        self.pts = np.vstack([self.pts, x])
        return True


def cluster_points(X: np.ndarray, tol: float) -> list[int]:
    """Indices of representatives, greedy over a lexicographic sort."""
    order = np.lexsort(X.T[::-1]) if len(X) else []
    cl = _Clusters(tol)
    return [int(i) for i in order if cl.add(X[i])]


def _ball_starts(rng: np.random.Generator, n: int, radius: float) -> np.ndarray:
    d = rng.standard_normal((n, 4))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    r = radius * rng.random(n) ** 0.25
    return d * r[:, None]


# -- manifold handling -----------------------------------------------------


def _eigenpair_singular(sysm: _System, lam: np.ndarray) -> bool:
    """Whether the eigenpair Jacobian at λ is rank deficient, i.e. λ may
    move along a continuum (or the eigenvector is not unique)."""
    m = sysm.A.rows
    _, y = _null_vector(_pencil(sysm.PA, lam))
    v = y.reshape(m, 4)
    c = v / (v * v).sum()
    G = _left_blocks(c)
    Jl = np.stack([-qmul_array(UNITS[k][None, :], v).reshape(-1) for k in range(4)], axis=1)
    Jac = np.block([[Jl, _pencil(sysm.PA, lam)], [np.zeros((4, 4)), G]])
    s = np.linalg.svd(Jac, compute_uv=False)
    return bool(s[-1] <= 1e-7 * max(1.0, s[0]))


def _sample(sysm: _System, seed: EigenCertificate, k: int, cfg: SolveConfig) -> list[EigenCertificate]:
    J = sysm.jacobian(seed.lam)
    _, s, Vt = np.linalg.svd(J)
    thr = RANK_REL * max(1.0, float(s[0]) if s.size else 1.0)
    rank = int((s > thr).sum())
    N = Vt[rank:].T  # null-space basis, 4 × (4 − rank)
    rng = np.random.default_rng([cfg.rng_seed, 7919, k])
    trials = 4 * k
    U = rng.standard_normal((trials, N.shape[1]))
    U /= np.linalg.norm(U, axis=1, keepdims=True)
    base = max(1.0, float(np.linalg.norm(seed.lam)))
    mags = base * (0.05 + 0.45 * rng.random(trials))
    X0 = seed.lam[None, :] + (U @ N.T) * mags[:, None]
    bound = cfg.search_radius_scale * max(sysm.sigma_max, 1.0)
    X, _, conv = run_newton(sysm.compiled, X0, cfg, sysm.fscale, bound)
    out: list[EigenCertificate] = []
    seen = _Clusters(cfg.tol_cluster)
    seen.add(seed.lam)
    for i in np.flatnonzero(conv):
        lam = polish_pair(sysm.Aarr, sysm.PA, X[i])
        if seen.near(lam):
            continue
        cert = _certify(sysm, lam, cfg.tol_residual)
        if cert.accepted:
            seen.add(lam)
            out.append(cert)
        if len(out) >= k:
            break
    if len(out) < k / 2:
        raise ManifoldCollapse(f"only {len(out)} of {k} manifold samples certified")
    return out


def sample_manifold(A: QuaternionMatrix, seed_point: EigenCertificate, k: int, cfg: SolveConfig | None = None,
                    system: CharSystem | None = None) -> list[EigenCertificate]:
    """k further certified points near a rank-deficient root, reached by
    moving along the Jacobian null space and re-converging with minimum-norm
    Gauss-Newton steps (which stay orthogonal to that null space)."""
    cfg = cfg or SolveConfig()
    sysm = _System(A, system)
    rk = jacobian_rank(sysm.jacobian(seed_point.lam))
    if rk >= 4:
        raise ValueError("sample_manifold needs a seed with Jacobian rank below 4")
    return _sample(sysm, seed_point, k, cfg)


# -- driver ----------------------------------------------------------------


def solve_left_eigenvalues(A: QuaternionMatrix, cfg: SolveConfig | None = None,
                           system: CharSystem | None = None) -> SolutionSet:
    cfg = cfg or SolveConfig()
    if not A.is_square:
        raise ValueError(f"left eigenvalues need a square matrix, got {A.shape}")
    sysm = _System(A, system)
    result = SolutionSet(annulus=spectra.annulus(A))
    radius = cfg.search_radius_scale * (sysm.sigma_max if sysm.sigma_max > 0 else 1.0)
    rng = np.random.default_rng(cfg.rng_seed)
    seeds = np.array([[float(c) for c in A[i, i].coeffs] for i in range(A.rows)])
    X0 = np.vstack([seeds, _ball_starts(rng, cfg.n_starts, radius)])
    X, res, conv = run_newton(sysm.compiled, X0, cfg, sysm.fscale, radius)
    n_conv = int(conv.sum())
    result.stats = {"starts": int(X0.shape[0]), "converged": n_conv, "seeded": int(seeds.shape[0])}
    if n_conv == 0 and not np.any(np.isfinite(res) & (res <= RESCUE_REL * sysm.fscale)):
        raise NoConvergence("no Newton start converged", result)

    cand = X[conv]
    starts = [cand[i] for i in cluster_points(cand, cfg.tol_cluster)]
    stalled = ~conv & np.isfinite(res) & (res <= RESCUE_REL * sysm.fscale)
    stalled &= np.linalg.norm(X, axis=1) <= 10.0 * max(radius, 1.0)
    if stalled.any():
        SX, sres = X[stalled], res[stalled]
        reps = cluster_points(SX, RESCUE_CLUSTER)
        reps = sorted(reps, key=lambda i: (sres[i], i))[:RESCUE_MAX]
        starts += [SX[i] for i in reps]
    result.stats["rescue_candidates"] = int(stalled.sum())
    n_pair = min(cfg.pair_starts, cfg.n_starts)
    iters = [POLISH_ITERS] * len(starts) + [PAIR_ITERS] * n_pair
    starts += list(X0[len(seeds):len(seeds) + n_pair])
    certs: list[EigenCertificate] = []
    for x, it in zip(starts, iters):
        lam = polish_pair(sysm.Aarr, sysm.PA, x, it)
        cert = _certify(sysm, lam, cfg.tol_residual)
        if cert.accepted:
            certs.append(cert)
    certs.sort(key=lambda c: tuple(c.lam))
    uniq = _Clusters(cfg.tol_cluster)
    merged = [c for c in certs if uniq.add(c.lam)]
    result.stats["certified_clusters"] = len(merged)

    manifold_seen = False
    for c in merged:
        if c.jacobian_rank == 4:
            result.isolated.append(c)
            continue
        if manifold_seen and _eigenpair_singular(sysm, c.lam):
            continue
        try:
            pts = _sample(sysm, c, cfg.manifold_samples, cfg)
        except ManifoldCollapse:
            # isolated root where the Jacobian of the system degenerates
            c.jacobian_rank = 4
            result.isolated.append(c)
            continue
        if not manifold_seen:
            result.manifold_points = [c] + pts
        manifold_seen = True
    result.manifold_flag = manifold_seen
    basins = []
    for c in result.isolated:
        tol = 1e-6 * max(1.0, float(np.abs(c.lam).max()))
        basins.append(int(np.all(np.abs(cand - c.lam) < tol, axis=1).sum()))
    result.stats["basins"] = basins
    result.stats["converged_fraction"] = n_conv / X0.shape[0]
    if not result.isolated and not result.manifold_flag:
        raise NoConvergence("no converged point could be certified", result)
    return result


def left_spectrum_report(A: QuaternionMatrix, cfg: SolveConfig | None = None, timing: bool = False) -> dict:
    """Everything known about the left spectrum of A in one plain dict."""
    cfg = cfg or SolveConfig()
    t0 = time.perf_counter()
    cs = build_char_system(A)
    sol = solve_left_eigenvalues(A, cfg, cs)
    rs = spectra.right_eigenvalues(A)
    ann = sol.annulus

    def cert_dict(c: EigenCertificate) -> dict:
        return {
            "lambda": [float(x) for x in c.lam],
            "residual": c.newton_residual,
            "sigma_min": c.pencil_sigma_min,
            "vector_residual": c.vector_residual,
            "jacobian_rank": c.jacobian_rank,
            "norm": float(np.linalg.norm(c.lam)),
        }

    report = {
        "input": {"m": A.rows, "entries": [[[str(x) for x in q.coeffs] for q in row] for row in A.entries()]},
        "char_system": cs.lines() if cs.trivial is None else [f"trivial spectrum {{{cs.trivial}}}"],
        "isolated": [cert_dict(c) for c in sol.isolated],
        "manifold": {
            "flag": sol.manifold_flag,
            "points": [cert_dict(c) for c in sol.manifold_points],
            "fitted_description": None,
        },
        "bounds": {
            "sigma_min": ann.sigma_min,
            "sigma_max": ann.sigma_max,
            "full_rank": ann.full_rank,
            "alpha": rs.alpha,
            "beta": rs.beta,
        },
        "right_eigenvalues": [[z.real, z.imag] for z in rs.eigenvalues],
        "annulus_check": all(ann.contains(float(np.linalg.norm(c.lam)), 1e-8 * max(1.0, ann.sigma_max)) for c in sol.all_points()),
        "domination": spectra.domination_check(A, sol, rs),
        "coverage": sol.stats,
        "config": cfg.to_dict(),
    }
    if timing:
        report["runtime_ms"] = (time.perf_counter() - t0) * 1000.0
    return report
