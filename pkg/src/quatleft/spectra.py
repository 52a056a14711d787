"""Singular values, right eigenvalues and the norm bounds they give for left
eigenvalues.

Singular values come from a one-sided Jacobi iteration on the real matrix
P₁(A); every quaternionic singular value shows up there four times.  Right
eigenvalues come from the 2m×2m complex adjoint, reduced to Hessenberg form
and run through shifted QR.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceFailure, QRNoConvergence
from .quaternion import QuaternionMatrix
from .representation import p_map, p_map_float, p_rank

JACOBI_SWEEPS = 60
JACOBI_TOL = 1e-14
QR_ITER_FACTOR = 30
FOLD_TOL = 1e-8


@dataclass(frozen=True)
class AnnulusBound:
    sigma_min: float
    sigma_max: float
    full_rank: bool

    def contains(self, r: float, tol: float = 1e-8) -> bool:
        return self.sigma_min - tol <= r <= self.sigma_max + tol


@dataclass(frozen=True)
class RightSpectrum:
    """Standard right eigenvalues (one complex representative per similarity
    class, imaginary part ≥ 0, listed with multiplicity)."""

    eigenvalues: list[complex] = field(default_factory=list)
    alpha: float = 0.0
    beta: float = 0.0

    @property
    def norms(self) -> list[float]:
        return [abs(z) for z in self.eigenvalues]


# -- singular values -------------------------------------------------------


def jacobi_singular_values(M: np.ndarray, max_sweeps: int = JACOBI_SWEEPS, tol: float = JACOBI_TOL) -> np.ndarray:
    """All singular values of a real matrix, descending, by one-sided
    (Hestenes) Jacobi rotations on the columns."""
    U = np.array(M, dtype=float, copy=True)
    n_values = U.shape[1]
    if U.shape[1] > U.shape[0]:
        # same nonzero singular values, and no surplus columns that decay to 0
        U = U.T.copy()
    n = U.shape[1]
    if U.size == 0:
        return np.zeros(n_values)
    tiny = (np.finfo(float).eps * np.linalg.norm(U)) ** 2
    for _sweep in range(max_sweeps):
        rotated = False
        for i in range(n - 1):
            for j in range(i + 1, n):
                ci = U[:, i]
                cj = U[:, j]
                a = ci @ ci
                b = cj @ cj
                g = ci @ cj
                if g == 0.0 or abs(g) <= tol * np.sqrt(a * b) or min(a, b) <= tiny:
                    continue
                rotated = True
                zeta = (b - a) / (2.0 * g)
                t = np.copysign(1.0, zeta) / (abs(zeta) + np.hypot(1.0, zeta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                new_i = c * ci - s * cj
                new_j = s * ci + c * cj
                U[:, i] = new_i
                U[:, j] = new_j
        if not rotated:
            sv = np.sort(np.linalg.norm(U, axis=0))[::-1]
            return np.concatenate([sv, np.zeros(n_values - n)])
    raise ConvergenceFailure(f"Jacobi SVD did not converge in {max_sweeps} sweeps")


def real_singular_values(A: QuaternionMatrix) -> np.ndarray:
    """Raw singular values of P₁(A), every value repeated four times."""
    return jacobi_singular_values(p_map_float(A))


def singular_values(A: QuaternionMatrix) -> list[float]:
    """Quaternionic singular values of A, descending, each listed once."""
    raw = real_singular_values(A)
    k = min(A.rows, A.cols)
    return [float(np.mean(raw[4 * i:4 * i + 4])) for i in range(k)]


def annulus(A: QuaternionMatrix) -> AnnulusBound:
    if not A.is_square:
        raise ValueError(f"annulus needs a square matrix, got {A.shape}")
    sv = singular_values(A)
    full = p_rank(p_map(1, A)) == 4 * A.rows
    return AnnulusBound(sv[-1] if full else 0.0, sv[0], full)


# -- right eigenvalues -----------------------------------------------------


def complex_adjoint(A: QuaternionMatrix) -> np.ndarray:
    """[[A₁, A₂], [−conj A₂, conj A₁]] for A = A₁ + A₂·ȷ."""
    X = A.to_array()
    A1 = X[..., 0] + 1j * X[..., 1]
    A2 = X[..., 2] + 1j * X[..., 3]
    return np.block([[A1, A2], [-A2.conj(), A1.conj()]])


def hessenberg(M: np.ndarray) -> np.ndarray:
    """Upper Hessenberg form by Householder reflections (similarity)."""
    H = np.array(M, dtype=complex, copy=True)
    n = H.shape[0]
    for k in range(n - 2):
        x = H[k + 1:, k]
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v = x.copy()
        v[0] += phase * alpha
        v /= np.linalg.norm(v)
        H[k + 1:, k:] -= 2.0 * np.outer(v, v.conj() @ H[k + 1:, k:])
        H[:, k + 1:] -= 2.0 * np.outer(H[:, k + 1:] @ v, v.conj())
        H[k + 2:, k] = 0.0
    return H


def _wilkinson_shift(a, b, c, d) -> complex:
    """Eigenvalue of [[a, b], [c, d]] closest to d."""
    tr = a + d
    det = a * d - b * c
    disc = np.sqrt(tr * tr / 4.0 - det + 0j)
    mu1 = tr / 2.0 + disc
    mu2 = tr / 2.0 - disc
    return mu1 if abs(mu1 - d) <= abs(mu2 - d) else mu2


def _givens(x: complex, y: complex):
    r = np.hypot(abs(x), abs(y))
    if r == 0.0:
        return 1.0, 0.0
    return x / r, y / r


def hessenberg_qr_eigenvalues(M: np.ndarray, max_iter: int | None = None) -> np.ndarray:
    """Eigenvalues of a complex matrix by Hessenberg reduction followed by
    single-shift QR sweeps with Wilkinson shifts and deflation."""
    H = hessenberg(M)
    n = H.shape[0]
    if max_iter is None:
        max_iter = QR_ITER_FACTOR * max(n, 1)
    eig = np.zeros(n, dtype=complex)
    hi = n - 1
    total = 0
    since_deflation = 0
    eps = np.finfo(float).eps
    while hi >= 0:
        if hi == 0:
            eig[0] = H[0, 0]
            break
        lo = hi
        while lo > 0:
            scale = abs(H[lo, lo]) + abs(H[lo - 1, lo - 1])
            if scale == 0.0:
                scale = np.abs(H).max() or 1.0
            if abs(H[lo, lo - 1]) <= eps * scale:
                H[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            eig[hi] = H[hi, hi]
            hi -= 1
            since_deflation = 0
            continue
        if total >= max_iter:
            raise QRNoConvergence(f"shifted QR did not converge within {max_iter} iterations")
        total += 1
        since_deflation += 1
        if since_deflation % 11 == 0:
            # exceptional shift to break cycles
            mu = H[hi, hi] + abs(H[hi, hi - 1]) * (0.75 + 0.5j)
        else:
            mu = _wilkinson_shift(H[hi - 1, hi - 1], H[hi - 1, hi], H[hi, hi - 1], H[hi, hi])
        # QR step on the active window H[lo:hi+1, lo:hi+1] via Givens
        for k in range(lo, hi + 1):
            H[k, k] -= mu
        rots = []
        for k in range(lo, hi):
            c, s = _givens(H[k, k], H[k + 1, k])
            G = np.array([[np.conj(c), np.conj(s)], [-s, c]])
            H[k:k + 2, k:] = G @ H[k:k + 2, k:]
            rots.append(G)
        for k, G in zip(range(lo, hi), rots):
            H[:hi + 1, k:k + 2] = H[:hi + 1, k:k + 2] @ G.conj().T
        for k in range(lo, hi + 1):
            H[k, k] += mu
    return eig


def fold_conjugate_pairs(values: np.ndarray, tol: float = FOLD_TOL) -> list[complex]:
    """Pair each eigenvalue with its conjugate (greedy, nearest first) and
    keep one representative with nonnegative imaginary part per pair."""
    order = sorted(range(len(values)), key=lambda i: (values[i].real, values[i].imag))
    used = set()
    reps = []
    for i in order:
        if i in used:
            continue
        used.add(i)
        z = values[i]
        best, best_d = None, tol
        for j in order:
            if j in used:
                continue
            d = abs(values[j] - np.conj(z))
            if d <= best_d:
                best, best_d = j, d
        if best is not None:
            used.add(best)
            w = values[best]
            z = complex((z.real + w.real) / 2.0, (abs(z.imag) + abs(w.imag)) / 2.0)
        else:
            z = complex(z.real, abs(z.imag))
        reps.append(z)
    reps.sort(key=lambda z: (z.real, z.imag))
    return reps


def right_eigenvalues(A: QuaternionMatrix) -> RightSpectrum:
    if not A.is_square:
        raise ValueError(f"right eigenvalues need a square matrix, got {A.shape}")
    raw = hessenberg_qr_eigenvalues(complex_adjoint(A))
    reps = fold_conjugate_pairs(raw)
    norms = [abs(z) for z in reps]
    return RightSpectrum(reps, min(norms), max(norms))


def domination_check(A: QuaternionMatrix, solution_set, spectrum: RightSpectrum | None = None) -> bool:
    """Every certified left eigenvalue norm lies in [α − tol, β + tol] with
    tol = 1e−8·max(1, β)."""
    rs = spectrum or right_eigenvalues(A)
    tol = 1e-8 * max(1.0, rs.beta)
    for cert in solution_set.all_points():
        r = float(np.linalg.norm(cert.lam))
        if not (rs.alpha - tol <= r <= rs.beta + tol):
            return False
    return True
