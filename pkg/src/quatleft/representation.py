"""Real 4×4 representation forms of the quaternions and the block maps built
on them.

A form is a triple (H, J, K) of signed permutation matrices with
H² = J² = K² = HJK = -E.  ``q_map(k, q)`` sends a quaternion to
q0·E + q1·H_k + q2·J_k + q3·K_k and ``p_map`` applies it blockwise to a
quaternion matrix.  Everything here is exact; matrices are numpy object
arrays holding Fractions (or ints).
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import lcm
from typing import Sequence

import numpy as np

from .errors import NotInRepresentation, RankNotMultipleOfFour
from .quaternion import Quaternion, QuaternionMatrix, qmul_array

N_FORMS = 48

E4 = np.eye(4, dtype=int)

# H1 and J1 as printed; K1 is fixed by H1·J1·K1 = -E, i.e. K1 = -J1·H1.
H1 = np.array([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]])
J1 = np.array([[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]])
K1 = -J1 @ H1


@dataclass(frozen=True)
class RepresentationForm:
    index: int
    H: np.ndarray
    J: np.ndarray
    K: np.ndarray

    @property
    def basis(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        return (E4, self.H, self.J, self.K)

    def satisfies_hamiltonian(self) -> bool:
        H, J, K = self.H, self.J, self.K
        return all((X @ X == -E4).all() for X in (H, J, K)) and bool((H @ J @ K == -E4).all())

    def key(self) -> tuple:
        return tuple(self.H.ravel()) + tuple(self.J.ravel()) + tuple(self.K.ravel())

    def __eq__(self, other):
        return isinstance(other, RepresentationForm) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())


def _signed_permutations():
    for perm in itertools.permutations(range(4)):
        for signs in itertools.product((1, -1), repeat=4):
            M = np.zeros((4, 4), dtype=int)
            for i, (j, s) in enumerate(zip(perm, signs)):
                M[i, j] = s
            yield M


@lru_cache(maxsize=None)
def _forms() -> tuple[RepresentationForm, ...]:
    roots = [M for M in _signed_permutations() if (M @ M == -E4).all()]
    found = []
    for H in roots:
        for J in roots:
            K = -J @ H
            if (K @ K == -E4).all() and (H @ J @ K == -E4).all():
                found.append((H, J, K))
    first = (H1, J1, K1)
    key = lambda t: tuple(np.concatenate([x.ravel() for x in t]))
    if not any(key(t) == key(first) for t in found):
        raise AssertionError("pinned form 1 is not Hamiltonian")
    rest = sorted((t for t in found if key(t) != key(first)), key=key)
    triples = [first] + rest
    if len(triples) != N_FORMS:
        raise AssertionError(f"found {len(triples)} Hamiltonian triples, expected {N_FORMS}")
    forms = []
    for i, (H, J, K) in enumerate(triples, start=1):
        for X in (H, J, K):
            X.setflags(write=False)
        forms.append(RepresentationForm(i, H, J, K))
    return tuple(forms)


def enumerate_forms() -> list[RepresentationForm]:
    """All 48 forms, found by exhaustive search; index 1 is the canonical one."""
    return list(_forms())


def get_form(k: int) -> RepresentationForm:
    if not 1 <= k <= N_FORMS:
        raise ValueError(f"form index must be in 1..{N_FORMS}, got {k}")
    return _forms()[k - 1]


def q_map(k: int, q) -> np.ndarray:
    """4×4 real matrix of ``q`` in form ``k`` (object array of Fractions)."""
    q = Quaternion.coerce(q)
    out = np.zeros((4, 4), dtype=object)
    out[:] = Fraction(0)
    for c, B in zip(q.coeffs, get_form(k).basis):
        if c:
            out = out + c * B
    return out


def q_unmap(k: int, M) -> Quaternion:
    """Inverse of :func:`q_map`; raises NotInRepresentation when M is not in
    span{E, H_k, J_k, K_k}."""
    M = np.asarray(M, dtype=object)
    if M.shape != (4, 4):
        raise ValueError(f"expected a 4x4 block, got {M.shape}")
    basis = get_form(k).basis
    # the four basis matrices are Frobenius-orthogonal with squared norm 4
    coeffs = [Fraction(sum(M[i, j] * int(B[i, j]) for i in range(4) for j in range(4))) / 4 for B in basis]
    recon = sum((c * B for c, B in zip(coeffs, basis)), np.zeros((4, 4), dtype=object))
    if any(Fraction(recon[i, j]) != Fraction(M[i, j]) for i in range(4) for j in range(4)):
        raise NotInRepresentation(f"block is not in the span of form {k}")
    return Quaternion(*coeffs)


def p_map(k: int, A: QuaternionMatrix) -> np.ndarray:
    """Block matrix (Q_k(a_ij)) of size 4m×4n."""
    m, n = A.shape
    out = np.empty((4 * m, 4 * n), dtype=object)
    for i in range(m):
        for j in range(n):
            out[4 * i : 4 * i + 4, 4 * j : 4 * j + 4] = q_map(k, A[i, j])
    return out


def p_map_float(A: QuaternionMatrix | np.ndarray, k: int = 1) -> np.ndarray:
    """Floating P_k of a matrix given exactly or as an (m, n, 4) array."""
    arr = A.to_array() if isinstance(A, QuaternionMatrix) else np.asarray(A, dtype=float)
    basis = np.array(get_form(k).basis, dtype=float)  # (4, 4, 4)
    m, n, _ = arr.shape
    blocks = np.einsum("ijc,cab->iajb", arr, basis)
    return blocks.reshape(4 * m, 4 * n)


def _integer_rows(M) -> list[list[int]]:
    rows = []
    for row in M:
        fr = [Fraction(x) for x in row]
        d = lcm(*(f.denominator for f in fr)) if fr else 1
        rows.append([int(f * d) for f in fr])
    return rows


def exact_rank(M) -> int:
    """Rank of a rational matrix by fraction-free elimination."""
    rows = _integer_rows(np.asarray(M, dtype=object))
    if not rows:
        return 0
    nr, nc = len(rows), len(rows[0])
    rank = 0
    prev = 1
    for c in range(nc):
        piv = next((r for r in range(rank, nr) if rows[r][c] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        p = rows[rank][c]
        for r in range(rank + 1, nr):
            f = rows[r][c]
            rows[r] = [(p * x - f * y) // prev for x, y in zip(rows[r], rows[rank])]
        prev = p
        rank += 1
        if rank == nr:
            break
    return rank


def exact_det(M) -> Fraction:
    """Determinant of a square rational matrix (Bareiss over the integers)."""
    M = np.asarray(M, dtype=object)
    n = M.shape[0]
    if M.shape != (n, n):
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return Fraction(1)
    scale = Fraction(1)
    rows = []
    for row in M:
        fr = [Fraction(x) for x in row]
        d = lcm(*(f.denominator for f in fr))
        scale /= d
        rows.append([int(f * d) for f in fr])
    sign = 1
    prev = 1
    for k in range(n - 1):
        piv = next((r for r in range(k, n) if rows[r][k] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != k:
            rows[k], rows[piv] = rows[piv], rows[k]
            sign = -sign
        p = rows[k][k]
        for i in range(k + 1, n):
            f = rows[i][k]
            rows[i] = [0] * (k + 1) + [(p * rows[i][j] - f * rows[k][j]) // prev for j in range(k + 1, n)]
        prev = p
    return sign * rows[n - 1][n - 1] * scale


def p_rank(M) -> int:
    """Exact rank of a P_k image; always a multiple of 4."""
    r = exact_rank(M)
    if r % 4:
        raise RankNotMultipleOfFour(f"rank {r} is not a multiple of 4; input is not a P_k image")
    return r


def convert_form(A: QuaternionMatrix, k: int, k_new: int) -> QuaternionMatrix:
    """The matrix B with P_{k_new}(B) = P_k(A)."""
    if k == k_new:
        return A
    return QuaternionMatrix([[q_unmap(k_new, q_map(k, a)) for a in row] for row in A])


def convert_scalar(q, k: int, k_new: int) -> Quaternion:
    """γ with Q_{k_new}(γ) = Q_k(q)."""
    return q_unmap(k_new, q_map(k, q))


def _swap(i: int, j: int) -> np.ndarray:
    M = np.eye(4, dtype=int)
    M[[i - 1, j - 1]] = M[[j - 1, i - 1]]
    return M


def _scale(i: int, c: int) -> np.ndarray:
    M = np.eye(4, dtype=int)
    M[i - 1, i - 1] = c
    return M


# left factors of the three conjugation identities; each right factor is the
# same product in reverse order
_CONJUGATORS = (
    (_swap(3, 4), _swap(1, 2), _scale(4, -1), _scale(1, -1)),
    (_swap(2, 4), _swap(1, 3), _scale(4, -1), _scale(3, -1)),
    (_swap(2, 3), _swap(1, 4), _scale(4, -1), _scale(2, -1)),
)


def elementary_conjugation_check(q) -> bool:
    """Whether the three signed-swap conjugations fix Q_1(q) exactly."""
    Q = q_map(1, q)
    for factors in _CONJUGATORS:
        L = np.linalg.multi_dot(factors)
        R = np.linalg.multi_dot(factors[::-1])
        if not (L.astype(object) @ Q @ R.astype(object) == Q).all():
            return False
    return True


def random_quaternion(rng: random.Random, bound: int = 9, denom: int = 6) -> Quaternion:
    return Quaternion(*(Fraction(rng.randint(-bound, bound), rng.randint(1, denom)) for _ in range(4)))


def random_matrix(rng: random.Random, m: int, n: int | None = None, **kw) -> QuaternionMatrix:
    return QuaternionMatrix([[random_quaternion(rng, **kw) for _ in range(m if n is None else n)] for _ in range(m)])


# random rationals num/den with |num| <= 9, den in 1..6 are all multiples of 1/60
_COMMON_DEN = 60


def _random_numerators(rng: np.random.Generator, shape) -> np.ndarray:
    num = rng.integers(-9, 10, size=shape)
    den = rng.integers(1, 7, size=shape)
    return num * (_COMMON_DEN // den)


def _p_map_int(X: np.ndarray, basis: np.ndarray) -> np.ndarray:
    m, n, _ = X.shape
    return np.einsum("ijc,cab->iajb", X, basis).reshape(4 * m, 4 * n)


def _qmat_mul_int(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    return qmul_array(X[:, :, None, :], Y[None, :, :, :]).sum(axis=1)


def check_form(k: int, n_samples: int = 1000, seed: int = 0) -> bool:
    """Exact homomorphism checks for form ``k`` on random rational samples.

    Sums, products, conjugate/transpose, left and right scalar actions and
    the block matrix product are each tested ``n_samples`` times.  Samples
    are rationals with denominators dividing 60; every identity is
    homogeneous, so it is checked on the integer numerators.
    """
    rng = np.random.default_rng([seed, k])
    basis = np.array(get_form(k).basis, dtype=np.int64)
    qm = lambda X: np.einsum("...c,cab->...ab", X, basis)

    P = _random_numerators(rng, (n_samples, 4))
    Q = _random_numerators(rng, (n_samples, 4))
    if not (qm(P) + qm(Q) == qm(P + Q)).all():
        return False
    if not (qm(P) @ qm(Q) == qm(qmul_array(P, Q))).all():
        return False
    conj = P * np.array([1, -1, -1, -1])
    if not (np.swapaxes(qm(P), 1, 2) == qm(conj)).all():
        return False

    for _ in range(n_samples):
        m, r, n = rng.integers(1, 4, size=3)
        A = _random_numerators(rng, (m, r, 4))
        B = _random_numerators(rng, (r, n, 4))
        q = _random_numerators(rng, 4)
        PA = _p_map_int(A, basis)
        if not (PA @ _p_map_int(B, basis) == _p_map_int(_qmat_mul_int(A, B), basis)).all():
            return False
        left = _p_map_int(np.einsum("ij,c->ijc", np.eye(m, dtype=np.int64), q), basis) @ PA
        if not (left == _p_map_int(qmul_array(q, A), basis)).all():
            return False
        right = PA @ _p_map_int(np.einsum("ij,c->ijc", np.eye(r, dtype=np.int64), q), basis)
        if not (right == _p_map_int(qmul_array(A, q), basis)).all():
            return False
    return True


def check_determinants(k: int, n_samples: int = 100, seed: int = 0) -> bool:
    """det Q_k(q) = |q|⁴ exactly on random rational q."""
    rng = random.Random(seed * 7919 + k)
    for _ in range(n_samples):
        q = random_quaternion(rng)
        if exact_det(q_map(k, q)) != q.norm2() ** 2:
            return False
    return True


def check_conjugations(n_samples: int = 1000, seed: int = 0) -> bool:
    rng = random.Random(seed)
    return all(elementary_conjugation_check(random_quaternion(rng)) for _ in range(n_samples))


def blocks_of(M: np.ndarray) -> Sequence[Sequence[np.ndarray]]:
    m, n = M.shape[0] // 4, M.shape[1] // 4
    return [[M[4 * i : 4 * i + 4, 4 * j : 4 * j + 4] for j in range(n)] for i in range(m)]
