"""The symbolic pencil P₁(A − λI) and the four-equation system whose common
zeros contain every left eigenvalue of A.

The pencil is bordered around an (m−1)-order block B′ of maximal generic
rank.  The sixteen (4m−3)-order minors C₁..C₁₆ pair one of the four rows of
the remaining block row with one of the four columns of the remaining block
column; they fall into four groups that agree up to sign, and one
representative per group gives the system F₁..F₄.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import RelationViolation
from .mpoly import LAMBDA, ZERO, MultiPoly4, PolyMatrix, bordered_minors, poly_det, poly_minor
from .quaternion import Quaternion, QuaternionMatrix
from .representation import exact_rank, get_form, p_map

# (row selector, column selector) of C_t inside the leading block row/column,
# 1-based.  C16 pairs row 4 with column 1: the printed (4, 2) repeats C12 and
# breaks the reversed-column pattern of its group.
MINOR_TABLE: dict[int, tuple[int, int]] = {
    1: (1, 1), 2: (2, 2), 3: (3, 3), 4: (4, 4),
    5: (1, 2), 6: (2, 1), 7: (3, 4), 8: (4, 3),
    9: (1, 3), 10: (2, 4), 11: (3, 1), 12: (4, 2),
    13: (1, 4), 14: (2, 3), 15: (3, 2), 16: (4, 1),
}

# sign s_t such that s_t·C_t is constant across each group
GROUP_SIGNS: tuple[dict[int, int], ...] = (
    {1: 1, 2: 1, 3: 1, 4: 1},
    {5: -1, 6: 1, 7: -1, 8: 1},
    {9: -1, 10: 1, 11: 1, 12: -1},
    {13: -1, 14: -1, 15: 1, 16: 1},
)

REPRESENTATIVES = (1, 5, 9, 13)


@dataclass(frozen=True)
class Pencil:
    m: int
    P: PolyMatrix
    source: QuaternionMatrix

    def at(self, lam) -> "object":
        """Exact numeric pencil at a concrete λ (object array)."""
        return self.P.eval_exact(Quaternion.coerce(lam).coeffs)

    def at_float(self, lam) -> "object":
        return self.P.eval([float(x) for x in lam])


def build_pencil(A: QuaternionMatrix) -> Pencil:
    """P₁(A − λI) with λ = l0 + l1ℏ + l2ȷ + l3κ symbolic."""
    if not A.is_square:
        raise ValueError(f"pencil needs a square matrix, got {A.shape}")
    m = A.rows
    const = p_map(1, A)
    basis = get_form(1).basis
    lam_block = [[sum((LAMBDA[c] * int(basis[c][a, b]) for c in range(4) if basis[c][a, b]), ZERO) for b in range(4)] for a in range(4)]
    entries = []
    for i in range(4 * m):
        row = []
        for j in range(4 * m):
            p = MultiPoly4.const(const[i, j])
            if i // 4 == j // 4:
                p = p - lam_block[i % 4][j % 4]
            row.append(p)
        entries.append(row)
    return Pencil(m, PolyMatrix(entries), A)


@dataclass(frozen=True)
class PivotChoice:
    """Where the (m−1)-order block B′ sits and how to move it to the trailing
    position: block row ``deleted_row`` and block column ``deleted_col`` are
    moved to the front."""

    deleted_row: int
    deleted_col: int
    rank: int
    m: int
    generic: bool = True

    @property
    def n(self) -> int:
        return self.rank // 4

    @property
    def full(self) -> bool:
        return self.n == self.m - 1

    @property
    def block_row_order(self) -> list[int]:
        return [self.deleted_row] + [i for i in range(self.m) if i != self.deleted_row]

    @property
    def block_col_order(self) -> list[int]:
        return [self.deleted_col] + [j for j in range(self.m) if j != self.deleted_col]

    def row_order(self) -> list[int]:
        return [4 * b + a for b in self.block_row_order for a in range(4)]

    def col_order(self) -> list[int]:
        return [4 * b + a for b in self.block_col_order for a in range(4)]


def _random_lambda(rng: random.Random) -> Quaternion:
    return Quaternion(*(Fraction(rng.randint(-997, 997), rng.randint(1, 97)) for _ in range(4)))


def _candidate_order(m: int):
    for j in range(m):
        for i in reversed(range(m)):
            yield i, j


def select_pivot_block(A: QuaternionMatrix, generic: bool = True, seed: int = 0) -> PivotChoice:
    """Pick the (m−1)-order submatrix of maximal P₁-rank.

    With ``generic`` the ranks are those of A − λI at a random rational λ,
    confirmed at a second independent sample; otherwise ranks of A itself.
    Ties go to the first candidate in the order (column 1, row m),
    (column 1, row m−1), ..., (column m, row 1).
    """
    m = A.rows
    if m < 2:
        raise ValueError("pivot selection needs m > 1")
    rng = random.Random(seed)

    def ranks_at(M: QuaternionMatrix) -> dict[tuple[int, int], int]:
        out = {}
        for i, j in _candidate_order(m):
            rows = [r for r in range(m) if r != i]
            cols = [c for c in range(m) if c != j]
            out[(i, j)] = exact_rank(p_map(1, M.submatrix(rows, cols)))
        return out

    if generic:
        for _attempt in range(5):
            samples = []
            for _ in range(2):
                lam = _random_lambda(rng)
                shifted = A - QuaternionMatrix.identity(m).left_mul(lam)
                samples.append(ranks_at(shifted))
            if samples[0] == samples[1]:
                ranks = samples[0]
                break
        else:
            raise RuntimeError("generic rank did not stabilise across random samples")
    else:
        ranks = ranks_at(A)
    best = max(ranks.values())
    for i, j in _candidate_order(m):
        if ranks[(i, j)] == best:
            return PivotChoice(i, j, best, m, generic)
    raise AssertionError("unreachable")


@dataclass
class MinorSet:
    C: dict[int, MultiPoly4]
    pivot: PivotChoice
    n_star: int

    def group(self, g: int) -> dict[int, MultiPoly4]:
        return {t: self.C[t] for t in GROUP_SIGNS[g]}


def permuted_pencil(P: Pencil, pivot: PivotChoice) -> PolyMatrix:
    return P.P.submatrix(pivot.row_order(), pivot.col_order())


def extract_minors(P: Pencil, pivot: PivotChoice, method: str = "bordered") -> MinorSet:
    """The sixteen minors det P′(r, 5:4m; c, 5:4m) of the reordered pencil.

    ``method="bordered"`` gets all sixteen from a single elimination of the
    B′ block; ``method="direct"`` takes each determinant separately.
    """
    M = permuted_pencil(P, pivot)
    size = 4 * P.m
    lead = list(range(4, size))
    C: dict[int, MultiPoly4] = {}
    table = None
    if method == "bordered":
        table = bordered_minors(M, lead, lead, [0, 1, 2, 3], [0, 1, 2, 3])
    if table is not None:
        for t, (r, c) in MINOR_TABLE.items():
            C[t] = table[(r - 1, c - 1)]
    else:
        for t, (r, c) in MINOR_TABLE.items():
            C[t] = poly_minor(M, [r - 1] + lead, [c - 1] + lead, "bareiss")
    return MinorSet(C, pivot, pivot.rank)


def verify_minor_relations(ms: MinorSet) -> bool:
    """Check every sign chain exactly; raise RelationViolation otherwise."""
    for signs in GROUP_SIGNS:
        items = list(signs.items())
        t0, s0 = items[0]
        ref = ms.C[t0] * s0
        for t, s in items[1:]:
            diff = ms.C[t] * s - ref
            if not diff.is_zero():
                raise RelationViolation((t0, t), diff)
    return True


@dataclass
class CharSystem:
    """The equations handed to the solver.

    For m = 1 ``trivial`` holds the single eigenvalue and ``equations`` is
    empty.
    """

    source: QuaternionMatrix
    equations: list[MultiPoly4] = field(default_factory=list)
    minors: MinorSet | None = None
    pencil: Pencil | None = None
    trivial: Quaternion | None = None
    _full_det: MultiPoly4 | None = None

    @property
    def F(self) -> list[MultiPoly4]:
        return self.equations

    @property
    def m(self) -> int:
        return self.source.rows

    def full_det(self) -> MultiPoly4:
        if self._full_det is None:
            pencil = self.pencil or build_pencil(self.source)
            self._full_det = full_generalized_charpoly(pencil)
        return self._full_det

    def lines(self) -> list[str]:
        return [f"F{i}: {p.to_str()}" for i, p in enumerate(self.equations, start=1)]


def build_char_system(A: QuaternionMatrix, check_relations: bool = True) -> CharSystem:
    if not A.is_square:
        raise ValueError(f"left eigenvalues need a square matrix, got {A.shape}")
    if A.rows == 1:
        return CharSystem(A, trivial=A[0, 0])
    pencil = build_pencil(A)
    pivot = select_pivot_block(A)
    minors = extract_minors(pencil, pivot)
    if check_relations:
        verify_minor_relations(minors)
    if pivot.full:
        eqs = [minors.C[t] for t in REPRESENTATIVES]
    else:
        eqs = [minors.C[t] for t in sorted(minors.C)]
    return CharSystem(A, eqs, minors, pencil)


def full_generalized_charpoly(P: Pencil) -> MultiPoly4:
    """det P₁(A − λI), degree ≤ 4m."""
    return poly_det(P.P, "bareiss" if P.P.rows > 4 else "cofactor")


def minor_degrees(ms: MinorSet) -> dict[int, int]:
    return {t: p.degree for t, p in ms.C.items()}


def group_signs_agree(polys: Sequence[MultiPoly4], expected: Sequence[MultiPoly4]) -> bool:
    """Each polys[i] equals ±expected[i]."""
    return all(p == e or p == -e for p, e in zip(polys, expected))
