"""Sparse polynomials in four variables l0..l3 over the rationals, and
determinants of matrices of such polynomials.

Monomials are packed into one int: total degree in the top field, then the
four exponents, ten bits each.  Integer order on packed keys is graded lex
with l0 > l1 > l2 > l3, and multiplying monomials is adding keys.
"""

from __future__ import annotations

import heapq
import math
from fractions import Fraction
from itertools import permutations
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import IndexOutOfRange

NVARS = 4
_BITS = 10
_MASK = (1 << _BITS) - 1
_DEG_SHIFT = NVARS * _BITS
VAR_NAMES = ("l0", "l1", "l2", "l3")


def pack(exps: Sequence[int]) -> int:
    e0, e1, e2, e3 = exps
    if min(exps) < 0 or max(exps) > _MASK:
        raise ValueError(f"exponent out of range: {exps}")
    return ((e0 + e1 + e2 + e3) << _DEG_SHIFT) | (e0 << 30) | (e1 << 20) | (e2 << 10) | e3


def unpack(key: int) -> tuple[int, int, int, int]:
    return ((key >> 30) & _MASK, (key >> 20) & _MASK, (key >> 10) & _MASK, key & _MASK)


def _degree(key: int) -> int:
    return key >> _DEG_SHIFT


def _norm(c):
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


def _div(a, b):
    if type(a) is int and type(b) is int and a % b == 0:
        return a // b
    return _norm(Fraction(a) / b)


def _divides(small: int, big: int) -> bool:
    a, b = unpack(small), unpack(big)
    return all(x <= y for x, y in zip(a, b))


class MultiPoly4:
    """Immutable sparse polynomial; coefficients are ints or Fractions."""

    __slots__ = ("_t", "_horner")

    def __init__(self, terms: Mapping[int, object] | None = None, *, _packed: bool = True):
        t = {}
        if terms:
            for k, c in terms.items():
                if not _packed:
                    k = pack(k)
                if c:
                    t[k] = _norm(c if isinstance(c, (int, Fraction)) else Fraction(c))
        self._t = t
        self._horner = None

    @classmethod
    def from_exponents(cls, terms: Mapping[tuple[int, int, int, int], object]) -> MultiPoly4:
        return cls(terms, _packed=False)

    @classmethod
    def const(cls, c) -> MultiPoly4:
        return cls({0: c})

    @classmethod
    def var(cls, i: int) -> MultiPoly4:
        e = [0, 0, 0, 0]
        e[i] = 1
        return cls({pack(e): 1})

    @classmethod
    def _raw(cls, t: dict) -> MultiPoly4:
        p = cls.__new__(cls)
        p._t = t
        p._horner = None
        return p

    # -- inspection ---------------------------------------------------------

    def terms(self) -> dict[tuple[int, int, int, int], Fraction]:
        """Exponent tuple -> coefficient, in descending graded-lex order."""
        return {unpack(k): Fraction(self._t[k]) for k in sorted(self._t, reverse=True)}

    def packed_terms(self) -> dict[int, object]:
        return dict(self._t)

    def __len__(self):
        return len(self._t)

    def is_zero(self) -> bool:
        return not self._t

    def is_constant(self) -> bool:
        return not self._t or (len(self._t) == 1 and 0 in self._t)

    @property
    def degree(self) -> int:
        return max((_degree(k) for k in self._t), default=-1)

    def leading(self) -> tuple[int, object]:
        k = max(self._t)
        return k, self._t[k]

    def constant_term(self):
        return Fraction(self._t.get(0, 0))

    def __eq__(self, other):
        if isinstance(other, MultiPoly4):
            return self._t == other._t
        if isinstance(other, (int, Fraction)):
            return self._t == ({0: other} if other else {})
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._t.items()))

    def __bool__(self):
        return bool(self._t)

    # -- ring operations ----------------------------------------------------

    @staticmethod
    def _coerce(x) -> MultiPoly4:
        if isinstance(x, MultiPoly4):
            return x
        return MultiPoly4.const(x)

    def __add__(self, other):
        o = MultiPoly4._coerce(other)
        t = dict(self._t)
        for k, c in o._t.items():
            v = t.get(k, 0) + c
            if v:
                t[k] = _norm(v)
            else:
                t.pop(k, None)
        return MultiPoly4._raw(t)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly4._raw({k: -c for k, c in self._t.items()})

    def __sub__(self, other):
        return self + (-MultiPoly4._coerce(other))

    def __rsub__(self, other):
        return MultiPoly4._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, MultiPoly4):
            if not other:
                return MultiPoly4._raw({})
            return MultiPoly4._raw({k: _norm(c * other) for k, c in self._t.items()})
        a, b = self._t, other._t
        if len(a) < len(b):
            a, b = b, a
        t: dict[int, object] = {}
        get = t.get
        for k2, c2 in b.items():
            for k1, c1 in a.items():
                k = k1 + k2
                t[k] = get(k, 0) + c1 * c2
        return MultiPoly4._raw({k: _norm(c) for k, c in t.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = MultiPoly4.const(1)
        for _ in range(n):
            out = out * self
        return out

    def exact_div(self, other) -> MultiPoly4:
        """Quotient of an exact division; ArithmeticError if not exact."""
        if not isinstance(other, MultiPoly4):
            other = MultiPoly4.const(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        if other.is_constant():
            c = other._t[0]
            return MultiPoly4._raw({k: _div(v, c) for k, v in self._t.items()})
        lk, lc = other.leading()
        r = dict(self._t)
        heap = [-k for k in r]
        heapq.heapify(heap)
        q: dict[int, object] = {}
        others = [(k, c) for k, c in other._t.items() if k != lk]
        while r:
            k = -heapq.heappop(heap)
            c = r.get(k)
            if c is None:
                continue
            if not _divides(lk, k):
                raise ArithmeticError("polynomial division is not exact")
            mk = k - lk
            t = _div(c, lc)
            q[mk] = t
            del r[k]
            for ok, oc in others:
                key = mk + ok
                v = r.get(key, 0) - t * oc
                if v:
                    if key not in r:
                        heapq.heappush(heap, -key)
                    r[key] = _norm(v)
                else:
                    r.pop(key, None)
        return MultiPoly4._raw(q)

    # -- calculus and evaluation -------------------------------------------

    def partial(self, var: int) -> MultiPoly4:
        shift = (NVARS - 1 - var) * _BITS
        one = (1 << shift) | (1 << _DEG_SHIFT)
        t = {}
        for k, c in self._t.items():
            e = (k >> shift) & _MASK
            if e:
                t[k - one] = _norm(c * e)
        return MultiPoly4._raw(t)

    def _nested(self):
        if self._horner is None:
            self._horner = _build_horner([(unpack(k), c) for k, c in self._t.items()], 0)
        return self._horner

    def eval(self, point: Sequence[float]) -> float:
        """Float evaluation, Horner-style one variable at a time."""
        x = [float(v) for v in point]
        return float(_run_horner(self._nested(), x, 0, float))

    def eval_exact(self, point: Sequence) -> Fraction:
        x = [Fraction(v) for v in point]
        return Fraction(_run_horner(self._nested(), x, 0, Fraction))

    def substitute_const(self, point: Sequence) -> Fraction:
        return self.eval_exact(point)

    # -- display ------------------------------------------------------------

    def to_str(self) -> str:
        """Textual form, terms in descending lex order of exponents."""
        if not self._t:
            return "0"
        keys = sorted(self._t, key=lambda k: unpack(k), reverse=True)
        out = []
        for k in keys:
            c = Fraction(self._t[k])
            e = unpack(k)
            mono = "*".join(
                VAR_NAMES[i] + (f"^{p}" if p > 1 else "") for i, p in enumerate(e) if p
            )
            mag = abs(c)
            if mono:
                body = mono if mag == 1 else f"{mag}*{mono}"
            else:
                body = str(mag)
            if not out:
                out.append(("-" if c < 0 else "") + body)
            else:
                out.append(("- " if c < 0 else "+ ") + body)
        return " ".join(out)

    __str__ = to_str

    def __repr__(self):
        return f"MultiPoly4({self.to_str()!r})"


def _build_horner(terms, var):
    """Nested [(power, sub)] lists, descending in the power of ``var``."""
    if var == NVARS:
        return sum((c for _, c in terms), 0)
    groups: dict[int, list] = {}
    for e, c in terms:
        groups.setdefault(e[var], []).append((e, c))
    return [(p, _build_horner(groups[p], var + 1)) for p in sorted(groups, reverse=True)]


def _run_horner(node, x, var, kind):
    if var == NVARS:
        return kind(node)
    if not node:
        return kind(0)
    acc = kind(0)
    prev = None
    for p, sub in node:
        if prev is not None:
            acc = acc * x[var] ** (prev - p)
        acc = acc + _run_horner(sub, x, var + 1, kind)
        prev = p
    return acc * x[var] ** prev


ZERO = MultiPoly4()
ONE = MultiPoly4.const(1)
L0, L1, L2, L3 = (MultiPoly4.var(i) for i in range(NVARS))
LAMBDA = (L0, L1, L2, L3)


def parse_poly(text: str) -> MultiPoly4:
    """Inverse of :meth:`MultiPoly4.to_str` (accepts its own output)."""
    s = text.replace(" ", "")
    if not s or s == "0":
        return ZERO
    if s[0] not in "+-":
        s = "+" + s
    out = ZERO
    i = 0
    while i < len(s):
        sign = -1 if s[i] == "-" else 1
        j = i + 1
        while j < len(s) and s[j] not in "+-":
            j += 1
        term = s[i + 1 : j]
        coef = Fraction(1)
        mono = MultiPoly4.const(1)
        for factor in term.split("*"):
            if factor.startswith("l"):
                name, _, power = factor.partition("^")
                mono = mono * MultiPoly4.var(VAR_NAMES.index(name)) ** (int(power) if power else 1)
            else:
                coef *= Fraction(factor)
        out = out + mono * (sign * coef)
        i = j
    return out


class PolyMatrix:
    """Dense matrix of MultiPoly4 entries."""

    __slots__ = ("rows", "cols", "_e")

    def __init__(self, entries: Iterable[Iterable]):
        e = [[MultiPoly4._coerce(x) for x in row] for row in entries]
        self.rows = len(e)
        self.cols = len(e[0]) if e else 0
        if any(len(r) != self.cols for r in e):
            raise ValueError("ragged rows")
        self._e = e

    @classmethod
    def identity(cls, n: int) -> PolyMatrix:
        return cls([[ONE if i == j else ZERO for j in range(n)] for i in range(n)])

    @property
    def shape(self):
        return self.rows, self.cols

    def __getitem__(self, ij) -> MultiPoly4:
        i, j = ij
        return self._e[i][j]

    def entries(self) -> list[list[MultiPoly4]]:
        return [list(r) for r in self._e]

    def max_degree(self) -> int:
        return max((p.degree for r in self._e for p in r), default=-1)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> PolyMatrix:
        for i in rows:
            if not 0 <= i < self.rows:
                raise IndexOutOfRange(f"row {i} outside 0..{self.rows - 1}")
        for j in cols:
            if not 0 <= j < self.cols:
                raise IndexOutOfRange(f"column {j} outside 0..{self.cols - 1}")
        return PolyMatrix([[self._e[i][j] for j in cols] for i in rows])

    def eval_exact(self, point: Sequence) -> np.ndarray:
        out = np.empty((self.rows, self.cols), dtype=object)
        for i, r in enumerate(self._e):
            for j, p in enumerate(r):
                out[i, j] = p.eval_exact(point)
        return out

    def eval(self, point: Sequence[float]) -> np.ndarray:
        return np.array([[p.eval(point) for p in r] for r in self._e], dtype=float)

    def det(self, method: str = "auto") -> MultiPoly4:
        return poly_det(self, method)

    def minor(self, rows: Sequence[int], cols: Sequence[int], method: str = "auto") -> MultiPoly4:
        return poly_minor(self, rows, cols, method)


def det_cofactor(M: PolyMatrix) -> MultiPoly4:
    """Laplace expansion along the first row; factorial cost."""
    n = M.rows
    if n != M.cols:
        raise ValueError("determinant of a non-square matrix")
    e = M._e

    def rec(rows: tuple[int, ...], cols: tuple[int, ...]) -> MultiPoly4:
        if len(rows) == 1:
            return e[rows[0]][cols[0]]
        if len(rows) == 2:
            (a, b), (c, d) = rows, cols
            return e[a][c] * e[b][d] - e[a][d] * e[b][c]
        r0, rest = rows[0], rows[1:]
        acc = ZERO
        for idx, c in enumerate(cols):
            entry = e[r0][c]
            if entry.is_zero():
                continue
            sub = rec(rest, cols[:idx] + cols[idx + 1 :])
            term = entry * sub
            acc = acc - term if idx % 2 else acc + term
        return acc

    if n == 0:
        return ONE
    return rec(tuple(range(n)), tuple(range(n)))


def det_leibniz(M: PolyMatrix) -> MultiPoly4:
    """Sum over permutations; only for tiny matrices and cross-checks."""
    n = M.rows
    acc = ZERO
    for perm in permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    sign = -sign
        term = ONE
        for i, j in enumerate(perm):
            term = term * M._e[i][j]
            if term.is_zero():
                break
        acc = acc + term * sign
    return acc


def _cleared(a: list[list[MultiPoly4]]) -> tuple[list[list[MultiPoly4]], int]:
    """Scale every entry by the common denominator D of all coefficients so
    elimination runs on integers; returns the scaled rows and D."""
    D = 1
    for row in a:
        for p in row:
            for c in p._t.values():
                if type(c) is not int:
                    D = math.lcm(D, Fraction(c).denominator)
    if D == 1:
        return a, 1
    return [[p * D for p in row] for row in a], D


def _pivot_cost(p: MultiPoly4) -> tuple[int, int]:
    return (len(p), p.degree)


def _bareiss_steps(a: list[list[MultiPoly4]], nsteps: int, pivot_rows: int) -> tuple[int, MultiPoly4] | None:
    """Run ``nsteps`` fraction-free elimination steps in place.

    Pivots at step k are searched in column k among rows k..pivot_rows-1.
    Returns (sign of the row permutation, last pivot), or None if a pivot
    column is empty.
    """
    n = len(a)
    ncols = len(a[0])
    sign = 1
    prev = ONE
    for k in range(nsteps):
        cands = [i for i in range(k, pivot_rows) if not a[i][k].is_zero()]
        if not cands:
            return None
        piv = min(cands, key=lambda i: _pivot_cost(a[i][k]))
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        p = a[k][k]
        rowk = a[k]
        for i in range(k + 1, n):
            row = a[i]
            f = row[k]
            for j in range(k + 1, ncols):
                if f.is_zero():
                    num = row[j] * p
                else:
                    num = row[j] * p - f * rowk[j]
                row[j] = num if prev is ONE else num.exact_div(prev)
            row[k] = ZERO
        prev = p
    return sign, prev


def det_bareiss(M: PolyMatrix) -> MultiPoly4:
    """Fraction-free (Bareiss) elimination over the polynomial ring."""
    n = M.rows
    if n != M.cols:
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return ONE
    a, D = _cleared(M.entries())
    res = _bareiss_steps(a, n - 1, n)
    if res is None:
        return ZERO
    sign, _ = res
    if a[n - 1][n - 1].is_zero():
        return ZERO
    det = a[n - 1][n - 1] * sign
    return det if D == 1 else det.exact_div(D**n)


def poly_det(M: PolyMatrix, method: str = "auto") -> MultiPoly4:
    """Exact determinant; cofactor expansion up to 4×4, Bareiss beyond."""
    if M.rows != M.cols:
        raise ValueError("determinant of a non-square matrix")
    if method == "auto":
        method = "cofactor" if M.rows <= 4 else "bareiss"
    if method == "cofactor":
        return det_cofactor(M)
    if method == "bareiss":
        return det_bareiss(M)
    if method == "leibniz":
        return det_leibniz(M)
    raise ValueError(f"unknown determinant method {method!r}")


def poly_minor(M: PolyMatrix, rows: Sequence[int], cols: Sequence[int], method: str = "auto") -> MultiPoly4:
    if len(rows) != len(cols):
        raise ValueError("minor needs as many rows as columns")
    return poly_det(M.submatrix(rows, cols), method)


def bordered_minors(
    M: PolyMatrix,
    lead_rows: Sequence[int],
    lead_cols: Sequence[int],
    border_rows: Sequence[int],
    border_cols: Sequence[int],
) -> dict[tuple[int, int], MultiPoly4] | None:
    """det M[[r] + lead_rows, [c] + lead_cols] for every border pair (r, c).

    One Bareiss pass over the leading block yields all of them at once: after
    eliminating the leading s×s block, the entry in border row r, border
    column c is the (s+1)-order bordered minor.  Returns None when the
    leading block has no usable pivot (it is singular).
    """
    s = len(lead_rows)
    order_r = list(lead_rows) + list(border_rows)
    order_c = list(lead_cols) + list(border_cols)
    a, D = _cleared(M.submatrix(order_r, order_c).entries())
    res = _bareiss_steps(a, s, s)
    if res is None:
        return None
    sign, _ = res
    scale = D ** (s + 1)
    # moving the border row/column from last to first costs (-1)^s twice
    return {
        (r, c): (a[s + i][s + j] * sign).exact_div(scale) if scale != 1 else a[s + i][s + j] * sign
        for i, r in enumerate(border_rows)
        for j, c in enumerate(border_cols)
    }


class CompiledPolys:
    """Vectorised float evaluation of several polynomials and their
    gradients at many points at once."""

    def __init__(self, polys: Sequence[MultiPoly4]):
        self.polys = list(polys)
        grads = [[p.partial(v) for v in range(NVARS)] for p in self.polys]
        keys = sorted({k for p in self.polys for k in p._t} | {k for g in grads for d in g for k in d._t})
        index = {k: i for i, k in enumerate(keys)}
        self.exps = np.array([unpack(k) for k in keys], dtype=int).reshape(-1, NVARS)
        self.maxdeg = int(self.exps.max()) if len(keys) else 0
        n = len(self.polys)
        self.val_coef = np.zeros((len(keys), n))
        self.grad_coef = np.zeros((len(keys), n * NVARS))
        for j, p in enumerate(self.polys):
            for k, c in p._t.items():
                self.val_coef[index[k], j] = float(c)
            for v in range(NVARS):
                for k, c in grads[j][v]._t.items():
                    self.grad_coef[index[k], j * NVARS + v] = float(c)

    def _monomials(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(X)
        powers = X[:, :, None] ** np.arange(self.maxdeg + 1)[None, None, :]  # (N, 4, d+1)
        mon = np.ones((X.shape[0], len(self.exps)))
        for v in range(NVARS):
            mon *= powers[:, v, self.exps[:, v]]
        return mon

    def values(self, X: np.ndarray) -> np.ndarray:
        return self._monomials(X) @ self.val_coef

    def values_and_jacobians(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        mon = self._monomials(X)
        F = mon @ self.val_coef
        J = (mon @ self.grad_coef).reshape(-1, len(self.polys), NVARS)
        return F, J


def poly_add(p: MultiPoly4, q: MultiPoly4) -> MultiPoly4:
    return p + q


def poly_mul(p: MultiPoly4, q: MultiPoly4) -> MultiPoly4:
    return p * q


def poly_neg(p: MultiPoly4) -> MultiPoly4:
    return -p


def poly_eval(p: MultiPoly4, point: Sequence[float]) -> float:
    return p.eval(point)


def poly_eval_exact(p: MultiPoly4, point: Sequence) -> Fraction:
    return p.eval_exact(point)


def poly_partial(p: MultiPoly4, var: int) -> MultiPoly4:
    return p.partial(var)
