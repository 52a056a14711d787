"""Exact quaternion scalars and dense quaternion matrices.

Coefficients are :class:`fractions.Fraction`; a floating view is available
through :meth:`Quaternion.to_array` / :meth:`QuaternionMatrix.to_array` for
numeric kernels.  Values are immutable.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatch, DivisionByZero

UNIT_NAMES = ("", "ℏ", "ȷ", "κ")


def to_scalar(x) -> Fraction:
    """Coerce ints, Fractions, floats (exact binary value) and "p/q" or
    decimal strings to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, (float, np.floating)):
        if not np.isfinite(x):
            raise ValueError(f"non-finite scalar {x!r}")
        return Fraction(float(x))
    if isinstance(x, np.integer):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot interpret {x!r} as a rational scalar")


class Quaternion:
    """q0 + q1·ℏ + q2·ȷ + q3·κ with exact rational coefficients."""

    __slots__ = ("_c",)

    def __init__(self, q0=0, q1=0, q2=0, q3=0):
        object.__setattr__(self, "_c", (to_scalar(q0), to_scalar(q1), to_scalar(q2), to_scalar(q3)))

    def __setattr__(self, name, value):
        raise AttributeError("Quaternion is immutable")

    @classmethod
    def coerce(cls, x) -> Quaternion:
        if isinstance(x, Quaternion):
            return x
        if isinstance(x, (tuple, list, np.ndarray)):
            if len(x) != 4:
                raise ValueError(f"quaternion needs 4 components, got {len(x)}")
            return cls(*x)
        return cls(x)

    @property
    def coeffs(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return self._c

    q0 = property(lambda self: self._c[0])
    q1 = property(lambda self: self._c[1])
    q2 = property(lambda self: self._c[2])
    q3 = property(lambda self: self._c[3])

    def __iter__(self):
        return iter(self._c)

    def __getitem__(self, i):
        return self._c[i]

    def __eq__(self, other):
        if not isinstance(other, Quaternion):
            try:
                other = Quaternion.coerce(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self._c == other._c

    def __hash__(self):
        return hash(self._c)

    def __add__(self, other):
        o = Quaternion.coerce(other)
        return Quaternion(*(a + b for a, b in zip(self._c, o._c)))

    __radd__ = __add__

    def __sub__(self, other):
        o = Quaternion.coerce(other)
        return Quaternion(*(a - b for a, b in zip(self._c, o._c)))

    def __rsub__(self, other):
        return Quaternion.coerce(other) - self

    def __neg__(self):
        return Quaternion(*(-a for a in self._c))

    def __mul__(self, other):
        if isinstance(other, QuaternionMatrix):
            return NotImplemented
        a0, a1, a2, a3 = self._c
        b0, b1, b2, b3 = Quaternion.coerce(other)._c
        return Quaternion(
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        )

    def __rmul__(self, other):
        return Quaternion.coerce(other) * self

    def conj(self) -> Quaternion:
        a0, a1, a2, a3 = self._c
        return Quaternion(a0, -a1, -a2, -a3)

    def norm2(self) -> Fraction:
        return sum((a * a for a in self._c), Fraction(0))

    def norm(self) -> float:
        return float(np.sqrt(float(self.norm2())))

    def inverse(self) -> Quaternion:
        n = self.norm2()
        if n == 0:
            raise DivisionByZero("inverse of the zero quaternion")
        return Quaternion(*(a / n for a in self.conj()._c))

    def real(self) -> Fraction:
        return self._c[0]

    def is_zero(self) -> bool:
        return not any(self._c)

    def to_array(self) -> np.ndarray:
        return np.array([float(a) for a in self._c])

    def __repr__(self):
        return f"Quaternion({', '.join(str(a) for a in self._c)})"

    def __str__(self):
        return format_quaternion(self._c)


ZERO = Quaternion(0)
ONE = Quaternion(1)
I_UNIT = Quaternion(0, 1)
J_UNIT = Quaternion(0, 0, 1)
K_UNIT = Quaternion(0, 0, 0, 1)


def format_quaternion(c: Sequence, digits: int | None = None) -> str:
    """Render as "a + bℏ + cȷ + dκ"; zero components are dropped."""
    parts = []
    for val, name in zip(c, UNIT_NAMES):
        if val == 0:
            continue
        txt = f"{float(val):.{digits}g}" if digits is not None else str(val)
        neg = txt.startswith("-")
        txt = txt.lstrip("-")
        if name and txt == "1":
            txt = ""
        term = txt + name
        if not parts:
            parts.append(("-" if neg else "") + term)
        else:
            parts.append(("- " if neg else "+ ") + term)
    return " ".join(parts) if parts else "0"


def similar(a, b) -> bool:
    """a ~ b iff they share real part and norm."""
    a = Quaternion.coerce(a)
    b = Quaternion.coerce(b)
    return a.real() == b.real() and a.norm2() == b.norm2()


def similarity_witness(a, b) -> Quaternion | None:
    """A nonzero σ with σ⁻¹·a·σ = b, or None when a and b are not similar."""
    a = Quaternion.coerce(a)
    b = Quaternion.coerce(b)
    if not similar(a, b):
        return None
    u = Quaternion(0, *a.coeffs[1:])
    w = Quaternion(0, *b.coeffs[1:])
    if u.is_zero():
        return ONE
    # |u|² - u·w satisfies u·σ = σ·w when |u| = |w|; it vanishes only for w = -u
    sigma = Quaternion(u.norm2()) - u * w
    if not sigma.is_zero():
        return sigma
    for e in (I_UNIT, J_UNIT, K_UNIT):
        cand = e * u - u * e
        if not cand.is_zero():
            return cand
    raise AssertionError("unreachable: u is nonzero")


class QuaternionMatrix:
    """Dense m×n quaternion matrix stored row-major."""

    __slots__ = ("rows", "cols", "_e")

    def __init__(self, entries: Iterable[Iterable]):
        rows = tuple(tuple(Quaternion.coerce(q) for q in row) for row in entries)
        if not rows or not rows[0]:
            raise DimensionMismatch("quaternion matrix needs at least one row and column")
        n = len(rows[0])
        if any(len(r) != n for r in rows):
            raise DimensionMismatch("ragged rows")
        object.__setattr__(self, "rows", len(rows))
        object.__setattr__(self, "cols", n)
        object.__setattr__(self, "_e", rows)

    def __setattr__(self, name, value):
        raise AttributeError("QuaternionMatrix is immutable")

    @classmethod
    def identity(cls, m: int) -> QuaternionMatrix:
        return cls([[ONE if i == j else ZERO for j in range(m)] for i in range(m)])

    @classmethod
    def zeros(cls, m: int, n: int | None = None) -> QuaternionMatrix:
        return cls([[ZERO] * (m if n is None else n) for _ in range(m)])

    @classmethod
    def diag(cls, qs: Sequence) -> QuaternionMatrix:
        m = len(qs)
        return cls([[qs[i] if i == j else ZERO for j in range(m)] for i in range(m)])

    @classmethod
    def column(cls, qs: Sequence) -> QuaternionMatrix:
        return cls([[q] for q in qs])

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, ij) -> Quaternion:
        i, j = ij
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(f"entry {ij} outside {self.shape}")
        return self._e[i][j]

    def entries(self) -> tuple[tuple[Quaternion, ...], ...]:
        return self._e

    def __iter__(self):
        return iter(self._e)

    def __eq__(self, other):
        if not isinstance(other, QuaternionMatrix):
            return NotImplemented
        return self._e == other._e

    def __hash__(self):
        return hash(self._e)

    def _check_same(self, other):
        if self.shape != other.shape:
            raise DimensionMismatch(f"{self.shape} vs {other.shape}")

    def __add__(self, other: QuaternionMatrix) -> QuaternionMatrix:
        self._check_same(other)
        return QuaternionMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self._e, other._e)])

    def __sub__(self, other: QuaternionMatrix) -> QuaternionMatrix:
        self._check_same(other)
        return QuaternionMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self._e, other._e)])

    def __neg__(self):
        return QuaternionMatrix([[-a for a in r] for r in self._e])

    def __matmul__(self, other: QuaternionMatrix) -> QuaternionMatrix:
        if self.cols != other.rows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = ZERO
                for k in range(self.cols):
                    acc = acc + self._e[i][k] * other._e[k][j]
                row.append(acc)
            out.append(row)
        return QuaternionMatrix(out)

    def left_mul(self, q) -> QuaternionMatrix:
        """q·A (entrywise q·a_ij)."""
        q = Quaternion.coerce(q)
        return QuaternionMatrix([[q * a for a in r] for r in self._e])

    def right_mul(self, q) -> QuaternionMatrix:
        """A·q (entrywise a_ij·q)."""
        q = Quaternion.coerce(q)
        return QuaternionMatrix([[a * q for a in r] for r in self._e])

    def conj_transpose(self) -> QuaternionMatrix:
        return QuaternionMatrix([[self._e[i][j].conj() for i in range(self.rows)] for j in range(self.cols)])

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> QuaternionMatrix:
        return QuaternionMatrix([[self._e[i][j] for j in cols] for i in rows])

    def permute(self, row_order: Sequence[int], col_order: Sequence[int]) -> QuaternionMatrix:
        return self.submatrix(row_order, col_order)

    def to_array(self) -> np.ndarray:
        """Floating view, shape (rows, cols, 4)."""
        return np.array([[q.to_array() for q in r] for r in self._e])

    def __repr__(self):
        return f"QuaternionMatrix({[[str(q) for q in r] for r in self._e]})"


def mat_mul(a: QuaternionMatrix, b: QuaternionMatrix) -> QuaternionMatrix:
    return a @ b


def qmul_array(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Hamilton product on numeric arrays of shape (..., 4); integer
    inputs stay integer."""
    p = np.asarray(p)
    q = np.asarray(q)
    a0, a1, a2, a3 = np.moveaxis(p, -1, 0)
    b0, b1, b2, b3 = np.moveaxis(q, -1, 0)
    return np.stack(
        [
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        ],
        axis=-1,
    )


def matvec_array(a: np.ndarray, v: np.ndarray) -> np.ndarray:
    """(m, n, 4) matrix times (n, 4) vector in floating point."""
    return qmul_array(a, v[None, :, :]).sum(axis=1)


def q_add(a, b) -> Quaternion:
    return Quaternion.coerce(a) + b


def q_mul(a, b) -> Quaternion:
    return Quaternion.coerce(a) * b


def q_conj(q) -> Quaternion:
    return Quaternion.coerce(q).conj()


def q_norm2(q) -> Fraction:
    return Quaternion.coerce(q).norm2()


def q_inv(q) -> Quaternion:
    return Quaternion.coerce(q).inverse()


q_similar = similar


def mat_sub(a: QuaternionMatrix, b: QuaternionMatrix) -> QuaternionMatrix:
    return a - b


def scalar_left_mul(q, A: QuaternionMatrix) -> QuaternionMatrix:
    return A.left_mul(q)


def scalar_right_mul(A: QuaternionMatrix, q) -> QuaternionMatrix:
    return A.right_mul(q)
