"""Exact scalars and dense matrices over Q and prime fields.

Scalars over Q are ``fractions.Fraction`` held in numpy object arrays; over
F_p they are int64 arrays reduced into [0, p). Elimination over F_p runs in
:mod:`ptwist._kernels`; over Q it is fraction-free on integer rows with
content removal, converted back to fractions only at the end.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm

import numpy as np

from . import _kernels

RATIONALS = "rationals"
PRIME_FIELD = "prime_field"

_INT64_LIMIT = 2**63 - 1


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


class FieldError(ValueError):
    pass


_to_fraction = np.frompyfunc(Fraction, 1, 1)


@dataclass(frozen=True)
class FieldSpec:
    kind: str
    modulus: int | None = None

    def __post_init__(self):
        if self.kind == RATIONALS:
            if self.modulus is not None:
                raise FieldError("the rationals carry no modulus")
        elif self.kind == PRIME_FIELD:
            p = self.modulus
            if not isinstance(p, int) or not (2 <= p < 2**31) or not is_prime(p):
                raise FieldError(f"modulus must be a prime in [2, 2^31), got {p!r}")
        else:
            raise FieldError(f"unknown field kind {self.kind!r}")

    @classmethod
    def rationals(cls) -> FieldSpec:
        return cls(RATIONALS)

    @classmethod
    def prime(cls, p: int) -> FieldSpec:
        return cls(PRIME_FIELD, int(p))

    @classmethod
    def parse(cls, text: str) -> FieldSpec:
        """Parse ``"q"`` or ``"fp:P"``."""
        t = text.strip().lower()
        if t in ("q", "qq", "rationals"):
            return cls.rationals()
        if t.startswith("fp:"):
            try:
                p = int(t[3:])
            except ValueError:
                raise FieldError(f"bad modulus in field spec {text!r}") from None
            return cls.prime(p)
        raise FieldError(f"unrecognised field spec {text!r}")

    def __str__(self):
        return "q" if self.kind == RATIONALS else f"fp:{self.modulus}"

    @property
    def is_prime_field(self) -> bool:
        return self.kind == PRIME_FIELD

    @property
    def characteristic(self) -> int:
        return self.modulus if self.is_prime_field else 0

    @property
    def dtype(self):
        return np.int64 if self.is_prime_field else object

    # -- scalars ----------------------------------------------------------

    def scalar(self, x):
        """Coerce ``x`` (int, Fraction, or a string ``"p/q"``) into the field."""
        if isinstance(x, str):
            x = Fraction(x.strip())
        elif isinstance(x, (np.integer,)):
            x = int(x)
        if self.is_prime_field:
            if isinstance(x, Fraction):
                p = self.modulus
                if x.denominator % p == 0:
                    raise FieldError(f"{x} has no image in F_{p}")
                return x.numerator * pow(x.denominator, -1, p) % p
            if isinstance(x, int):
                return x % self.modulus
            raise FieldError(f"cannot coerce {x!r} into {self}")
        if isinstance(x, (int, Fraction)):
            return Fraction(x)
        raise FieldError(f"cannot coerce {x!r} into {self}")

    def inv(self, x):
        if self.is_prime_field:
            x = int(x) % self.modulus
            if x == 0:
                raise ZeroDivisionError("inverse of zero")
            return pow(x, -1, self.modulus)
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / Fraction(x)

    def to_json(self, x):
        """JSON form of a scalar: int for F_p, int or ``"p/q"`` for Q."""
        if self.is_prime_field:
            return int(x)
        x = Fraction(x)
        return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"

    # -- arrays -----------------------------------------------------------

    def array(self, values) -> np.ndarray:
        """Fresh normalised array from nested lists / arrays of scalars."""
        if self.is_prime_field:
            if isinstance(values, np.ndarray) and values.dtype.kind in "iu":
                return values.astype(np.int64) % self.modulus
            raw = np.asarray(values, dtype=object)
            if raw.size:
                raw = np.frompyfunc(self.scalar, 1, 1)(raw)
            return np.asarray(raw, dtype=object).astype(np.int64)
        raw = np.array(values, dtype=object)
        if raw.size == 0:
            return raw
        return np.frompyfunc(self.scalar, 1, 1)(raw).astype(object)

    def zeros(self, shape) -> np.ndarray:
        if self.is_prime_field:
            return np.zeros(shape, dtype=np.int64)
        out = np.empty(shape, dtype=object)
        out.fill(Fraction(0))
        return out

    def eye(self, n: int) -> np.ndarray:
        out = self.zeros((n, n))
        for i in range(n):
            out[i, i] = 1 if self.is_prime_field else Fraction(1)
        return out

    def reduce(self, a: np.ndarray) -> np.ndarray:
        """Bring the result of ring operations back into canonical form."""
        if self.is_prime_field:
            if a.dtype == object:
                a = np.asarray(a % self.modulus, dtype=np.int64)
            return a % self.modulus
        return a

    def tensordot(self, a: np.ndarray, b: np.ndarray, axes) -> np.ndarray:
        """``np.tensordot`` with exact reduction; guards int64 overflow."""
        if self.is_prime_field:
            ax_a = axes[0] if isinstance(axes[0], (list, tuple)) else [axes[0]]
            k = 1
            for ax in ax_a:
                k *= a.shape[ax]
            p = self.modulus
            if k * (p - 1) ** 2 > _INT64_LIMIT:
                out = np.tensordot(a.astype(object), b.astype(object), axes)
                return np.asarray(out % p, dtype=np.int64)
            return np.tensordot(a, b, axes) % p
        return np.tensordot(a, b, axes)

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return self.tensordot(a, b, ([a.ndim - 1], [0]))

    def random(self, rng: np.random.Generator, shape, bound: int = 5) -> np.ndarray:
        """Uniform over F_p; over Q, integers in [-bound, bound]."""
        if self.is_prime_field:
            return rng.integers(0, self.modulus, size=shape, dtype=np.int64)
        ints = rng.integers(-bound, bound + 1, size=shape)
        return self.array(ints.tolist() if np.ndim(ints) else int(ints))

    def is_zero(self, a) -> bool:
        a = np.asarray(a)
        if a.size == 0:
            return True
        return not np.any(a != 0)


QQ = FieldSpec.rationals()
GF32003 = FieldSpec.prime(32003)


class Matrix:
    """Immutable dense matrix over a :class:`FieldSpec`."""

    __slots__ = ("field", "data")

    def __init__(self, field: FieldSpec, data):
        arr = field.array(data)
        if arr.ndim != 2:
            if arr.size == 0:
                arr = field.zeros((0, 0))
            else:
                raise ValueError("matrix data must be two-dimensional")
        self._init(field, arr)

    def _init(self, field, arr):
        arr.setflags(write=False)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "data", arr)

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    @classmethod
    def wrap(cls, field: FieldSpec, arr: np.ndarray) -> Matrix:
        """Wrap an already-normalised array (no copy, no checks)."""
        m = cls.__new__(cls)
        m._init(field, arr)
        return m

    @classmethod
    def zeros(cls, field: FieldSpec, rows: int, cols: int) -> Matrix:
        return cls.wrap(field, field.zeros((rows, cols)))

    @classmethod
    def identity(cls, field: FieldSpec, n: int) -> Matrix:
        return cls.wrap(field, field.eye(n))

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self):
        return self.data.shape

    @property
    def entries(self) -> list:
        return list(self.data.flat)

    @property
    def T(self) -> Matrix:
        return Matrix.wrap(self.field, self.data.T.copy())

    def _check_field(self, other):
        if other.field != self.field:
            raise FieldError(f"field mismatch: {self.field} vs {other.field}")

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            self._check_field(other)
            if self.cols != other.rows:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            return Matrix.wrap(self.field, self.field.matmul(self.data, other.data))
        v = self.field.array(other)
        if v.shape != (self.cols,):
            raise ValueError(f"vector of length {self.cols} expected")
        return self.field.matmul(self.data, v)

    def __add__(self, other: Matrix) -> Matrix:
        self._check_field(other)
        return Matrix.wrap(self.field, self.field.reduce(self.data + other.data))

    def __sub__(self, other: Matrix) -> Matrix:
        self._check_field(other)
        return Matrix.wrap(self.field, self.field.reduce(self.data - other.data))

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return (
            self.field == other.field
            and self.shape == other.shape
            and bool(np.all(self.data == other.data))
        )

    __hash__ = None

    def __repr__(self):
        return f"Matrix({self.field}, {self.data.tolist()})"


def _as_matrix(m) -> Matrix:
    if not isinstance(m, Matrix):
        raise TypeError(f"Matrix expected, got {type(m).__name__}")
    return m


# -- elimination ---------------------------------------------------------


def _rref_rational(data: np.ndarray) -> tuple[np.ndarray, list[int]]:
    rows_n, cols_n = data.shape
    rows = []
    for r in range(rows_n):
        vals = [Fraction(x) for x in data[r]]
        den = 1
        for v in vals:
            den = lcm(den, v.denominator)
        rows.append([v.numerator * (den // v.denominator) for v in vals])
    pivots: list[int] = []
    r = 0
    for c in range(cols_n):
        if r == rows_n:
            break
        piv = next((i for i in range(r, rows_n) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        prow = rows[r]
        a = prow[c]
        for i in range(rows_n):
            if i == r:
                continue
            b = rows[i][c]
            if b == 0:
                continue
            new = [a * x - b * y for x, y in zip(rows[i], prow)]
            g = 0
            for x in new:
                if x:
                    g = gcd(g, x)
                    if g == 1:
                        break
            if g > 1:
                new = [x // g for x in new]
            rows[i] = new
        pivots.append(c)
        r += 1
    out = np.empty((rows_n, cols_n), dtype=object)
    for i in range(rows_n):
        if i < len(pivots):
            lead = rows[i][pivots[i]]
            out[i] = [Fraction(x, lead) for x in rows[i]]
        else:
            out[i] = [Fraction(0)] * cols_n
    return out, pivots


def rref_array(field: FieldSpec, data: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of a raw array and its pivot columns."""
    if data.ndim != 2:
        raise ValueError("two-dimensional array expected")
    if field.is_prime_field:
        work = np.array(data, dtype=np.int64, copy=True)
        piv = _kernels.rref_modp(work, field.modulus)
        return work, [int(c) for c in piv]
    if data.size == 0:
        return field.zeros(data.shape), []
    return _rref_rational(data)


def rank_array(field: FieldSpec, data: np.ndarray) -> int:
    if data.size == 0:
        return 0
    if field.is_prime_field and data.shape[0] > data.shape[1]:
        data = data.T
    return len(rref_array(field, data)[1])


def rref(m: Matrix) -> tuple[Matrix, list[int]]:
    m = _as_matrix(m)
    red, piv = rref_array(m.field, m.data)
    return Matrix.wrap(m.field, red), piv


def rank(m: Matrix) -> int:
    m = _as_matrix(m)
    return rank_array(m.field, m.data)


def nullspace_array(field: FieldSpec, data: np.ndarray) -> np.ndarray:
    """Kernel basis as the columns of a ``cols x (cols - rank)`` array."""
    n = data.shape[1]
    if data.shape[0] == 0:
        return field.eye(n)
    red, piv = rref_array(field, data)
    free = [c for c in range(n) if c not in set(piv)]
    out = field.zeros((n, len(free)))
    one = 1 if field.is_prime_field else Fraction(1)
    for k, f in enumerate(free):
        out[f, k] = one
        for r, pc in enumerate(piv):
            out[pc, k] = -red[r, f]
    return field.reduce(out)


def nullspace_basis(m: Matrix) -> list[np.ndarray]:
    """Basis of ker(m) as column vectors; one per non-pivot column."""
    m = _as_matrix(m)
    basis = nullspace_array(m.field, m.data)
    return [basis[:, k].copy() for k in range(basis.shape[1])]


def solve_array(field: FieldSpec, data: np.ndarray, b: np.ndarray):
    rows, cols = data.shape
    b = np.asarray(b)
    if b.shape != (rows,):
        raise ValueError(f"right-hand side of length {rows} expected, got {b.shape}")
    aug = field.zeros((rows, cols + 1))
    aug[:, :cols] = data
    aug[:, cols] = b
    red, piv = rref_array(field, aug)
    if piv and piv[-1] == cols:
        return None
    x = field.zeros(cols)
    for r, pc in enumerate(piv):
        x[pc] = red[r, cols]
    return x


def solve(m: Matrix, b):
    """Some ``x`` with ``m @ x == b``, or ``None`` when ``b`` is not in the image."""
    m = _as_matrix(m)
    return solve_array(m.field, m.data, m.field.array(b))


def independent_columns(field: FieldSpec, data: np.ndarray) -> list[int]:
    """Pivot columns: the first maximal independent subset in column order."""
    if data.size == 0:
        return []
    return rref_array(field, data)[1]


def image_basis(m: Matrix) -> list[np.ndarray]:
    m = _as_matrix(m)
    cols = independent_columns(m.field, m.data)
    return [m.data[:, c].copy() for c in cols]
