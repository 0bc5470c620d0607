"""Finite-dimensional graded algebras given by structure constants."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .exactlin import FieldError, FieldSpec, solve_array


class AlgebraError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class AlgebraFactor:
    """One factor of a product algebra: its basis indices and idempotent."""

    algebra: "GradedAlgebra"
    indices: tuple[int, ...]
    idempotent: np.ndarray


class GradedAlgebra:
    """Associative unital Z-graded algebra with a fixed homogeneous basis.

    ``structure_constants[i, j, k]`` is the coefficient of basis element ``k``
    in ``b_i * b_j``. The unit is a coefficient vector; for every algebra
    except products it is a basis element (``unit_index``).
    """

    def __init__(
        self,
        field: FieldSpec,
        basis_names,
        degrees,
        structure_constants,
        unit,
        *,
        graded_commutative: bool = False,
        factors: tuple[AlgebraFactor, ...] = (),
        name: str = "",
    ):
        self.field = field
        self.basis_names = tuple(str(b) for b in basis_names)
        self.degrees = tuple(int(d) for d in degrees)
        n = len(self.basis_names)
        if len(self.degrees) != n:
            raise AlgebraError("one degree per basis element required")
        if len(set(self.basis_names)) != n:
            raise AlgebraError("basis names must be unique")
        mu = field.array(structure_constants)
        if mu.shape != (n, n, n):
            raise AlgebraError(f"structure constants must have shape {(n, n, n)}")
        mu.setflags(write=False)
        self.structure_constants = mu
        if isinstance(unit, (int, np.integer)):
            vec = field.zeros(n)
            vec[int(unit)] = field.scalar(1)
            unit = vec
        unit = field.array(unit)
        unit.setflags(write=False)
        self.unit = unit
        self.graded_commutative = graded_commutative
        self.factors = factors
        self.name = name
        self._validate()

    # -- validation ---------------------------------------------------

    def _validate(self):
        f = self.field
        mu = self.structure_constants
        n = self.dim
        deg = np.asarray(self.degrees)
        target = deg[:, None] + deg[None, :]
        for k in range(n):
            bad = (mu[:, :, k] != 0) & (target != deg[k])
            if np.any(bad):
                i, j = map(int, np.argwhere(bad)[0])
                raise AlgebraError(
                    f"product {self.basis_names[i]}*{self.basis_names[j]} has a "
                    f"component outside degree {target[i, j]}"
                )
        ident = f.eye(n)
        left = f.tensordot(self.unit, mu, ([0], [0]))
        right = f.tensordot(self.unit, mu, ([0], [1]))
        if not (np.all(left == ident) and np.all(right == ident)):
            raise AlgebraError("unit laws fail")
        if np.any(self.unit[deg != 0] != 0):
            raise AlgebraError("unit must lie in degree 0")
        # (b_i b_j) b_k vs b_i (b_j b_k)
        lhs = f.tensordot(mu, mu, ([2], [0]))  # i j k out
        rhs = np.moveaxis(f.tensordot(mu, mu, ([2], [1])), 2, 0)  # j k i out -> i j k out
        if not np.all(lhs == rhs):
            i, j, k = map(int, np.argwhere(np.any(lhs != rhs, axis=3))[0])
            raise AlgebraError(
                "associativity fails on "
                f"({self.basis_names[i]}, {self.basis_names[j]}, {self.basis_names[k]})"
            )
        if self.graded_commutative:
            sign = np.where((deg[:, None] * deg[None, :]) % 2 == 1, -1, 1)
            swapped = f.reduce(np.swapaxes(mu, 0, 1) * sign[:, :, None])
            if not np.all(mu == swapped):
                raise AlgebraError("graded commutativity fails")

    # -- basic data -----------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self.basis_names)

    @cached_property
    def degree_array(self) -> np.ndarray:
        return np.asarray(self.degrees, dtype=np.int64)

    @cached_property
    def parity(self) -> np.ndarray:
        return self.degree_array % 2

    @cached_property
    def has_odd(self) -> bool:
        return bool(np.any(self.parity))

    @property
    def unit_index(self) -> int | None:
        nz = np.flatnonzero(self.unit != 0)
        if nz.size == 1 and self.unit[nz[0]] == 1:
            return int(nz[0])
        return None

    def index(self, name: str) -> int:
        try:
            return self.basis_names.index(name)
        except ValueError:
            raise AlgebraError(f"no basis element named {name!r}") from None

    def __repr__(self):
        label = self.name or "GradedAlgebra"
        parts = ", ".join(f"{b}:{d}" for b, d in zip(self.basis_names, self.degrees))
        return f"<{label} over {self.field} [{parts}]>"

    # -- elements -------------------------------------------------------

    def element(self, coeffs) -> AlgebraElement:
        """Element from a coefficient vector or a ``{basis_name: coeff}`` dict."""
        if isinstance(coeffs, dict):
            vec = self.field.zeros(self.dim)
            for name, c in coeffs.items():
                i = self.index(name)
                vec[i] = self.field.reduce(np.asarray([vec[i] + self.field.scalar(c)]))[0]
            return AlgebraElement(self, vec)
        return AlgebraElement(self, self.field.array(coeffs))

    def basis_element(self, name_or_index) -> AlgebraElement:
        i = name_or_index if isinstance(name_or_index, int) else self.index(name_or_index)
        vec = self.field.zeros(self.dim)
        vec[i] = self.field.scalar(1)
        return AlgebraElement(self, vec)

    def one(self) -> AlgebraElement:
        return AlgebraElement(self, self.unit.copy())

    def zero(self) -> AlgebraElement:
        return AlgebraElement(self, self.field.zeros(self.dim))

    def mul_vectors(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        f = self.field
        return f.tensordot(f.tensordot(x, self.structure_constants, ([0], [0])), y, ([0], [0]))

    def left_mult_matrix(self, x: np.ndarray) -> np.ndarray:
        """Matrix of ``y -> x*y`` acting on coefficient columns."""
        return self.field.tensordot(x, self.structure_constants, ([0], [0])).T.copy()

    def is_central(self, x: np.ndarray) -> bool:
        """Graded centrality: ``x b = (-1)^{|x||b|} b x`` for every basis ``b``."""
        d = AlgebraElement(self, x).degree()
        if d is None:
            return True
        for j in range(self.dim):
            b = self.field.zeros(self.dim)
            b[j] = self.field.scalar(1)
            s = -1 if (d * self.degrees[j]) % 2 else 1
            lhs = self.mul_vectors(x, b)
            rhs = self.field.reduce(s * self.mul_vectors(b, x))
            if np.any(lhs != rhs):
                return False
        return True

    def inverse(self, x: np.ndarray) -> np.ndarray:
        """Two-sided inverse of ``x``; raises if ``x`` is not a unit."""
        sol = solve_array(self.field, self.left_mult_matrix(x), self.unit)
        if sol is None or np.any(self.mul_vectors(sol, x) != self.unit):
            raise AlgebraError("element is not invertible")
        return sol

    @cached_property
    def is_local(self) -> bool:
        """Graded local: degree 0 is spanned by 1 and no product of two
        nonzero-degree basis elements has a degree-0 component."""
        ui = self.unit_index
        if ui is None:
            return False
        deg = self.degree_array
        if int(np.count_nonzero(deg == 0)) != 1:
            return False
        nonzero = np.flatnonzero(deg != 0)
        sub = self.structure_constants[np.ix_(nonzero, nonzero, [ui])]
        return not np.any(sub != 0)

    @property
    def is_product_of_locals(self) -> bool:
        return bool(self.factors) and all(fc.algebra.is_local for fc in self.factors)


class AlgebraElement:
    __slots__ = ("algebra", "coeffs")

    def __init__(self, algebra: GradedAlgebra, coeffs):
        coeffs = np.asarray(coeffs)
        if coeffs.shape != (algebra.dim,):
            raise AlgebraError(f"coefficient vector of length {algebra.dim} expected")
        coeffs = algebra.field.reduce(coeffs.copy())
        coeffs.setflags(write=False)
        self.algebra = algebra
        self.coeffs = coeffs

    def degree(self) -> int | None:
        """Common degree of the nonzero terms; ``None`` for zero; raises if
        the element is inhomogeneous."""
        nz = np.flatnonzero(self.coeffs != 0)
        if nz.size == 0:
            return None
        degs = {self.algebra.degrees[i] for i in nz}
        if len(degs) > 1:
            raise AlgebraError(f"inhomogeneous element {self}")
        return degs.pop()

    def is_homogeneous(self) -> bool:
        try:
            self.degree()
        except AlgebraError:
            return False
        return True

    def is_zero(self) -> bool:
        return not np.any(self.coeffs != 0)

    def _check(self, other):
        if not isinstance(other, AlgebraElement) or other.algebra is not self.algebra:
            raise AlgebraError("elements of different algebras")

    def __mul__(self, other):
        return multiply(self, other)

    def __add__(self, other):
        self._check(other)
        return AlgebraElement(self.algebra, self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._check(other)
        return AlgebraElement(self.algebra, self.coeffs - other.coeffs)

    def __neg__(self):
        return AlgebraElement(self.algebra, -self.coeffs)

    def __pow__(self, k: int):
        out = self.algebra.one()
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return other.algebra is self.algebra and bool(np.all(self.coeffs == other.coeffs))

    __hash__ = None

    def __repr__(self):
        f = self.algebra.field
        terms = []
        for i in np.flatnonzero(self.coeffs != 0):
            c = f.to_json(self.coeffs[i])
            terms.append(f"{c}*{self.algebra.basis_names[i]}")
        return " + ".join(terms) if terms else "0"


def multiply(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    x._check(y)
    return AlgebraElement(x.algebra, x.algebra.mul_vectors(x.coeffs, y.coeffs))


# -- constructors --------------------------------------------------------


def make_from_table(
    field: FieldSpec,
    basis,
    products: dict,
    *,
    unit: str = "1",
    graded_commutative: bool = False,
    name: str = "",
) -> GradedAlgebra:
    """Algebra from ``basis = [(name, degree), ...]`` and a product table.

    ``products[(a, b)]`` maps to ``{basis_name: coeff}``; products with the
    unit are filled in automatically and unlisted products are zero.
    """
    names = [b for b, _ in basis]
    degrees = [d for _, d in basis]
    n = len(names)
    idx = {b: i for i, b in enumerate(names)}
    if unit not in idx:
        raise AlgebraError(f"unit {unit!r} is not a basis element")
    mu = field.zeros((n, n, n))
    u = idx[unit]
    for i in range(n):
        mu[u, i, i] = field.scalar(1)
        mu[i, u, i] = field.scalar(1)
    for (a, b), terms in products.items():
        if a not in idx or b not in idx:
            raise AlgebraError(f"unknown basis element in product ({a}, {b})")
        mu[idx[a], idx[b], :] = field.zeros(n)
        for c, coeff in terms.items():
            if c not in idx:
                raise AlgebraError(f"unknown basis element {c!r}")
            mu[idx[a], idx[b], idx[c]] = field.scalar(coeff)
    return GradedAlgebra(
        field, names, degrees, mu, u, graded_commutative=graded_commutative, name=name
    )


def make_truncated_polynomial(n: int, d: int, field: FieldSpec) -> GradedAlgebra:
    """k[h]/(h^{n+1}) with |h| = d (d even)."""
    if n < 1:
        raise AlgebraError("n must be at least 1")
    if d <= 0 or d % 2:
        raise AlgebraError(f"generator degree must be even and positive, got {d}")
    names = ["1", "h"] + [f"h^{i}" for i in range(2, n + 1)]
    mu = field.zeros((n + 1, n + 1, n + 1))
    for i in range(n + 1):
        for j in range(n + 1 - i):
            mu[i, j, i + j] = field.scalar(1)
    return GradedAlgebra(
        field,
        names,
        [i * d for i in range(n + 1)],
        mu,
        0,
        graded_commutative=True,
        name=f"k[h]/h^{n + 1} (|h|={d})",
    )


def make_square_zero(degrees, field: FieldSpec, names=None) -> GradedAlgebra:
    """k + V with V*V = 0, one basis vector of V per entry of ``degrees``.

    ``make_square_zero([2, 4], F)`` is k[a,b]/(a^2, ab, b^2).
    """
    degrees = [int(x) for x in degrees]
    if names is None:
        names = [chr(ord("a") + i) for i in range(len(degrees))]
    if any(x == 0 for x in degrees):
        raise AlgebraError("square-zero generators must have nonzero degree")
    basis = [("1", 0)] + list(zip(names, degrees))
    return make_from_table(
        field,
        basis,
        {},
        graded_commutative=True,
        name="k+" + "+".join(f"k.{a}" for a in names),
    )


def make_spherical_algebra(d: int, field: FieldSpec) -> GradedAlgebra:
    """k + k.e with |e| = d and e^2 = 0."""
    if d < 1:
        raise AlgebraError("sphere dimension must be positive")
    alg = make_square_zero([d], field, names=["e"])
    alg.name = f"k+k.e (|e|={d})"
    return alg


def make_product(a: GradedAlgebra, b: GradedAlgebra) -> GradedAlgebra:
    """Direct product a x b.

    The basis is the union of both bases with each factor's unit renamed to
    its idempotent ``e1`` / ``e2``; clashing names get a ``_1`` / ``_2``
    suffix. Factor data is recorded in ``factors``.
    """
    if a.field != b.field:
        raise FieldError(f"field mismatch: {a.field} vs {b.field}")
    f = a.field
    parts = []
    for fac in (a, b):
        if fac.factors:
            parts.extend(fc.algebra for fc in fac.factors)
        else:
            parts.append(fac)
    if any(p.unit_index is None for p in parts):
        raise AlgebraError("factors must have a basis unit")
    raw_names = []
    for p in parts:
        raw_names.append([b for i, b in enumerate(p.basis_names) if i != p.unit_index])
    counts: dict[str, int] = {}
    for names in raw_names:
        for nm in names:
            counts[nm] = counts.get(nm, 0) + 1
    idem_names = {f"e{k + 1}" for k in range(len(parts))}
    names, degrees, offsets = [], [], []
    for k, p in enumerate(parts):
        offsets.append(len(names))
        for i, nm in enumerate(p.basis_names):
            if i == p.unit_index:
                names.append(f"e{k + 1}")
            else:
                clash = counts[nm] > 1 or nm in idem_names
                names.append(f"{nm}_{k + 1}" if clash else nm)
            degrees.append(p.degrees[i])
    n = len(names)
    mu = f.zeros((n, n, n))
    unit = f.zeros(n)
    factors = []
    for k, p in enumerate(parts):
        o = offsets[k]
        m = p.dim
        mu[o : o + m, o : o + m, o : o + m] = p.structure_constants
        unit[o + p.unit_index] = f.scalar(1)
        idem = f.zeros(n)
        idem[o + p.unit_index] = f.scalar(1)
        idem.setflags(write=False)
        factors.append(AlgebraFactor(p, tuple(range(o, o + m)), idem))
    return GradedAlgebra(
        f,
        names,
        degrees,
        mu,
        unit,
        graded_commutative=all(p.graded_commutative for p in parts),
        factors=tuple(factors),
        name=" x ".join(p.name or "A" for p in parts),
    )


__all__ = [
    "AlgebraElement",
    "AlgebraError",
    "AlgebraFactor",
    "GradedAlgebra",
    "make_from_table",
    "make_product",
    "make_spherical_algebra",
    "make_square_zero",
    "make_truncated_polynomial",
    "multiply",
]
