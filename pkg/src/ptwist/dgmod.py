"""Semifree DG modules over a :class:`GradedAlgebra` and maps between them.

Conventions (all sign choices live here):

* One Z-grading, cochain differential of degree +1.
* Left modules with the Koszul rule ``d(r.m) = (-1)^{|r|} r.d(m)``. A map of
  degree ``t`` satisfies ``f(r.m) = (-1)^{t|r|} r.f(m)``.
* Matrices are stored as arrays ``X[i, j, c]``: the coefficient of basis
  element ``c`` in the entry of generator ``i`` in ``X(g_j)``, i.e.
  ``X(g_j) = sum_i X_ij . g_i``. Entry ``X_ij`` of a degree-``t`` map has
  degree ``|g_j| + t - |g_i|``.
* Composition: ``(G o F)_kj = sum_i (-1)^{|G||F_ij|} F_ij * G_ki``.
* Hom differential: ``del f = d o f - (-1)^{|f|} f o d``.
* Shift ``M[k]^i = M^{i+k}``: generator degrees drop by ``k`` and an entry
  ``a`` of degree ``|a|`` is multiplied by ``(-1)^{k(1+|a|)}``. On algebras
  concentrated in even degrees this is the plain ``(-1)^k``.
* ``Cone(f: M -> N) = N + M[1]`` with ``d(n, m) = (d n + f m, -d m)``.

A generator may carry a *support*: the index of a factor of a product
algebra, meaning ``e_k g = g`` for that factor's idempotent. Such a generator
spans the projective ``A e_k`` rather than a free rank-one summand. Support
``None`` means the whole algebra. Entries are projected onto the allowed
corner ``e_j A e_i`` on construction.
"""

from __future__ import annotations

from functools import cached_property

import numpy as np

from .exactlin import FieldError, FieldSpec, nullspace_array
from .galg import AlgebraElement, AlgebraError, GradedAlgebra


class ModuleError(ValueError):
    pass


# -- array helpers ---------------------------------------------------------


def _sign_vector(alg: GradedAlgebra, k: int) -> np.ndarray:
    """``(-1)^{k |a|}`` for each basis element ``a``."""
    return np.where((k * alg.parity) % 2 == 1, -1, 1).astype(np.int64)


def _shift_signs(alg: GradedAlgebra, k: int) -> np.ndarray:
    """``(-1)^{k (1 + |a|)}`` for each basis element ``a``."""
    return np.where((k * (1 + alg.parity)) % 2 == 1, -1, 1).astype(np.int64)


def _scale_last(field: FieldSpec, arr: np.ndarray, signs: np.ndarray) -> np.ndarray:
    if np.all(signs == 1):
        return arr
    return field.reduce(arr * signs)


def compose_arrays(alg: GradedAlgebra, G: np.ndarray, tG: int, F: np.ndarray) -> np.ndarray:
    """Matrix of ``G o F`` for ``F: (n_mid, n_src)`` and ``G: (n_tgt, n_mid)``."""
    f = alg.field
    if F.shape[0] != G.shape[1]:
        raise ModuleError("composition of incompatible matrices")
    if F.size == 0 or G.size == 0:
        return f.zeros((G.shape[0], F.shape[1], alg.dim))
    Fs = _scale_last(f, F, _sign_vector(alg, tG))
    T = f.tensordot(Fs, alg.structure_constants, ([2], [0]))  # i j b c
    return f.tensordot(G, T, ([1, 2], [0, 2]))  # k j c


def _support_masks(alg: GradedAlgebra, supports) -> np.ndarray:
    """Boolean ``(n_gens, dimA)``: basis elements ``c`` with ``b_c g != 0``."""
    masks = np.ones((len(supports), alg.dim), dtype=bool)
    for j, s in enumerate(supports):
        if s is not None:
            if not alg.factors or not (0 <= s < len(alg.factors)):
                raise ModuleError(f"support {s} does not name a factor of {alg!r}")
            masks[j] = False
            masks[j, list(alg.factors[s].indices)] = True
    return masks


def _idempotent_index(alg: GradedAlgebra, support) -> int | None:
    if support is None:
        return alg.unit_index
    return int(np.flatnonzero(alg.factors[support].idempotent != 0)[0])


def _check_homogeneous(alg, arr, expected, what, row_names, col_names):
    deg = alg.degree_array
    bad = (arr != 0) & (deg[None, None, :] != expected[:, :, None])
    if np.any(bad):
        i, j, c = map(int, np.argwhere(bad)[0])
        raise ModuleError(
            f"{what} entry ({row_names[i]} <- {col_names[j]}) has a component "
            f"'{alg.basis_names[c]}' of degree {deg[c]}, expected degree {expected[i, j]}"
        )


# -- graded complexes of scalars -------------------------------------------


class GradedComplex:
    """Finite complex of vector spaces: homogeneous basis with integer
    degrees and a degree +1 square-zero differential (``d[:, v]`` is the
    image of basis vector ``v``)."""

    def __init__(self, field: FieldSpec, degrees, differential=None, labels=None, *, check=True):
        self.field = field
        self.degrees = np.asarray(list(degrees), dtype=np.int64)
        n = len(self.degrees)
        if differential is None:
            differential = field.zeros((n, n))
        elif not isinstance(differential, np.ndarray) or differential.dtype != field.dtype:
            differential = field.array(differential)
        if n == 0:
            differential = field.zeros((0, 0))
        if differential.shape != (n, n):
            raise ModuleError(f"differential must be {n}x{n}")
        differential.setflags(write=False)
        self.differential = differential
        self.labels = tuple(labels) if labels is not None else tuple(f"v{i}" for i in range(n))
        if check:
            self._validate()

    def _validate(self):
        d = self.differential
        if np.any((d != 0) & (self.degrees[:, None] != self.degrees[None, :] + 1)):
            raise ModuleError("differential is not homogeneous of degree +1")
        for t in self.degree_range():
            _, _, b0 = self.block(t)
            _, _, b1 = self.block(t + 1)
            if b0.size and b1.size and not self.field.is_zero(self.field.matmul(b1, b0)):
                raise ModuleError(f"differential does not square to zero at degree {t}")

    def __len__(self):
        return len(self.degrees)

    @property
    def dim(self) -> int:
        return len(self.degrees)

    @cached_property
    def _index_by_degree(self) -> dict[int, np.ndarray]:
        out: dict[int, np.ndarray] = {}
        for t in np.unique(self.degrees):
            out[int(t)] = np.flatnonzero(self.degrees == t)
        return out

    def indices(self, t: int) -> np.ndarray:
        return self._index_by_degree.get(int(t), np.zeros(0, dtype=np.int64))

    def degree_range(self) -> list[int]:
        return sorted(self._index_by_degree)

    def block(self, t: int):
        """``(rows, cols, d^t)`` with ``d^t: C^t -> C^{t+1}``."""
        cols = self.indices(t)
        rows = self.indices(t + 1)
        return rows, cols, self.differential[np.ix_(rows, cols)]

    def shift(self, k: int) -> GradedComplex:
        d = self.differential if k % 2 == 0 else self.field.reduce(-self.differential)
        return GradedComplex(self.field, self.degrees - k, d, self.labels, check=False)

    def __repr__(self):
        dims = {t: len(ix) for t, ix in sorted(self._index_by_degree.items())}
        return f"<GradedComplex over {self.field} dims={dims}>"


def graded_vector_space(field: FieldSpec, degrees, labels=None) -> GradedComplex:
    """Complex with zero differential."""
    return GradedComplex(field, degrees, None, labels)


# -- modules ------------------------------------------------------------------


class SemifreeModule:
    """Finite cell module: generators ``(name, degree)`` plus a differential
    ``D[i, j, c]`` (coefficient of ``g_i`` in ``d g_j``)."""

    def __init__(self, algebra: GradedAlgebra, generators, differential=None, supports=None, *, check=True):
        self.algebra = algebra
        gens = tuple((str(nm), int(dg)) for nm, dg in generators)
        self.generators = gens
        n = len(gens)
        names = [g[0] for g in gens]
        if len(set(names)) != n:
            dup = next(x for x in names if names.count(x) > 1)
            raise ModuleError(f"duplicate generator name {dup!r}")
        if supports is None:
            supports = (None,) * n
        self.supports = tuple(None if s is None else int(s) for s in supports)
        if len(self.supports) != n:
            raise ModuleError("one support per generator required")
        f = algebra.field
        if differential is None:
            differential = f.zeros((n, n, algebra.dim))
        elif not isinstance(differential, np.ndarray) or differential.dtype != f.dtype:
            differential = f.array(differential)
        if n == 0:
            differential = f.zeros((0, 0, algebra.dim))
        if differential.shape != (n, n, algebra.dim):
            raise ModuleError(f"differential must have shape {(n, n, algebra.dim)}")
        masks = self.masks
        if not np.all(masks):
            differential = np.where(masks[:, None, :] & masks[None, :, :], differential, 0)
            differential = differential.astype(f.dtype)
            if f.dtype == object:
                differential = f.reduce(f.array(differential))
        differential.setflags(write=False)
        self.differential = differential
        if check:
            self._validate()

    @property
    def field(self) -> FieldSpec:
        return self.algebra.field

    @property
    def rank(self) -> int:
        return len(self.generators)

    @property
    def names(self) -> list[str]:
        return [g[0] for g in self.generators]

    @cached_property
    def degree_array(self) -> np.ndarray:
        return np.asarray([g[1] for g in self.generators], dtype=np.int64)

    @cached_property
    def masks(self) -> np.ndarray:
        return _support_masks(self.algebra, self.supports)

    def idempotent_indices(self) -> list[int | None]:
        return [_idempotent_index(self.algebra, s) for s in self.supports]

    def entry(self, i: int, j: int) -> AlgebraElement:
        return AlgebraElement(self.algebra, self.differential[i, j])

    def _validate(self):
        deg = self.degree_array
        expected = deg[None, :] + 1 - deg[:, None]
        _check_homogeneous(self.algebra, self.differential, expected, "differential", self.names, self.names)
        sq = compose_arrays(self.algebra, self.differential, 1, self.differential)
        if not self.field.is_zero(sq):
            k, j = map(int, np.argwhere(np.any(sq != 0, axis=2))[0])
            raise ModuleError(
                f"differential does not square to zero (component {self.names[k]} of d^2 {self.names[j]})"
            )

    def __repr__(self):
        gens = ", ".join(f"{n}:{d}" for n, d in self.generators)
        return f"<SemifreeModule over {self.algebra.name or 'A'} [{gens}]>"

    def same_as(self, other: SemifreeModule) -> bool:
        """Equal generator degrees, supports and differential (names ignored)."""
        return (
            other.algebra is self.algebra
            and np.array_equal(self.degree_array, other.degree_array)
            and self.supports == other.supports
            and bool(np.all(self.differential == other.differential))
        )


class Morphism:
    """Degree-``t`` map ``source -> target`` with matrix ``F[i, j, c]``."""

    def __init__(self, source: SemifreeModule, target: SemifreeModule, degree: int, matrix=None, *, check=True):
        if source.algebra is not target.algebra:
            raise ModuleError("source and target live over different algebras")
        self.source = source
        self.target = target
        self.degree = int(degree)
        alg = source.algebra
        f = alg.field
        shape = (target.rank, source.rank, alg.dim)
        if matrix is None:
            matrix = f.zeros(shape)
        elif not isinstance(matrix, np.ndarray) or matrix.dtype != f.dtype:
            matrix = f.array(matrix)
        if matrix.size == 0:
            matrix = f.zeros(shape)
        if matrix.shape != shape:
            raise ModuleError(f"morphism matrix must have shape {shape}, got {matrix.shape}")
        mask = target.masks[:, None, :] & source.masks[None, :, :]
        if not np.all(mask):
            matrix = np.where(mask, matrix, 0).astype(f.dtype)
            if f.dtype == object:
                matrix = f.array(matrix)
        matrix.setflags(write=False)
        self.matrix = matrix
        if check:
            expected = source.degree_array[None, :] + self.degree - target.degree_array[:, None]
            _check_homogeneous(alg, matrix, expected, "morphism", target.names, source.names)

    @property
    def algebra(self) -> GradedAlgebra:
        return self.source.algebra

    @property
    def field(self) -> FieldSpec:
        return self.source.algebra.field

    def boundary(self) -> Morphism:
        """``d o f - (-1)^t f o d``."""
        alg = self.algebra
        left = compose_arrays(alg, self.target.differential, 1, self.matrix)
        right = compose_arrays(alg, self.matrix, self.degree, self.source.differential)
        sign = -1 if self.degree % 2 == 0 else 1
        return Morphism(self.source, self.target, self.degree + 1, self.field.reduce(left + sign * right), check=False)

    def is_closed(self) -> bool:
        return self.field.is_zero(self.boundary().matrix)

    def is_zero(self) -> bool:
        return self.field.is_zero(self.matrix)

    def _same_shape(self, other: Morphism):
        if other.source is not self.source or other.target is not self.target or other.degree != self.degree:
            raise ModuleError("morphisms with different source, target or degree")

    def __add__(self, other: Morphism) -> Morphism:
        self._same_shape(other)
        return Morphism(self.source, self.target, self.degree, self.field.reduce(self.matrix + other.matrix), check=False)

    def __sub__(self, other: Morphism) -> Morphism:
        self._same_shape(other)
        return Morphism(self.source, self.target, self.degree, self.field.reduce(self.matrix - other.matrix), check=False)

    def __neg__(self) -> Morphism:
        return Morphism(self.source, self.target, self.degree, self.field.reduce(-self.matrix), check=False)

    def scale(self, c) -> Morphism:
        c = self.field.scalar(c)
        return Morphism(self.source, self.target, self.degree, self.field.reduce(self.matrix * c), check=False)

    def __matmul__(self, other: Morphism) -> Morphism:
        return compose(self, other)

    def __eq__(self, other):
        if not isinstance(other, Morphism):
            return NotImplemented
        return (
            other.source is self.source
            and other.target is self.target
            and other.degree == self.degree
            and bool(np.all(self.matrix == other.matrix))
        )

    __hash__ = None

    def __repr__(self):
        return f"<Morphism degree {self.degree}: {self.source.rank} gens -> {self.target.rank} gens>"


def compose(f: Morphism, g: Morphism) -> Morphism:
    """``f o g``; requires ``g.target is f.source``."""
    if g.target is not f.source:
        raise ModuleError("cannot compose: target of the inner map is not the source of the outer map")
    m = compose_arrays(f.algebra, f.matrix, f.degree, g.matrix)
    return Morphism(g.source, f.target, f.degree + g.degree, m, check=False)


def identity(m: SemifreeModule) -> Morphism:
    f = m.field
    mat = f.zeros((m.rank, m.rank, m.algebra.dim))
    for j, e in enumerate(m.idempotent_indices()):
        if e is None:
            mat[j, j] = m.algebra.unit
        else:
            mat[j, j, e] = f.scalar(1)
    return Morphism(m, m, 0, mat, check=False)


def zero_morphism(source: SemifreeModule, target: SemifreeModule, degree: int = 0) -> Morphism:
    return Morphism(source, target, degree, None, check=False)


# -- constructions ------------------------------------------------------------


def free_module(a: GradedAlgebra, degrees, *, support=None, prefix: str = "g") -> SemifreeModule:
    """Free module with zero differential, one generator per listed degree."""
    degrees = list(degrees)
    return SemifreeModule(
        a,
        [(f"{prefix}{i}", d) for i, d in enumerate(degrees)],
        supports=[support] * len(degrees),
    )


def zero_module(a: GradedAlgebra) -> SemifreeModule:
    return SemifreeModule(a, [])


def shift(m: SemifreeModule, k: int) -> SemifreeModule:
    """``M[k]``: degrees drop by ``k``; entries pick up ``(-1)^{k(1+|a|)}``."""
    if k == 0:
        return m
    alg = m.algebra
    d = _scale_last(m.field, m.differential, _shift_signs(alg, k))
    gens = [(nm, dg - k) for nm, dg in m.generators]
    return SemifreeModule(alg, gens, d.copy(), m.supports, check=False)


def shift_morphism(f: Morphism, k: int, source: SemifreeModule | None = None, target: SemifreeModule | None = None) -> Morphism:
    """``f[k]`` for a degree-0 map (entries pick up ``(-1)^{k|a|}``)."""
    if f.degree != 0:
        raise ModuleError("only degree-0 morphisms are shifted")
    src = source if source is not None else shift(f.source, k)
    tgt = target if target is not None else shift(f.target, k)
    mat = _scale_last(f.field, f.matrix, _sign_vector(f.algebra, k))
    return Morphism(src, tgt, 0, mat.copy(), check=False)


def _join_names(blocks: list[list[str]], tags: list[str], always: bool) -> list[str]:
    flat = [nm for b in blocks for nm in b]
    if not always and len(set(flat)) == len(flat):
        return flat
    return [f"{tag}|{nm}" for b, tag in zip(blocks, tags) for nm in b]


def direct_sum(ms) -> SemifreeModule:
    """Block-diagonal sum; names get an ``s<i>|`` prefix only on clashes."""
    ms = list(ms)
    if not ms:
        raise ModuleError("direct_sum needs at least one module")
    alg = ms[0].algebra
    if any(m.algebra is not alg for m in ms):
        raise ModuleError("direct_sum of modules over different algebras")
    names = _join_names([m.names for m in ms], [f"s{i}" for i in range(len(ms))], always=False)
    degrees = [dg for m in ms for _, dg in m.generators]
    n = len(names)
    d = alg.field.zeros((n, n, alg.dim))
    o = 0
    for m in ms:
        d[o : o + m.rank, o : o + m.rank] = m.differential
        o += m.rank
    supports = [s for m in ms for s in m.supports]
    return SemifreeModule(alg, list(zip(names, degrees)), d, supports, check=False)


def _closed_degree_zero(f: Morphism, what: str):
    if f.degree != 0:
        raise ModuleError(f"{what} needs a degree-0 morphism, got degree {f.degree}")
    if not f.is_closed():
        raise ModuleError(f"{what} needs a closed morphism")


def cone_maps(f: Morphism) -> tuple[SemifreeModule, Morphism, Morphism]:
    """``Cone(f)`` with its canonical maps ``N -> Cone(f) -> M[1]``."""
    _closed_degree_zero(f, "cone")
    alg = f.algebra
    M, N = f.source, f.target
    field = alg.field
    names = _join_names([N.names, M.names], ["t", "s"], always=True)
    degrees = list(N.degree_array) + list(M.degree_array - 1)
    n = N.rank + M.rank
    d = field.zeros((n, n, alg.dim))
    d[: N.rank, : N.rank] = N.differential
    d[: N.rank, N.rank :] = f.matrix
    d[N.rank :, N.rank :] = _scale_last(field, M.differential, _shift_signs(alg, 1))
    C = SemifreeModule(alg, list(zip(names, degrees)), d, list(N.supports) + list(M.supports), check=True)
    incl = field.zeros((n, N.rank, alg.dim))
    incl[: N.rank] = identity(N).matrix
    M1 = shift(M, 1)
    proj = field.zeros((M.rank, n, alg.dim))
    proj[:, N.rank :] = identity(M1).matrix
    return C, Morphism(N, C, 0, incl, check=False), Morphism(C, M1, 0, proj, check=False)


def cone(f: Morphism) -> SemifreeModule:
    """Mapping cone ``N + M[1]`` of a closed degree-0 ``f: M -> N``."""
    return cone_maps(f)[0]


def cone_functor(f: Morphism, g: Morphism, alpha: Morphism, gamma: Morphism,
                 source: SemifreeModule | None = None, target: SemifreeModule | None = None) -> Morphism:
    """Map ``Cone(f) -> Cone(g)`` induced by a strictly commuting square
    ``gamma o f = g o alpha`` (``alpha: M -> M'``, ``gamma: N -> N'``)."""
    if alpha.source is not f.source or alpha.target is not g.source:
        raise ModuleError("alpha must map source(f) to source(g)")
    if gamma.source is not f.target or gamma.target is not g.target:
        raise ModuleError("gamma must map target(f) to target(g)")
    if alpha.degree or gamma.degree:
        raise ModuleError("square maps must have degree 0")
    if not (compose(gamma, f) - compose(g, alpha)).is_zero():
        raise ModuleError("square does not commute strictly")
    src = source if source is not None else cone(f)
    tgt = target if target is not None else cone(g)
    field = f.field
    nN, nN2 = f.target.rank, g.target.rank
    mat = field.zeros((tgt.rank, src.rank, f.algebra.dim))
    mat[:nN2, :nN] = gamma.matrix
    mat[nN2:, nN:] = _scale_last(field, alpha.matrix, _sign_vector(f.algebra, 1))
    return Morphism(src, tgt, 0, mat, check=False)


def tensor_with_complex(v: GradedComplex, m: SemifreeModule) -> SemifreeModule:
    """``V (x) M`` with differential ``d_V (x) 1 + (-1)^{|v|} 1 (x) d_M``."""
    alg = m.algebra
    if v.field != alg.field:
        raise FieldError(f"field mismatch: {v.field} vs {alg.field}")
    field = alg.field
    nv, nm, da = v.dim, m.rank, alg.dim
    names = [f"{lab}*{g}" for lab in v.labels for g in m.names]
    degrees = [int(dv) + dg for dv in v.degrees for dg in m.degree_array]
    supports = [s for _ in range(nv) for s in m.supports]
    d = field.zeros((nv, nm, nv, nm, da))
    if nv and nm:
        # d_V part: scalar entries times the generator's idempotent
        idem = identity(m).matrix  # (nm, nm, da), diagonal
        diag = np.array([idem[j, j] for j in range(nm)])  # (nm, da)
        dv = v.differential
        for j in range(nm):
            d[:, j, :, j, :] = field.reduce(dv[:, :, None] * diag[j][None, None, :])
        for a in range(nv):
            signs = _shift_signs(alg, -int(v.degrees[a]))
            d[a, :, a, :, :] = _scale_last(field, m.differential, signs)
    d = d.reshape(nv * nm, nv * nm, da)
    return SemifreeModule(alg, list(zip(names, degrees)), d, supports, check=True)


def mult_by_element(m: SemifreeModule, a: AlgebraElement, *, degree: int | None = None) -> Morphism:
    """Closed degree-0 map ``M[-d] -> M``, ``g -> a.g``, for a homogeneous
    graded-central ``a`` of degree ``d`` (pass ``degree`` when ``a = 0``)."""
    alg = m.algebra
    if a.algebra is not alg:
        raise AlgebraError("element of a different algebra")
    try:
        d = a.degree()
    except AlgebraError:
        raise ModuleError("multiplier must be homogeneous") from None
    if d is None:
        d = 0 if degree is None else int(degree)
    elif degree is not None and degree != d:
        raise ModuleError(f"element has degree {d}, not {degree}")
    if not alg.is_central(a.coeffs):
        raise ModuleError(f"{a} is not central")
    src = shift(m, -d)
    mat = alg.field.zeros((m.rank, m.rank, alg.dim))
    for j in range(m.rank):
        mat[j, j] = a.coeffs
    f = Morphism(src, m, 0, mat)
    if not f.is_closed():  # pragma: no cover - guarded by centrality
        raise ModuleError("multiplication map is not closed")
    return f


def underlying_complex(m: SemifreeModule) -> GradedComplex:
    """The scalar complex of ``M``: basis ``b_c g_j`` (``c`` allowed by the
    support of ``g_j``) in degree ``|g_j| + |b_c|``."""
    alg = m.algebra
    f = alg.field
    n, da = m.rank, alg.dim
    T = f.tensordot(m.differential, alg.structure_constants, ([2], [1]))  # i j a c
    T = _scale_last(f, np.moveaxis(T, 2, 3), _sign_vector(alg, 1))  # i j c a
    phi = np.transpose(T, (0, 2, 1, 3)).reshape(n * da, n * da)
    keep = np.flatnonzero(m.masks.reshape(-1))
    degrees = (m.degree_array[:, None] + alg.degree_array[None, :]).reshape(-1)[keep]
    labels = [f"{alg.basis_names[c]}.{m.names[j]}" for j in range(n) for c in range(da)]
    labels = [labels[i] for i in keep]
    return GradedComplex(f, degrees, phi[np.ix_(keep, keep)].copy(), labels, check=False)


def restrict_to_factor(m: SemifreeModule, k: int) -> SemifreeModule:
    """``e_k M`` as a module over the ``k``-th factor algebra (generators
    supported on other factors are dropped)."""
    alg = m.algebra
    if not alg.factors:
        raise ModuleError("algebra is not a product")
    fac = alg.factors[k]
    idx = list(fac.indices)
    keep = [j for j, s in enumerate(m.supports) if s is None or s == k]
    d = m.differential[np.ix_(keep, keep, idx)].copy()
    gens = [m.generators[j] for j in keep]
    return SemifreeModule(fac.algebra, gens, d, check=True)


def random_module(alg: GradedAlgebra, n_generators: int, rng: np.random.Generator, *,
                  degree_range=(-2, 2), free_probability: float = 0.25,
                  supports=None, prefix: str = "x") -> SemifreeModule:
    """Random cell module built one generator at a time.

    Each new generator either is free (zero differential) or kills a random
    cocycle of the module built so far, so ``d^2 = 0`` by construction.
    ``supports`` lists the allowed generator supports (default: ``[None]``).
    """
    field = alg.field
    supports = list(supports) if supports is not None else [None]
    lo, hi = degree_range
    m = SemifreeModule(alg, [])
    for step in range(n_generators):
        sup = supports[int(rng.integers(len(supports)))]
        name = f"{prefix}{step}"
        column = None
        deg = int(rng.integers(lo, hi + 1))
        if m.rank and rng.random() >= free_probability:
            flat = underlying_complex(m)
            choices = []
            for t in flat.degree_range():
                rows, cols, blk = flat.block(t)
                ker = nullspace_array(field, blk) if len(rows) else field.eye(len(cols))
                if ker.shape[1]:
                    choices.append((t, cols, ker))
            if choices:
                t, cols, ker = choices[int(rng.integers(len(choices)))]
                coeffs = field.random(rng, ker.shape[1])
                z = field.matmul(ker, coeffs)
                if not field.is_zero(z):
                    full = field.zeros(m.rank * alg.dim)
                    keep = np.flatnonzero(m.masks.reshape(-1))
                    full[keep[cols]] = z
                    column = full.reshape(m.rank, alg.dim)
                    deg = t - 1
        n = m.rank + 1
        d = field.zeros((n, n, alg.dim))
        d[: m.rank, : m.rank] = m.differential
        if column is not None:
            d[: m.rank, m.rank] = column
        gens = list(m.generators) + [(name, deg)]
        m = SemifreeModule(alg, gens, d, list(m.supports) + [sup], check=True)
    return m
