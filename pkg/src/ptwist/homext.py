"""Hom complexes, cohomology, Ext rings and the P^n / spherical classifier."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .dgmod import (
    GradedComplex,
    ModuleError,
    Morphism,
    SemifreeModule,
    _sign_vector,
    compose,
    identity,
    underlying_complex,
)
from .exactlin import independent_columns, nullspace_array, rank_array, solve_array


class HomComplex(GradedComplex):
    """``Hom*(M, N)`` over the ground field.

    Basis vectors are elementary maps ``g_j -> b_c . n_k`` (index order
    source generator, target generator, algebra basis), restricted to the
    corners allowed by generator supports. The degree of the basis map is
    ``|b_c| + |n_k| - |g_j|``.
    """

    def __init__(self, source: SemifreeModule, target: SemifreeModule, degrees, differential, labels, keep):
        super().__init__(source.field, degrees, differential, labels, check=False)
        self.source = source
        self.target = target
        self.keep = keep

    def to_morphism(self, vec: np.ndarray, degree: int | None = None) -> Morphism:
        M, N = self.source, self.target
        alg = M.algebra
        vec = np.asarray(vec)
        nz = np.flatnonzero(vec != 0)
        if degree is None:
            degs = set(int(d) for d in self.degrees[nz])
            if len(degs) > 1:
                raise ModuleError("vector is not homogeneous")
            degree = degs.pop() if degs else 0
        elif np.any(self.degrees[nz] != degree):
            raise ModuleError(f"vector has components outside degree {degree}")
        full = self.field.zeros(M.rank * N.rank * alg.dim)
        full[self.keep] = vec
        mat = np.transpose(full.reshape(M.rank, N.rank, alg.dim), (1, 0, 2)).copy()
        return Morphism(M, N, degree, mat, check=False)

    def from_morphism(self, f: Morphism) -> np.ndarray:
        if f.source is not self.source or f.target is not self.target:
            raise ModuleError("morphism does not belong to this Hom complex")
        return np.transpose(f.matrix, (1, 0, 2)).reshape(-1)[self.keep].copy()

    def degree_part(self, vec: np.ndarray, t: int) -> np.ndarray:
        return np.asarray(vec)[self.indices(t)]


def _left_operator(alg, Y, tY, n_src):
    """Matrix of ``f -> Y o f`` on the full (unmasked) Hom index space.

    ``Y: (n_tgt2, n_tgt, da)``. Block diagonal over source generators, so
    it is assembled per source generator.
    """
    f = alg.field
    da = alg.dim
    # Lt[(k2, c), (i, a)] = (-1)^{tY |a|} sum_b Y[k2, i, b] mu[a, b, c]
    T = f.tensordot(Y, alg.structure_constants, ([2], [1]))  # k2 i a c
    T = np.moveaxis(T, 2, 3)  # k2 i c a
    signs = _sign_vector(alg, tY)
    if np.any(signs != 1):
        T = f.reduce(T * signs)
    n2, n1 = Y.shape[0], Y.shape[1]
    Lt = np.transpose(T, (0, 2, 1, 3)).reshape(n2 * da, n1 * da)
    out = f.zeros((n_src, n2 * da, n_src, n1 * da))
    for j in range(n_src):
        out[j, :, j, :] = Lt
    return out.reshape(n_src * n2 * da, n_src * n1 * da)


def _right_operator(alg, X, n_tgt, col_degrees):
    """Matrix of ``f -> f o X`` (``X: (n_src, n_src2, da)``, any degree).

    ``col_degrees`` gives the degree of each basis map ``f`` in the full
    index order (source, target, basis); the Koszul sign depends on it.
    """
    f = alg.field
    da = alg.dim
    n_src, n_src2 = X.shape[0], X.shape[1]
    mu = alg.structure_constants
    # Rt[j2, c, i, b] = sum_a s(a) X[i, j2, a] mu[a, b, c]
    odd = alg.parity.astype(bool)
    parts = []
    for sel in (~odd, odd):
        if not np.any(sel):
            parts.append(None)
            continue
        Xs = np.where(sel[None, None, :], X, 0).astype(X.dtype)
        T = f.tensordot(Xs, mu, ([2], [0]))  # i j2 b c
        parts.append(np.transpose(T, (1, 3, 0, 2)))  # j2 c i b
    eye = f.eye(n_tgt)
    total = None
    col_sign = np.where(np.asarray(col_degrees) % 2 == 1, -1, 1)
    for k, part in enumerate(parts):
        if part is None:
            continue
        R6 = np.einsum("jcib,kl->jkcilb", part, eye)
        R = R6.reshape(n_src2 * n_tgt * da, n_src * n_tgt * da)
        if k == 1:
            R = R * col_sign[None, :]
        total = R if total is None else total + R
    return f.reduce(total)


def _full_hom_degrees(M: SemifreeModule, N: SemifreeModule) -> np.ndarray:
    alg = M.algebra
    deg = (
        alg.degree_array[None, None, :]
        + N.degree_array[None, :, None]
        - M.degree_array[:, None, None]
    )
    return deg.reshape(-1)


def _keep_indices(M: SemifreeModule, N: SemifreeModule) -> np.ndarray:
    mask = M.masks[:, None, :] & N.masks[None, :, :]
    return np.flatnonzero(mask.reshape(-1))


def hom_complex(m: SemifreeModule, n: SemifreeModule) -> HomComplex:
    """``Hom*(m, n)`` with ``del f = d_n o f - (-1)^{|f|} f o d_m``."""
    if m.algebra is not n.algebra:
        raise ModuleError("Hom between modules over different algebras")
    alg = m.algebra
    f = alg.field
    keep = _keep_indices(m, n)
    full_deg = _full_hom_degrees(m, n)
    size = m.rank * n.rank * alg.dim
    if size == 0:
        return HomComplex(m, n, [], f.zeros((0, 0)), [], keep)
    left = _left_operator(alg, n.differential, 1, m.rank)
    right = _right_operator(alg, m.differential, n.rank, full_deg)
    sign = np.where(full_deg % 2 == 1, 1, -1)  # -(-1)^t per column
    full = f.reduce(left + right * sign[None, :])
    labels = [
        f"[{m.names[j]}>{n.names[k]}:{alg.basis_names[c]}]"
        for j in range(m.rank)
        for k in range(n.rank)
        for c in range(alg.dim)
    ]
    return HomComplex(
        m, n, full_deg[keep], full[np.ix_(keep, keep)].copy(), [labels[i] for i in keep], keep
    )


def precomposition_matrix(hom_src: HomComplex, hom_tgt: HomComplex, x: Morphism) -> np.ndarray:
    """Scalar matrix of ``w -> w o x`` from ``Hom(M, N)`` to ``Hom(M', N)``
    for ``x: M' -> M``."""
    alg = x.algebra
    full_deg = _full_hom_degrees(hom_src.source, hom_src.target)
    R = _right_operator(alg, x.matrix, hom_src.target.rank, full_deg)
    return R[np.ix_(hom_tgt.keep, hom_src.keep)].copy()


def postcomposition_matrix(hom_src: HomComplex, hom_tgt: HomComplex, y: Morphism) -> np.ndarray:
    """Scalar matrix of ``w -> y o w`` from ``Hom(M, N)`` to ``Hom(M, N')``."""
    L = _left_operator(y.algebra, y.matrix, y.degree, hom_src.source.rank)
    return L[np.ix_(hom_tgt.keep, hom_src.keep)].copy()


# -- cohomology ---------------------------------------------------------------


def cohomology_dims(c) -> dict[int, int]:
    """``{degree: dim H^degree}`` (nonzero entries only)."""
    if isinstance(c, SemifreeModule):
        c = underlying_complex(c)
    f = c.field
    ranks: dict[int, int] = {}
    for t in c.degree_range():
        rows, cols, blk = c.block(t)
        ranks[t] = rank_array(f, blk) if len(rows) and len(cols) else 0
    out = {}
    for t in c.degree_range():
        dim = len(c.indices(t)) - ranks.get(t, 0) - ranks.get(t - 1, 0)
        if dim:
            out[t] = dim
    return out


def ext_dims(m: SemifreeModule, n: SemifreeModule) -> dict[int, int]:
    """Graded dimensions of ``Ext*(m, n)``."""
    return cohomology_dims(hom_complex(m, n))


def yoneda_compose(f: Morphism, g: Morphism) -> Morphism:
    """Representative of the class of ``f o g`` (both closed)."""
    if not f.is_closed() or not g.is_closed():
        raise ModuleError("Yoneda product needs closed representatives")
    return compose(f, g)


def is_coboundary(f: Morphism, hom: HomComplex | None = None) -> bool:
    """Whether ``f`` is ``del g`` for some ``g``."""
    hom = hom if hom is not None else hom_complex(f.source, f.target)
    vec = hom.from_morphism(f)
    if hom.field.is_zero(vec):
        return True
    rows, cols, blk = hom.block(f.degree - 1)
    target = vec[rows] if len(rows) else vec[:0]
    if np.any(np.delete(vec, rows) != 0):
        return False
    if not len(cols):
        return hom.field.is_zero(target)
    return solve_array(hom.field, blk, target) is not None


# -- Ext rings ---------------------------------------------------------------


@dataclass
class ExtRingData:
    """Ext algebra of one object on a fixed basis of cocycle representatives.

    ``structure_constants[(s, t)]`` has shape ``(dim_s, dim_t, dim_{s+t})``;
    entry ``[i, j, :]`` are the coordinates of ``rep_s[i] o rep_t[j]``.
    """

    obj: SemifreeModule
    hom: HomComplex
    dims: dict[int, int]
    representatives: dict[int, list[Morphism]]
    coboundary_bases: dict[int, np.ndarray] = dc_field(repr=False)
    rep_vectors: dict[int, np.ndarray] = dc_field(repr=False)
    structure_constants: dict[tuple[int, int], np.ndarray] = dc_field(default_factory=dict, repr=False)

    @property
    def field(self):
        return self.obj.field

    def coordinates(self, f: Morphism) -> np.ndarray:
        """Coordinates of the class of a closed ``f`` on the chosen basis."""
        t = f.degree
        dim = self.dims.get(t, 0)
        vec = self.hom.degree_part(self.hom.from_morphism(f), t)
        if dim == 0:
            return self.field.zeros(0)
        B = self.coboundary_bases[t]
        R = self.rep_vectors[t]
        system = np.concatenate([B, R], axis=1) if B.shape[1] else R
        sol = solve_array(self.field, system, vec)
        if sol is None:
            raise ModuleError("morphism is not a cocycle")
        return sol[B.shape[1]:].copy()

    def class_of(self, t: int, coords) -> Morphism:
        coords = self.field.array(coords)
        vec = self.field.zeros(self.hom.dim)
        if self.dims.get(t, 0):
            vec[self.hom.indices(t)] = self.field.matmul(self.rep_vectors[t], coords)
        return self.hom.to_morphism(vec, t)

    def multiply(self, s: int, x, t: int, y) -> np.ndarray:
        """Coordinates of ``x . y`` (``x`` in degree ``s``, ``y`` in ``t``)."""
        table = self.structure_constants.get((s, t))
        f = self.field
        if table is None:
            return f.zeros(self.dims.get(s + t, 0))
        return f.tensordot(f.tensordot(f.array(x), table, ([0], [0])), f.array(y), ([0], [0]))

    def degrees(self) -> list[int]:
        return sorted(self.dims)


def _cocycle_data(hom: HomComplex, t: int):
    f = hom.field
    rows, cols, blk = hom.block(t)
    n = len(cols)
    Z = nullspace_array(f, blk) if len(rows) else f.eye(n)
    prows, pcols, pblk = hom.block(t - 1)
    if len(pcols):
        # restrict images to degree-t coordinates (same ordering as cols)
        B_all = pblk
        B_idx = independent_columns(f, B_all)
        B = B_all[:, B_idx]
    else:
        B = f.zeros((n, 0))
    return Z, B


def ext_ring(e: SemifreeModule) -> ExtRingData:
    """Ext algebra of ``e`` with representatives chosen by pivot order:
    coboundary basis first, cocycles completing it next."""
    hom = hom_complex(e, e)
    f = hom.field
    dims: dict[int, int] = {}
    reps: dict[int, list[Morphism]] = {}
    cob: dict[int, np.ndarray] = {}
    repvec: dict[int, np.ndarray] = {}
    for t in hom.degree_range():
        Z, B = _cocycle_data(hom, t)
        if Z.shape[1] == B.shape[1]:
            continue
        stacked = np.concatenate([B, Z], axis=1) if B.shape[1] else Z
        piv = independent_columns(f, stacked)
        chosen = [c - B.shape[1] for c in piv if c >= B.shape[1]]
        R = Z[:, chosen]
        dims[t] = R.shape[1]
        cob[t] = B
        repvec[t] = R
        idx = hom.indices(t)
        mors = []
        for k in range(R.shape[1]):
            full = f.zeros(hom.dim)
            full[idx] = R[:, k]
            mors.append(hom.to_morphism(full, t))
        reps[t] = mors
    data = ExtRingData(e, hom, dims, reps, cob, repvec)
    for s in dims:
        for t in dims:
            if s + t not in dims:
                continue
            table = f.zeros((dims[s], dims[t], dims[s + t]))
            for i, x in enumerate(reps[s]):
                for j, y in enumerate(reps[t]):
                    table[i, j] = data.coordinates(compose(x, y))
            data.structure_constants[(s, t)] = table
    return data


# -- classification --------------------------------------------------------------


@dataclass
class ClassificationResult:
    """Verdicts ``P_object(n)`` / ``spherical(d)`` (both possible for
    ``n = 1``, ``d = 2``) or ``neither`` with a reason."""

    verdicts: tuple[str, ...]
    dims: dict[int, int]
    n: int | None = None
    d: int | None = None
    witness: Morphism | None = None
    reason: str | None = None

    @property
    def verdict(self) -> str:
        return " & ".join(self.verdicts)

    @property
    def is_p_object(self) -> bool:
        return self.n is not None

    @property
    def is_spherical(self) -> bool:
        return self.d is not None


DIMENSION_MISMATCH = "dimension mismatch"
RING_STRUCTURE_FAILURE = "ring-structure failure"


def classify(e: SemifreeModule, ring: ExtRingData | None = None) -> ClassificationResult:
    """Compare ``Ext*(e, e)`` with the cohomology rings of P^n and S^d.

    The Serre-type condition ``E (x) omega = E`` has no counterpart for
    modules over an algebra and is taken to hold.
    """
    ring = ring if ring is not None else ext_ring(e)
    dims = dict(ring.dims)
    verdicts: list[str] = []
    n = d = None
    witness = None
    reason = None
    degs = sorted(dims)
    ones = all(v == 1 for v in dims.values())
    # sphere: exactly k in degrees 0 and d >= 1
    if ones and len(degs) == 2 and degs[0] == 0 and degs[1] >= 1:
        d = degs[1]
    # projective space: exactly k in degrees 0, 2, ..., 2n
    top = degs[-1] if degs else -1
    if ones and top >= 2 and top % 2 == 0 and degs == list(range(0, top + 1, 2)):
        cand = top // 2
        h = ring.representatives[2][0]
        power = identity(e)
        for _ in range(cand):
            power = compose(h, power)
        if np.any(ring.coordinates(power) != 0):
            n, witness = cand, h
        else:
            reason = RING_STRUCTURE_FAILURE
    elif not (d is not None):
        reason = DIMENSION_MISMATCH
    if n is not None:
        verdicts.append(f"P_object({n})")
    if d is not None:
        verdicts.append(f"spherical({d})")
        if n is None:
            reason = None
    if not verdicts:
        verdicts.append("neither")
    return ClassificationResult(tuple(verdicts), dims, n, d, witness, reason)
