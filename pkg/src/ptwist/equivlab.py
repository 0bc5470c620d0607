"""Quasi-isomorphism tools: acyclicity, minimal models, randomized search
for quasi-isomorphisms, Euler characteristics and pairings."""

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
    cone,
    identity,
)
from .exactlin import nullspace_array
from .homext import cohomology_dims, ext_dims, hom_complex


def is_acyclic(m: SemifreeModule | GradedComplex) -> bool:
    return not cohomology_dims(m)


@dataclass
class QuasiIsoCertificate:
    morphism: Morphism
    verdict: bool
    cone_dims: dict[int, int]
    source_dims: dict[int, int]
    target_dims: dict[int, int]

    def __bool__(self) -> bool:
        return self.verdict


def is_quasi_iso(f: Morphism) -> QuasiIsoCertificate:
    """``f`` is a quasi-isomorphism iff ``Cone(f)`` is acyclic."""
    if f.degree != 0:
        raise ModuleError("quasi-isomorphisms have degree 0")
    if not f.is_closed():
        raise ModuleError("morphism is not closed")
    cd = cohomology_dims(cone(f))
    return QuasiIsoCertificate(f, not cd, cd, cohomology_dims(f.source), cohomology_dims(f.target))


# -- minimal models ---------------------------------------------------------


@dataclass
class EliminationStep:
    pivot_source: str  # generator whose differential hits the pivot
    pivot_target: str
    scalar: str
    remaining: int


@dataclass
class MinimalModelResult:
    """Reduced module ``minimal`` with quasi-isomorphisms
    ``to_minimal: M -> minimal`` and ``from_minimal: minimal -> M``."""

    source: SemifreeModule
    minimal: SemifreeModule
    to_minimal: Morphism
    from_minimal: Morphism
    log: list[EliminationStep] = dc_field(default_factory=list)

    @property
    def generator_degrees(self) -> list[int]:
        return [int(d) for d in self.minimal.degree_array]

    def is_reduced(self) -> bool:
        return not np.any(_unit_components(self.minimal) != 0)


def _check_minimizable(m: SemifreeModule):
    alg = m.algebra
    if alg.is_local:
        return
    if alg.is_product_of_locals:
        return
    raise ModuleError(f"minimal models need a local algebra or a product of local ones ({alg.name or 'algebra'})")


def _unit_index_per_generator(m: SemifreeModule) -> np.ndarray:
    alg = m.algebra
    out = []
    for s in m.supports:
        if s is None:
            if alg.unit_index is None:
                raise ModuleError("algebra unit is not a basis element")
            out.append(alg.unit_index)
        else:
            idem = alg.factors[s].idempotent
            out.append(int(np.flatnonzero(idem != 0)[0]))
    return np.asarray(out, dtype=np.int64)


def _unit_components(m: SemifreeModule) -> np.ndarray:
    """Scalar matrix ``U[i, j]`` of idempotent components of ``D[i, j]``."""
    if m.rank == 0:
        return m.field.zeros((0, 0))
    idx = _unit_index_per_generator(m)
    # entry (i, j) lives in e_i A e_j; its unit component sits at the common idempotent
    U = m.differential[np.arange(m.rank)[:, None], np.arange(m.rank)[None, :], idx[None, :]]
    same = np.asarray(m.supports, dtype=object)[:, None] == np.asarray(m.supports, dtype=object)[None, :]
    return np.where(same, U, 0).astype(m.field.dtype)


def split_by_factors(m: SemifreeModule) -> tuple[SemifreeModule, Morphism, Morphism]:
    """Replace every full-support generator over a product algebra by one
    supported copy per factor. Returns ``(M', iso M -> M', iso M' -> M)``."""
    alg = m.algebra
    f = alg.field
    if not alg.factors or all(s is not None for s in m.supports):
        return m, identity(m), identity(m)
    gens, sups, origin = [], [], []
    for j, ((nm, dg), s) in enumerate(zip(m.generators, m.supports)):
        if s is None:
            for k in range(len(alg.factors)):
                gens.append((f"{nm}@{k + 1}", dg))
                sups.append(k)
                origin.append(j)
        else:
            gens.append((nm, dg))
            sups.append(s)
            origin.append(j)
    origin = np.asarray(origin)
    d = m.differential[np.ix_(origin, origin)].copy()
    ms = SemifreeModule(alg, gens, d, sups, check=True)
    fwd = f.zeros((ms.rank, m.rank, alg.dim))
    back = f.zeros((m.rank, ms.rank, alg.dim))
    for a, j in enumerate(origin):
        idem = alg.unit if sups[a] is None else alg.factors[sups[a]].idempotent
        fwd[a, j] = idem
        back[j, a] = idem
    to = Morphism(m, ms, 0, fwd)
    fro = Morphism(ms, m, 0, back)
    return ms, to, fro


def _cancel(m: SemifreeModule, i: int, j: int, c):
    """Cancel the pair ``d g_j = c e g_i + ...``; returns ``(M', pi, iota)``."""
    alg = m.algebra
    f = alg.field
    D = m.differential
    cinv = f.inv(c)
    keep = [l for l in range(m.rank) if l not in (i, j)]
    kk = np.asarray(keep, dtype=np.int64)
    mu = alg.structure_constants
    row_i = D[i, kk]  # D_il
    col_j = D[kk, j]  # D_kj
    # corr[k, l] = D_il * D_kj
    corr = f.tensordot(f.tensordot(row_i, mu, ([1], [0])), col_j, ([1], [1]))  # l c k
    corr = np.transpose(corr, (2, 0, 1))
    newD = f.reduce(D[np.ix_(kk, kk)] - corr * cinv)
    gens = [m.generators[l] for l in keep]
    sups = [m.supports[l] for l in keep]
    mp = SemifreeModule(alg, gens, newD, sups, check=False)
    n2 = len(keep)
    idem = identity(m).matrix
    pi = f.zeros((n2, m.rank, alg.dim))
    iota = f.zeros((m.rank, n2, alg.dim))
    for a, l in enumerate(keep):
        pi[a, l] = idem[l, l]
        iota[l, a] = idem[l, l]
    pi[:, i] = f.reduce(-col_j * cinv)
    iota[j, :] = f.reduce(-(row_i * cinv) * _sign_vector(alg, 1))
    return mp, Morphism(m, mp, 0, pi, check=False), Morphism(mp, m, 0, iota, check=False)


def minimal_model(m: SemifreeModule, *, verify: bool = True) -> MinimalModelResult:
    """Cancel contractible generator pairs until no differential entry has an
    invertible scalar part. Witnesses are checked to be quasi-isomorphisms
    unless ``verify`` is false."""
    _check_minimizable(m)
    cur, to, fro = split_by_factors(m)
    f = m.field
    log: list[EliminationStep] = []
    pi_mat, iota_mat = to, fro
    while True:
        U = _unit_components(cur)
        hits = np.argwhere(U != 0)
        if hits.size == 0:
            break
        # first pivot in column-major order: smallest source generator j, then i
        order = np.lexsort((hits[:, 0], hits[:, 1]))
        i, j = map(int, hits[order[0]])
        c = U[i, j]
        nxt, pi, iota = _cancel(cur, i, j, c)
        log.append(EliminationStep(cur.names[j], cur.names[i], str(f.to_json(c)), nxt.rank))
        pi_mat = compose(pi, pi_mat)
        iota_mat = compose(iota_mat, iota)
        cur = nxt
    final = SemifreeModule(m.algebra, cur.generators, cur.differential, cur.supports, check=True)
    to_min = Morphism(m, final, 0, pi_mat.matrix.copy(), check=False)
    from_min = Morphism(final, m, 0, iota_mat.matrix.copy(), check=False)
    res = MinimalModelResult(m, final, to_min, from_min, log)
    if verify:
        for w in (to_min, from_min):
            if not w.is_closed():
                raise ModuleError("minimal model witness is not closed")
            if not is_quasi_iso(w).verdict:
                raise ModuleError("minimal model witness is not a quasi-isomorphism")
    return res


def reduced_cohomology_dim(m: SemifreeModule) -> int:
    """``dim H(M (x)_A k)`` from the idempotent components alone."""
    ms, _, _ = split_by_factors(m)
    U = _unit_components(ms)
    c = GradedComplex(m.field, ms.degree_array, U, check=False)
    return sum(cohomology_dims(c).values())


# -- quasi-isomorphism search ---------------------------------------------


@dataclass
class NotFound:
    reason: str
    proven: bool
    attempts: int = 0

    def __bool__(self) -> bool:
        return False


def closed_degree_zero_basis(m: SemifreeModule, n: SemifreeModule):
    """Hom complex and a basis (columns, degree-0 coordinates) of closed maps."""
    hom = hom_complex(m, n)
    rows, cols, blk = hom.block(0)
    if not len(cols):
        return hom, cols, hom.field.zeros((0, 0))
    Z = nullspace_array(hom.field, blk) if len(rows) else hom.field.eye(len(cols))
    return hom, cols, Z


def _minimizable(m: SemifreeModule) -> bool:
    alg = m.algebra
    return alg.is_local or alg.is_product_of_locals


def _search(m: SemifreeModule, n: SemifreeModule, seed: int, attempts: int) -> Morphism | NotFound:
    hom, cols, Z = closed_degree_zero_basis(m, n)
    f = m.field
    if Z.shape[1] == 0:
        return NotFound("no nonzero closed degree-0 maps", True)
    rng = np.random.default_rng(seed)
    for _ in range(attempts):
        coeffs = f.random(rng, Z.shape[1], bound=f.modulus - 1 if f.modulus else 1000)
        vec = f.zeros(hom.dim)
        vec[cols] = f.matmul(Z, coeffs)
        cand = hom.to_morphism(vec, 0)
        if is_quasi_iso(cand).verdict:
            return cand
    return NotFound(f"no quasi-isomorphism among {attempts} random closed maps (inconclusive)", False, attempts)


def find_quasi_iso(m: SemifreeModule, n: SemifreeModule, seed: int = 0, attempts: int = 64) -> Morphism | NotFound:
    """Random closed degree-0 maps ``m -> n`` tried until one is a quasi-iso.

    A mismatch of cohomology dimensions proves that none exists. Otherwise a
    ``NotFound`` result is inconclusive. Over local algebras (and products
    of them) the search runs between minimal models, whose Hom complexes
    are far smaller, and the hit is transported back along the
    minimal-model quasi-isomorphisms.
    """
    if m.algebra is not n.algebra:
        raise ModuleError("modules over different algebras")
    dm, dn = cohomology_dims(m), cohomology_dims(n)
    if dm != dn:
        return NotFound(f"cohomology dimensions differ: {dm} vs {dn}", True)
    if not dm:
        # both acyclic: the zero map is a quasi-isomorphism
        return Morphism(m, n, 0)
    if not _minimizable(m):
        return _search(m, n, seed, attempts)
    mm, mn = minimal_model(m, verify=False), minimal_model(n, verify=False)
    hit = _search(mm.minimal, mn.minimal, seed, attempts)
    if not hit:
        return hit
    out = compose(mn.from_minimal, compose(hit, mm.to_minimal))
    if not is_quasi_iso(out).verdict:  # pragma: no cover - composite of quasi-isos
        raise ModuleError("transported map is not a quasi-isomorphism")
    return out


# -- Euler characteristics -----------------------------------------------------


def _alternating(dims: dict[int, int]) -> int:
    return sum(v if k % 2 == 0 else -v for k, v in dims.items())


def euler_char(m: SemifreeModule | GradedComplex) -> int:
    return _alternating(cohomology_dims(m))


def euler_pairing(m: SemifreeModule, n: SemifreeModule) -> int:
    """``sum (-1)^i dim Ext^i(m, n)``."""
    return _alternating(ext_dims(m, n))
