"""Algebraic model of pushing an object into the total space of a family.

The ambient object is ``C = Cone(h: E[-2] -> E)[1]`` which sits in a
triangle ``E[1] -> C -> E -> E[2]`` whose boundary is the class ``h``. By
adjunction, Ext of the pushed-forward object with itself is computed as
``H*(Hom(C, E))``. :func:`les_oracle` predicts the same numbers from the Ext
multiplication table alone, through the long exact sequence.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dgmod import (
    ModuleError,
    Morphism,
    SemifreeModule,
    compose,
    cone_functor,
    cone_maps,
    shift,
    shift_morphism,
)
from .exactlin import rank_array
from .homext import ExtRingData, classify, cohomology_dims, ext_ring, hom_complex


@dataclass
class AmbientModel:
    """``C`` with the triangle maps ``E[1] -> C`` and ``C -> E``."""

    e: SemifreeModule
    h: Morphism
    obj: SemifreeModule
    incl: Morphism
    proj: Morphism
    boundary: Morphism  # h as a degree-0 map E[-2] -> E


def _as_degree_zero(h: Morphism) -> Morphism:
    e = h.source
    return Morphism(shift(e, -h.degree), h.target, 0, h.matrix.copy())


def ambient_object(e: SemifreeModule, h: Morphism) -> AmbientModel:
    if h.source is not e or h.target is not e:
        raise ModuleError("obstruction class must be an endomorphism of E")
    if h.degree != 2:
        raise ModuleError(f"obstruction class must have degree 2, got {h.degree}")
    if not h.is_closed():
        raise ModuleError("obstruction representative must be closed")
    b = _as_degree_zero(h)
    cn, incl, proj = cone_maps(b)
    c = shift(cn, 1)
    inc1 = shift_morphism(incl, 1, target=c)
    proj1 = shift_morphism(proj, 1, source=c, target=e)
    if not (inc1.is_closed() and proj1.is_closed()):
        raise ModuleError("triangle maps are not closed")
    if not compose(proj1, inc1).is_zero():
        raise ModuleError("E[1] -> C -> E does not vanish")
    return AmbientModel(e, h, c, inc1, proj1, b)


def ambient_morphism(m1: AmbientModel, m2: AmbientModel, phi: Morphism) -> Morphism:
    """``C_1 -> C_2`` induced by ``phi: E_1 -> E_2`` with ``phi h_1 = h_2 phi``."""
    if phi.degree != 0 or phi.source is not m1.e or phi.target is not m2.e:
        raise ModuleError("phi must be a degree-0 map E_1 -> E_2")
    alpha = Morphism(m1.boundary.source, m2.boundary.source, 0, phi.matrix.copy())
    cf = cone_functor(m1.boundary, m2.boundary, alpha, phi)
    return shift_morphism(cf, 1, source=m1.obj, target=m2.obj)


def ambient_ext_profile(m: AmbientModel) -> dict[int, int]:
    """``dim H^k(Hom(C, E))``."""
    return cohomology_dims(hom_complex(m.obj, m.e))


def _delta(ring: ExtRingData, hbar: np.ndarray, k: int) -> np.ndarray:
    """Matrix of ``x -> x . hbar`` from ``Ext^k`` to ``Ext^{k+2}``."""
    f = ring.field
    src, tgt = ring.dims.get(k, 0), ring.dims.get(k + 2, 0)
    out = f.zeros((tgt, src))
    if src and tgt:
        table = ring.structure_constants[(k, 2)]
        out = f.tensordot(table, hbar, ([1], [0])).T.copy()
    return out


def les_oracle(ring: ExtRingData, hbar) -> dict[int, int]:
    """Predicted profile ``coker(delta_{k-2}) + ker(delta_{k-1})`` in degree ``k``."""
    f = ring.field
    hbar = f.array(hbar)
    if hbar.shape != (ring.dims.get(2, 0),):
        raise ModuleError("hbar must be a coordinate vector in Ext^2")
    if not ring.dims:
        return {}
    lo, hi = min(ring.dims), max(ring.dims)
    ranks = {k: rank_array(f, _delta(ring, hbar, k)) for k in range(lo - 2, hi + 1)}
    out = {}
    for k in range(lo, hi + 2):
        coker = ring.dims.get(k, 0) - ranks.get(k - 2, 0)
        ker = ring.dims.get(k - 1, 0) - ranks.get(k - 1, 0)
        if coker + ker:
            out[k] = coker + ker
    return out


@dataclass
class PushforwardReport:
    spherical: bool
    n: int | None
    profile: dict[int, int]
    oracle: dict[int, int]
    expected: dict[int, int] | None

    @property
    def agree(self) -> bool:
        return self.profile == self.oracle


def spherical_after_pushforward(e: SemifreeModule, h: Morphism | None = None, *, ring: ExtRingData | None = None) -> PushforwardReport:
    """Whether the ambient profile is ``{0: 1, 2n + 1: 1}``.

    ``h`` defaults to the classifier's witness; ``n`` comes from the
    classifier when ``E`` is a P-object.
    """
    ring = ring if ring is not None else ext_ring(e)
    res = classify(e, ring)
    if h is None:
        if res.witness is None:
            raise ModuleError("no degree-2 witness; pass h explicitly")
        h = res.witness
    model = ambient_object(e, h)
    profile = ambient_ext_profile(model)
    oracle = les_oracle(ring, ring.coordinates(h))
    n = res.n
    if n is None:
        # Ext dims alone decide the expected top degree for the 0, 2, ..., 2n shape
        top = max(ring.dims) if ring.dims else 0
        n = top // 2 if top % 2 == 0 else None
    expected = {0: 1, 2 * n + 1: 1} if n is not None else None
    return PushforwardReport(expected is not None and profile == expected, res.n, profile, oracle, expected)
