from __future__ import annotations

import itertools

import numpy as np
import pytest

from ptwist.exactlin import GF32003, QQ
from ptwist.galg import (
    AlgebraError,
    GradedAlgebra,
    make_from_table,
    make_product,
    make_spherical_algebra,
    make_square_zero,
    make_truncated_polynomial,
)


def test_truncated_polynomial_products(field):
    a = make_truncated_polynomial(3, 2, field)
    h = a.basis_element("h")
    assert a.basis_names == ("1", "h", "h^2", "h^3")
    assert a.degrees == (0, 2, 4, 6)
    assert h * h == a.basis_element("h^2")
    assert (h**3) == a.basis_element("h^3")
    assert (h**4).is_zero()
    assert a.is_local and a.unit_index == 0


def test_truncated_polynomial_rejects_odd_degree():
    with pytest.raises(AlgebraError):
        make_truncated_polynomial(2, 3, QQ)
    with pytest.raises(AlgebraError):
        make_truncated_polynomial(0, 2, QQ)


def test_square_zero_products_vanish(field):
    a = make_square_zero([2, 4], field)
    for x, y in itertools.product(["a", "b"], repeat=2):
        assert (a.basis_element(x) * a.basis_element(y)).is_zero()


def test_spherical_odd_is_graded_central():
    s = make_spherical_algebra(3, QQ)
    e = s.basis_element("e")
    assert s.is_central(e.coeffs)
    assert e.degree() == 3
    assert (e * e).is_zero()


def test_product_algebra_layout():
    a = make_truncated_polynomial(1, 2, QQ)
    b = make_truncated_polynomial(1, 2, QQ)
    p = make_product(a, b)
    assert p.basis_names == ("e1", "h_1", "e2", "h_2")
    assert list(p.unit) == [1, 0, 1, 0]
    assert p.is_product_of_locals and not p.is_local
    e1 = p.element(p.factors[0].idempotent)
    assert e1 * e1 == e1
    assert (e1 * p.basis_element("h_2")).is_zero()
    assert e1 * p.basis_element("h_1") == p.basis_element("h_1")


def test_inverse_of_unit_plus_nilpotent():
    a = make_truncated_polynomial(2, 2, QQ)
    # 1 + h is inhomogeneous but still a unit
    x = a.element({"1": 1, "h": 1})
    inv = a.element(a.inverse(x.coeffs))
    assert x * inv == a.one()
    assert inv == a.element({"1": 1, "h": -1, "h^2": 1})
    with pytest.raises(AlgebraError):
        a.inverse(a.basis_element("h").coeffs)


def test_from_table_associativity_failure():
    # (y*z)*y = x*y = z but y*(z*y) = 0
    basis = [("1", 0), ("x", 0), ("y", 0), ("z", 0)]
    with pytest.raises(AlgebraError, match="associativity"):
        make_from_table(QQ, basis, {("x", "y"): {"z": 1}, ("y", "z"): {"x": 1}})


def test_from_table_degree_violation():
    with pytest.raises(AlgebraError, match="outside degree"):
        make_from_table(QQ, [("1", 0), ("a", 2), ("b", 3)], {("a", "a"): {"b": 1}})


def test_unit_law_failure():
    mu = np.zeros((2, 2, 2), dtype=object)
    mu[0, 0, 0] = 1
    with pytest.raises(AlgebraError, match="unit"):
        GradedAlgebra(QQ, ["1", "a"], [0, 2], mu, 0)


def test_graded_commutativity_checked():
    # exterior-like odd generators commute up to sign; a plain commuting odd
    # product x*y = y*x = z violates graded commutativity
    basis = [("1", 0), ("x", 1), ("y", 1), ("z", 2)]
    with pytest.raises(AlgebraError, match="commutativity"):
        make_from_table(QQ, basis, {("x", "y"): {"z": 1}, ("y", "x"): {"z": 1}}, graded_commutative=True)
    ext = make_from_table(QQ, basis, {("x", "y"): {"z": 1}, ("y", "x"): {"z": -1}}, graded_commutative=True)
    assert ext.is_local


def test_element_degree_and_homogeneity():
    a = make_truncated_polynomial(2, 2, GF32003)
    assert a.zero().degree() is None
    assert not a.element({"1": 1, "h": 1}).is_homogeneous()
    with pytest.raises(AlgebraError):
        a.element({"1": 1, "h": 1}).degree()


def test_basis_element_lookup_errors():
    a = make_spherical_algebra(2, QQ)
    with pytest.raises(AlgebraError):
        a.index("missing")
