import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qsphere import (AlgebraElement, Monomial, QParam, adjoint, bracket,
                     bidegree_components, degree, element, from_json, gen,
                     haar, inner, is_podles, max_coeff_diff, modular_nu,
                     multiply, one, project_phi0, to_json, zero)


def mono_strategy(kmax=3, bmax=3):
    return st.tuples(st.integers(-kmax, kmax), st.integers(0, bmax),
                     st.integers(0, bmax)).map(lambda t: Monomial(*t))


def scale_of(*els):
    return max([1.0] + [abs(complex(c)) for el in els for c in el.terms.values()])


# -- defining relations ----------------------------------------------------------

def test_defining_relations(p05):
    p = p05
    q = p.q
    a, astar = gen(p, "a"), gen(p, "a*")
    b, bstar = gen(p, "b"), gen(p, "b*")
    A = multiply(b, bstar)
    assert max_coeff_diff(multiply(b, a), q * multiply(a, b)) == 0
    assert max_coeff_diff(multiply(bstar, a), q * multiply(a, bstar)) == 0
    assert max_coeff_diff(multiply(b, bstar), multiply(bstar, b)) == 0
    assert max_coeff_diff(multiply(astar, a) + (q * q) * A, one(p)) < 1e-15
    assert max_coeff_diff(multiply(a, astar) + A, one(p)) < 1e-15


def test_multiply_examples(p05):
    p = p05
    a, astar = gen(p, "a"), gen(p, "a*")
    # a* a = 1 - q^2 b b*
    got = multiply(astar, a)
    want = element(p, {(0, 0, 0): 1.0, (0, 1, 1): -p.q ** 2})
    assert max_coeff_diff(got, want) < 1e-15
    # unit law
    x = element(p, {(2, 1, 0): 1.5 + 0.5j, (-1, 0, 2): -0.25})
    assert max_coeff_diff(multiply(x, one(p)), x) == 0
    assert max_coeff_diff(multiply(one(p), x), x) == 0


def test_param_mismatch_rejected(p05, p09):
    with pytest.raises(ValueError):
        multiply(gen(p05, "a"), gen(p09, "a"))


def test_adjoint_examples(p05):
    p = p05
    a, b = gen(p, "a"), gen(p, "b")
    assert max_coeff_diff(adjoint(a), gen(p, "a*")) == 0
    assert max_coeff_diff(adjoint(one(p)), one(p)) == 0
    # involution reverses and re-normal-orders: (ab)* = q^(-1) a* b*
    got = adjoint(multiply(a, b))
    want = (1.0 / p.q) * multiply(gen(p, "a*"), gen(p, "b*"))
    assert max_coeff_diff(got, want) < 1e-15


@given(mx=mono_strategy(), my=mono_strategy(), mz=mono_strategy())
@settings(max_examples=60, deadline=None)
def test_associativity(mx, my, mz):
    p = QParam.from_q(0.5)
    x, y, z = (element(p, {m: 1.0}) for m in (mx, my, mz))
    lhs = multiply(multiply(x, y), z)
    rhs = multiply(x, multiply(y, z))
    assert max_coeff_diff(lhs, rhs) <= 1e-10 * scale_of(lhs, rhs)


@given(mx=mono_strategy(4, 4), my=mono_strategy(4, 4), mz=mono_strategy(4, 4))
@settings(max_examples=40, deadline=None)
def test_associativity_exact(mx, my, mz):
    p = QParam.exact(Fraction(1, 2))
    x, y, z = (element(p, {m: Fraction(1)}) for m in (mx, my, mz))
    assert max_coeff_diff(multiply(multiply(x, y), z),
                          multiply(x, multiply(y, z))) == 0


@given(mx=mono_strategy(), my=mono_strategy())
@settings(max_examples=60, deadline=None)
def test_involution(mx, my):
    p = QParam.from_q(0.5)
    x = element(p, {mx: 0.7 - 0.2j})
    y = element(p, {my: -1.1 + 0.4j})
    lhs = adjoint(multiply(x, y))
    rhs = multiply(adjoint(y), adjoint(x))
    assert max_coeff_diff(lhs, rhs) <= 1e-10 * scale_of(lhs, rhs)
    assert max_coeff_diff(adjoint(adjoint(x)), x) <= 1e-12 * scale_of(x)


# -- Haar state -------------------------------------------------------------------

def test_haar_values(p05):
    p = p05
    b, bstar = gen(p, "b"), gen(p, "b*")
    A = multiply(b, bstar)
    assert haar(one(p)) == pytest.approx(1.0, abs=1e-15)
    A2 = multiply(A, A)
    assert haar(A2) == pytest.approx(1.0 / float(bracket(3, p)), abs=1e-14)
    # nonzero left degree forces 0: a b b*
    x = multiply(gen(p, "a"), A)
    assert haar(x) == 0


def test_haar_exact_mode(pexact):
    b, bstar = gen(pexact, "b"), gen(pexact, "b*")
    A = multiply(b, bstar)
    assert haar(multiply(A, A)) == Fraction(1) / bracket(3, pexact)


def test_haar_kills_graded(p05, rng):
    p = p05
    for _ in range(40):
        terms = {Monomial(int(rng.integers(-3, 4)), int(rng.integers(0, 4)),
                          int(rng.integers(0, 4))): complex(rng.standard_normal(),
                                                            rng.standard_normal())
                 for _ in range(4)}
        x = AlgebraElement(p, terms)
        graded = sum((comp for bd, comp in bidegree_components(x).items()
                      if bd != (0, 0)), start=zero(p))
        assert abs(complex(haar(graded))) == 0


# -- modular automorphism ----------------------------------------------------------

def test_modular_values(p05):
    p = p05
    assert max_coeff_diff(modular_nu(one(p)), one(p)) == 0
    assert max_coeff_diff(modular_nu(gen(p, "a")), (1 / p.q ** 2) * gen(p, "a")) < 1e-15
    assert max_coeff_diff(modular_nu(gen(p, "b")), gen(p, "b")) == 0
    assert max_coeff_diff(modular_nu(gen(p, "b*")), gen(p, "b*")) == 0
    assert max_coeff_diff(modular_nu(gen(p, "a*")), (p.q ** 2) * gen(p, "a*")) < 1e-15


@given(mx=mono_strategy(), my=mono_strategy())
@settings(max_examples=100, deadline=None)
def test_twisted_trace(mx, my):
    p = QParam.from_q(0.5)
    x, y = element(p, {mx: 1.0}), element(p, {my: 1.0})
    lhs = haar(multiply(x, y))
    rhs = haar(multiply(modular_nu(y), x))
    prod = multiply(x, y)
    assert abs(complex(lhs - rhs)) <= 1e-10 * scale_of(prod, prod)


# -- inner product ------------------------------------------------------------------

def test_inner_examples(p05):
    p = p05
    assert inner(one(p), one(p)) == pytest.approx(1.0)
    # different right-circle weights are orthogonal
    assert inner(gen(p, "a"), gen(p, "b")) == 0
    # h(a* a) = 1/<2>
    assert inner(gen(p, "a"), gen(p, "a")) == pytest.approx(
        1.0 / float(bracket(2, p)), abs=1e-14)


# -- gradings ------------------------------------------------------------------------

def test_bidegree_components(p05):
    p = p05
    x = gen(p, "a") + gen(p, "b*")
    comps = bidegree_components(x)
    assert set(comps) == {(1, 1), (-1, 1)}
    A = multiply(gen(p, "b"), gen(p, "b*"))
    assert set(bidegree_components(A)) == {(0, 0)}
    assert set(bidegree_components(one(p))) == {(0, 0)}


def test_project_phi0(p05):
    p = p05
    A = multiply(gen(p, "b"), gen(p, "b*"))
    B = multiply(gen(p, "a"), gen(p, "b*"))
    assert project_phi0(B).is_zero()
    assert max_coeff_diff(project_phi0(A), A) == 0
    assert max_coeff_diff(project_phi0(one(p)), one(p)) == 0
    # idempotent + Haar-compatible on a mixed element
    x = A + 0.3 * B + (0.1 + 0.2j) * gen(p, "a")
    ph = project_phi0(x)
    assert max_coeff_diff(project_phi0(ph), ph) == 0
    assert abs(complex(haar(ph) - haar(x))) < 1e-14


def test_is_podles(p05):
    p = p05
    A = multiply(gen(p, "b"), gen(p, "b*"))
    assert is_podles(A)
    assert is_podles(one(p))
    assert not is_podles(gen(p, "a"))


def test_degree_and_zero(p05):
    p = p05
    assert degree(zero(p)) == 0
    assert degree(element(p, {(-2, 1, 3): 1.0})) == 6
    assert zero(p).is_zero()


def test_pruning_relative(p05):
    p = p05
    x = AlgebraElement(p, {Monomial(0, 0, 0): 1.0, Monomial(1, 0, 0): 1e-20})
    assert Monomial(1, 0, 0) not in x.terms
    y = AlgebraElement(p, {Monomial(0, 0, 0): 1e-30, Monomial(1, 0, 0): 1e-40})
    assert Monomial(0, 0, 0) in y.terms  # relative, not absolute


def test_serialization_roundtrip(p05):
    p = p05
    x = element(p, {(2, 1, 0): 1.5 - 0.25j, (-1, 0, 2): 3.0})
    blob = to_json(x)
    data = json.loads(blob)
    assert data["q"] == pytest.approx(0.5)
    y = from_json(blob)
    assert max_coeff_diff(x, y) < 1e-15
    assert y.param.q == pytest.approx(p.q)
