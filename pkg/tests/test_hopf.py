import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qsphere import (DerivationMatrix, Monomial, QParam, UIndex, act_delta,
                     act_delta_pbw, act_partial, act_partial_pbw, adjoint,
                     basis_vector, berezin, bidegree_components, bracket,
                     conjugate_by_u, coproduct, delta3, delta_matrix, element,
                     expand, fundamental_u, fundamental_u_star, gen,
                     generators_podles, haar, mat2_mul, max_coeff_diff,
                     multiply, one, pairing, pairing_pbw, partial_matrix, tau,
                     to_element, twisted_commutator, u_entry, uvector_diff,
                     zero)
from qsphere.hopf import _mono_word


def mono_strategy(kmax=2, bmax=2):
    return st.tuples(st.integers(-kmax, kmax), st.integers(0, bmax),
                     st.integers(0, bmax)).map(lambda t: Monomial(*t))


def scale_of(*els):
    return max([1.0] + [abs(complex(c)) for el in els for c in el.terms.values()])


# -- pairing -------------------------------------------------------------------

def test_pairing_table(p05):
    p = p05
    s = math.sqrt(p.q)
    # a* = u^1_00
    assert float(pairing("k", UIndex(1, 0, 0), p)) == pytest.approx(1 / s)
    # a = u^1_11
    assert float(pairing("k", UIndex(1, 1, 1), p)) == pytest.approx(s)
    # e-row on the fundamental level: <e, u^1_01> = 1, and u^1_01 = -q b
    # recovers <e, b> = -1/q
    assert float(pairing("e", UIndex(1, 0, 1), p)) == pytest.approx(1.0)
    # f-row: <f, u^1_10> = 1 with u^1_10 = b*
    assert float(pairing("f", UIndex(1, 1, 0), p)) == pytest.approx(1.0)
    # counit row
    assert pairing("e", UIndex(0, 0, 0), p) == 0
    assert float(pairing("k", UIndex(0, 0, 0), p)) == pytest.approx(1.0)
    # out-of-range sentinel
    assert pairing("k", UIndex(1, 2, 2), p) == 0


def test_pairing_general_formula(p09):
    p = p09
    q = p.q
    for n in range(5):
        for j in range(n + 1):
            kval = float(pairing("k", UIndex(n, j, j), p))
            assert kval == pytest.approx(q ** (j - n / 2), rel=1e-13)
            if j >= 1:
                ev = float(pairing("e", UIndex(n, j - 1, j), p))
                want = q ** ((1 - n) / 2) * math.sqrt(
                    float(bracket(n - j + 1, p)) * float(bracket(j, p)))
                assert ev == pytest.approx(want, rel=1e-12)
            if j < n:
                fv = float(pairing("f", UIndex(n, j + 1, j), p))
                want = q ** ((1 - n) / 2) * math.sqrt(
                    float(bracket(n - j, p)) * float(bracket(j + 1, p)))
                assert fv == pytest.approx(want, rel=1e-12)


def test_pairing_h_row_classical(p1):
    for n in range(4):
        for j in range(n + 1):
            assert pairing("h", UIndex(n, j, j), p1) == 2 * j - n


def test_h_rejected_off_classical(p05):
    with pytest.raises(ValueError):
        pairing("h", UIndex(1, 0, 0), p05)
    with pytest.raises(ValueError):
        act_partial_pbw("h", gen(p05, "a"))


def test_pairing_pbw_engine(p05):
    # product-rule pairing engine vs the closed table on synthesised entries
    p = p05
    for n in range(5):
        for i in range(n + 1):
            for j in range(n + 1):
                el = u_entry(p, n, i, j)
                for g in ("e", "f", "k", "k_inv"):
                    d = abs(complex(pairing_pbw(g, el))
                            - complex(pairing(g, UIndex(n, i, j), p)))
                    assert d < 1e-10


# -- generator tables ------------------------------------------------------------

def test_partial_generator_table(p05):
    p = p05
    q = p.q
    s = math.sqrt(q)
    a, astar, b, bstar = (gen(p, g) for g in ("a", "a*", "b", "b*"))
    table = [
        ("k", a, s * a), ("k", astar, (1 / s) * astar),
        ("k", b, s * b), ("k", bstar, (1 / s) * bstar),
        ("e", a, bstar), ("e", astar, zero(p)),
        ("e", b, (-1 / q) * astar), ("e", bstar, zero(p)),
        ("f", a, zero(p)), ("f", astar, (-q) * b),
        ("f", b, zero(p)), ("f", bstar, a),
    ]
    for g, x, want in table:
        assert max_coeff_diff(act_partial_pbw(g, x), want) < 1e-14
    assert max_coeff_diff(act_partial_pbw("k", one(p)), one(p)) == 0


def test_delta_generator_table(p05):
    p = p05
    q = p.q
    s = math.sqrt(q)
    a, astar, b, bstar = (gen(p, g) for g in ("a", "a*", "b", "b*"))
    table = [
        ("k", a, s * a), ("k", astar, (1 / s) * astar),
        ("k", b, (1 / s) * b), ("k", bstar, s * bstar),
        ("e", a, zero(p)), ("e", astar, bstar),
        ("e", b, (-1 / q) * a), ("e", bstar, zero(p)),
        ("f", a, (-q) * b), ("f", astar, zero(p)),
        ("f", b, zero(p)), ("f", bstar, astar),
    ]
    for g, x, want in table:
        assert max_coeff_diff(act_delta_pbw(g, x), want) < 1e-14


def test_h_tables_classical(p1):
    a, astar, b, bstar = (gen(p1, g) for g in ("a", "a*", "b", "b*"))
    for x, wp, wd in ((a, a, a), (b, b, (-1.0) * b),
                      (astar, (-1.0) * astar, (-1.0) * astar),
                      (bstar, (-1.0) * bstar, bstar)):
        assert max_coeff_diff(act_partial_pbw("h", x), wp) == 0
        assert max_coeff_diff(act_delta_pbw("h", x), wd) == 0


def test_partial_on_sphere_generators(p05):
    # the three explicit values driving the twisted-commutator lemma
    p = p05
    s = math.sqrt(p.q)
    A, B, Bstar = generators_podles(p)
    astar, bstar = gen(p, "a*"), gen(p, "b*")
    assert max_coeff_diff(act_partial_pbw("e", A),
                          (-1 / s) * multiply(bstar, astar)) < 1e-14
    assert max_coeff_diff(act_partial_pbw("e", B),
                          (1 / s) * multiply(bstar, bstar)) < 1e-14
    assert max_coeff_diff(act_partial_pbw("e", Bstar),
                          (-1 / s ** 3) * multiply(astar, astar)) < 1e-14


# -- label-shift engines -----------------------------------------------------------

def test_act_partial_k_scaling(p09):
    p = p09
    for n in range(4):
        for j in range(n + 1):
            v = basis_vector(p, n, 0, j)
            got = act_partial("k", v)
            assert complex(got.coeff((n, 0, j))) == pytest.approx(
                p.q ** (j - n / 2), rel=1e-13)


def test_act_partial_e_matches_pbw(p05):
    p = p05
    A, _, _ = generators_podles(p)
    vA, res = expand(A, 2)
    assert res == 0.0
    lhs = act_partial("e", vA)
    rhs, res2 = expand(act_partial_pbw("e", A), 2)
    assert res2 <= 1e-12
    assert uvector_diff(lhs, rhs) < 1e-12
    assert act_partial("e", basis_vector(p, 0, 0, 0)).is_zero()


def test_act_delta_examples(p05):
    p = p05
    a = gen(p, "a")
    va, _ = expand(a, 1)
    got = act_delta("f", va)
    want, _ = expand((-p.q) * gen(p, "b"), 1)
    assert uvector_diff(got, want) < 1e-13
    vb, _ = expand(gen(p, "b"), 1)
    got = act_delta("k", vb)
    assert uvector_diff(got, vb.scaled(p.q ** (-0.5))) < 1e-13
    assert act_delta("e", basis_vector(p, 0, 0, 0)).is_zero()


def test_engine_agreement_deep(p09):
    p = p09
    for n in range(1, 7):
        for i in range(n + 1):
            for j in range(n + 1):
                v = basis_vector(p, n, i, j)
                el = u_entry(p, n, i, j)
                for g in ("e", "f", "k"):
                    lhs = act_partial(g, v)
                    rhs, res = expand(act_partial_pbw(g, el), n)
                    assert res <= 1e-9
                    assert uvector_diff(lhs, rhs) <= 1e-9
                    lhs = act_delta(g, v)
                    rhs, res = expand(act_delta_pbw(g, el), n)
                    assert res <= 1e-9
                    assert uvector_diff(lhs, rhs) <= 1e-9


# -- Leibniz and star rules -----------------------------------------------------------

@given(mx=mono_strategy(), my=mono_strategy())
@settings(max_examples=100, deadline=None)
def test_twisted_leibniz(mx, my):
    p = QParam.from_q(0.5)
    x, y = element(p, {mx: 1.0}), element(p, {my: 1.0})
    for g in ("e", "f"):
        lhs = act_partial_pbw(g, multiply(x, y))
        rhs = multiply(act_partial_pbw(g, x), act_partial_pbw("k", y)) + \
            multiply(act_partial_pbw("k_inv", x), act_partial_pbw(g, y))
        assert max_coeff_diff(lhs, rhs) <= 1e-10 * scale_of(lhs, rhs)
        lhs = act_delta_pbw(g, multiply(x, y))
        rhs = multiply(act_delta_pbw(g, x), act_delta_pbw("k", y)) + \
            multiply(act_delta_pbw("k_inv", x), act_delta_pbw(g, y))
        assert max_coeff_diff(lhs, rhs) <= 1e-10 * scale_of(lhs, rhs)


@given(mx=mono_strategy())
@settings(max_examples=60, deadline=None)
def test_star_relations(mx):
    p = QParam.from_q(0.5)
    x = element(p, {mx: 0.8 - 0.3j})
    tolscale = 1e-11 * scale_of(x) * 16
    assert max_coeff_diff(act_partial_pbw("e", adjoint(x)),
                          (-1 / p.q) * adjoint(act_partial_pbw("f", x))) <= tolscale
    assert max_coeff_diff(act_partial_pbw("f", adjoint(x)),
                          (-p.q) * adjoint(act_partial_pbw("e", x))) <= tolscale
    assert max_coeff_diff(act_partial_pbw("k", adjoint(x)),
                          adjoint(act_partial_pbw("k_inv", x))) <= tolscale
    assert max_coeff_diff(act_delta_pbw("e", adjoint(x)),
                          (-1 / p.q) * adjoint(act_delta_pbw("f", x))) <= tolscale
    assert max_coeff_diff(act_delta_pbw("f", adjoint(x)),
                          (-p.q) * adjoint(act_delta_pbw("e", x))) <= tolscale


def test_haar_invariance(p05, rng):
    p = p05
    for _ in range(25):
        terms = {Monomial(int(rng.integers(-2, 3)), int(rng.integers(0, 3)),
                          int(rng.integers(0, 3))): complex(
            rng.standard_normal(), rng.standard_normal()) for _ in range(3)}
        x = element(p, {k: v for k, v in terms.items()})
        for g in ("e", "f"):
            assert abs(complex(haar(act_partial_pbw(g, x)))) < 1e-11
            assert abs(complex(haar(act_delta_pbw(g, x)))) < 1e-11
        assert abs(complex(haar(act_partial_pbw("k", x)) - haar(x))) < 1e-12


def test_tau_commutation(p05):
    p = p05
    a, astar, b, bstar = (gen(p, g) for g in ("a", "a*", "b", "b*"))
    A, B, _ = generators_podles(p)
    for x in (a, astar, b, bstar, A, B):
        assert max_coeff_diff(multiply(b, x), multiply(tau(x), b)) < 1e-13
        assert max_coeff_diff(multiply(bstar, x), multiply(tau(x), bstar)) < 1e-13


def test_circle_equivariance_grading(p05, rng):
    # the column-side derivations shift the left weight by -2 (e) and +2 (f)
    p = p05
    for _ in range(15):
        mo = Monomial(int(rng.integers(-2, 3)), int(rng.integers(0, 3)),
                      int(rng.integers(0, 3)))
        x = element(p, {mo: 1.0})
        lw = mo.k + mo.m - mo.n
        for out_mo in act_partial_pbw("e", x).terms:
            assert out_mo.k + out_mo.m - out_mo.n == lw - 2
        for out_mo in act_partial_pbw("f", x).terms:
            assert out_mo.k + out_mo.m - out_mo.n == lw + 2


# -- derivation matrices ----------------------------------------------------------------

def test_partial_matrix_values(p05):
    p = p05
    A, B, _ = generators_podles(p)
    a, astar, b, bstar = (gen(p, g) for g in ("a", "a*", "b", "b*"))
    z = zero(p)
    pmA = partial_matrix(A)
    assert pmA.form == "partial"
    assert max_coeff_diff(pmA.entries[0][0], z) == 0
    assert max_coeff_diff(pmA.entries[1][1], z) == 0
    assert max_coeff_diff(pmA.entries[1][0], (-1.0) * multiply(bstar, astar)) < 1e-14
    assert max_coeff_diff(pmA.entries[0][1], multiply(a, b)) < 1e-14
    pmB = partial_matrix(B)
    assert max_coeff_diff(pmB.entries[0][1], (1 / p.q) * multiply(a, a)) < 1e-14
    assert max_coeff_diff(pmB.entries[1][0], multiply(bstar, bstar)) < 1e-14
    pm1 = partial_matrix(one(p))
    assert all(pm1.entries[r][c].is_zero() for r in range(2) for c in range(2))


def test_partial_matrix_requires_sphere(p05):
    with pytest.raises(ValueError):
        partial_matrix(gen(p05, "a"))
    with pytest.raises(ValueError):
        delta_matrix(gen(p05, "b"))


def test_delta_matrix_values(p05):
    p = p05
    q = p.q
    A, B, _ = generators_podles(p)
    a, astar, b, bstar = (gen(p, g) for g in ("a", "a*", "b", "b*"))
    dmA = delta_matrix(A)
    assert dmA.form == "delta"
    assert dmA.entries[0][0].is_zero()
    assert max_coeff_diff(dmA.entries[0][1], multiply(b, astar)) < 1e-14
    assert max_coeff_diff(dmA.entries[1][0], (-1.0) * multiply(a, bstar)) < 1e-14
    dmB = delta_matrix(B)
    assert max_coeff_diff(dmB.entries[0][0], (-1.0) * B) < 1e-14
    assert max_coeff_diff(dmB.entries[1][1], B) < 1e-14
    want01 = (1 / q) * multiply(a, astar) - q * multiply(b, bstar)
    assert max_coeff_diff(dmB.entries[0][1], want01) < 1e-14
    assert dmB.entries[1][0].is_zero()
    dm1 = delta_matrix(one(p))
    assert all(dm1.entries[r][c].is_zero() for r in range(2) for c in range(2))


def test_delta3_values(p05, p1):
    A, B, _ = generators_podles(p05)
    assert delta3(A).is_zero()
    assert max_coeff_diff(delta3(B), B) < 1e-14
    A1, B1, _ = generators_podles(p1)
    assert delta3(A1).is_zero()
    assert max_coeff_diff(delta3(B1), B1) < 1e-14


def test_fundamental_unitary(p05):
    p = p05
    u = fundamental_u(p)
    us = fundamental_u_star(p)
    for prod in (mat2_mul(u, us), mat2_mul(us, u)):
        for r in range(2):
            for c in range(2):
                want = one(p) if r == c else zero(p)
                assert max_coeff_diff(prod[r][c], want) < 1e-13


@pytest.mark.parametrize("q", [0.5, 0.9, 1.0])
def test_conjugation_identity_generators(q):
    p = QParam.from_q(q)
    A, B, Bstar = generators_podles(p)
    for x in (A, B, Bstar):
        d = conjugate_by_u(partial_matrix(x)).diff(delta_matrix(x))
        assert d < 1e-12
    zmat = DerivationMatrix(((zero(p), zero(p)), (zero(p), zero(p))))
    out = conjugate_by_u(zmat)
    assert all(out.entries[r][c].is_zero() for r in range(2) for c in range(2))


def test_conjugation_identity_fuzzy(p05):
    p = p05
    for m in range(3):
        for i in range(2 * m + 1):
            x = u_entry(p, 2 * m, i, m)
            assert conjugate_by_u(partial_matrix(x)).diff(delta_matrix(x)) < 1e-10


def test_twisted_commutator_lemma(p05, rng):
    p = p05
    q = p.q
    s = math.sqrt(q)
    A, B, Bstar = generators_podles(p)
    dk = lambda z: act_delta_pbw("k", z)
    test_set = [A, B, Bstar]
    for _ in range(25):
        x = zero(p)
        for el in (one(p), A, B, Bstar, multiply(A, B), multiply(A, Bstar)):
            x = x + complex(rng.standard_normal(), rng.standard_normal()) * el
        test_set.append(x)
    for x in test_set:
        lhs = twisted_commutator(gen(p, "a*"), x, dk)
        rhs = (1 - q * q) * s * multiply(gen(p, "b"), act_partial_pbw("e", x))
        assert max_coeff_diff(lhs, rhs) <= 1e-10 * scale_of(lhs, rhs)
        lhs = twisted_commutator(gen(p, "a"), x, dk)
        rhs = (1 - q * q) * s ** (-3) * multiply(gen(p, "b*"),
                                                 act_partial_pbw("f", x))
        assert max_coeff_diff(lhs, rhs) <= 1e-10 * scale_of(lhs, rhs)


def test_matrix_twisted_commutator(p05, rng):
    # [u, x]_(delta_k) = (1 - q^2) [[0, b], [q^(-1) b*, 0]] d(x)
    p = p05
    q = p.q
    A, B, Bstar = generators_podles(p)
    u = fundamental_u(p)
    dk = lambda z: act_delta_pbw("k", z)
    twist = ((zero(p), gen(p, "b")), ((1 / q) * gen(p, "b*"), zero(p)))
    for x in (A, B, Bstar, multiply(A, B)):
        pm = partial_matrix(x)
        rhs = mat2_mul(twist, pm.entries)
        for r in range(2):
            for c in range(2):
                lhs = twisted_commutator(u[r][c], x, dk)
                assert max_coeff_diff(lhs, (1 - q * q) * rhs[r][c]) <= \
                    1e-10 * scale_of(lhs)


def test_conjugated_twisted_leibniz(p05, rng):
    # the conjugated derivation obeys the same twisted rule
    p = p05
    A, B, Bstar = generators_podles(p)
    pool = [A, B, Bstar, multiply(A, A)]
    for i in range(len(pool)):
        for j in range(len(pool)):
            x, y = pool[i], pool[j]
            lhs = conjugate_by_u(partial_matrix(multiply(x, y)))
            cx = conjugate_by_u(partial_matrix(x))
            cy = conjugate_by_u(partial_matrix(y))
            dky = act_delta_pbw("k", y)
            dkix = act_delta_pbw("k_inv", x)
            rhs = tuple(tuple(
                multiply(cx.entries[r][c], dky) + multiply(dkix, cy.entries[r][c])
                for c in range(2)) for r in range(2))
            d = max(max_coeff_diff(lhs.entries[r][c], rhs[r][c])
                    for r in range(2) for c in range(2))
            assert d <= 1e-10 * max(scale_of(*lhs.entries[0], *lhs.entries[1]), 1.0)


def test_berezin_equivariance(p05):
    # the transform commutes with the row-side action on the fuzzy basis
    p = p05
    N = 2
    for m in range(3):
        for i in range(2 * m + 1):
            v = basis_vector(p, 2 * m, i, m)
            for g in ("e", "f", "k"):
                lhs = act_delta(g, berezin(N, v))
                rhs = berezin(N, act_delta(g, v))
                assert uvector_diff(lhs, rhs) < 1e-12


def test_coaction_equivariance(p05):
    # (1 x d1) Delta = Delta d1 on the fuzzy basis, compared as pair sums
    p = p05
    s = math.sqrt(p.q)
    for m in range(1, 4):
        for i in (0, m, 2 * m):
            idx = UIndex(2 * m, i, m)
            cp = coproduct(idx, p)
            # left side: apply the column-shift to the right leg
            lhs = {}
            for (le, ri), c in cp.terms.items():
                cval = complex(pairing("e", UIndex(ri.n, ri.j - 1, ri.j), p)) * s \
                    if ri.j >= 1 else 0.0
                if cval:
                    key = (le, UIndex(ri.n, ri.i, ri.j - 1))
                    lhs[key] = lhs.get(key, 0) + c * cval
            # right side: coproduct of the shifted label
            cval = complex(pairing("e", UIndex(idx.n, idx.j - 1, idx.j), p)) * s
            rhs = {}
            for (le, ri), c in coproduct(UIndex(idx.n, idx.i, idx.j - 1), p).terms.items():
                rhs[(le, ri)] = c * cval
            keys = set(lhs) | set(rhs)
            assert all(abs(complex(lhs.get(k, 0)) - complex(rhs.get(k, 0))) < 1e-12
                       for k in keys)
