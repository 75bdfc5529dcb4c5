"""Actions of the quantized enveloping algebra through the dual pairing.

Two commuting families of endomorphisms of the coordinate algebra arise
from the pairing with the generators e, f, k: the left coaction leg
(written act_partial here) and the right coaction leg (act_delta).  The
k-tags act as diagonal algebra automorphisms; e and f are twisted
derivations obeying

    d(x y) = d(x) k(y) + k^(-1)(x) d(y)

with k the matching automorphism.  At q = 1 both k-automorphisms are the
identity and the extra su(2) generator h acts as a plain derivation; the
tag "h" is only accepted there.

Generator tables (columns: a, a*, b, b*):

    partial_k :  q^(1/2) a ,  q^(-1/2) a* ,  q^(1/2) b  ,  q^(-1/2) b*
    partial_e :  b*       ,  0            ,  -q^(-1) a* ,  0
    partial_f :  0        ,  -q b         ,  0          ,  a
    partial_h :  a        ,  -a*          ,  b          ,  -b*

    delta_k   :  q^(1/2) a ,  q^(-1/2) a* ,  q^(-1/2) b ,  q^(1/2) b*
    delta_e   :  0         ,  b*          ,  -q^(-1) a  ,  0
    delta_f   :  -q b      ,  0           ,  0          ,  a*
    delta_h   :  a         ,  -a*         ,  -b         ,  b*

Everything here is available through two independent engines: label
shifts on Peter-Weyl vectors, and the twisted Leibniz rule on normal-form
elements.  The tests require the engines to agree.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Tuple

from .qscalar import QParam, Scalar, bracket, sqrt_scalar
from .pbw import (AlgebraElement, Monomial, adjoint, gen, is_podles,
                  max_coeff_diff, multiply, one, zero)
from .peter_weyl import UIndex, UVector, to_element, valid_index

TAGS = ("e", "f", "k", "k_inv", "h")

# k-eigenvalue exponents of s per generator letter
_LEFT_EXP = {"a": 1, "a*": -1, "b": 1, "b*": -1}
_RIGHT_EXP = {"a": 1, "a*": -1, "b": -1, "b*": 1}

# h-eigenvalues (q = 1 only)
_LEFT_H = {"a": 1, "a*": -1, "b": 1, "b*": -1}
_RIGHT_H = {"a": 1, "a*": -1, "b": -1, "b*": 1}


def _check_tag(g: str, p: QParam) -> None:
    if g not in TAGS:
        raise ValueError(f"unknown enveloping-algebra tag {g!r}")
    if g == "h" and not p.is_classical:
        raise ValueError("the tag 'h' only acts at q = 1")


# -- pairing -----------------------------------------------------------------

def pairing(g: str, idx, p: QParam) -> Scalar:
    """Dual pairing of a generator tag with the basis label u^n_(ij)."""
    _check_tag(g, p)
    idx = UIndex(*idx)
    if not valid_index(idx):
        return 0
    n, i, j = idx
    if g == "k":
        return p.spow(2 * j - n) if i == j else 0
    if g == "k_inv":
        return p.spow(n - 2 * j) if i == j else 0
    if g == "h":
        return float(2 * j - n) if i == j else 0
    if g == "e":
        if i == j - 1:
            return p.spow(1 - n) * sqrt_scalar(bracket(n - j + 1, p) * bracket(j, p), p)
        return 0
    # g == "f"
    if i == j + 1:
        return p.spow(1 - n) * sqrt_scalar(bracket(n - j, p) * bracket(j + 1, p), p)
    return 0


_PAIR_GEN = {
    # scalar pairing values on the four generator letters
    "e": lambda p, letter: (-p.qpow(-1)) if letter == "b" else 0,
    "f": lambda p, letter: p.one() if letter == "b*" else 0,
    "h": lambda p, letter: {"a": 1.0, "a*": -1.0, "b": 0.0, "b*": 0.0}[letter],
}


def pairing_pbw(g: str, x: AlgebraElement) -> Scalar:
    """Pairing with a normal-form element, through the comultiplication rules.

    Independent of the Peter-Weyl machinery: uses only the generator table
    and the pairing-against-products rules.  The k-row is multiplicative,
    so it vanishes on monomials containing b or b*; the e row survives only
    on a^k b, the f row only on a^k b*, and the h row (q = 1) only on pure
    a-powers.
    """
    p = x.param
    _check_tag(g, p)
    total: Scalar = 0
    for mo, c in x.terms.items():
        if g == "k":
            if mo.m == 0 and mo.n == 0:
                total = total + c * p.spow(mo.k)
        elif g == "k_inv":
            if mo.m == 0 and mo.n == 0:
                total = total + c * p.spow(-mo.k)
        elif g == "h":
            if mo.m == 0 and mo.n == 0:
                total = total + c * mo.k
        elif g == "e":
            if mo.m == 1 and mo.n == 0:
                total = total + c * p.spow(-mo.k) * (-p.qpow(-1))
        else:  # f
            if mo.m == 0 and mo.n == 1:
                total = total + c * p.spow(-mo.k)
    return total


# -- label-shift engines -------------------------------------------------------

def act_partial(g: str, v: UVector) -> UVector:
    """Left-coaction leg: a column shift with explicit scalars."""
    p = v.param
    _check_tag(g, p)
    out: Dict[UIndex, Scalar] = {}
    for (n, i, j), c in v.terms.items():
        if g in ("k", "k_inv"):
            e = (2 * j - n) if g == "k" else (n - 2 * j)
            tgt, cc = UIndex(n, i, j), c * p.spow(e)
        elif g == "h":
            tgt, cc = UIndex(n, i, j), c * (2 * j - n)
        elif g == "e":
            if j == 0:
                continue
            tgt, cc = UIndex(n, i, j - 1), c * pairing("e", UIndex(n, j - 1, j), p)
        else:  # f
            if j == n:
                continue
            tgt, cc = UIndex(n, i, j + 1), c * pairing("f", UIndex(n, j + 1, j), p)
        if cc != 0:
            out[tgt] = out.get(tgt, 0) + cc
    return UVector(p, out)


def act_delta(g: str, v: UVector) -> UVector:
    """Right-coaction leg: a row shift with explicit scalars."""
    p = v.param
    _check_tag(g, p)
    out: Dict[UIndex, Scalar] = {}
    for (n, i, j), c in v.terms.items():
        if g in ("k", "k_inv"):
            e = (2 * i - n) if g == "k" else (n - 2 * i)
            tgt, cc = UIndex(n, i, j), c * p.spow(e)
        elif g == "h":
            tgt, cc = UIndex(n, i, j), c * (2 * i - n)
        elif g == "e":
            if i == n:
                continue
            tgt, cc = UIndex(n, i + 1, j), c * pairing("e", UIndex(n, i, i + 1), p)
        else:  # f
            if i == 0:
                continue
            tgt, cc = UIndex(n, i - 1, j), c * pairing("f", UIndex(n, i, i - 1), p)
        if cc != 0:
            out[tgt] = out.get(tgt, 0) + cc
    return UVector(p, out)


# -- normal-form engines --------------------------------------------------------

def _gen_value_partial(p: QParam, g: str, letter: str) -> AlgebraElement | None:
    if g == "e":
        if letter == "a":
            return gen(p, "b*")
        if letter == "b":
            return (-p.qpow(-1)) * gen(p, "a*")
        return None
    if g == "f":
        if letter == "a*":
            return (-p.qpow(1)) * gen(p, "b")
        if letter == "b*":
            return gen(p, "a")
        return None
    raise ValueError(g)


def _gen_value_delta(p: QParam, g: str, letter: str) -> AlgebraElement | None:
    if g == "e":
        if letter == "a*":
            return gen(p, "b*")
        if letter == "b":
            return (-p.qpow(-1)) * gen(p, "a")
        return None
    if g == "f":
        if letter == "a":
            return (-p.qpow(1)) * gen(p, "b")
        if letter == "b*":
            return gen(p, "a*")
        return None
    raise ValueError(g)


def _mono_word(mo: Monomial):
    if mo.k > 0:
        yield from ("a",) * mo.k
    elif mo.k < 0:
        yield from ("a*",) * (-mo.k)
    yield from ("b",) * mo.m
    yield from ("b*",) * mo.n


_FOLD_CACHE: dict = {}


def _twisted_fold(p: QParam, mo: Monomial, g: str, side: str) -> AlgebraElement:
    """d(g1 ... gL) via d(w g) = d(w) k(g) + k^(-1)(w) d(g), along the word."""
    key = (p, mo, g, side)
    hit = _FOLD_CACHE.get(key)
    if hit is not None:
        return hit
    kexp = _LEFT_EXP if side == "partial" else _RIGHT_EXP
    value = _gen_value_partial if side == "partial" else _gen_value_delta
    d = zero(p)
    prefix = one(p)
    kinv: Scalar = p.one()
    for letter in _mono_word(mo):
        d = p.spow(kexp[letter]) * multiply(d, gen(p, letter))
        dg = value(p, g, letter)
        if dg is not None:
            d = d + kinv * multiply(prefix, dg)
        prefix = multiply(prefix, gen(p, letter))
        kinv = kinv * p.spow(-kexp[letter])
    _FOLD_CACHE[key] = d
    return d


def _diagonal_action(x: AlgebraElement, exp_table, power_sign: int) -> AlgebraElement:
    p = x.param
    out = {}
    for mo, c in x.terms.items():
        e = mo.k * exp_table["a"] + mo.m * exp_table["b"] + mo.n * exp_table["b*"]
        out[mo] = c * p.spow(power_sign * e) if e else c
    return AlgebraElement(p, out, prune=False)


def act_partial_pbw(g: str, x: AlgebraElement) -> AlgebraElement:
    """Left-coaction leg on normal-form elements (twisted Leibniz engine)."""
    p = x.param
    _check_tag(g, p)
    if g == "k":
        return _diagonal_action(x, _LEFT_EXP, 1)
    if g == "k_inv":
        return _diagonal_action(x, _LEFT_EXP, -1)
    if g == "h":
        out = {}
        for mo, c in x.terms.items():
            w = mo.k * _LEFT_H["a"] + mo.m * _LEFT_H["b"] + mo.n * _LEFT_H["b*"]
            if w:
                out[mo] = c * w
        return AlgebraElement(p, out, prune=False)
    acc = zero(p)
    for mo, c in x.terms.items():
        acc = acc + c * _twisted_fold(p, mo, g, "partial")
    return acc


def act_delta_pbw(g: str, x: AlgebraElement) -> AlgebraElement:
    """Right-coaction leg on normal-form elements (twisted Leibniz engine)."""
    p = x.param
    _check_tag(g, p)
    if g == "k":
        return _diagonal_action(x, _RIGHT_EXP, 1)
    if g == "k_inv":
        return _diagonal_action(x, _RIGHT_EXP, -1)
    if g == "h":
        out = {}
        for mo, c in x.terms.items():
            w = mo.k * _RIGHT_H["a"] + mo.m * _RIGHT_H["b"] + mo.n * _RIGHT_H["b*"]
            if w:
                out[mo] = c * w
        return AlgebraElement(p, out, prune=False)
    acc = zero(p)
    for mo, c in x.terms.items():
        acc = acc + c * _twisted_fold(p, mo, g, "delta")
    return acc


def tau(x: AlgebraElement) -> AlgebraElement:
    """The automorphism composing the two k-actions; b y = tau(y) b."""
    p = x.param
    out = {}
    for mo, c in x.terms.items():
        out[mo] = c * p.qpow(mo.k) if mo.k else c
    return AlgebraElement(p, out, prune=False)


def twisted_commutator(y: AlgebraElement, x: AlgebraElement,
                       theta: Callable[[AlgebraElement], AlgebraElement]) -> AlgebraElement:
    """[y, x]_theta = y x - theta(x) y."""
    return multiply(y, x) - multiply(theta(x), y)


# -- derivation matrices ---------------------------------------------------------

@dataclass
class DerivationMatrix:
    """2x2 matrix over the coordinate algebra.

    form is "partial" for the off-diagonal assembly [[0, d2], [d1, 0]],
    "delta" for [[-d3, d2], [d1, d3]], "generic" otherwise.
    """

    entries: Tuple[Tuple[AlgebraElement, AlgebraElement],
                   Tuple[AlgebraElement, AlgebraElement]]
    form: str = "generic"

    @property
    def param(self) -> QParam:
        return self.entries[0][0].param

    def diff(self, other: "DerivationMatrix") -> float:
        return max(max_coeff_diff(self.entries[r][c], other.entries[r][c])
                   for r in range(2) for c in range(2))

    def scaled(self, c: Scalar) -> "DerivationMatrix":
        e = self.entries
        return DerivationMatrix(((c * e[0][0], c * e[0][1]),
                                 (c * e[1][0], c * e[1][1])))


def mat2_mul(A, B) -> tuple:
    return tuple(
        tuple(multiply(A[r][0], B[0][c]) + multiply(A[r][1], B[1][c]) for c in range(2))
        for r in range(2))


def mat2_scalar_right(A, y: AlgebraElement) -> tuple:
    return tuple(tuple(multiply(A[r][c], y) for c in range(2)) for r in range(2))


def mat2_scalar_left(y: AlgebraElement, A) -> tuple:
    return tuple(tuple(multiply(y, A[r][c]) for c in range(2)) for r in range(2))


def fundamental_u(p: QParam) -> tuple:
    """The fundamental corepresentation unitary [[a*, -q b], [b*, a]]."""
    return ((gen(p, "a*"), (-p.qpow(1)) * gen(p, "b")),
            (gen(p, "b*"), gen(p, "a")))


def fundamental_u_star(p: QParam) -> tuple:
    u = fundamental_u(p)
    return ((adjoint(u[0][0]), adjoint(u[1][0])),
            (adjoint(u[0][1]), adjoint(u[1][1])))


def _coerce_element(x) -> AlgebraElement:
    if isinstance(x, UVector):
        return to_element(x)
    return x


def partial_matrix(x) -> DerivationMatrix:
    """Off-diagonal derivation matrix [[0, d2 x], [d1 x, 0]].

    Sign and scale conventions: d1 = q^(1/2) partial_e, d2 = q^(-1/2)
    partial_f.  Only defined on the Podles subalgebra.
    """
    x = _coerce_element(x)
    p = x.param
    if not is_podles(x):
        raise ValueError("partial_matrix requires an element of the Podles sphere")
    d1 = p.spow(1) * act_partial_pbw("e", x)
    d2 = p.spow(-1) * act_partial_pbw("f", x)
    z = zero(p)
    return DerivationMatrix(((z, d2), (d1, z)), form="partial")


def delta3(x: AlgebraElement) -> AlgebraElement:
    """Diagonal twisted derivation from the k-family.

    (delta_k - delta_k^(-1)) / (q - q^(-1)) for q < 1; half the h-action at
    q = 1.  Diagonal on monomials: the eigenvalue depends only on the right
    circle-action weight r, through (q^(r/2) - q^(-r/2)) / (q - q^(-1)).
    """
    p = x.param
    out = {}
    if p.is_classical:
        for mo, c in x.terms.items():
            r = mo.k - mo.m + mo.n
            if r:
                half = Fraction(r, 2) if p.is_exact else r / 2.0
                out[mo] = c * half
        return AlgebraElement(p, out, prune=False)
    den = p.qpow(1) - p.qpow(-1)
    for mo, c in x.terms.items():
        r = mo.k - mo.m + mo.n
        if r:
            out[mo] = c * ((p.spow(r) - p.spow(-r)) / den)
    return AlgebraElement(p, out, prune=False)


def delta_matrix(x) -> DerivationMatrix:
    """Conjugated-form derivation matrix [[-d3 x, d2 x], [d1 x, d3 x]].

    Here d1 = q^(1/2) delta_e, d2 = q^(-1/2) delta_f, and d3 is the
    diagonal twisted derivation of :func:`delta3`.
    """
    x = _coerce_element(x)
    p = x.param
    if not is_podles(x):
        raise ValueError("delta_matrix requires an element of the Podles sphere")
    d1 = p.spow(1) * act_delta_pbw("e", x)
    d2 = p.spow(-1) * act_delta_pbw("f", x)
    d3 = delta3(x)
    return DerivationMatrix(((-d3, d2), (d1, d3)), form="delta")


def conjugate_by_u(M: DerivationMatrix) -> DerivationMatrix:
    """u M u* with the fundamental unitary, entrywise in normal form."""
    p = M.param
    out = mat2_mul(mat2_mul(fundamental_u(p), M.entries), fundamental_u_star(p))
    return DerivationMatrix(out, form="generic")
