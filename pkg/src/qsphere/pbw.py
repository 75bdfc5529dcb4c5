"""Normal-form arithmetic in the quantum SU(2) coordinate algebra.

Basis monomials are a^k b^m (b*)^n with k in Z (k < 0 encoding (a*)^(-k))
and m, n >= 0; this normal order makes the monomials a vector-space basis.
Rewriting to normal order uses the defining relations

    b a  = q a b          b a*  = q^(-1) a* b
    b* a = q a b*         b* a* = q^(-1) a* b*
    b b* = b* b
    a a* = 1 - b b*       a* a  = 1 - q^2 b b*

Opposite-sign powers of a expand recursively through the last two
relations.  Writing A = b b*, the two expansions are the operator products

    a^k (a*)^h  : multiply by (1 - q^(-2(h-1)) R_A) and recurse on (k-1, h-1)
    (a*)^h a^k  : multiply by (1 - q^(2k) R_A) and recurse on (h-1, k-1)

where R_A appends one factor of A.  Both are memoised per parameter since
they sit in the hot path of every state evaluation.  Note the asymmetry:
the (a*)^h a^k expansion has coefficients bounded uniformly in the
exponents, while a^k (a*)^h grows like q^(-k(k-1)) and is only safe in
float mode for small exponents.
"""

from __future__ import annotations

import json
from typing import Dict, Iterable, NamedTuple

from .qscalar import QParam, Scalar, cabs, conj


class Monomial(NamedTuple):
    k: int  # signed power of a (negative = power of a*)
    m: int  # power of b
    n: int  # power of b*


class Bidegree(NamedTuple):
    left: int
    right: int


MONO_ONE = Monomial(0, 0, 0)

# float-mode coefficient pruning threshold, relative to the largest magnitude
PRUNE_REL = 1e-14


class AlgebraElement:
    """Finite linear combination of normal-form monomials.

    Immutable by convention: no method mutates ``terms`` after
    construction, and callers must not either.
    """

    __slots__ = ("param", "terms")

    def __init__(self, param: QParam, terms: Dict[Monomial, Scalar] | None = None,
                 prune: bool = True):
        self.param = param
        tt = {mo: c for mo, c in (terms or {}).items() if c != 0}
        if prune and not param.is_exact and tt:
            mx = max(cabs(c) for c in tt.values())
            if mx == 0.0:
                tt = {}
            else:
                cut = param.prune_rel * mx
                tt = {mo: c for mo, c in tt.items() if cabs(c) > cut}
        self.terms = tt

    # -- basic structure ------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def coeff(self, mono: Monomial) -> Scalar:
        return self.terms.get(mono, 0)

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        _check_params(self, other)
        out = dict(self.terms)
        for mo, c in other.terms.items():
            out[mo] = out.get(mo, 0) + c
        return AlgebraElement(self.param, out)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        _check_params(self, other)
        out = dict(self.terms)
        for mo, c in other.terms.items():
            out[mo] = out.get(mo, 0) - c
        return AlgebraElement(self.param, out)

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(self.param, {mo: -c for mo, c in self.terms.items()},
                              prune=False)

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return multiply(self, other)
        return self.scaled(other)

    def __rmul__(self, other):
        return self.scaled(other)

    def scaled(self, c: Scalar) -> "AlgebraElement":
        if c == 0:
            return AlgebraElement(self.param, {})
        return AlgebraElement(self.param,
                              {mo: c * cc for mo, cc in self.terms.items()})

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for mo, c in sorted(self.terms.items()):
            pows = []
            if mo.k > 0:
                pows.append(f"a^{mo.k}" if mo.k > 1 else "a")
            elif mo.k < 0:
                pows.append(f"a*^{-mo.k}" if mo.k < -1 else "a*")
            if mo.m:
                pows.append(f"b^{mo.m}" if mo.m > 1 else "b")
            if mo.n:
                pows.append(f"b*^{mo.n}" if mo.n > 1 else "b*")
            word = "·".join(pows) if pows else "1"
            bits.append(f"({c})·{word}")
        return " + ".join(bits)


def _check_params(x: AlgebraElement, y: AlgebraElement) -> None:
    if x.param != y.param:
        raise ValueError("algebra elements carry different deformation parameters")


# -- constructors --------------------------------------------------------

def zero(p: QParam) -> AlgebraElement:
    return AlgebraElement(p, {})


def one(p: QParam) -> AlgebraElement:
    return AlgebraElement(p, {MONO_ONE: p.one()})


def element(p: QParam, terms: Dict[tuple, Scalar]) -> AlgebraElement:
    return AlgebraElement(p, {Monomial(*mo): c for mo, c in terms.items()})


_GEN_MONO = {"a": Monomial(1, 0, 0), "a*": Monomial(-1, 0, 0),
             "b": Monomial(0, 1, 0), "b*": Monomial(0, 0, 1)}


def gen(p: QParam, name: str) -> AlgebraElement:
    """One of the four generators a, a*, b, b*."""
    try:
        mono = _GEN_MONO[name]
    except KeyError:
        raise ValueError(f"unknown generator {name!r}") from None
    return AlgebraElement(p, {mono: p.one()})


# -- multiplication -------------------------------------------------------

_A_PRODUCT_CACHE: dict = {}


def _a_product(p: QParam, k1: int, k2: int) -> Dict[Monomial, Scalar]:
    """Normal form of (signed a-power k1) * (signed a-power k2)."""
    if k1 == 0 or k2 == 0 or (k1 > 0) == (k2 > 0):
        return {Monomial(k1 + k2, 0, 0): p.one()}
    key = (p, k1, k2)
    hit = _A_PRODUCT_CACHE.get(key)
    if hit is not None:
        return hit
    if k1 > 0:
        # a^k1 (a*)^(-k2); h = -k2, factor (1 - q^(-2(h-1)) R_A)
        prev = _a_product(p, k1 - 1, k2 + 1)
        c = -p.qpow(2 * k2 + 2)
    else:
        # (a*)^(-k1) a^k2; factor (1 - q^(2 k2) R_A)
        prev = _a_product(p, k1 + 1, k2 - 1)
        c = -p.qpow(2 * k2)
    out: Dict[Monomial, Scalar] = {}
    for mo, cc in prev.items():
        out[mo] = out.get(mo, 0) + cc
        up = Monomial(mo.k, mo.m + 1, mo.n + 1)
        out[up] = out.get(up, 0) + c * cc
    _A_PRODUCT_CACHE[key] = out
    return out


def _mono_mul(p: QParam, mx: Monomial, my: Monomial) -> Dict[Monomial, Scalar]:
    # commute my's a-power left past mx's b-powers: q^(k2 (m1 + n1))
    cross = my.k * (mx.m + mx.n)
    factor = p.qpow(cross) if cross else None
    apow = _a_product(p, mx.k, my.k)
    bm, bn = mx.m + my.m, mx.n + my.n
    out: Dict[Monomial, Scalar] = {}
    for am, ac in apow.items():
        mono = Monomial(am.k, am.m + bm, am.n + bn)
        val = ac * factor if factor is not None else ac
        out[mono] = out.get(mono, 0) + val
    return out


def multiply(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    """Product in normal form."""
    _check_params(x, y)
    p = x.param
    out: Dict[Monomial, Scalar] = {}
    for mx, cx in x.terms.items():
        for my, cy in y.terms.items():
            c = cx * cy
            for mono, cc in _mono_mul(p, mx, my).items():
                out[mono] = out.get(mono, 0) + c * cc
    return AlgebraElement(p, out)


def reordered_a_product(p: QParam, k1: int, k2: int) -> AlgebraElement:
    """Normal form of (signed a-power k1) times (signed a-power k2), unpruned.

    Opposite-sign reorderings have coefficients spanning many orders of
    magnitude; the relative pruning of ordinary products would drop the
    small ones, which dominate evaluations on the spectrum of A.
    """
    return AlgebraElement(p, dict(_a_product(p, k1, k2)), prune=False)


def adjoint(x: AlgebraElement) -> AlgebraElement:
    """The involution, re-normal-ordered; conjugates coefficients.

    On a monomial: (a^k b^m (b*)^n)* = q^(-k(m+n)) a^(-k) b^n (b*)^m.
    """
    p = x.param
    out: Dict[Monomial, Scalar] = {}
    for mo, c in x.terms.items():
        exp = -mo.k * (mo.m + mo.n)
        f = p.qpow(exp) if exp else None
        tgt = Monomial(-mo.k, mo.n, mo.m)
        val = conj(c) * f if f is not None else conj(c)
        out[tgt] = out.get(tgt, 0) + val
    return AlgebraElement(p, out)


# -- Haar state and friends -----------------------------------------------

def haar(x: AlgebraElement) -> Scalar:
    """The Haar state.

    Vanishes off the bidegree-(0, 0) part; on powers of A = b b* it takes
    the value h(A^m) = 1/<m+1>.
    """
    from .qscalar import bracket
    p = x.param
    total: Scalar = 0
    for mo, c in x.terms.items():
        if mo.k == 0 and mo.m == mo.n:
            total = total + c / bracket(mo.m + 1, p)
    return total


def modular_nu(x: AlgebraElement) -> AlgebraElement:
    """Modular automorphism of the Haar state: a -> q^(-2) a, b -> b."""
    p = x.param
    out = {}
    for mo, c in x.terms.items():
        out[mo] = c * p.qpow(-2 * mo.k) if mo.k else c
    return AlgebraElement(p, out, prune=False)


def inner(x: AlgebraElement, y: AlgebraElement) -> Scalar:
    """GNS inner product h(x* y), conjugate-linear in the first slot."""
    return haar(multiply(adjoint(x), y))


# -- gradings --------------------------------------------------------------

def mono_bidegree(mo: Monomial) -> Bidegree:
    return Bidegree(mo.k + mo.m - mo.n, mo.k - mo.m + mo.n)


def bidegree_components(x: AlgebraElement) -> Dict[Bidegree, AlgebraElement]:
    """Split into homogeneous parts of the two commuting circle actions."""
    parts: Dict[Bidegree, Dict[Monomial, Scalar]] = {}
    for mo, c in x.terms.items():
        parts.setdefault(mono_bidegree(mo), {})[mo] = c
    return {bd: AlgebraElement(x.param, tt, prune=False) for bd, tt in parts.items()}


def project_phi0(x: AlgebraElement) -> AlgebraElement:
    """Average over the right circle action: keeps the right-degree-0 part.

    On the Podles subalgebra this is the conditional expectation onto the
    unital algebra generated by A.
    """
    out = {mo: c for mo, c in x.terms.items() if mo.k - mo.m + mo.n == 0}
    return AlgebraElement(x.param, out, prune=False)


def is_podles(x: AlgebraElement) -> bool:
    """True iff x is fixed by the left circle action (left degree 0)."""
    return all(mo.k + mo.m - mo.n == 0 for mo in x.terms)


def degree(x: AlgebraElement) -> int:
    """Largest generator word length over the monomials of x."""
    if not x.terms:
        return 0
    return max(abs(mo.k) + mo.m + mo.n for mo in x.terms)


def max_coeff_diff(x: AlgebraElement, y: AlgebraElement) -> float:
    """Largest coefficient discrepancy; the residual used all over the tests."""
    _check_params(x, y)
    keys = set(x.terms) | set(y.terms)
    return max((cabs(x.coeff(mo) - y.coeff(mo)) for mo in keys), default=0.0)


# -- serialization ----------------------------------------------------------

def to_json(x: AlgebraElement) -> str:
    """JSON form: {"q": real, "terms": [{"k","m","n","re","im"}, ...]}."""
    terms = []
    for mo, c in sorted(x.terms.items()):
        cc = complex(c)
        terms.append({"k": mo.k, "m": mo.m, "n": mo.n, "re": cc.real, "im": cc.imag})
    return json.dumps({"q": x.param.q, "terms": terms})


def from_json(text: str, tol: float = 1e-10) -> AlgebraElement:
    data = json.loads(text)
    p = QParam.from_q(float(data["q"]), tol=tol)
    terms: Dict[Monomial, Scalar] = {}
    for t in data["terms"]:
        c = complex(t["re"], t["im"])
        cs: Scalar = c.real if c.imag == 0.0 else c
        terms[Monomial(int(t["k"]), int(t["m"]), int(t["n"]))] = cs
    return AlgebraElement(p, terms)
