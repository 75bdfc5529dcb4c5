"""The Podles sphere, its fuzzy filtration, localised states, and the
Berezin transform.

The sphere subalgebra is generated by A = b b*, B = a b*, B* = b a*; in
Peter-Weyl coordinates it is spanned by the middle-column labels
(2m, i, m).  The degree-N state

    h_N(x) = <N+1> h((a*)^N x a^N)

converges to the counit, and the induced Berezin transform
beta_N = (1 x h_N) Delta acts diagonally on the middle-column basis,
scaling level 2m by the coefficient B(N, m) = h_N(u^(2m)_(mm)), which
vanishes for m > N.

Numerical route notes.  h_N is evaluated by sandwiching in normal form
(the "direct" route); the reordering polynomials it needs have uniformly
bounded coefficients for q < 1.  The twisted-trace rewriting
h((a*)^N x a^N) = q^(-2N) h(a^N (a*)^N x) keeps intermediate supports
smaller but the reordering of a^N (a*)^N has coefficients growing like
q^(-N(N-1)), so in float mode it is only used for small N; both routes
are cross-checked in the tests (exactly, in exact-rational mode).  At the
classical point q = 1 the direct route suffers alternating binomial
cancellation for large N, so inputs with machine-representable
coefficients are transparently lifted to exact rationals.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Sequence

from .qscalar import QParam, Scalar, bracket, cabs
from .pbw import (AlgebraElement, Monomial, adjoint, degree, element, gen,
                  haar, is_podles, multiply, one, zero)
from .peter_weyl import (UIndex, UVector, expand, to_element, u_middle,
                         valid_index)


def generators_podles(p: QParam):
    """The three sphere generators (A, B, B*) in normal form."""
    a, astar = gen(p, "a"), gen(p, "a*")
    b, bstar = gen(p, "b"), gen(p, "b*")
    A = multiply(b, bstar)
    B = multiply(a, bstar)
    Bstar = multiply(b, astar)
    return A, B, Bstar


def counit(x) -> Scalar:
    """The counit.

    On normal-form monomials: 1 on pure a-powers (either sign), 0 as soon
    as b or b* occurs.  On Peter-Weyl labels: delta_(ij).
    """
    if isinstance(x, UVector):
        return sum((c for (n, i, j), c in x.terms.items() if i == j), start=0)
    total: Scalar = 0
    for mo, c in x.terms.items():
        if mo.m == 0 and mo.n == 0:
            total = total + c
    return total


# -- the localised states -----------------------------------------------------

def _twisted_route_safe(p: QParam, N: int) -> bool:
    # reordering a^N (a*)^N in float mode has coefficients ~ q^(-N(N-1));
    # beyond ~1e12 the cancellation noise exceeds the 1e-10 cross-check
    if p.is_exact:
        return True
    if p.dps is not None:
        return N * (N - 1) * (-2.0 * math.log10(p.q) if p.q < 1 else 0.0) < p.dps - 15
    if p.is_classical:
        return N <= 16
    return N * (N - 1) * (-2.0 * math.log10(p.q)) < 10.0


def _split_real_imag(x: AlgebraElement):
    re = {}
    im = {}
    for mo, c in x.terms.items():
        cc = complex(c)
        if cc.real != 0.0:
            re[mo] = cc.real
        if cc.imag != 0.0:
            im[mo] = cc.imag
    return re, im


def state_hN(N: int, x: AlgebraElement, route: str = "auto") -> Scalar:
    """The degree-N state <N+1> h((a*)^N x a^N)."""
    if N < 0:
        raise ValueError("the state degree must be nonnegative")
    p = x.param
    if route == "auto":
        if p.is_classical and not p.is_exact and p.dps is None and N > 16:
            # exact dyadic lift sidesteps the alternating binomial
            # cancellation of the classical-point reordering polynomials
            pe = QParam.exact(1)
            re, im = _split_real_imag(x)
            lift = lambda tt: AlgebraElement(
                pe, {mo: Fraction(c) for mo, c in tt.items()}, prune=False)
            val = float(state_hN(N, lift(re), route="direct"))
            if im:
                val = complex(val, float(state_hN(N, lift(im), route="direct")))
            return val
        route = "direct"
    brN = bracket(N + 1, p)
    if route == "direct":
        left = element(p, {(-N, 0, 0): p.one()})
        right = element(p, {(N, 0, 0): p.one()})
        return brN * haar(multiply(multiply(left, x), right))
    if route == "twisted":
        # h((a*)^N x a^N) = q^(-2N) h(a^N (a*)^N x) by the twisted trace
        aN = element(p, {(N, 0, 0): p.one()})
        asN = element(p, {(-N, 0, 0): p.one()})
        poly = multiply(aN, asN)
        return brN * p.qpow(-2 * N) * haar(multiply(poly, x))
    raise ValueError(f"unknown route {route!r}")


# -- Berezin coefficients -------------------------------------------------------

@dataclass(frozen=True)
class BerezinCoefficients:
    """Diagonal coefficients B(N, m), m = 0..N, of the degree-N transform."""

    q: float
    N: int
    values: tuple

    def to_json(self) -> str:
        return json.dumps({"q": self.q, "N": self.N, "B": list(self.values)})

    @classmethod
    def from_json(cls, text: str) -> "BerezinCoefficients":
        d = json.loads(text)
        return cls(q=float(d["q"]), N=int(d["N"]), values=tuple(float(v) for v in d["B"]))


_BEREZIN_CACHE: dict = {}


def berezin_coeff(N: int, m: int, p: QParam) -> float:
    """B(N, m) = h_N(u^(2m)_(mm)); exactly 0 for m > N, 1 at m = 0."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    if m > N:
        return 0.0
    return berezin_coefficients(N, p).values[m]


def _berezin_work_param(p: QParam, N: int) -> QParam:
    """Working parameter for the coefficient table.

    The middle entries u^(2m)_(mm) have normal-form coefficients growing
    like q^(-m^2); evaluating the state on them cancels back down to a
    value in [0, 1], so the working precision must absorb that growth.
    Everything involved is rational in q, which makes the lift exact in
    character: at q = 1 exact rationals are used, otherwise an
    extended-precision twin of the same q.
    """
    if p.is_exact or p.dps is not None:
        return p
    if p.is_classical:
        return QParam.exact(1)
    digits = N * N * (-math.log10(p.q)) + 35.0
    if digits <= 15.0:
        return p
    return QParam.from_q(p.q, tol=p.tol, dps=int(math.ceil(digits)))


def berezin_coefficients(N: int, p: QParam) -> BerezinCoefficients:
    key = (p, N)
    hit = _BEREZIN_CACHE.get(key)
    if hit is not None:
        return hit
    work = _berezin_work_param(p, N)
    vals = []
    for m in range(N + 1):
        v = state_hN(N, u_middle(work, m))
        cv = complex(v)
        if abs(cv.imag) > 1e-9 * max(1.0, abs(cv.real)):
            raise ArithmeticError(f"Berezin coefficient B({N},{m}) came out non-real: {cv}")
        vals.append(float(cv.real))
    result = BerezinCoefficients(q=p.q, N=N, values=tuple(vals))
    _BEREZIN_CACHE[key] = result
    return result


# -- the transform ----------------------------------------------------------------

def _podles_label(idx: UIndex) -> int:
    """The m with idx = (2m, i, m); raises off the sphere support."""
    n, i, j = idx
    if n != 2 * j:
        raise ValueError(f"label {idx} lies outside the Podles sphere span")
    return j


def berezin(N: int, v: UVector) -> UVector:
    """Degree-N Berezin transform, diagonal on the middle-column basis."""
    if v.is_zero():
        return v
    p = v.param
    coeffs = berezin_coefficients(N, p).values
    out: Dict[UIndex, Scalar] = {}
    for idx, c in v.terms.items():
        m = _podles_label(idx)
        if m <= N:
            cc = c * coeffs[m]
            if cc != 0:
                out[idx] = cc
    return UVector(p, out)


def definitional_berezin(N: int, v: UVector) -> UVector:
    """Slow validation path: apply the state to the right coproduct leg.

    beta_N(u^n_(ij)) = sum_l u^n_(il) h_N(u^n_(lj)), evaluated entry by
    entry through the normal-form engine.
    """
    p = v.param
    from .peter_weyl import u_entry
    out: Dict[UIndex, Scalar] = {}
    for idx, c in v.terms.items():
        _podles_label(idx)
        n = idx.n
        for l in range(n + 1):
            w = state_hN(N, u_entry(p, n, l, idx.j))
            if w != 0:
                tgt = UIndex(n, idx.i, l)
                out[tgt] = out.get(tgt, 0) + c * w
    return UVector(p, out)


def berezin_element(N: int, x: AlgebraElement) -> AlgebraElement:
    """Berezin transform of a normal-form sphere element (expand, scale, assemble).

    The expansion roundtrip is float-noisy at strong deformation (the
    Fourier division amplifies by the inverse squared basis norms); the
    sanity guard is therefore scaled by the coefficient magnitude of the
    input.  Noise-free transforms of specific elements are available by
    working in Peter-Weyl coordinates directly.
    """
    if not is_podles(x):
        raise ValueError("the Berezin transform acts on the Podles sphere")
    if x.is_zero():
        return x
    v, resid = expand(x, degree(x))
    scale = math.sqrt(sum(cabs(c) ** 2 for c in x.terms.values()))
    if resid > 1e-6 * max(1.0, scale):
        raise ArithmeticError(f"nonzero expansion residual {resid} on a polynomial input")
    return to_element(berezin(N, v))


# -- the fuzzy filtration -----------------------------------------------------------

@dataclass(frozen=True)
class FuzzyBasis:
    """Middle-column labels (2m, i, m), m <= N, i <= 2m, in (m, i) order."""

    N: int
    labels: tuple

    def __len__(self):
        return len(self.labels)


def fuzzy_basis(N: int) -> FuzzyBasis:
    if N < 0:
        raise ValueError("fuzzy degree must be nonnegative")
    labels = tuple(UIndex(2 * m, i, m) for m in range(N + 1) for i in range(2 * m + 1))
    return FuzzyBasis(N=N, labels=labels)
