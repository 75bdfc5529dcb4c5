"""Irreducible corepresentation matrix coefficients of quantum SU(2).

The entries u^n_(ij), 0 <= i, j <= n, form an orthogonal basis of the GNS
space of the Haar state with squared norms q^(2(n-i)) / <n+1>.  Left
multiplication by the four algebra generators acts on the labels (n, i, j)
by an explicit two-term rule (one term raising n, one lowering it); the
same rule, read backwards, synthesises each u^(n+1) entry in normal form
from the level-n matrix.  The convention u^n_(ij) = 0 for out-of-range
labels is handled by returning zero contributions, never stored indices.
"""

from __future__ import annotations

import math
from typing import Dict, List, NamedTuple, Tuple

from .qscalar import QParam, Scalar, bracket, cabs, conj, sqrt_scalar
from .pbw import (AlgebraElement, Monomial, adjoint, bidegree_components, degree,
                  element, gen, haar, inner, mono_bidegree, multiply, one, zero)

MAX_DEGREE = 40


class UIndex(NamedTuple):
    n: int
    i: int
    j: int


def valid_index(idx: UIndex) -> bool:
    return idx.n >= 0 and 0 <= idx.i <= idx.n and 0 <= idx.j <= idx.n


class UVector:
    """Finite linear combination of Peter-Weyl labels."""

    __slots__ = ("param", "terms")

    def __init__(self, param: QParam, terms: Dict[UIndex, Scalar] | None = None):
        self.param = param
        tt = {}
        for idx, c in (terms or {}).items():
            idx = UIndex(*idx)
            if not valid_index(idx):
                raise ValueError(f"label {idx} out of range")
            if c != 0:
                tt[idx] = c
        self.terms = tt

    def coeff(self, idx) -> Scalar:
        return self.terms.get(UIndex(*idx), 0)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "UVector") -> "UVector":
        if self.param != other.param:
            raise ValueError("parameter mismatch")
        out = dict(self.terms)
        for idx, c in other.terms.items():
            out[idx] = out.get(idx, 0) + c
        return UVector(self.param, out)

    def __sub__(self, other: "UVector") -> "UVector":
        return self + other.scaled(-1)

    def scaled(self, c: Scalar) -> "UVector":
        return UVector(self.param, {idx: c * cc for idx, cc in self.terms.items()})

    def __repr__(self):
        bits = [f"({c})·u[{i.n},{i.i},{i.j}]" for i, c in sorted(self.terms.items())]
        return " + ".join(bits) if bits else "0"


def basis_vector(p: QParam, n: int, i: int, j: int) -> UVector:
    return UVector(p, {UIndex(n, i, j): 1.0})


def uvector_diff(v: UVector, w: UVector) -> float:
    keys = set(v.terms) | set(w.terms)
    return max((cabs(v.coeff(k) - w.coeff(k)) for k in keys), default=0.0)


class TensorPairSum:
    """Linear combination of ordered pairs of labels (image of the coproduct)."""

    __slots__ = ("param", "terms")

    def __init__(self, param: QParam, terms: Dict[Tuple[UIndex, UIndex], Scalar] | None = None):
        self.param = param
        self.terms = {k: c for k, c in (terms or {}).items() if c != 0}

    def coeff(self, pair) -> Scalar:
        return self.terms.get(pair, 0)

    def diff(self, other: "TensorPairSum") -> float:
        keys = set(self.terms) | set(other.terms)
        return max((cabs(self.coeff(k) - other.coeff(k)) for k in keys), default=0.0)


# -- left multiplication rule ----------------------------------------------

def left_mult_terms(p: QParam, g: str, idx: UIndex) -> List[Tuple[UIndex, Scalar]]:
    """Labels and coefficients of (generator g) * u^n_(ij).

    Each generator contributes one level-(n+1) and one level-(n-1) term;
    out-of-range labels are dropped (their coefficient vanishes anyway
    because <0> = 0).  Coefficients are produced in the parameter's scalar
    mode.
    """
    n, i, j = idx
    br = lambda t: bracket(t, p)
    rt = lambda x: sqrt_scalar(x, p)
    inv = 1 / br(n + 1)
    out: List[Tuple[UIndex, Scalar]] = []

    def put(n2, i2, j2, c):
        if c != 0 and n2 >= 0 and 0 <= i2 <= n2 and 0 <= j2 <= n2:
            out.append((UIndex(n2, i2, j2), c))

    if g == "a*":
        put(n + 1, i, j, p.qpow(i + j) * rt(br(n - i + 1) * br(n - j + 1)) * inv)
        put(n - 1, i - 1, j - 1, rt(br(i) * br(j)) * inv)
    elif g == "b*":
        put(n + 1, i + 1, j, p.qpow(j) * rt(br(i + 1) * br(n - j + 1)) * inv)
        put(n - 1, i, j - 1, -p.qpow(i + 1) * rt(br(n - i) * br(j)) * inv)
    elif g == "a":
        put(n + 1, i + 1, j + 1, rt(br(i + 1) * br(j + 1)) * inv)
        put(n - 1, i, j, p.qpow(i + j + 2) * rt(br(n - i) * br(n - j)) * inv)
    elif g == "b":
        put(n + 1, i, j + 1, -p.qpow(i - 1) * rt(br(j + 1) * br(n - i + 1)) * inv)
        put(n - 1, i - 1, j, p.qpow(j) * rt(br(n - j) * br(i)) * inv)
    else:
        raise ValueError(f"unknown generator {g!r}")
    return out


def left_mult_generator(g: str, v: UVector, max_degree: int = MAX_DEGREE) -> UVector:
    """Left multiplication of a generator in Peter-Weyl coordinates."""
    p = v.param
    out: Dict[UIndex, Scalar] = {}
    for idx, c in v.terms.items():
        if idx.n + 1 > max_degree:
            raise ValueError(f"degree {idx.n + 1} exceeds the configured maximum {max_degree}")
        for tgt, cc in left_mult_terms(p, g, idx):
            out[tgt] = out.get(tgt, 0) + c * cc
    return UVector(p, out)


# -- synthesis of the corepresentation matrices ------------------------------

_U_CACHE: dict = {}
_UNITARITY_CACHE: dict = {}

# route preference on coefficient ties: a*, b*, a, b
_ROUTE_ORDER = {"a*": 0, "b*": 1, "a": 2, "b": 3}


def _build_level(p: QParam, L: int, prev, prev2):
    """Entries of u^L from u^(L-1) (and corrections from u^(L-2)).

    For every target entry the inversion route with the largest leading
    coefficient is chosen (dividing by the largest coefficient bounds the
    float error growth); ties prefer a*.
    """
    n = L - 1
    br = lambda t: bracket(t, p)
    rt = lambda x: sqrt_scalar(x, p)
    inv = 1 / br(n + 1)
    out = [[None] * (L + 1) for _ in range(L + 1)]
    for I in range(L + 1):
        for J in range(L + 1):
            cands = []
            if I <= n and J <= n:
                lead = p.qpow(I + J) * rt(br(n - I + 1) * br(n - J + 1)) * inv
                corr = rt(br(I) * br(J)) * inv
                cands.append((abs(lead), "a*", (I, J), lead, corr))
            if I >= 1 and J <= n:
                lead = p.qpow(J) * rt(br(I) * br(n - J + 1)) * inv
                corr = -p.qpow(I) * rt(br(n - I + 1) * br(J)) * inv
                cands.append((abs(lead), "b*", (I - 1, J), lead, corr))
            if I >= 1 and J >= 1:
                lead = rt(br(I) * br(J)) * inv
                corr = p.qpow(I + J) * rt(br(n - I + 1) * br(n - J + 1)) * inv
                cands.append((abs(lead), "a", (I - 1, J - 1), lead, corr))
            if I <= n and J >= 1:
                lead = -p.qpow(I - 1) * rt(br(J) * br(n - I + 1)) * inv
                corr = p.qpow(J - 1) * rt(br(n - J + 1) * br(I)) * inv
                cands.append((abs(lead), "b", (I, J - 1), lead, corr))
            mag, gname, (si, sj), lead, corr = max(
                cands, key=lambda t: (float(t[0]), -_ROUTE_ORDER[t[1]]))
            num = multiply(gen(p, gname), prev[si][sj])
            if corr != 0 and 1 <= I <= n and 1 <= J <= n:
                num = num - corr * prev2[I - 1][J - 1]
            out[I][J] = (1 / lead) * num
    return out


def generate_u(n: int, p: QParam, max_degree: int = MAX_DEGREE):
    """The (n+1) x (n+1) matrix of u^n entries in normal form."""
    if n < 0:
        raise ValueError("corepresentation degree must be nonnegative")
    if n > max_degree:
        raise ValueError(f"degree {n} exceeds the configured maximum {max_degree}")
    if p.is_exact:
        p.note_downgrade("Peter-Weyl coefficients contain square roots of q-brackets")
    key = (p, n)
    hit = _U_CACHE.get(key)
    if hit is not None:
        return hit
    if n == 0:
        mat = [[one(p)]]
    else:
        prev = generate_u(n - 1, p, max_degree)
        prev2 = generate_u(n - 2, p, max_degree) if n >= 2 else None
        mat = _build_level(p, n, prev, prev2)
    _U_CACHE[key] = mat
    return mat


def u_entry(p: QParam, n: int, i: int, j: int, max_degree: int = MAX_DEGREE) -> AlgebraElement:
    """u^n_(ij) in normal form; the zero element for out-of-range labels."""
    if n < 0 or not (0 <= i <= n and 0 <= j <= n):
        return zero(p)
    return generate_u(n, p, max_degree)[i][j]


def unitarity_residual(n: int, p: QParam) -> float:
    """Largest coefficient residual of u* u - 1 at level n (quality diagnostic)."""
    key = (p, n)
    hit = _UNITARITY_CACHE.get(key)
    if hit is not None:
        return hit
    mat = generate_u(n, p)
    resid = 0.0
    for i in range(n + 1):
        for j in range(i, n + 1):
            acc = zero(p)
            for k in range(n + 1):
                acc = acc + multiply(adjoint(mat[k][i]), mat[k][j])
            if i == j:
                acc = acc - one(p)
            resid = max(resid, max((cabs(c) for c in acc.terms.values()), default=0.0))
    _UNITARITY_CACHE[key] = resid
    return resid


_U_MIDDLE_CACHE: dict = {}


def u_middle(p: QParam, m: int) -> AlgebraElement:
    """The central entry u^(2m)_(mm); a polynomial in A = b b*.

    Built by the diagonal restriction of the same inversion rule (the
    a-route recursion u^(n)_(tt) -> u^(n+1)_(t+1,t+1) stays on the
    diagonal), where every coefficient is rational: exact mode survives.
    Cross-checked against the full matrices in the tests.
    """
    key = (p, m)
    hit = _U_MIDDLE_CACHE.get(key)
    if hit is not None:
        return hit
    # table[n][t] = u^n_(tt) for t <= min(n, m)
    table: List[List[AlgebraElement]] = []
    astar = gen(p, "a*")
    a = gen(p, "a")
    for n in range(2 * m + 1):
        row: List[AlgebraElement] = []
        tmax = min(n, m)
        for t in range(tmax + 1):
            if t == 0:
                entry = element(p, {(-n, 0, 0): p.one()})
            else:
                # u^n_(tt) = (a · u^(n-1)_(t-1,t-1) - corr · u^(n-2)_(t-1,t-1)) / lead
                lead = bracket(t, p) / bracket(n, p)
                num = multiply(a, table[n - 1][t - 1])
                if t <= n - 1:
                    corr = p.qpow(2 * t) * bracket(n - t, p) / bracket(n, p)
                    num = num - corr * table[n - 2][t - 1]
                entry = (1 / lead) * num
            row.append(entry)
        table.append(row)
    result = table[2 * m][m]
    _U_MIDDLE_CACHE[key] = result
    return result


# -- coordinates --------------------------------------------------------------

def l2_norm_sq(idx: UIndex, p: QParam) -> Scalar:
    """Squared GNS norm of u^n_(ij): q^(2(n-i)) / <n+1>."""
    idx = UIndex(*idx)
    if not valid_index(idx):
        raise ValueError(f"label {idx} out of range")
    return p.qpow(2 * (idx.n - idx.i)) / bracket(idx.n + 1, p)


def to_element(v: UVector, max_degree: int = MAX_DEGREE) -> AlgebraElement:
    """Assemble the normal-form element of a Peter-Weyl combination."""
    p = v.param
    acc = zero(p)
    for idx, c in v.terms.items():
        acc = acc + c * u_entry(p, idx.n, idx.i, idx.j, max_degree)
    return acc


def expand(x: AlgebraElement, nmax: int, max_degree: int = MAX_DEGREE) -> Tuple[UVector, float]:
    """Fourier coefficients of x against the orthogonal basis, up to level nmax.

    The coefficient at (n, i, j) is h(u^n_(ij)* x) <n+1> / q^(2(n-i)).
    Candidate labels are enumerated through the bidegrees of x: a label can
    contribute only when (2j - n, 2i - n) matches a bidegree present in x,
    which pins (i, j) for each n.  The returned residual is the L2 norm of
    x minus its truncation; it vanishes for polynomials of generator degree
    at most nmax.
    """
    if nmax > max_degree:
        raise ValueError(f"nmax {nmax} exceeds the configured maximum {max_degree}")
    p = x.param
    coeffs: Dict[UIndex, Scalar] = {}
    # a degree-d element has no components above level d
    nlimit = min(nmax, degree(x))
    for bd, comp in bidegree_components(x).items():
        l, r = bd.left, bd.right
        if (l - r) % 2 != 0:
            continue
        n0 = max(abs(l), abs(r))
        if (n0 + l) % 2 != 0:
            n0 += 1
        for n in range(n0, nlimit + 1, 2):
            i = (n + r) // 2
            j = (n + l) // 2
            if not (0 <= i <= n and 0 <= j <= n):
                continue
            u_ij = u_entry(p, n, i, j, max_degree)
            raw = haar(multiply(adjoint(u_ij), comp))
            c = raw / l2_norm_sq(UIndex(n, i, j), p)
            if c != 0:
                coeffs[UIndex(n, i, j)] = c
    vec = UVector(p, coeffs)
    # residual = L2 norm of x minus its truncation, computed on the normal-form
    # difference; coefficients below the float noise floor of the subtraction
    # are zeroed so that polynomial inputs report an exact 0
    rest = x - to_element(vec, max_degree)
    scale = max((cabs(c) for c in x.terms.values()), default=0.0)
    floor = 64 * p.prune_rel * max(scale, 1.0)
    cleaned = {mo: c for mo, c in rest.terms.items() if cabs(c) > floor}
    if not cleaned:
        return vec, 0.0
    rr = AlgebraElement(p, cleaned, prune=False)
    resid_sq = float(complex(inner(rr, rr)).real)
    return vec, math.sqrt(max(resid_sq, 0.0))


def adjoint_uvector(v: UVector) -> UVector:
    """The involution in Peter-Weyl coordinates.

    Label-local: (u^n_(ij))* = (-q)^(j-i) u^n_(n-i, n-j), so the involution
    conjugates coefficients and reflects labels through the antidiagonal.
    Validated against the normal-form involution in the tests.
    """
    p = v.param
    out: Dict[UIndex, Scalar] = {}
    for (n, i, j), c in v.terms.items():
        fac = (-1) ** ((j - i) % 2) * p.qpow(j - i)
        out[UIndex(n, n - i, n - j)] = conj(c) * fac
    return UVector(p, out)


def coproduct(idx: UIndex, p: QParam) -> TensorPairSum:
    """Matrix-corepresentation coproduct: sum over l of (n,i,l) x (n,l,j)."""
    idx = UIndex(*idx)
    if not valid_index(idx):
        raise ValueError(f"label {idx} out of range")
    terms = {(UIndex(idx.n, idx.i, l), UIndex(idx.n, l, idx.j)): 1.0
             for l in range(idx.n + 1)}
    return TensorPairSum(p, terms)
