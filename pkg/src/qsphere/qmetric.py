"""Metric machinery: operator-norm estimation, Lip-norms, the spectrum
metric, and the computable distance bounds.

Norm semantics.  All operator norms are estimated from below by
compressing left multiplication to the span of the Peter-Weyl basis up to
a truncation degree and taking the largest singular value of the resulting
(orthonormalised) matrix.  These are exact lower bounds of the C*-norm at
every truncation level, monotone nondecreasing in the level; there is no
rigorous upper-bound machinery, and inequality checks between two
estimated norms therefore carry convergence flags plus a small slack.

Distance bounds.  The state-space distance between the degree-N state and
the counit, restricted to the commutative subalgebra generated by A, is
bounded above by an explicit expectation: for q < 1

    dq_upper(N, q) = sum_m w(m) g_N(q, q^(2m)) f(q, q^(2m)),
    w(m) = (1 - q^2) q^(2m),

where f(q, -) restricted to the spectrum {q^(2m)} u {0} is the distance to
the limit point in the spectrum metric and g_N is the density of the
degree-N state against the Haar expectation.  At q = 1 the sum becomes the
integral of (N+1)(1-s)^N 2 asin(sqrt(s)) over [0, 1].  The same number is
an upper bound for the quantum Gromov-Hausdorff style distance between the
degree-N fuzzy sphere and the full sphere (via the Berezin approximant and
an admissible seminorm on the direct sum), which is what distq_upper
reports.

A certified lower bound comes from Monge-Kantorovich duality: any function
x with Lipschitz seminorm L(x) produces the certificate
|h_N(x) - eps(x)| / L(x).  On the spectrum the metric embeds isometrically
into the real line, so the Lipschitz constant of a polynomial is the
maximum of adjacent difference quotients: exact, fast, and safe to
maximise over.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, sparse
from scipy.sparse.linalg import ArpackError, ArpackNoConvergence, svds
from scipy.special import betaln, gammaln

from .qscalar import QParam, bracket, cabs
from .pbw import (AlgebraElement, Monomial, adjoint, degree as el_degree, element,
                  gen, is_podles, multiply, reordered_a_product, zero)
from .peter_weyl import UIndex, left_mult_terms
from .hopf import act_partial_pbw


# -- truncation bookkeeping ----------------------------------------------------

@dataclass(frozen=True)
class TruncationConfig:
    """GNS truncation schedule for norm estimation."""

    max_degree: int = 24
    stop_tol: float = 1e-6
    growth_step: int = 4
    start_degree: int = 8


@dataclass(frozen=True)
class NormEstimate:
    """Monotone lower bound of a C*-norm with convergence diagnostics."""

    value: float
    last_increment: float
    degree_used: int
    converged: bool


def _dim(K: int) -> int:
    # number of labels (n, i, j) with n <= K
    return (K + 1) * (K + 2) * (2 * K + 3) // 6


_OFFSETS: dict = {}


def _offset(n: int) -> int:
    hit = _OFFSETS.get(n)
    if hit is None:
        hit = _dim(n - 1) if n > 0 else 0
        _OFFSETS[n] = hit
    return hit


def _label_index(n: int, i: int, j: int) -> int:
    return _offset(n) + i * (n + 1) + j


_GEN_MAT_CACHE: dict = {}


def _nu_ratio_exp(n2: int, i2: int, n: int, i: int) -> int:
    # exponent of q in nu(n2,i2)/nu(n,i) where nu = q^(n-i) / sqrt(<n+1>)
    return (n2 - i2) - (n - i)


def _gen_matrix(p: QParam, g: str, K: int) -> sparse.csr_matrix:
    """Left multiplication by a generator, orthonormalised, levels <= K -> <= K+1."""
    key = (p, g, K)
    hit = _GEN_MAT_CACHE.get(key)
    if hit is not None:
        return hit
    rows: List[int] = []
    cols: List[int] = []
    data: List[float] = []
    q = p.q
    for n in range(K + 1):
        brn = float(bracket(n + 1, p))
        for i in range(n + 1):
            for j in range(n + 1):
                col = _label_index(n, i, j)
                for (n2, i2, j2), c in left_mult_terms(p, g, UIndex(n, i, j)):
                    ratio = q ** _nu_ratio_exp(n2, i2, n, i) * math.sqrt(
                        brn / float(bracket(n2 + 1, p)))
                    rows.append(_label_index(n2, i2, j2))
                    cols.append(col)
                    data.append(float(c) * ratio)
    mat = sparse.csr_matrix((data, (rows, cols)), shape=(_dim(K + 1), _dim(K)))
    _GEN_MAT_CACHE[key] = mat
    return mat


def _mono_letters(mo: Monomial) -> List[str]:
    # applied right-to-left onto a vector: b* letters first, a-letters last
    letters = ["b*"] * mo.n + ["b"] * mo.m
    letters += ["a"] * mo.k if mo.k > 0 else ["a*"] * (-mo.k)
    return letters


def mult_matrix(x: AlgebraElement, M: int, rows_degree: Optional[int] = None):
    """Orthonormalised matrix of left multiplication by x on levels <= M.

    The output space is levels <= M + degree(x) so no image component is
    truncated: the largest singular value is an exact lower bound of the
    operator norm.  ``rows_degree`` optionally compresses the output side
    as well (used by the positivity probe).
    """
    p = x.param
    d = el_degree(x)
    K_out = M + d
    out_dim = _dim(K_out)
    in_dim = _dim(M)
    use_complex = any(isinstance(c, complex) and c.imag != 0.0 for c in x.terms.values())
    dtype = np.complex128 if use_complex else np.float64
    acc = sparse.csr_matrix((out_dim, in_dim), dtype=dtype)
    for mo, c in x.terms.items():
        chain = sparse.identity(in_dim, format="csr", dtype=np.float64)
        level = M
        for letter in _mono_letters(mo):
            chain = _gen_matrix(p, letter, level) @ chain
            level += 1
        coo = chain.tocoo()
        piece = sparse.csr_matrix((coo.data, (coo.row, coo.col)),
                                  shape=(out_dim, in_dim))
        acc = acc + complex(c) * piece if use_complex else acc + float(complex(c).real) * piece
    if rows_degree is not None:
        acc = acc[: _dim(rows_degree), :]
    return acc


_LEFT_DEG_CACHE: dict = {}


def _left_degrees_cached(K: int) -> np.ndarray:
    """Left circle weight 2j - n per label index, for levels <= K."""
    hit = _LEFT_DEG_CACHE.get(K)
    if hit is not None:
        return hit
    out = np.empty(_dim(K), dtype=np.int64)
    pos = 0
    for n in range(K + 1):
        for i in range(n + 1):
            for j in range(n + 1):
                out[pos] = 2 * j - n
                pos += 1
    _LEFT_DEG_CACHE[K] = out
    return out


def _sigma_max_dense_or_iterative(A) -> float:
    m, n = A.shape
    if n == 0 or m == 0 or A.nnz == 0:
        return 0.0
    if min(m, n) <= 2500:
        return float(np.linalg.svd(A.toarray(), compute_uv=False)[0])
    # iterative fallback for oversized blocks; the Rayleigh quotient is a
    # valid lower bound at every step, so this never overestimates
    rng = np.random.default_rng(7)
    v = rng.standard_normal(n)
    if A.dtype != np.float64:
        v = v.astype(np.complex128)
    v /= np.linalg.norm(v)
    best = 0.0
    for _ in range(1500):
        w = A @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v2 = A.conj().T @ w
        nv = np.linalg.norm(v2)
        best = max(best, nw)
        if nv == 0.0:
            break
        v = v2 / nv
    return float(best)


def _sigma_max(A, col_deg: Optional[np.ndarray] = None,
               row_deg: Optional[np.ndarray] = None) -> float:
    """Largest singular value, decomposed over the left circle grading.

    Left multiplication respects the left weight, so after grouping rows
    and columns by it the matrix splits into connected components that are
    dense-SVD sized; this also sidesteps the extreme top-value degeneracy
    (sectors of different right column index are unitarily equivalent)
    that defeats iterative solvers on the full matrix.
    """
    m, n = A.shape
    if n == 0 or m == 0 or A.nnz == 0:
        return 0.0
    if col_deg is None or row_deg is None:
        return _sigma_max_dense_or_iterative(A)
    coo = A.tocoo()
    # union-find over column-degree classes joined through shared row classes
    parent: dict = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[rx] = ry

    row_owner: dict = {}
    for r, c in zip(coo.row, coo.col):
        rd = int(row_deg[r])
        cd = int(col_deg[c])
        if rd in row_owner:
            union(cd, row_owner[rd])
        else:
            row_owner[rd] = cd
        find(cd)
    comp_of_col_class = {cd: find(cd) for cd in parent}
    comps: dict = {}
    for cd, root in comp_of_col_class.items():
        comps.setdefault(root, set()).add(cd)
    best = 0.0
    csc = A.tocsc()
    for root, col_classes in comps.items():
        cols = np.flatnonzero(np.isin(col_deg, list(col_classes)))
        sub = csc[:, cols]
        keep_rows = np.flatnonzero(np.diff(sub.tocsr().indptr) > 0) \
            if sub.nnz else np.array([], dtype=int)
        sub = sub.tocsr()[keep_rows, :] if keep_rows.size else sub[:0, :]
        best = max(best, _sigma_max_dense_or_iterative(sub))
    return best


def gns_norm(x: AlgebraElement, cfg: TruncationConfig | None = None) -> NormEstimate:
    """Operator-norm lower bound from GNS truncation.

    Grows the domain degree by ``growth_step`` until the relative increment
    of the largest singular value drops below ``stop_tol`` or the maximal
    degree is reached.  Never raises on non-convergence; the flag reports it.
    """
    cfg = cfg or TruncationConfig()
    if x.is_zero():
        return NormEstimate(0.0, 0.0, cfg.start_degree, True)
    d = el_degree(x)
    if cfg.max_degree < d:
        raise ValueError(
            f"max_degree {cfg.max_degree} is below the element degree {d}")
    M = min(max(cfg.start_degree, d), cfg.max_degree)
    value = 0.0
    inc = math.inf
    converged = False
    while True:
        s = _sigma_max(mult_matrix(x, M), col_deg=_left_degrees_cached(M),
                       row_deg=_left_degrees_cached(M + d))
        inc = s - value if value > 0.0 else math.inf
        value = max(value, s)
        if inc is not math.inf and abs(inc) <= cfg.stop_tol * max(abs(value), 1e-300):
            converged = True
            break
        if M >= cfg.max_degree:
            break
        M = min(M + cfg.growth_step, cfg.max_degree)
    return NormEstimate(value=value, last_increment=0.0 if inc is math.inf else inc,
                        degree_used=M, converged=converged)


def compression(x: AlgebraElement, M: int):
    """Two-sided compression of left multiplication to levels <= M."""
    return mult_matrix(x, M, rows_degree=M)


def lipnorm(x: AlgebraElement, cfg: TruncationConfig | None = None) -> NormEstimate:
    """max(||d1 x||, ||d2 x||) with d1 = q^(1/2) partial_e, d2 = q^(-1/2) partial_f.

    Diagnostics come from the worse-converged branch.
    """
    if not is_podles(x):
        raise ValueError("the Lip-norm is defined on the Podles sphere")
    cfg = cfg or TruncationConfig()
    p = x.param
    d1 = p.spow(1) * act_partial_pbw("e", x)
    d2 = p.spow(-1) * act_partial_pbw("f", x)
    e1 = gns_norm(d1, cfg)
    e2 = gns_norm(d2, cfg)
    worse = min((e1, e2), key=lambda e: (e.converged, -abs(e.last_increment)))
    return NormEstimate(value=max(e1.value, e2.value),
                        last_increment=worse.last_increment,
                        degree_used=max(e1.degree_used, e2.degree_used),
                        converged=e1.converged and e2.converged)


# -- the spectrum metric ---------------------------------------------------------

@dataclass(frozen=True)
class XqPoint:
    """Point of the spectrum of A: q^(2m) (m >= 0), its limit 0, or a
    classical coordinate s in [0, 1] at q = 1."""

    m: Optional[int] = None
    s: Optional[float] = None

    @classmethod
    def spectrum(cls, m: int) -> "XqPoint":
        if m < 0:
            raise ValueError("spectrum index must be nonnegative")
        return cls(m=m)

    @classmethod
    def zero(cls) -> "XqPoint":
        return cls()

    @classmethod
    def classical(cls, s: float) -> "XqPoint":
        if not (0.0 <= s <= 1.0):
            raise ValueError("classical coordinate must lie in [0, 1]")
        return cls(s=float(s))


def _tail_len(q: float, eps: float = 1e-16) -> int:
    # sum_{k >= K} (1 - q^2) q^k / sqrt(1 - q^(2(k+1))) <= sqrt(1-q^2) q^K / (1-q)
    c = math.sqrt(1.0 - q * q) / (1.0 - q)
    if c <= 0.0:
        return 8
    L = math.log(eps / c) / math.log(q)
    return max(8, int(math.ceil(L)) + 2)


def _dist_terms(q: float, m0: int, count: int) -> np.ndarray:
    k = np.arange(m0, m0 + count, dtype=np.float64)
    return (1.0 - q * q) * q ** k / np.sqrt(1.0 - q ** (2.0 * (k + 1.0)))


def _phi_to_zero(q: float, m: int) -> float:
    """Distance from q^(2m) to the limit point 0 in the spectrum metric."""
    K = _tail_len(q)
    return float(np.sum(_dist_terms(q, m, max(K - m, 4))))


def _phi_array(q: float, mmax: int) -> np.ndarray:
    """phi[m] for m = 0..mmax (distances to the limit point), vectorised."""
    K = mmax + _tail_len(q)
    terms = _dist_terms(q, 0, K + 1)
    suffix = np.concatenate([np.cumsum(terms[::-1])[::-1], [0.0]])
    return suffix[: mmax + 1]


def rho_q(p1: XqPoint, p2: XqPoint, p: QParam) -> float:
    """The metric on the spectrum of A.

    For q < 1 the points q^(2m) and the limit 0 embed isometrically into
    the real line through their distance to 0; at q = 1 the metric is
    |asin(2s - 1) - asin(2t - 1)| on [0, 1].
    """
    if p.is_classical:
        if p1.s is None or p2.s is None:
            raise ValueError("classical-branch points require the s coordinate")
        return abs(math.asin(2.0 * p1.s - 1.0) - math.asin(2.0 * p2.s - 1.0))
    if p1.s is not None or p2.s is not None:
        raise ValueError("spectrum points of the deformed branch carry an index m")
    v1 = 0.0 if p1.m is None else _phi_to_zero(p.q, p1.m)
    v2 = 0.0 if p2.m is None else _phi_to_zero(p.q, p2.m)
    return abs(v1 - v2)


def f_func(p: QParam, s: float) -> float:
    """The distance-to-the-base-point profile as a function on [0, 1].

    For q < 1: the series sum_k (1-q^2) q^k sqrt(s) / sqrt(1 - s q^(2(k+1))),
    which restricted to s = q^(2m) equals the spectrum-metric distance to
    the limit point; at q = 1 it is 2 asin(sqrt(s)).
    """
    if not (0.0 <= s <= 1.0):
        raise ValueError("s must lie in [0, 1]")
    if p.is_classical:
        return 2.0 * math.asin(math.sqrt(s))
    if s == 0.0:
        return 0.0
    q = p.q
    K = _tail_len(q)
    k = np.arange(0, K + 1, dtype=np.float64)
    terms = (1.0 - q * q) * q ** k * math.sqrt(s) / np.sqrt(1.0 - s * q ** (2.0 * (k + 1.0)))
    return float(np.sum(terms))


def g_func(N: int, p: QParam, s: float) -> float:
    """Density of the degree-N state against the Haar expectation.

    Closed form <N+1> q^(-2N) (1 - q^(-2(N-1)) s) ... (1 - s); at q = 1
    this is (N+1)(1-s)^N.  The empty product at N = 0 gives 1.  For large
    N and s away from the spectrum the factors overflow floats; the
    spectrum-restricted evaluation used internally is always stable.
    """
    if N < 0:
        raise ValueError("N must be nonnegative")
    if p.is_classical:
        return float(N + 1) * (1.0 - s) ** N
    q = p.q
    val = float(bracket(N + 1, p)) * q ** (-2.0 * N)
    for t in range(N):
        val *= 1.0 - q ** (-2.0 * t) * s
    return val


def _weighted_density_on_spectrum(N: int, q: float, marr: np.ndarray,
                                  brN: float) -> np.ndarray:
    """w(m) g_N(q, q^(2m)) for m >= N, fused to avoid large intermediates.

    Equals (1-q^2) <N+1> q^(2(m-N)) prod_{t<N} (1 - q^(2(m-t))); every
    factor is bounded, so this is stable for arbitrary N.
    """
    vals = (1.0 - q * q) * brN * q ** (2.0 * (marr - N))
    for t in range(N):
        vals = vals * (1.0 - q ** (2.0 * (marr - t)))
    return vals


def spectral_weights(q: float, mmax: int) -> np.ndarray:
    """Atoms of the Haar expectation on the spectrum: (1 - q^2) q^(2m)."""
    m = np.arange(0, mmax + 1, dtype=np.float64)
    return (1.0 - q * q) * q ** (2.0 * m)


def h_transform(poly: Dict[Tuple[int, int], complex], p: QParam):
    """Haar-side evaluation of a bivariate polynomial: sum c_jk q^j / <k+1>."""
    total = 0
    for (j, k), c in poly.items():
        if j < 0 or k < 0:
            raise ValueError("polynomial exponents must be nonnegative")
        total = total + c * p.qpow(j) / bracket(k + 1, p)
    return total


# -- the distance bounds -----------------------------------------------------------

def _dq_tail_count(q: float, brN: float) -> int:
    # terms are bounded by pi (1-q^2) brN q^(2(m-N)); cut below 1e-17
    bound = math.pi * (1.0 - q * q) * brN
    if bound <= 0.0:
        return 8
    L = math.log(1e-17 / bound) / (2.0 * math.log(q))
    return max(8, int(math.ceil(L)) + 2)


def dq_upper(N: int, p: QParam) -> float:
    """Upper bound for the state-space distance between the degree-N state
    and the counit.

    q < 1: the spectral sum of w g_N f (the sum starts at m = N because the
    density vanishes on the first N spectrum points); q = 1: adaptive
    quadrature of (N+1)(1-s)^N 2 asin(sqrt(s)) on [0, 1] to 1e-10.
    """
    if N < 0:
        raise ValueError("N must be nonnegative")
    if p.is_classical:
        val, _err = integrate.quad(
            lambda s: (N + 1) * (1.0 - s) ** N * 2.0 * math.asin(math.sqrt(s)),
            0.0, 1.0, epsabs=1e-12, epsrel=1e-12, limit=400)
        return float(val)
    q = p.q
    brN = float(bracket(N + 1, p))
    count = _dq_tail_count(q, brN)
    marr = np.arange(N, N + count + 1, dtype=np.float64)
    wg = _weighted_density_on_spectrum(N, q, marr, brN)
    phi = _phi_array(q, N + count)
    f_at = phi[N: N + count + 1]
    return float(np.sum(wg * f_at))


def dq_upper_classical_closed_form(N: int) -> float:
    """Beta-function closed form of the q = 1 bound (test oracle)."""
    return math.sqrt(math.pi) * math.exp(gammaln(N + 1.5) - gammaln(N + 2))


def dq_upper_pbw(N: int, p: QParam) -> float:
    """The same bound through the reordered a-power polynomial.

    Expands a^N (a*)^N in normal form, evaluates the resulting polynomial
    in A on the spectrum, and pairs with the raw weights and the raw metric
    series.  Independent of the fused route; limited to moderate N in
    float mode because the reordering coefficients grow like q^(-N(N-1)).
    """
    if N < 0:
        raise ValueError("N must be nonnegative")
    q = p.q
    poly = reordered_a_product(p, N, -N)
    coeffs = {}
    for mo, c in poly.terms.items():
        if mo.k != 0 or mo.m != mo.n:
            raise ArithmeticError("a^N (a*)^N failed to reduce to a polynomial in A")
        coeffs[mo.m] = complex(c).real
    if p.is_classical:
        # moments of 2 asin(sqrt(s)): int s^t 2 asin(sqrt s) ds
        #   = pi/(t+1) - B(t + 3/2, 1/2)/(t+1)
        total = 0.0
        for t, c in coeffs.items():
            mom = math.pi / (t + 1) - math.exp(betaln(t + 1.5, 0.5)) / (t + 1)
            total += c * mom
        return float((N + 1) * total)
    brN = float(bracket(N + 1, p))
    count = _dq_tail_count(q, brN)
    # the density vanishes on the first N spectrum points (the reordered
    # polynomial has roots there), so the sum starts at m = N; fusing the
    # q^(-2N) prefactor into the weights keeps every factor bounded
    marr = np.arange(N, N + count + 1, dtype=np.float64)
    wfused = (1.0 - q * q) * brN * q ** (2.0 * (marr - N))
    pv = np.zeros_like(marr)
    for t, c in sorted(coeffs.items()):
        pv += c * q ** (2.0 * marr * t)
    phi = _phi_array(q, N + count)[N:]
    return float(np.sum(wfused * pv * phi))


def distq_upper(N: int, p: QParam) -> float:
    """Upper bound for the quantum Gromov-Hausdorff style distance between
    the degree-N fuzzy sphere and the full sphere.

    The Berezin transform maps the Lip-ball of the sphere into the fuzzy
    sphere without increasing the Lip-norm, and moves no element further
    than dq_upper times its Lip-norm; an admissible seminorm on the direct
    sum then realises dq_upper as a Hausdorff-distance bound.
    """
    return dq_upper(N, p)


# -- Monge-Kantorovich lower bound ---------------------------------------------------

@dataclass(frozen=True)
class OptimizerConfig:
    """Multi-start projected-ascent settings for the duality lower bound."""

    starts: int = 8
    max_iter: int = 200
    fd_step: float = 1e-4
    seed: int = 0
    degree: Optional[int] = None  # polynomial degree; defaults to N + 8


@dataclass
class MKResult:
    value: float
    coeffs: np.ndarray
    start_values: List[float]
    evaluations: int


def _cheb_values(sgrid: np.ndarray, D: int) -> np.ndarray:
    """Shifted Chebyshev basis minus its value at 0: columns d = 1..D of
    T_d(2s - 1) - (-1)^d.

    Spans the degree-<=D polynomials vanishing at 0; every entry lies in
    [-2, 2], which keeps the optimisation well conditioned on spectra that
    span many orders of magnitude (where the monomial basis is useless).
    """
    x = 2.0 * sgrid - 1.0
    out = np.empty((sgrid.shape[0], D))
    tm1 = np.ones_like(x)
    t = x.copy()
    for d in range(1, D + 1):
        out[:, d - 1] = t - (-1.0) ** d
        t, tm1 = 2.0 * x * t - tm1, t
    return out


def _cheb_derivative_values(sgrid: np.ndarray, D: int) -> np.ndarray:
    """d/ds of the shifted basis: 2 d U_(d-1)(2s - 1)."""
    x = 2.0 * sgrid - 1.0
    out = np.empty((sgrid.shape[0], D))
    um1 = np.zeros_like(x)
    u = np.ones_like(x)  # U_0
    for d in range(1, D + 1):
        out[:, d - 1] = 2.0 * d * u
        u, um1 = 2.0 * x * u - um1, u
    return out


class _MKModel:
    """Vectorised objective |h_N(p(A)) - p(0)| / Lip(p) over polynomials of
    degree <= D vanishing at 0, parametrised in the shifted Chebyshev basis."""

    def __init__(self, N: int, p: QParam, D: int):
        self.N, self.D = N, D
        q = p.q
        if p.is_classical:
            # basis moments (N+1) int (1-s)^N (T_d(2s-1) - (-1)^d) ds by
            # Gauss-Legendre of exact degree: stable for any D
            nodes = (N + D) // 2 + 16
            xg, wg = np.polynomial.legendre.leggauss(nodes)
            sg = 0.5 * (xg + 1.0)
            wg = 0.5 * wg
            basisvals = _cheb_values(sg, D)
            self.moments = (N + 1) * (basisvals.T @ (wg * (1.0 - sg) ** N))
            t = np.cos(np.linspace(0.0, math.pi, 4001))
            sgrid = 0.5 * (t + 1.0)
            self.dmat = (_cheb_derivative_values(sgrid, D)
                         * np.sqrt(sgrid * (1.0 - sgrid))[:, None])
            self.inflation = 1.0 + 1e-3
            self.V = None
            self.ref_x = sgrid
            self.ref_y = 2.0 * np.arcsin(np.sqrt(sgrid))
        else:
            brN = float(bracket(N + 1, p))
            mpts = max(_dq_tail_count(q, brN) + N, _tail_len(q) // 2 + 8)
            marr = np.arange(0, mpts + 1, dtype=np.float64)
            spts = q ** (2.0 * marr)
            V = _cheb_values(spts, D)
            self.V = np.vstack([V, np.zeros((1, D))])  # final row: the limit point
            hw = np.zeros(mpts + 2)
            wg_tail = _weighted_density_on_spectrum(N, q, marr[N:], brN)
            hw[N: mpts + 1] = wg_tail
            self.hw = hw
            phi = np.concatenate([_phi_array(q, mpts), [0.0]])
            self.dphi = phi[:-1] - phi[1:]  # positive: phi strictly decreases
            self.inflation = 1.0 + 1e-9
            self.ref_y = phi[: mpts + 1]
        self.evals = 0

    def objective_batch(self, C: np.ndarray) -> np.ndarray:
        """C has shape (batch, D); returns the certified quotient per row."""
        self.evals += C.shape[0]
        if self.V is None:
            delta = np.abs(C @ self.moments)
            lips = np.max(np.abs(C @ self.dmat.T), axis=1) * self.inflation
        else:
            Y = C @ self.V.T
            delta = np.abs(Y @ self.hw)
            quot = np.abs(np.diff(Y, axis=1)) / self.dphi[None, :]
            lips = np.max(quot, axis=1) * self.inflation
        out = np.zeros(C.shape[0])
        ok = lips > 1e-12
        out[ok] = delta[ok] / lips[ok]
        return out

    def objective(self, c: np.ndarray) -> float:
        return float(self.objective_batch(c[None, :])[0])

    def informed_start(self) -> np.ndarray:
        """Least-squares polynomial fit of the distance profile."""
        if self.V is None:
            d = np.arange(1, self.D + 1, dtype=np.float64)
            V = self.ref_x[:, None] ** d[None, :]
            sol, *_ = np.linalg.lstsq(V, self.ref_y, rcond=None)
        else:
            sol, *_ = np.linalg.lstsq(self.V[:-1], self.ref_y, rcond=None)
        mx = np.max(np.abs(sol))
        return sol / mx if mx > 0 else sol

    def lp_start(self) -> Optional[np.ndarray]:
        """Start from the linear program max Delta s.t. sampled Lip <= 1.

        The solution is only a seed: it is re-evaluated through the honest
        objective, so LP numerics can never inflate the certificate.
        """
        from scipy.optimize import linprog
        if self.V is None:
            diffs = self.dmat
            cvec = -self.moments
        else:
            diffs = (self.V[:-1] - self.V[1:]) / self.dphi[:, None]
            cvec = -(self.hw @ self.V)
        A_ub = np.vstack([diffs, -diffs])
        b_ub = np.ones(2 * diffs.shape[0])
        try:
            res = linprog(cvec, A_ub=A_ub, b_ub=b_ub,
                          bounds=[(None, None)] * self.D, method="highs")
        except Exception:
            return None
        if res.status != 0 or res.x is None:
            return None
        return np.asarray(res.x, dtype=np.float64)


def _mix_seed(seed: int, q: float, N: int) -> int:
    return (seed * 1000003 + int(round(q * 1e9)) * 7919 + N * 104729) % (2 ** 63)


def mk_lower(N: int, p: QParam, opt: OptimizerConfig | None = None) -> MKResult:
    """Certified lower bound for the state-counit distance.

    Maximises |h_N(x) - eps(x)| / Lip(x) over real polynomials x in A with
    zero constant term, by multi-start ascent with coordinate finite
    differences and backtracking line search; coefficient vectors are
    renormalised to the unit sup-ball after each step (the objective is
    scale invariant).  Every evaluated quotient uses the exact Lipschitz
    constant on the spectrum (slightly inflated for tail safety), so every
    intermediate value is already a valid lower bound.
    """
    opt = opt or OptimizerConfig()
    D = opt.degree if opt.degree is not None else N + 8
    model = _MKModel(N, p, D)
    rng = np.random.default_rng(_mix_seed(opt.seed, p.q, N))
    eye = np.eye(D)
    best_val = 0.0
    best_c = np.zeros(D)
    start_values: List[float] = []
    seeds: List[np.ndarray] = [model.informed_start()]
    lp_seed = model.lp_start()
    if lp_seed is not None:
        seeds.append(lp_seed)
    while len(seeds) < opt.starts:
        seeds.append(rng.standard_normal(D))
    for c in seeds[: opt.starts]:
        mx = np.max(np.abs(c))
        if mx > 0:
            c = c / mx
        f0 = model.objective(c)
        for _ in range(opt.max_iter):
            batch = np.vstack([c[None, :], c[None, :] + opt.fd_step * eye])
            vals = model.objective_batch(batch)
            grad = (vals[1:] - vals[0]) / opt.fd_step
            gn = np.linalg.norm(grad)
            if gn < 1e-14:
                break
            step = 1.0 / max(gn, 1.0)
            improved = False
            while step > 1e-13:
                cand = c + step * grad
                mx = np.max(np.abs(cand))
                if mx > 0:
                    cand = cand / mx
                fc = model.objective(cand)
                if fc > f0 + 1e-15:
                    c, f0, improved = cand, fc, True
                    break
                step *= 0.5
            if not improved:
                break
        start_values.append(f0)
        if f0 > best_val:
            best_val, best_c = f0, c.copy()
    return MKResult(value=best_val, coeffs=best_c, start_values=start_values,
                    evaluations=model.evals)


# -- reporting -------------------------------------------------------------------

DISTANCE_CSV_HEADER = "q,N,dq_upper,dq_lower,lip_margin,distq_upper,converged"


@dataclass(frozen=True)
class DistanceReport:
    """Computable bounds for one (q, N) cell."""

    q: float
    N: int
    dq_upper: float
    dq_lower: float
    lip_margin: float
    distq_upper: float
    converged: bool

    def csv_row(self) -> str:
        return (f"{self.q:.17g},{self.N},{self.dq_upper:.17g},{self.dq_lower:.17g},"
                f"{self.lip_margin:.17g},{self.distq_upper:.17g},{int(self.converged)}")
