"""Runnable invariant suites over all layers.

Each suite returns a list of named residual checks; the CLI aggregates
them into a machine-readable report with a process exit code.  The suites
are sized to finish in seconds per parameter value; the full acceptance
battery lives in the test suite.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List

import numpy as np

from .qscalar import QParam, bracket, cabs
from . import pbw
from .pbw import (AlgebraElement, Monomial, adjoint, bidegree_components,
                  degree, element, gen, haar, inner, is_podles,
                  max_coeff_diff, modular_nu, multiply, one, project_phi0,
                  zero)
from . import peter_weyl as pw
from .peter_weyl import (UIndex, UVector, basis_vector, expand, generate_u,
                         l2_norm_sq, left_mult_generator, to_element,
                         u_entry, u_middle, unitarity_residual, uvector_diff)
from . import hopf
from .hopf import (act_delta, act_delta_pbw, act_partial, act_partial_pbw,
                   conjugate_by_u, delta_matrix, mat2_mul, pairing,
                   pairing_pbw, partial_matrix, tau, twisted_commutator)
from . import podles
from .podles import (berezin, berezin_coeff, berezin_coefficients, counit,
                     definitional_berezin, fuzzy_basis, generators_podles,
                     state_hN)
from . import qmetric
from .qmetric import (TruncationConfig, XqPoint, dq_upper, dq_upper_pbw,
                      f_func, g_func, gns_norm, h_transform, lipnorm, rho_q,
                      spectral_weights)


@dataclass
class Check:
    name: str
    residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.tol


@dataclass
class SuiteResult:
    suite: str
    q: float
    checks: List[Check]
    seconds: float

    @property
    def n_passed(self) -> int:
        return sum(1 for c in self.checks if c.passed)

    @property
    def n_failed(self) -> int:
        return sum(1 for c in self.checks if not c.passed)

    @property
    def worst(self) -> float:
        return max((c.residual for c in self.checks), default=0.0)

    def as_dict(self) -> dict:
        return {
            "suite": self.suite,
            "q": self.q,
            "passed": self.n_passed,
            "failed": self.n_failed,
            "worst_residual": self.worst,
            "seconds": self.seconds,
            "checks": [{"name": c.name, "residual": c.residual, "tol": c.tol,
                        "passed": c.passed} for c in self.checks],
        }


def _random_monomial(rng, kmax=3, bmax=3) -> Monomial:
    return Monomial(int(rng.integers(-kmax, kmax + 1)),
                    int(rng.integers(0, bmax + 1)),
                    int(rng.integers(0, bmax + 1)))


def _random_element(p: QParam, rng, nterms=3, kmax=3, bmax=3) -> AlgebraElement:
    terms = {}
    for _ in range(nterms):
        terms[_random_monomial(rng, kmax, bmax)] = complex(
            rng.standard_normal(), rng.standard_normal())
    return AlgebraElement(p, terms)


def _random_podles(p: QParam, rng, deg=3) -> AlgebraElement:
    A, B, Bstar = generators_podles(p)
    basis = [one(p), A, B, Bstar, multiply(A, A), multiply(A, B),
             multiply(A, Bstar), multiply(B, B), multiply(Bstar, Bstar)]
    acc = zero(p)
    for el in basis[: deg * 3]:
        acc = acc + complex(rng.standard_normal(), rng.standard_normal()) * el
    return acc


def _scale(*els: AlgebraElement) -> float:
    return max([1.0] + [cabs(c) for el in els for c in el.terms.values()])


def rel_diff(x: AlgebraElement, y: AlgebraElement) -> float:
    """Coefficient residual relative to the magnitude of the operands.

    Identities on elements whose normal forms have a large coefficient
    spread are float-limited by the relative pruning threshold, so the
    fair residual is scale-relative.
    """
    return max_coeff_diff(x, y) / _scale(x, y)


def suite_qscalar(p: QParam, rng) -> List[Check]:
    checks = []
    worst = 0.0
    for n in range(51):
        worst = max(worst, cabs(bracket(n + 1, p) - (1 + p.qpow(1) ** 2 * bracket(n, p))))
    checks.append(Check("bracket recurrence <n+1> = 1 + q^2 <n>", worst, 1e-12))
    if not p.is_classical:
        q = p.q
        worst = 0.0
        for n in range(1, 51):
            qi = (q ** n - q ** (-n)) / (q - 1.0 / q)
            worst = max(worst, abs(float(bracket(n, p)) - q ** (n - 1) * qi))
        checks.append(Check("bracket vs standard q-integer", worst, 1e-12))
    # strict growth saturates in floats once q^(2n) underflows the gap
    if p.is_classical:
        nmax = 60
    else:
        nmax = min(60, int(15.0 * math.log(10.0) / (-2.0 * math.log(p.q))) - 1)
    mono = all(float(bracket(n + 1, p)) > float(bracket(n, p)) for n in range(nmax))
    checks.append(Check("bracket strictly increasing", 0.0 if mono else 1.0, 0.5))
    checks.append(Check("bracket(0) = 0", cabs(bracket(0, p)), 0.0))
    return checks


def suite_pbw(p: QParam, rng) -> List[Check]:
    checks = []
    q = p.q
    a, astar = gen(p, "a"), gen(p, "a*")
    b, bstar = gen(p, "b"), gen(p, "b*")
    A = multiply(b, bstar)

    rel = max(
        max_coeff_diff(multiply(b, a), q * multiply(a, b)),
        max_coeff_diff(multiply(bstar, a), q * multiply(a, bstar)),
        max_coeff_diff(multiply(b, bstar), multiply(bstar, b)),
        max_coeff_diff(multiply(astar, a) + (q * q) * A, one(p)),
        max_coeff_diff(multiply(a, astar) + A, one(p)),
    )
    checks.append(Check("defining relations normalise to 0", rel, 1e-13))

    worst = 0.0
    for _ in range(60):
        x = element(p, {_random_monomial(rng, kmax=4, bmax=4): 1.0})
        y = element(p, {_random_monomial(rng, kmax=4, bmax=4): 1.0})
        z = element(p, {_random_monomial(rng, kmax=4, bmax=4): 1.0})
        lhs, rhs = multiply(multiply(x, y), z), multiply(x, multiply(y, z))
        worst = max(worst, rel_diff(lhs, rhs))
    checks.append(Check("associativity on random monomials", worst, 1e-10))

    pe = QParam.exact(Fraction(1, 2))
    worst_exact = 0.0
    erng = np.random.default_rng(11)
    for _ in range(30):
        x = element(pe, {_random_monomial(erng, kmax=4, bmax=4): Fraction(1)})
        y = element(pe, {_random_monomial(erng, kmax=4, bmax=4): Fraction(1)})
        z = element(pe, {_random_monomial(erng, kmax=4, bmax=4): Fraction(1)})
        if max_coeff_diff(multiply(multiply(x, y), z), multiply(x, multiply(y, z))) != 0:
            worst_exact = 1.0
    checks.append(Check("associativity exact in exact mode", worst_exact, 0.0))

    worst = 0.0
    for _ in range(40):
        x = _random_element(p, rng)
        y = _random_element(p, rng)
        worst = max(worst, rel_diff(adjoint(multiply(x, y)),
                                    multiply(adjoint(y), adjoint(x))))
        worst = max(worst, rel_diff(adjoint(adjoint(x)), x))
    checks.append(Check("involution anti-multiplicative and involutive", worst, 1e-10))

    worst = 0.0
    for _ in range(100):
        x = element(p, {_random_monomial(rng): 1.0})
        y = element(p, {_random_monomial(rng): 1.0})
        worst = max(worst, cabs(haar(multiply(x, y)) - haar(multiply(modular_nu(y), x))))
    checks.append(Check("twisted trace h(xy) = h(nu(y) x)", worst, 1e-10))

    worst = 0.0
    for _ in range(40):
        x = _random_element(p, rng)
        graded = sum((comp for bd, comp in bidegree_components(x).items()
                      if bd != (0, 0)), start=zero(p))
        worst = max(worst, cabs(haar(graded)))
    checks.append(Check("Haar kills nontrivially graded parts", worst, 1e-12))

    worst = 0.0
    for _ in range(20):
        x = _random_element(p, rng)
        ph = project_phi0(x)
        worst = max(worst, max_coeff_diff(project_phi0(ph), ph))
        worst = max(worst, cabs(haar(ph) - haar(x)))
    worst = max(worst, max_coeff_diff(project_phi0(one(p)), one(p)))
    checks.append(Check("phi0 idempotent, unital, Haar-compatible", worst, 1e-12))

    B = multiply(a, bstar)
    worst = 0.0
    for x in (a, astar, b, bstar, A, B):
        worst = max(worst, max_coeff_diff(multiply(b, x), multiply(tau(x), b)))
        worst = max(worst, max_coeff_diff(multiply(bstar, x), multiply(tau(x), bstar)))
    checks.append(Check("tau commutation b x = tau(x) b", worst, 1e-13))
    return checks


def suite_peter_weyl(p: QParam, rng) -> List[Check]:
    checks = []
    # the true interior coefficients grow like q^(-m^2): the identity check
    # runs on an extended-precision twin so the residual is meaningful
    pw_check = p if p.is_classical else QParam.from_q(p.q, dps=50)
    worst = float(max(unitarity_residual(n, pw_check) for n in range(1, 7)))
    checks.append(Check("unitarity of u^n, n <= 6", worst, 1e-8))

    worst = 0.0
    for n in range(5):
        for i in range(n + 1):
            for j in range(n + 1):
                for n2 in range(n, 5):
                    for i2 in range(n2 + 1):
                        for j2 in range(n2 + 1):
                            val = inner(u_entry(p, n, i, j), u_entry(p, n2, i2, j2))
                            want = l2_norm_sq(UIndex(n, i, j), p) \
                                if (n, i, j) == (n2, i2, j2) else 0.0
                            worst = max(worst, cabs(val - want))
    checks.append(Check("orthogonality and norms, n <= 4", worst, 1e-10))

    worst = 0.0
    for _ in range(25):
        n = int(rng.integers(0, 4))
        v = basis_vector(p, n, int(rng.integers(0, n + 1)), int(rng.integers(0, n + 1)))
        for g in ("a", "a*", "b", "b*"):
            lhs = left_mult_generator(g, v)
            rhs, res = expand(multiply(gen(p, g), to_element(v)), n + 1)
            worst = max(worst, uvector_diff(lhs, rhs), res)
    checks.append(Check("left multiplication engines agree", worst, 1e-9))

    worst = 0.0
    for n in range(5):
        for i in range(n + 1):
            for j in range(n + 1):
                el = u_entry(p, n, i, j)
                for g in ("e", "f", "k", "k_inv"):
                    worst = max(worst, cabs(pairing_pbw(g, el)
                                            - pairing(g, UIndex(n, i, j), p)))
    checks.append(Check("pairing table vs product rules, n <= 4", worst, 1e-10))

    worst = 0.0
    for m in range(1, 5):
        worst = max(worst, max_coeff_diff(u_middle(p, m), generate_u(2 * m, p)[m][m]))
    checks.append(Check("diagonal middle entries vs full synthesis", worst, 1e-9))
    return checks


def suite_hopf(p: QParam, rng) -> List[Check]:
    checks = []
    q = p.q
    dk = lambda x: act_delta_pbw("k", x)

    worst = 0.0
    for _ in range(100):
        x = element(p, {_random_monomial(rng): 1.0})
        y = element(p, {_random_monomial(rng): 1.0})
        for gtag, act in (("e", act_partial_pbw), ("f", act_partial_pbw),
                          ("e", act_delta_pbw), ("f", act_delta_pbw)):
            pk = act_partial_pbw if act is act_partial_pbw else act_delta_pbw
            lhs = act(gtag, multiply(x, y))
            rhs = multiply(act(gtag, x), pk("k", y)) + multiply(pk("k_inv", x), act(gtag, y))
            worst = max(worst, rel_diff(lhs, rhs))
    checks.append(Check("twisted Leibniz rules", worst, 1e-10))

    worst = 0.0
    for _ in range(30):
        x = _random_element(p, rng)
        worst = max(worst, rel_diff(
            act_partial_pbw("e", adjoint(x)),
            (-p.qpow(-1)) * adjoint(act_partial_pbw("f", x))))
        worst = max(worst, rel_diff(
            act_delta_pbw("e", adjoint(x)),
            (-p.qpow(-1)) * adjoint(act_delta_pbw("f", x))))
        worst = max(worst, rel_diff(
            act_partial_pbw("k", adjoint(x)),
            adjoint(act_partial_pbw("k_inv", x))))
    checks.append(Check("star relations of the actions", worst, 1e-10))

    A, B, Bstar = generators_podles(p)
    s = p.spow(1)
    worst = 0.0
    test_set = [A, B, Bstar] + [_random_podles(p, rng) for _ in range(25)]
    for x in test_set:
        lhs = twisted_commutator(gen(p, "a*"), x, dk)
        rhs = (1 - q * q) * s * multiply(gen(p, "b"), act_partial_pbw("e", x))
        worst = max(worst, max_coeff_diff(lhs, rhs))
        lhs2 = twisted_commutator(gen(p, "a"), x, dk)
        rhs2 = (1 - q * q) * p.spow(-3) * multiply(gen(p, "b*"), act_partial_pbw("f", x))
        worst = max(worst, max_coeff_diff(lhs2, rhs2))
    checks.append(Check("twisted commutators against the derivations", worst, 1e-10))

    worst = 0.0
    for x in test_set[:10]:
        pm = partial_matrix(x)
        u = hopf.fundamental_u(p)
        lhs_mat = tuple(tuple(multiply(u[r][c_], x) - multiply(dk(x), u[r][c_])
                              for c_ in range(2)) for r in range(2))
        fac = tuple(tuple(zero(p) for _ in range(2)) for _ in range(2))
        twist = ((zero(p), gen(p, "b")), ((p.qpow(-1)) * gen(p, "b*"), zero(p)))
        rhs_mat = mat2_mul(twist, pm.entries)
        worst = max(worst, max(max_coeff_diff(lhs_mat[r][c_], (1 - q * q) * rhs_mat[r][c_])
                               for r in range(2) for c_ in range(2)))
    checks.append(Check("matrix twisted-commutator identity", worst, 1e-10))

    worst = 0.0
    for m in range(3):
        for i in range(2 * m + 1):
            x = u_entry(p, 2 * m, i, m)
            worst = max(worst, conjugate_by_u(partial_matrix(x)).diff(delta_matrix(x)))
    checks.append(Check("conjugated derivation equals the row-side one", worst, 1e-9))

    worst = 0.0
    for _ in range(20):
        x = _random_element(p, rng)
        for gtag in ("e", "f"):
            worst = max(worst, cabs(haar(act_partial_pbw(gtag, x))))
            worst = max(worst, cabs(haar(act_delta_pbw(gtag, x))))
        worst = max(worst, cabs(haar(act_partial_pbw("k", x)) - haar(x)))
    checks.append(Check("Haar invariance under the actions", worst, 1e-10))

    worst = 0.0
    for _ in range(15):
        x = _random_element(p, rng)
        for comp_bd, comp in bidegree_components(x).items():
            de = act_partial_pbw("e", comp)
            for mo in de.terms:
                shift = (mo.k + mo.m - mo.n) - comp_bd.left
                worst = max(worst, abs(shift + 2))
            df = act_partial_pbw("f", comp)
            for mo in df.terms:
                worst = max(worst, abs((mo.k + mo.m - mo.n) - comp_bd.left - 2))
    checks.append(Check("circle equivariance as grading shifts", float(worst), 0.5))
    return checks


def suite_podles(p: QParam, rng) -> List[Check]:
    checks = []
    worst = 0.0
    for N in range(6):
        for k in range(6):
            x = multiply(element(p, {(-k, 0, 0): p.one()}),
                         element(p, {(k, 0, 0): p.one()}))
            got = state_hN(N, x)
            want = bracket(N + 1, p) / bracket(N + k + 1, p)
            worst = max(worst, cabs(got - want))
    checks.append(Check("state identity on (a*)^k a^k", worst, 1e-12))

    worst = 0.0
    for N in (1, 2, 3):
        worst = max(worst, abs(berezin_coeff(N, 0, p) - 1.0))
        worst = max(worst, abs(berezin_coeff(N, N + 2, p)))
    checks.append(Check("Berezin coefficients: unit and cutoff", worst, 1e-12))

    vals = [v for N in (2, 4, 8) for v in berezin_coefficients(N, p).values]
    bad = max((max(0.0 - v, v - 1.0) for v in vals), default=0.0)
    checks.append(Check("Berezin coefficients within [0, 1]", max(bad, 0.0), 1e-12))

    worst = 0.0
    for N in (1, 2):
        for m in range(3):
            for i in (0, m, 2 * m):
                v = basis_vector(p, 2 * m, i, m)
                worst = max(worst, uvector_diff(berezin(N, v),
                                                definitional_berezin(N, v)))
    checks.append(Check("diagonal transform equals coproduct route", worst, 1e-10))

    A, B, Bstar = generators_podles(p)
    worst = 0.0
    for k in range(3):
        for l in range(3 - k):
            el = one(p)
            for _ in range(k):
                el = multiply(el, A)
            for _ in range(l):
                el = multiply(el, B)
            v, res = expand(el, 2 * (k + l) if k + l else 0)
            support_ok = all(ix.n == 2 * ix.j and ix.j <= k + l for ix in v.terms)
            worst = max(worst, res, 0.0 if support_ok else 1.0)
    checks.append(Check("monomial filtration sits in the fuzzy span", worst, 1e-10))

    worst = 0.0
    for N in (1, 4, 16, 64):
        for x in (A, multiply(A, A)):
            d = cabs(state_hN(N, x) - counit(x))
            d2 = cabs(state_hN(2 * N, x) - counit(x))
            worst = max(worst, max(d2 - d, 0.0))
    checks.append(Check("weak-* convergence toward the counit", worst, 1e-12))
    return checks


def suite_qmetric(p: QParam, rng, heavy: bool = False) -> List[Check]:
    checks = []
    if p.is_classical:
        checks.append(Check("classical metric endpoints",
                            abs(rho_q(XqPoint.classical(1.0), XqPoint.classical(0.0), p)
                                - math.pi), 1e-12))
    else:
        q = p.q
        pts = [XqPoint.spectrum(m) for m in range(13)] + [XqPoint.zero()]
        worst = 0.0
        for x1 in pts:
            for x2 in pts:
                for x3 in pts:
                    lhs = rho_q(x1, x3, p)
                    worst = max(worst, lhs - rho_q(x1, x2, p) - rho_q(x2, x3, p))
        checks.append(Check("triangle inequality on the spectrum", max(worst, 0.0), 1e-12))
        checks.append(Check(
            "two-point distance formula",
            abs(rho_q(XqPoint.spectrum(0), XqPoint.spectrum(1), p) - math.sqrt(1 - q * q)),
            1e-12))

        worst = 0.0
        for k in range(21):
            w = spectral_weights(q, 400)
            series = float(np.sum(w * q ** (2.0 * np.arange(401) * k)))
            worst = max(worst, abs(series - 1.0 / float(bracket(k + 1, p))))
        checks.append(Check("spectral weights represent the Haar expectation",
                            worst, 1e-12))

        worst = 0.0
        for sval in np.linspace(0.0, 1.0, 21):
            lo = -(1 - q * q) / (math.log(q) * q) * math.asin(math.sqrt(sval) * q)
            hi = -(1 - q * q) / (math.log(q) * q) * math.asin(math.sqrt(sval))
            fv = f_func(p, float(sval))
            worst = max(worst, lo - fv, fv - hi)
        checks.append(Check("distance profile sandwiched by arcsine bounds",
                            max(worst, 0.0), 1e-12))

        worst = 0.0
        for N in (1, 2, 4, 8):
            worst = max(worst, abs(dq_upper(N, p) - dq_upper_pbw(N, p)))
        checks.append(Check("distance bound: fused vs reordered-polynomial route",
                            worst, 1e-10))

    worst = 0.0
    for _ in range(20):
        cmap = {}
        for _ in range(8):
            cmap[(int(rng.integers(0, 7)), int(rng.integers(0, 7)))] = complex(
                rng.standard_normal(), rng.standard_normal())
        hval = cabs(h_transform(cmap, p))
        qs = np.linspace(min(0.3, p.q), 1.0, 60)
        ss = np.concatenate([np.linspace(0.0, 1.0, 60),
                             p.q ** (2.0 * np.arange(40, dtype=float))])
        grid = 0.0
        for qq in qs:
            for sv in ss:
                val = sum(c * qq ** j * sv ** k for (j, k), c in cmap.items())
                grid = max(grid, abs(val))
        worst = max(worst, hval - grid)
    checks.append(Check("Haar-side evaluation is a contraction", max(worst, 0.0), 1e-10))

    est = gns_norm(one(p))
    checks.append(Check("norm of the unit", abs(est.value - 1.0), 1e-12))
    checks.append(Check("Lip-norm of the unit", lipnorm(one(p)).value, 1e-12))
    if heavy:
        cfg = TruncationConfig(max_degree=16, start_degree=8)
        for gname in ("a", "b"):
            est = gns_norm(gen(p, gname), cfg)
            checks.append(Check(f"norm of generator {gname}", abs(est.value - 1.0), 1e-4))
    return checks


SUITES: Dict[str, Callable] = {
    "qscalar": suite_qscalar,
    "pbw": suite_pbw,
    "peter_weyl": suite_peter_weyl,
    "hopf": suite_hopf,
    "podles": suite_podles,
    "qmetric": suite_qmetric,
}


def run_all(q_values, seed: int = 0, heavy: bool = False) -> List[SuiteResult]:
    """Run every suite for every parameter value."""
    results: List[SuiteResult] = []
    for qv in q_values:
        p = QParam.from_q(float(qv))
        for sidx, (name, fn) in enumerate(SUITES.items()):
            rng = np.random.default_rng(seed * 131 + sidx)
            t0 = time.time()
            if name == "qmetric":
                checks = fn(p, rng, heavy=heavy)
            else:
                checks = fn(p, rng)
            results.append(SuiteResult(suite=name, q=p.q, checks=checks,
                                       seconds=time.time() - t0))
    return results
