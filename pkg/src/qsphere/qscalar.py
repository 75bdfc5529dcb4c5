"""Scalar arithmetic for the deformation parameter q in (0, 1].

Every structure constant of the q-deformed coordinate algebra is a Laurent
polynomial in s = sqrt(q) with rational coefficients, so the square root is
the stored unit.  Scalars run in one of two modes:

* float64 (the default), or
* exact rationals, available whenever s itself is rational.  Quantities
  that are genuinely irrational (square roots of q-brackets, L2 norms)
  force a silent fallback to float64; each fallback is recorded on the
  parameter as a precision downgrade.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

Scalar = Union[int, float, complex, Fraction]


def conj(c: Scalar) -> Scalar:
    """Complex conjugate; keeps rational values rational."""
    return c.conjugate()


def cabs(c: Scalar) -> float:
    """Magnitude as a float, for any scalar mode."""
    return float(abs(c))


def as_complex(c: Scalar) -> complex:
    return complex(c)


@dataclass(frozen=True)
class QParam:
    """Deformation parameter, stored through its square root s = sqrt(q).

    ``s_frac`` is set exactly when the parameter runs in exact-rational
    mode; construction through :meth:`exact` requires a rational s.
    ``tol`` is the absolute comparison tolerance used by float-mode checks
    throughout the package.
    """

    s: float
    s_frac: Fraction | None = None
    tol: float = 1e-10
    dps: int | None = None
    _downgrades: list = field(default_factory=list, compare=False, repr=False)

    def __post_init__(self):
        if not math.isfinite(self.s) or not (0.0 < self.s <= 1.0):
            raise ValueError(f"s must lie in (0, 1], got {self.s!r}")
        if self.s_frac is not None:
            if not (0 < self.s_frac <= 1):
                raise ValueError("exact s must lie in (0, 1]")
            if abs(float(self.s_frac) - self.s) > 1e-15:
                raise ValueError("float and exact values of s disagree")
        if self.dps is not None:
            if self.s_frac is not None:
                raise ValueError("choose either exact-rational or extended-precision mode")
            import mpmath
            mpmath.mp.dps = max(mpmath.mp.dps, self.dps + 5)

    @classmethod
    def from_q(cls, q: float, tol: float = 1e-10, dps: int | None = None) -> "QParam":
        if not (0.0 < q <= 1.0):
            raise ValueError(f"q must lie in (0, 1], got {q!r}")
        return cls(s=math.sqrt(q), tol=tol, dps=dps)

    @classmethod
    def exact(cls, s, tol: float = 1e-10) -> "QParam":
        """Exact-rational mode; ``s`` must be a rational number."""
        sf = Fraction(s)
        return cls(s=float(sf), s_frac=sf, tol=tol)

    @property
    def q(self) -> float:
        return self.s * self.s

    @property
    def q_frac(self) -> Fraction | None:
        return None if self.s_frac is None else self.s_frac * self.s_frac

    @property
    def is_exact(self) -> bool:
        return self.s_frac is not None

    @property
    def mode(self) -> str:
        return "exact-rational" if self.is_exact else "float64"

    @property
    def is_classical(self) -> bool:
        """True at the undeformed point q = 1."""
        return self.s == 1.0

    def _mp_s(self):
        import mpmath
        mpmath.mp.dps = max(mpmath.mp.dps, self.dps + 5)
        return mpmath.mpf(self.s)

    def spow(self, j: int) -> Scalar:
        """s**j, exact in exact mode."""
        if self.s_frac is not None:
            return self.s_frac ** j
        if self.dps is not None:
            return self._mp_s() ** j
        return self.s ** j

    def qpow(self, j: int) -> Scalar:
        """q**j, exact in exact mode."""
        if self.s_frac is not None:
            return (self.s_frac * self.s_frac) ** j
        if self.dps is not None:
            s = self._mp_s()
            return (s * s) ** j
        return (self.s * self.s) ** j

    def one(self) -> Scalar:
        if self.is_exact:
            return Fraction(1)
        if self.dps is not None:
            import mpmath
            return mpmath.mpf(1)
        return 1.0

    @property
    def prune_rel(self) -> float:
        """Relative coefficient-pruning threshold for inexact modes."""
        if self.dps is not None:
            return 10.0 ** (-(self.dps - 2))
        return 1e-14

    def note_downgrade(self, reason: str) -> None:
        if self.is_exact and reason not in self._downgrades:
            self._downgrades.append(reason)

    @property
    def downgraded(self) -> bool:
        return bool(self._downgrades)

    @property
    def downgrades(self) -> tuple:
        return tuple(self._downgrades)


def bracket(n: int, p: QParam) -> Scalar:
    """The q-bracket: the sum of q**(2m) over 0 <= m < n.

    Equals n at q = 1 and 0 at n = 0; strictly increasing in n.
    """
    if n < 0:
        raise ValueError("bracket is undefined for negative n")
    if p.is_exact:
        r = p.q_frac ** 2
        if r == 1:
            return Fraction(n)
        return (1 - r ** n) / (1 - r)
    if p.dps is not None:
        s = p._mp_s()
        r = s ** 4
        if r == 1:
            import mpmath
            return mpmath.mpf(n)
        return (1 - r ** n) / (1 - r)
    r = p.q * p.q
    if r == 1.0:
        return float(n)
    return (1.0 - r ** n) / (1.0 - r)


def s_power(j: int, p: QParam) -> Scalar:
    """Integer power of s = sqrt(q); houses the half-integer powers of q."""
    return p.spow(j)


def sqrt_scalar(x: Scalar, p: QParam) -> Scalar:
    """Square root of a nonnegative scalar, in the parameter's mode.

    Exact values stay exact when the root is rational; otherwise the value
    degrades to float64 and the downgrade is recorded on the parameter.
    """
    if isinstance(x, Fraction):
        num, den = x.numerator, x.denominator
        rn, rd = math.isqrt(num), math.isqrt(den)
        if rn * rn == num and rd * rd == den:
            return Fraction(rn, rd)
        p.note_downgrade("irrational square root of a q-bracket")
        return math.sqrt(num / den)
    if p.dps is not None:
        import mpmath
        return mpmath.sqrt(x)
    xf = x.real if isinstance(x, complex) else float(x)
    if xf < 0:
        raise ValueError(f"sqrt of negative scalar {x!r}")
    return math.sqrt(xf)
