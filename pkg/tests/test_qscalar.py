import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from qsphere import QParam, bracket, s_power, sqrt_scalar

qs = st.floats(min_value=0.05, max_value=0.999)


def test_bracket_trivial_values():
    p = QParam.from_q(0.37)
    assert bracket(0, p) == 0
    assert bracket(1, p) == pytest.approx(1.0, abs=1e-15)
    p1 = QParam.from_q(1.0)
    assert bracket(3, p1) == 3.0
    assert bracket(17, p1) == 17.0


def test_bracket_defining_sum_oracle():
    # independent oracle: evaluate the defining sum directly
    p = QParam.from_q(0.5)
    for n in range(12):
        direct = sum(p.q ** (2 * m) for m in range(n))
        assert bracket(n, p) == pytest.approx(direct, abs=1e-14)
    assert bracket(2, p) == pytest.approx(1.25, abs=1e-15)


def test_s_power():
    p = QParam.from_q(0.25)
    assert s_power(0, p) == 1.0
    assert s_power(2, p) == pytest.approx(0.25, abs=1e-15)
    assert s_power(-1, p) == pytest.approx(2.0, abs=1e-15)


@given(q=qs)
@settings(max_examples=40, deadline=None)
def test_bracket_recurrence(q):
    p = QParam.from_q(q)
    for n in range(0, 51):
        lhs = bracket(n + 1, p)
        rhs = 1.0 + p.q ** 2 * bracket(n, p)
        assert lhs == pytest.approx(rhs, abs=1e-12)


@given(q=qs)
@settings(max_examples=40, deadline=None)
def test_bracket_vs_q_integer(q):
    p = QParam.from_q(q)
    for n in range(1, 51):
        qi = (q ** n - q ** (-n)) / (q - 1.0 / q)
        assert abs(float(bracket(n, p)) - q ** (n - 1) * qi) <= 1e-12


@given(q=qs)
@settings(max_examples=25, deadline=None)
def test_bracket_monotone(q):
    p = QParam.from_q(q)
    nmax = min(40, int(15.0 * math.log(10.0) / (-2.0 * math.log(q))))
    vals = [float(bracket(n, p)) for n in range(nmax)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_exact_mode_rationals():
    p = QParam.exact(Fraction(1, 2))
    assert p.mode == "exact-rational"
    assert bracket(3, p) == Fraction(1) + Fraction(1, 16) + Fraction(1, 256)
    assert p.qpow(-2) == Fraction(16)
    assert s_power(3, p) == Fraction(1, 8)


def test_exact_mode_requires_rational_s():
    with pytest.raises(ValueError):
        QParam(s=math.sqrt(0.5), s_frac=Fraction(1, 2))


def test_param_validation():
    with pytest.raises(ValueError):
        QParam.from_q(1.5)
    with pytest.raises(ValueError):
        QParam.from_q(0.0)
    with pytest.raises(ValueError):
        QParam.from_q(-0.3)


def test_sqrt_downgrade_flag():
    p = QParam.exact(Fraction(1, 2))
    assert sqrt_scalar(Fraction(9, 4), p) == Fraction(3, 2)
    assert not p.downgraded
    val = sqrt_scalar(Fraction(1, 2), p)
    assert isinstance(val, float)
    assert p.downgraded
    assert "square root" in p.downgrades[0]


def test_classical_flag_and_mode():
    assert QParam.from_q(1.0).is_classical
    assert not QParam.from_q(0.99).is_classical
    assert QParam.from_q(0.5).mode == "float64"
    assert QParam.exact(1).is_classical


def test_extended_precision_mode():
    import mpmath
    p = QParam.from_q(0.3, dps=40)
    v = bracket(10, p)
    assert isinstance(v, mpmath.mpf)
    assert abs(float(v) - float(bracket(10, QParam.from_q(0.3)))) < 1e-12
