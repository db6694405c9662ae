from fractions import Fraction
from math import comb

import sympy as sp
from hypothesis import given, strategies as st

from oracles import X, sympy_poly
from qsppoly.certify import _split, certify_halfline, certify_nonneg, integer_bernstein

small_ints = st.lists(st.integers(-40, 40), min_size=1, max_size=10)


def bern_eval(b, t):
    n = len(b) - 1
    return sum(Fraction(b[k]) * comb(n, k) * t**k * (1 - t) ** (n - k) for k in range(n + 1))


@given(small_ints, st.fractions(-3, 3), st.fractions(Fraction(1, 8), 4))
def test_integer_bernstein_reproduces_polynomial(coeffs, lo, width):
    c = [Fraction(v, 7) for v in coeffs]
    ints, scale = integer_bernstein(c, lo, width)
    for t in (Fraction(0), Fraction(1, 3), Fraction(3, 4), Fraction(1)):
        x = lo + width * t
        assert bern_eval(ints, t) / scale == sum(ck * x**k for k, ck in enumerate(c))


@given(small_ints)
def test_split_halves(b):
    left, right = _split(b)
    n = len(b) - 1
    for t in (Fraction(0), Fraction(2, 5), Fraction(1)):
        assert bern_eval(left, t) / 2**n == bern_eval(b, t / 2)
        assert bern_eval(right, t) / 2**n == bern_eval(b, (1 + t) / 2)


@given(st.lists(st.integers(-6, 6), min_size=2, max_size=8), st.integers(-3, 2), st.integers(1, 4))
def test_nonneg_verdict_matches_sympy(coeffs, lo, w):
    c = [Fraction(v, 3) for v in coeffs]
    while c and c[-1] == 0:
        c.pop()
    if len(c) < 2:
        return
    P = sympy_poly(c)
    a, b = sp.Integer(lo), sp.Integer(lo + w)
    # nonnegative on [a, b] iff the minimum over endpoints and critical points is >= 0
    pts = [a, b] + [r for r in sp.real_roots(P.diff(X)) if a <= r <= b]
    truth = min(P.eval(p) for p in pts) >= 0
    cert = certify_nonneg(c, Fraction(lo), Fraction(lo + w))
    assert (cert.violation == 0) == truth


def test_negative_dip_is_found():
    # positive at both ends, negative in a narrow window around 0.15
    c = [Fraction(77, 1000), Fraction(2273, 100), Fraction(-31335, 100), Fraction(10521, 10)]
    cert = certify_nonneg(c, Fraction(0), Fraction(1, 4), strict=True)
    assert cert.violation > 0 and any(0.1 < x < 0.2 for x, _ in cert.witnesses)


def test_halfline():
    # x^2 - 4 >= 0 on [3, inf), not on [1, inf)
    c = [Fraction(-4), Fraction(0), Fraction(1)]
    assert certify_halfline(c, Fraction(3), +1).violation == 0
    assert certify_halfline(c, Fraction(1), +1).violation > 0
    # -x^3 > 0 for x < 0, open at 0
    assert certify_halfline([0, 0, 0, Fraction(-1)], Fraction(0), -1, strict=True, open_start=True).certified
