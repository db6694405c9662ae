import numpy as np
import pytest
import sympy as sp

from oracles import X
from qsppoly.correction import (
    CorrectionParams,
    Mode,
    Parity,
    approximate_in_family,
    approximate_on_subset,
    check_step2_shape,
    correct_to_family,
    r_poly,
    r_sup,
    select_tail_params,
    sup_error_on,
)
from qsppoly.errors import PreconditionFailed
from qsppoly.membership import Family, Verdict, check_family
from qsppoly.poly import Interval, Poly, sup_abs_on
from qsppoly.targets import TargetFunction


def sympy_r(a, b):
    return [int(c) for c in reversed(sp.Poly(sp.expand(X ** (2 * a + 1) * (1 - X) ** b), X).all_coeffs())]


def test_r_poly_examples():
    assert r_poly(CorrectionParams(1, 1)).coeffs == (0, 0, 0, 1, -1)
    assert r_poly(CorrectionParams(1, 2)).coeffs == (0, 0, 0, 1, -2, 1)
    for a in range(1, 5):
        for b in range(1, 7):
            r = r_poly(CorrectionParams(a, b))
            assert [int(c) for c in r.exact_coeffs()] == sympy_r(a, b)
            assert r.exact_at(0) == 0 and r.exact_at(1) == 0


def test_params_validated():
    for bad in ((0, 1), (1, 0), (-1, 2)):
        with pytest.raises(ValueError):
            CorrectionParams(*bad)


def test_r_sup_examples():
    cp = CorrectionParams(1, 2)
    assert cp.gamma == pytest.approx(2 / 3) and cp.argmax == pytest.approx(0.6)
    assert r_sup(cp) == pytest.approx(0.03456, abs=1e-15)
    assert r_sup(CorrectionParams(1, 3)) == pytest.approx(2**-6, abs=1e-15)
    for a in range(1, 7):
        for b in range(1, 7):
            cp = CorrectionParams(a, b)
            assert r_sup(cp) < 2.0 ** -min(2 * a + 1, b)
            assert abs(r_sup(cp) - sup_abs_on(r_poly(cp), Interval(0, 1))[0]) <= 1e-10


def test_select_tail_params_examples():
    cp = select_tail_params(Poly([-2.0]), "PositiveBeyond2", Parity.EVEN)
    assert (cp.alpha, cp.beta) == (1, 2)
    assert r_poly(cp)(2.0) - 2 == 6
    assert select_tail_params(Poly([]), "PositiveBeyond2", Parity.EVEN) == CorrectionParams(1, 2)
    cp = select_tail_params(Poly([0, 1.0]), "NegativeBelowMinus1")
    assert (cp.alpha, cp.beta) == (1, 1)
    xs = np.linspace(-50, -1, 2001)
    assert np.all(r_poly(cp)(xs) + xs < 0)


def test_identity_fast_path():
    u, trace = correct_to_family(Poly([0, 1.0]), "P", 0.1)
    assert u.coeffs == (0, 1) and trace.mode is Mode.FAST_PATH and trace.final is None


def test_precondition_checked():
    assert check_step2_shape(Poly([0, 0, 3, -2.0]), "P")
    with pytest.raises(PreconditionFailed):
        correct_to_family(Poly([0, 0, 3, -2.0]), "Q", 0.1)


@pytest.mark.parametrize("mode", [Mode.MINIMAL_SEARCH, Mode.PROOF_FAITHFUL])
def test_square_pipeline(mode):
    f = TargetFunction.parse("square")
    u, rep = approximate_in_family(f, "P", 0.15, mode)
    assert check_family(u, Family.P).verdict is Verdict.MEMBER
    xs = np.linspace(0, 1, 10_001)
    assert rep.measured_error < 0.15
    assert np.max(np.abs(np.array([float(u.exact_at(x)) for x in xs[::50]]) - xs[::50] ** 2)) < 0.15
    if mode is Mode.PROOF_FAITHFUL and not rep.trace.fallback:
        t = rep.trace
        assert t.final.alpha == sum(p.alpha for p in t.tail_params)
        assert all(p.beta % 2 == 0 for p in t.tail_params)
        assert t.final.beta == 2 * t.m + t.beta0 + sum(p.beta for p in t.tail_params)


def test_q_pipeline_parity():
    u, rep = approximate_in_family(TargetFunction.parse("scaled_bump:0.9"), "Q", 0.15, Mode.PROOF_FAITHFUL)
    assert check_family(u, Family.Q).verdict is Verdict.MEMBER
    t = rep.trace
    assert t.final.beta % 2 == 1
    assert all(p.beta % 2 == 1 for p in t.tail_params)
    assert t.final.beta == sum(p.beta for p in t.tail_params)
    xs = np.linspace(1 + 1e-6, 20, 2001)
    assert all(u.exact_at(x) < 0 for x in xs[::100])


def test_zero_target_closed_form():
    u, rep = approximate_in_family(TargetFunction.parse("zero"), "Q", 0.2)
    np.testing.assert_allclose(u.coeffs, [0, 0.2, -0.2])
    assert rep.measured_error == pytest.approx(0.05)


def test_identity_target():
    u, rep = approximate_in_family(TargetFunction.parse("identity"), "P", 0.1)
    assert rep.measured_error == 0 and u.coeffs == (0, 1)


def test_subset_constant():
    pieces = [(Interval(0.2, 0.8), lambda x: 0.5 + 0 * np.asarray(x))]
    u = approximate_on_subset(pieces, "Pprime", 0.2)
    assert check_family(u, Family.Pprime).verdict is Verdict.MEMBER
    assert sup_error_on(u, pieces) < 0.2


def test_subset_without_gaps_is_plain_pipeline():
    pieces = [(Interval(0, 1), lambda x: np.asarray(x, dtype=float))]
    u = approximate_on_subset(pieces, "Pprime", 0.1)
    assert u.coeffs == (0, 1)
