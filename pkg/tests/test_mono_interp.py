import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import strictly_monotone_between
from qsppoly.errors import ConstantPolynomial, InfeasibleAtMaxDegree
from qsppoly.mono_interp import NodeSet, build_nodes, guard_extend, monotone_interpolate, verify_monotone
from qsppoly.poly import Poly


def residual(q, S):
    return max(abs(float(q.exact_at(x)) - y) for x, y in S.nodes)


def test_build_nodes_examples():
    S = build_nodes(Poly([0, 1]), 0.5)
    xs = S.xs
    assert xs[0] == 0 and xs[-1] == 1
    gaps = np.diff(xs)
    assert np.all(gaps >= 0.125) and np.all(gaps < 0.25)
    assert len(set(S.ys)) == len(S)
    wide = build_nodes(Poly([0, 1]), 4)
    assert wide.xs[0] == 0 and wide.xs[-1] == 1
    assert np.all(np.diff(wide.xs) >= 0.25) and np.all(np.diff(wide.xs) < 0.5)
    with pytest.raises(ConstantPolynomial):
        build_nodes(Poly([0.3]), 0.1)


def test_guard_extend_examples():
    assert guard_extend(NodeSet(((0, 0), (1, 1))), "P").nodes == ((-1, -1), (0, 0), (1, 1), (2, 2))
    got = guard_extend(NodeSet(((0, 0), (0.5, 0.3), (1, 0))), "Q").nodes
    assert got[0] == (-1, -1) and got[-1] == (2, -1) and got[1:-1] == ((0, 0), (0.5, 0.3), (1, 0))
    assert list(guard_extend(NodeSet(((0, 0), (1, 1))), "P").xs) == sorted(guard_extend(NodeSet(((0, 0), (1, 1))), "P").xs)


def test_node_set_invariants():
    with pytest.raises(ValueError):
        NodeSet(((0, 0), (0, 1)))
    with pytest.raises(ValueError):
        NodeSet(((0, 0.5), (1, 0.5)))


def test_monotone_interpolate_examples():
    assert monotone_interpolate(NodeSet(((-1, -1), (0, 0), (1, 1), (2, 2)))).coeffs == (0, 1)
    assert monotone_interpolate(NodeSet(((0, 0), (1, 1)))).coeffs == (0, 1)
    S = NodeSet(((-1, -1), (0, 0), (0.5, 0.8), (1, 1), (2, 2)))
    q = monotone_interpolate(S)
    assert q.degree() >= 3
    assert residual(q, S) <= 1e-8
    assert verify_monotone(q, S)
    assert strictly_monotone_between(q.exact_coeffs(), S.xs, S.directions())


def test_zigzag_matches_sympy_oracle():
    S = NodeSet(((-1, -1), (0, 0), (0.3, 0.7), (0.55, 0.2), (1, 1), (2, 2)))
    q = monotone_interpolate(S)
    assert residual(q, S) <= 1e-8
    assert strictly_monotone_between(q.exact_coeffs(), S.xs, S.directions())


def test_verifier_rejects_non_monotone():
    S = NodeSet(((0, 0), (0.5, 0.25), (1, 1)))
    # (x^3 + x)/2 hits 0 and 1 but gives 0.3125 at 1/2
    assert not verify_monotone(Poly([0, 0.5, 0, 0.5]), S)
    # 4x^3 - 6x^2 + 3x: q' = 3(2x - 1)^2 vanishes only at the node 1/2, so it is monotone
    q = Poly([0, 3, -6, 4])
    S2 = NodeSet(((0, 0), (0.5, 0.5), (1, 1)))
    assert verify_monotone(q, S2)
    # 2x^2 - x interpolates (0, 0) and (1, 1) but dips below 0 first
    p = Poly([0, -1, 2])
    assert not verify_monotone(p, NodeSet(((0, 0), (1, 1))))


def test_degree_cap_reported():
    S = NodeSet(tuple((i / 7, float(i % 2)) for i in range(8)))
    with pytest.raises(InfeasibleAtMaxDegree):
        monotone_interpolate(S, max_degree=8)


node_sets = st.integers(3, 6).flatmap(
    lambda n: st.tuples(
        st.lists(st.floats(0.08, 0.5), min_size=n - 1, max_size=n - 1),
        st.lists(st.floats(0.0, 1.0), min_size=n, max_size=n),
    )
)


@given(node_sets)
def test_output_properties(data):
    gaps, ys = data
    xs = np.concatenate([[0.0], np.cumsum(gaps)])
    for i in range(1, len(ys)):
        if abs(ys[i] - ys[i - 1]) < 0.05:
            ys[i] = ys[i - 1] + (0.05 if ys[i - 1] < 0.5 else -0.05)
    S = NodeSet(tuple(zip(xs, ys)))
    try:
        q = monotone_interpolate(S)
    except InfeasibleAtMaxDegree:
        return  # reported, never a silent bad answer
    assert residual(q, S) <= 1e-8
    assert verify_monotone(q, S)


@given(st.lists(st.floats(0.05, 0.4), min_size=2, max_size=6), st.lists(st.floats(0.05, 0.3), min_size=6, max_size=6))
def test_monotone_data_gives_monotone_poly(gaps, rises):
    xs = np.concatenate([[0.0], np.cumsum(gaps)])
    ys = np.concatenate([[0.0], np.cumsum(rises[: len(gaps)])])
    S = NodeSet(tuple(zip(xs, ys)))
    try:
        q = monotone_interpolate(S)
    except InfeasibleAtMaxDegree:
        return  # steep slope contrasts can need more than the degree cap; that is reported
    assert strictly_monotone_between(q.exact_coeffs(), [xs[0], xs[-1]], [1])
