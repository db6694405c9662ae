"""Piecewise-monotone polynomial interpolation and node construction.

Given nodes (x_i, y_i) with distinct consecutive values, find a polynomial q
with q(x_i) = y_i that is monotone on every [x_{i-1}, x_i]. The derivative
is built as a signed product over the turning nodes times a factor that is
kept positive between nodes, so the sign pattern follows from the
turning nodes and only the node values remain to be matched. Positivity
is imposed at sample points and the margin maximised by a linear
program. The result is
assembled in exact arithmetic and its monotonicity is certified.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from numpy.polynomial import chebyshev as C
from scipy.optimize import linprog

from .errors import ConstantPolynomial, InfeasibleAtMaxDegree
from .certify import certify_nonneg
from .poly import Interval, Poly, from_chebyshev, sup_abs_on

MIN_GAP = 1e-12
RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class NodeSet:
    nodes: tuple[tuple[float, float], ...]

    def __post_init__(self):
        nodes = tuple((float(x), float(y)) for x, y in self.nodes)
        object.__setattr__(self, "nodes", nodes)
        for (x0, y0), (x1, y1) in zip(nodes, nodes[1:]):
            if not x1 > x0:
                raise ValueError("node abscissae must be strictly increasing")
            if abs(y1 - y0) < MIN_GAP:
                raise ValueError(f"consecutive node values too close at x = {x0}, {x1}")

    @property
    def xs(self) -> np.ndarray:
        return np.array([x for x, _ in self.nodes])

    @property
    def ys(self) -> np.ndarray:
        return np.array([y for _, y in self.nodes])

    def __len__(self):
        return len(self.nodes)

    def directions(self) -> np.ndarray:
        return np.sign(np.diff(self.ys))

    def turning_nodes(self) -> list[float]:
        """Interior abscissae where the direction of the data reverses."""
        d = self.directions()
        return [float(self.xs[i]) for i in range(1, len(d)) if d[i] != d[i - 1]]


def _max_abs_derivative(p) -> float:
    from .bernstein import BernsteinForm

    if isinstance(p, BernsteinForm):
        # Bernstein coefficients of p' bound |p'| on [0, 1]
        return float(np.max(np.abs(p.derivative().values)))
    return sup_abs_on(p.derivative(), Interval(0.0, 1.0))[0]


def build_nodes(p, eps: float) -> NodeSet:
    """Nodes 0 = x_1 < ... < x_N = 1 with spacing below a continuity step.

    The step is delta = (eps/2) / max|p'| (at most 1/2), so |p(x) - p(y)| <
    eps/2 whenever |x - y| < delta. Each new node is taken from
    [x + delta/2, x + delta), scanning down from a preferred step for a point
    whose value differs from the current one. The preferred step is just
    under delta, or half the remaining distance once that lies in
    [delta, 2*delta), which avoids a sliver of an interval next to 1.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    slope = _max_abs_derivative(p)
    if slope == 0.0:
        raise ConstantPolynomial("p is constant on [0, 1]")
    delta = min(0.5, (eps / 2) / slope)

    xs = [0.0]
    ys = [float(p(0.0))]
    while 1.0 - xs[-1] >= delta:
        x = xs[-1]
        rest = 1.0 - x
        top = rest / 2 if rest < 2 * delta else delta * (1 - 2.0**-7)
        for step in np.linspace(top, delta / 2, 64):
            cand = x + step
            val = float(p(cand))
            if abs(val - ys[-1]) >= MIN_GAP:
                break
        else:
            raise ConstantPolynomial(f"p is flat on [{x + delta / 2}, {x + delta})")
        xs.append(cand)
        ys.append(val)
    y1 = float(p(1.0))
    if abs(y1 - ys[-1]) < MIN_GAP:
        raise ConstantPolynomial("value at 1 repeats the last node value")
    xs.append(1.0)
    ys.append(y1)
    return NodeSet(tuple(zip(xs, ys)))


def guard_extend(S: NodeSet, fam) -> NodeSet:
    """Add the guard nodes (-1, -1) and (2, 2) for P-like, (2, -1) for Q-like families."""
    from .membership import Family

    fam = Family.coerce(fam)
    right = 2.0 if fam.right_tail_up else -1.0
    return NodeSet(((-1.0, -1.0), *S.nodes, (2.0, right)))


def _solve(S: NodeSet, sigma_deg: int, per_interval: int | None = None):
    """Chebyshev coefficients of sigma on [x_0, x_N], or None if infeasible.

    The derivative is q' = sign * prod_j (x - t_j) * sigma(x) over the
    turning nodes t_j, so every sign requirement reduces to sigma > 0
    inside each node interval. That is imposed at Chebyshev-spaced sample
    points of every interval, relative to the typical size of sigma there,
    with the margin maximised by a linear program; the node values become
    linear equalities on the interval integrals.
    """
    xs, ys = S.xs, S.ys
    lo, hi = xs[0], xs[-1]
    n = sigma_deg
    m = per_interval or max(8, 2 * n + 2)
    turning = S.turning_nodes()
    lead = S.directions()[0] * _turn_sign(turning, 0.5 * (xs[0] + xs[1]))
    to_t = lambda x: (2 * x - (lo + hi)) / (hi - lo)  # noqa: E731
    gx, gw = np.polynomial.legendre.leggauss((n + len(turning)) // 2 + 2)
    # Chebyshev-Lobatto points of [0, 1], endpoints included
    unit = 0.5 * (1 - np.cos(np.pi * np.arange(m + 1) / m))
    rows, pos, floor = [], [], []
    for a, b, dy in zip(xs, xs[1:], np.diff(ys)):
        t = 0.5 * (a + b) + 0.5 * (b - a) * gx
        prod = np.prod([t - tj for tj in turning], axis=0) if turning else np.ones_like(t)
        # each equality reads (integral over interval i) / step_i = 1
        rows.append(0.5 * (b - a) * (gw * lead * prod) @ C.chebvander(to_t(t), n) / dy)
        size = abs(dy) / (0.5 * (b - a) * (gw @ np.abs(prod)))
        pos.append(C.chebvander(to_t(a + (b - a) * unit), n) / size)
        floor.append(np.ones(m + 1))
    A = np.array(rows)
    P = np.vstack(pos)
    floor = np.concatenate(floor)

    cost = np.zeros(n + 2)
    cost[-1] = -1.0
    res = linprog(
        cost,
        A_ub=np.hstack([-P, floor[:, None]]),
        b_ub=np.zeros(len(P)),
        A_eq=np.hstack([A, np.zeros((len(A), 1))]),
        b_eq=np.ones(len(A)),
        bounds=[(None, None)] * (n + 1) + [(None, 1.0)],
        method="highs",
    )
    if res.status != 0 or res.x[-1] <= 0:
        return None
    coef = res.x[:-1]
    # polish the equalities; the margin absorbs the small move
    for _ in range(2):
        coef = coef + np.linalg.lstsq(A, 1.0 - A @ coef, rcond=None)[0]
    if np.max(np.abs(A @ coef - 1.0)) > 1e-12 or np.min(P @ coef) <= 0:
        return None
    return lead, turning, coef


def _turn_sign(turning, x) -> float:
    return float(np.prod([np.sign(x - tj) for tj in turning])) if turning else 1.0


def _assemble(S: NodeSet, lead: float, turning, coef) -> Poly:
    """Exact q with q(x_0) = y_0 and the derivative described by ``coef``."""
    dq = from_chebyshev(coef, S.xs[0], S.xs[-1]) * Fraction(int(lead))
    for tj in turning:
        dq = dq * Poly.from_exact([-Fraction(tj), 1])
    q = dq.antiderivative()
    return q + (Fraction(S.ys[0]) - q.exact_at(S.xs[0]))


def _divide_root(c: list[Fraction], t: Fraction) -> list[Fraction] | None:
    """c / (x - t) when t is an exact root, else None."""
    quot, acc = [], c[-1]
    for v in reversed(c[:-1]):
        quot.append(acc)
        acc = v + acc * t
    return list(reversed(quot)) if acc == 0 else None


def verify_monotone(q: Poly, S: NodeSet, residual_tol: float = RESIDUAL_TOL, tol: float = 1e-10) -> bool:
    """Interpolation residual within tolerance and q' strictly signed on every interval.

    Exact zeros of q' at turning nodes are divided out first, and the
    cofactor is certified in exact arithmetic with the sign the data asks
    for, open at the interval ends. Where q' does not vanish exactly at a
    turning node, the interval is checked leaving out ``tol`` next to its
    ends instead: a zero of q' at or within ``tol`` of a node does not
    break monotonicity between nodes.
    """
    for x, y in S.nodes:
        if abs(float(q.exact_at(x)) - y) > residual_tol:
            return False
    dq = list(q.derivative().exact_coeffs())
    if not dq:
        return False
    removed = []
    for t in map(Fraction, S.turning_nodes()):
        while len(dq) > 1 and (reduced := _divide_root(dq, t)) is not None:
            dq = reduced
            removed.append(t)
    for (a, _), (b, _), s in zip(S.nodes, S.nodes[1:], S.directions()):
        fa, fb = Fraction(a), Fraction(b)
        mid = (fa + fb) / 2
        sign = s
        for t in removed:
            sign = -sign if mid < t else sign
        signed = [c if sign > 0 else -c for c in dq]
        # ends that are not turning nodes may still carry a zero of q'
        pad_lo = Fraction(0) if fa in removed else Fraction(min(tol, (b - a) / 4))
        pad_hi = Fraction(0) if fb in removed else Fraction(min(tol, (b - a) / 4))
        cert = certify_nonneg(signed, fa + pad_lo, fb - pad_hi, strict=True, open_lo=True, open_hi=True, stop_above=0.0)
        if not cert.certified:
            return False
    return True


def monotone_interpolate(S: NodeSet, tol: float = RESIDUAL_TOL, max_degree: int | None = None) -> Poly:
    """Interpolate the nodes with a polynomial monotone between consecutive nodes.

    Returns a solution of least degree for the construction, which is at
    least the number of turning nodes plus one (a line for collinear data).
    Raises InfeasibleAtMaxDegree when none exists up to the cap 4|S| + 20.
    The result carries exact rational coefficients.
    """
    if len(S) < 2:
        raise ValueError("need at least two nodes")
    cap = max_degree if max_degree is not None else 4 * len(S) + 20
    top = cap - len(S.turning_nodes()) - 1
    if top < 0:
        raise InfeasibleAtMaxDegree(f"{len(S.turning_nodes())} turning nodes need degree above {cap}")

    # feasibility is (nearly) monotone in the degree, so gallop and then bisect
    cache = {}

    def feasible(d):
        if d not in cache:
            cache[d] = _solve(S, d)
        return cache[d] is not None

    hi = 0
    while not feasible(hi):
        if hi == top:
            raise InfeasibleAtMaxDegree(f"no monotone interpolant up to degree {cap}")
        lo, hi = hi, min(top, 2 * hi + 1)
    lo = -1 if hi == 0 else lo
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if feasible(mid):
            hi = mid
        else:
            lo = mid

    for d in range(hi, top + 1):
        base = max(8, 2 * d + 2)
        for m in (base, 2 * base, 4 * base):
            sol = cache.pop(d, None) if m == base else _solve(S, d, m)
            if sol is not None and verify_monotone(q := _assemble(S, *sol), S, tol):
                return q
    raise InfeasibleAtMaxDegree(f"no verified monotone interpolant up to degree {cap}")
