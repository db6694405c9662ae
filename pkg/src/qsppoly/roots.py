"""Real-root isolation and sign analysis on closed intervals.

Isolation recurses on derivatives: the real roots of ``p'`` split the
interval into pieces on which ``p`` is monotone, so each piece holds at most
one root and a bracketing solver finds it. Critical points where ``|p|`` dips
below a threshold derived from ``tol`` and the local curvature are reported
as (even multiplicity) roots, since no sign change exists there to bracket.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from scipy.optimize import brentq

from .poly import Interval, Poly, derivative, eval_error_bound

DEFAULT_TOL = 1e-10


def _bracket(p: Poly, a: float, b: float, fa: float, fb: float) -> float:
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    xtol = 1e-15 * (1.0 + max(abs(a), abs(b)))
    return brentq(p, a, b, xtol=xtol, rtol=8.9e-16, maxiter=200)


def _critical_points(p: Poly, lo: float, hi: float, tol: float) -> list[float]:
    """Sorted superset of the points in [lo, hi] where ``p'`` changes sign."""
    if p.degree() <= 1:
        return []
    return _isolate(derivative(p), lo, hi, tol)


def _isolate(p: Poly, lo: float, hi: float, tol: float) -> list[float]:
    n = p.degree()
    if n <= 0:
        return []
    if n == 1:
        r = -p.coeffs[0] / p.coeffs[1]
        return [r] if lo <= r <= hi else []

    crit = [c for c in _critical_points(p, lo, hi, tol) if lo < c < hi]
    pts = [lo, *crit, hi]
    vals = [p(t) for t in pts]
    d2 = derivative(derivative(p))
    flagged = [_touches_zero(p, d2, t, v, tol) for t, v in zip(pts, vals)]

    found = [t for t, flag in zip(pts, flagged) if flag]
    for k in range(len(pts) - 1):
        if flagged[k] or flagged[k + 1]:
            continue
        if vals[k] * vals[k + 1] < 0:
            found.append(_bracket(p, pts[k], pts[k + 1], vals[k], vals[k + 1]))
    return _dedupe(sorted(found), tol)


def _touches_zero(p: Poly, d2: Poly, t: float, value: float, tol: float) -> bool:
    """Whether ``p`` is indistinguishable from zero at the breakpoint ``t``.

    Either the value is within the rounding error of evaluation, or it is so
    small that any roots it hides lie within ``tol`` of ``t`` (a quadratic
    model about the breakpoint).
    """
    if value == 0.0:
        return True
    if abs(value) <= 32 * eval_error_bound(p, t):
        return True
    curv = abs(d2(t))
    return abs(value) <= 0.5 * curv * tol * tol


def _dedupe(xs: list[float], tol: float) -> list[float]:
    out: list[float] = []
    for x in xs:
        if out and x - out[-1] <= 2 * tol:
            continue
        out.append(x)
    return out


def roots_in(p: Poly, interval: Interval, tol: float = DEFAULT_TOL) -> list[float]:
    """All real roots of ``p`` in the closed interval, strictly increasing.

    Simple roots are bracketed to (much) better than ``tol``. A critical
    point ``c`` counts as a (touching, even multiplicity) root when ``|p(c)|``
    is within evaluation rounding error, or below ``|p''(c)| * tol**2 / 2``
    so that any roots near ``c`` lie within ``tol`` of it. Such roots are
    reported once.
    """
    if p.is_zero():
        raise ValueError("the zero polynomial has no isolated roots")
    if tol <= 0:
        raise ValueError("tol must be positive")
    return _isolate(p, interval.lo, interval.hi, tol)


@dataclass(frozen=True)
class Extrema:
    min_value: float
    argmin: float
    max_value: float
    argmax: float


def extrema(p: Poly, interval: Interval, tol: float = DEFAULT_TOL) -> Extrema:
    """Global minimum and maximum of ``p`` over the closed interval."""
    lo, hi = interval.lo, interval.hi
    cands = [lo, hi, *(c for c in _critical_points(p, lo, hi, tol) if lo < c < hi)]
    vals = [p(t) for t in cands]
    i_min = min(range(len(vals)), key=vals.__getitem__)
    i_max = max(range(len(vals)), key=vals.__getitem__)
    return Extrema(vals[i_min], cands[i_min], vals[i_max], cands[i_max])


class SignKind(enum.Enum):
    STRICTLY_POSITIVE = "StrictlyPositive"
    STRICTLY_NEGATIVE = "StrictlyNegative"
    NON_NEGATIVE = "NonNegative"
    NON_POSITIVE = "NonPositive"
    MIXED = "Mixed"

    @property
    def strict(self) -> bool:
        return self in (SignKind.STRICTLY_POSITIVE, SignKind.STRICTLY_NEGATIVE)


@dataclass(frozen=True)
class SignVerdict:
    kind: SignKind
    witness: float | None
    margin: float

    def __post_init__(self):
        if (self.witness is not None) != (self.kind is SignKind.MIXED):
            raise ValueError("a witness is present exactly for Mixed verdicts")


def sign_on(
    p: Poly, interval: Interval, strict_interior: bool = False, tol: float = DEFAULT_TOL
) -> SignVerdict:
    """Classify the sign pattern of ``p`` over the interval.

    With ``strict_interior`` a root at (within ``tol`` of) an endpoint does not
    spoil a strict verdict. ``margin`` is the smallest ``|p|`` among the probe
    points used to read off the sign of each root-free piece.
    """
    lo, hi = interval.lo, interval.hi
    if p.is_zero():
        return SignVerdict(SignKind.NON_NEGATIVE, None, 0.0)
    roots = roots_in(p, interval, tol)
    if strict_interior:
        blocking = [r for r in roots if lo + tol < r < hi - tol]
    else:
        blocking = roots

    pts = sorted({lo, hi, *roots})
    probes = []
    for a, b in zip(pts, pts[1:]):
        # with strict_interior, slivers within tol of an end do not count
        edge = strict_interior and (b <= lo + tol or a >= hi - tol)
        if b > a and not edge:
            probes.append((0.5 * (a + b), b - a))
    if not probes:
        probes.append((lo, 0.0))
    vals = [(x, p(x), w) for x, w in probes]

    pos = [(x, v, w) for x, v, w in vals if v > 0]
    neg = [(x, v, w) for x, v, w in vals if v < 0]
    margin = min(abs(v) for _, v, _ in vals)
    if pos and neg:
        pos_len = sum(w for *_, w in pos)
        neg_len = sum(w for *_, w in neg)
        minority = neg if pos_len >= neg_len else pos
        witness = max(minority, key=lambda t: abs(t[1]))[0]
        return SignVerdict(SignKind.MIXED, witness, margin)
    if pos or not neg:
        kind = SignKind.NON_NEGATIVE if blocking else SignKind.STRICTLY_POSITIVE
    else:
        kind = SignKind.NON_POSITIVE if blocking else SignKind.STRICTLY_NEGATIVE
    return SignVerdict(kind, None, margin)
