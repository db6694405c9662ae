"""Membership of polynomials in the families P, Q, P', Q' and of targets in F1, F2.

P:  0 <= p <= 1 on [0, 1],  p <= 0 for x <= 0,  p >= 1 for x >= 1.
Q:  0 <= p <= 1 on [0, 1],  p <= 0 for x <= 0,  p <= 0 for x >= 1.
P' and Q' are the strict versions on the open sets (0, 1), x < 0 and x > 1.
F1: continuous f on [0, 1] with range in [0, 1], f(0) = 0 and f(1) = 1.
F2: the same with f(1) = 0.

Each clause is reduced to "g >= 0 on an interval" for a suitable g and
certified exactly (see ``certify``). Half-lines are cut at a Cauchy bound of
g, past which g has no roots and its sign is that of its leading term.

Float coefficients only pin the intended polynomial down to rounding, so a
deficit no larger than the rounding noise of the coefficients at that point
is not held against a polynomial given by floats. Polynomials carrying exact
coefficients get no such allowance.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .certify import Certificate, NoiseFloor, as_float, certify_halfline, certify_nonneg, halfline_bound, horner_exact
from .poly import UNIT_ROUNDOFF, Interval, Poly
from .targets import TargetFunction

DEFAULT_TOL = 1e-9


class Family(enum.Enum):
    P = "P"
    Q = "Q"
    Pprime = "Pprime"
    Qprime = "Qprime"

    @property
    def strict(self) -> bool:
        return self in (Family.Pprime, Family.Qprime)

    @property
    def right_tail_up(self) -> bool:
        """True when the family asks p >= 1 beyond 1 (P-like), False for p <= 0."""
        return self in (Family.P, Family.Pprime)

    @classmethod
    def coerce(cls, v) -> "Family":
        return v if isinstance(v, cls) else cls(str(v))


class TargetClass(enum.Enum):
    F1 = "F1"
    F2 = "F2"

    @classmethod
    def coerce(cls, v) -> "TargetClass":
        return v if isinstance(v, cls) else cls(str(v))


class Verdict(enum.Enum):
    MEMBER = "Member"
    MEMBER_WITHIN_TOL = "MemberWithinTol"
    NOT_MEMBER = "NotMember"


@dataclass
class MembershipReport:
    family: object
    verdict: Verdict
    witnesses: list[tuple[float, float, str]] = field(default_factory=list)
    margins: dict[str, float] = field(default_factory=dict)
    checked_bound: float = 2.0

    def __post_init__(self):
        if (self.verdict is Verdict.NOT_MEMBER) != bool(self.witnesses):
            raise ValueError("witnesses must be present exactly for NotMember")

    @property
    def ok(self) -> bool:
        return self.verdict is not Verdict.NOT_MEMBER

    def to_json(self) -> dict:
        return {
            "family": self.family.value,
            "verdict": self.verdict.value,
            "witnesses": [{"x": x, "value": v, "clause": c} for x, v, c in self.witnesses],
            "margins": {k: (v if math.isfinite(v) else None) for k, v in self.margins.items()},
            "checked_bound": self.checked_bound,
        }


CLAUSE_TEXT = {
    "i_low": "i: p(x) >= 0 on [0,1]",
    "i_high": "i: p(x) <= 1 on [0,1]",
    "ii": "ii: p(x) <= 0 for x <= 0",
    "iii": "iii: p(x) >= 1 for x >= 1",
    "iii'": "iii': p(x) <= 0 for x >= 1",
}
STRICT_TEXT = {
    "i_low": "i: p(x) > 0 on (0,1)",
    "i_high": "i: p(x) < 1 on (0,1)",
    "ii": "ii: p(x) < 0 for x < 0",
    "iii": "iii: p(x) > 1 for x > 1",
    "iii'": "iii': p(x) < 0 for x > 1",
}
# a probe point checked first for each clause, so witnesses are readable
PROBES = {"i_low": 0.5, "i_high": 0.5, "ii": -1, "iii": 2, "iii'": 2}


def _clauses(p: list[Fraction], fam: Family):
    """(name, g, lo, hi) with the clause reading g >= 0 on [lo, hi]; None is +-inf."""
    one_minus = [-c for c in p] or [Fraction(0)]
    one_minus[0] += 1
    p_minus_one = [c for c in p] or [Fraction(0)]
    p_minus_one[0] -= 1
    neg = [-c for c in p]
    out = [
        ("i_low", list(p), Fraction(0), Fraction(1)),
        ("i_high", one_minus, Fraction(0), Fraction(1)),
        ("ii", neg, None, Fraction(0)),
    ]
    if fam.right_tail_up:
        out.append(("iii", p_minus_one, Fraction(1), None))
    else:
        out.append(("iii'", neg, Fraction(1), None))
    return out


def _trim(c: list[Fraction]) -> list[Fraction]:
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return c


def _noise_fn(p: Poly):
    if p.exact is not None:
        return None
    return NoiseFloor(p.coeffs, 8 * max(len(p.coeffs), 1) * UNIT_ROUNDOFF)


def _certify_clause(g, lo, hi, fam: Family, noise, tol):
    """Certify g >= 0 on the (possibly unbounded) interval; returns (cert, bound).

    ``bound`` is the root bound of g, reported for information: half-lines
    are certified whole.
    """
    g = _trim(g)
    strict = fam.strict
    bound = halfline_bound(g)
    # in the strict families every clause interval is open at its finite ends
    if lo is None:
        cert = certify_halfline(g, hi, -1, strict=strict, open_start=True, noise=noise, stop_above=tol)
    elif hi is None:
        cert = certify_halfline(g, lo, +1, strict=strict, open_start=True, noise=noise, stop_above=tol)
    else:
        cert = certify_nonneg(
            g, lo, hi, strict=strict, open_lo=True, open_hi=True, noise=noise, stop_above=tol,
        )
    return cert, bound


def check_family(p: Poly, fam, tol: float = DEFAULT_TOL) -> MembershipReport:
    """Decide whether ``p`` lies in the family, up to ``tol`` in function value.

    Member means every clause holds (for float-coefficient input, up to the
    coefficient rounding noise). MemberWithinTol means the worst violation is
    at most ``tol``, or a strict clause holds only with equality somewhere.
    """
    fam = Family.coerce(fam)
    if p.is_zero():
        raise ValueError("check_family needs a nonzero polynomial")
    if not tol > 0:
        raise ValueError("tol must be positive")
    coeffs = list(p.exact_coeffs())
    noise = _noise_fn(p)
    text = STRICT_TEXT if fam.strict else CLAUSE_TEXT

    margins = {}
    worst = 0.0
    touch = False
    witnesses: list[tuple[float, float, str]] = []
    bound_used = 2.0
    for name, g, lo, hi in _clauses(coeffs, fam):
        cert, bound = _certify_clause(g, lo, hi, fam, noise, tol)
        bound_used = max(bound_used, float(bound))
        margins[name] = cert.margin
        effective = cert.violation
        touch = touch or cert.touch
        worst = max(worst, effective)
        if effective > tol:
            witnesses.extend(_witnesses(name, cert, coeffs, text[name], tol))

    if witnesses:
        verdict = Verdict.NOT_MEMBER
    elif worst > 0 or touch:
        verdict = Verdict.MEMBER_WITHIN_TOL
    else:
        verdict = Verdict.MEMBER
    return MembershipReport(fam, verdict, witnesses, margins, bound_used)


def _witnesses(name, cert: Certificate, coeffs, text, tol):
    out = []
    probe = PROBES[name]
    g_probe = _g_value(name, coeffs, probe)
    if g_probe < -tol:
        out.append((float(probe), as_float(horner_exact(coeffs, probe)), text))
    ranked = sorted(cert.witnesses, key=lambda t: t[1])
    for x, gv in ranked:
        if -gv > tol and all(x != w[0] for w in out):
            out.append((x, as_float(horner_exact(coeffs, Fraction(x))), text))
        if len(out) >= 5:
            break
    if not out:
        # violation bound came from an unresolved piece; its sample point is the witness
        x, _ = min(cert.witnesses, key=lambda t: t[1])
        out.append((x, as_float(horner_exact(coeffs, Fraction(x))), text))
    return out


def _g_value(name, coeffs, x) -> Fraction:
    v = horner_exact(coeffs, x)
    if name == "i_low":
        return v
    if name == "i_high":
        return 1 - v
    if name in ("ii", "iii'"):
        return -v
    return v - 1


def parity_consequence(p: Poly, fam) -> bool:
    """Degree parity implied by membership: odd for P-like families, even for Q-like."""
    fam = Family.coerce(fam)
    odd = p.degree() % 2 == 1
    return odd if fam.right_tail_up else not odd


def check_target(f: TargetFunction, fam, tol: float = DEFAULT_TOL) -> MembershipReport:
    """Decide whether the target lies in F1 (f(1) = 1) or F2 (f(1) = 0)."""
    fam = TargetClass.coerce(fam)
    right = 1.0 if fam is TargetClass.F1 else 0.0
    if not f.continuous:
        return MembershipReport(
            fam, Verdict.NOT_MEMBER, [(0.5, float(f(0.5)), "continuous on [0,1]")], {}, 1.0
        )

    if f.kind == "poly":
        return _check_poly_target(f.params["poly"], fam, right, tol)

    if f.kind == "table":
        xs = np.asarray(f.params["xs"])
        ys = np.asarray(f.params["ys"])
    else:
        xs, ys = _adaptive_samples(f, tol)

    witnesses = []
    worst = 0.0
    f0, f1 = float(ys[0]), float(ys[-1])
    for x, v, want, clause in ((0.0, f0, 0.0, "f(0) = 0"), (1.0, f1, right, f"f(1) = {right:g}")):
        dev = abs(v - want)
        worst = max(worst, dev)
        if dev > tol:
            witnesses.append((x, v, clause))
    lo_i, hi_i = int(np.argmin(ys)), int(np.argmax(ys))
    low_dev, high_dev = max(0.0, -float(ys[lo_i])), max(0.0, float(ys[hi_i]) - 1.0)
    worst = max(worst, low_dev, high_dev)
    if low_dev > tol:
        witnesses.append((float(xs[lo_i]), float(ys[lo_i]), "f(x) >= 0 on [0,1]"))
    if high_dev > tol:
        witnesses.append((float(xs[hi_i]), float(ys[hi_i]), "f(x) <= 1 on [0,1]"))
    margins = {"range_low": float(ys[lo_i]), "range_high": 1.0 - float(ys[hi_i])}
    if witnesses:
        verdict = Verdict.NOT_MEMBER
    elif worst > 0:
        verdict = Verdict.MEMBER_WITHIN_TOL
    else:
        verdict = Verdict.MEMBER
    return MembershipReport(fam, verdict, witnesses, margins, 1.0)


def _adaptive_samples(f: TargetFunction, tol: float):
    n = 1025
    xs = np.linspace(0.0, 1.0, n)
    ys = np.asarray(f(xs), dtype=float) * np.ones_like(xs)
    while n < 65537:
        n = 2 * n - 1
        xs2 = np.linspace(0.0, 1.0, n)
        ys2 = np.asarray(f(xs2), dtype=float) * np.ones_like(xs2)
        stable = abs(ys2.min() - ys.min()) <= tol / 10 and abs(ys2.max() - ys.max()) <= tol / 10
        xs, ys = xs2, ys2
        if stable:
            break
    return xs, ys


def _check_poly_target(p: Poly, fam, right: float, tol: float) -> MembershipReport:
    coeffs = list(p.exact_coeffs())
    witnesses = []
    worst = 0.0
    for x, want, clause in ((0, 0, "f(0) = 0"), (1, right, f"f(1) = {right:g}")):
        v = horner_exact(coeffs, x)
        dev = float(abs(v - Fraction(want)))
        worst = max(worst, dev)
        if dev > tol:
            witnesses.append((float(x), float(v), clause))
    margins = {}
    noise = _noise_fn(p)
    for name, g in (("range_low", coeffs), ("range_high", [1 - coeffs[0], *(-c for c in coeffs[1:])] if coeffs else [Fraction(1)])):
        cert = certify_nonneg(_trim(g), Fraction(0), Fraction(1), noise=noise, stop_above=tol)
        margins[name] = cert.margin
        eff = cert.violation
        worst = max(worst, eff)
        if eff > tol:
            x, _ = min(cert.witnesses, key=lambda t: t[1])
            clause = "f(x) >= 0 on [0,1]" if name == "range_low" else "f(x) <= 1 on [0,1]"
            witnesses.append((x, as_float(horner_exact(coeffs, Fraction(x))), clause))
    if witnesses:
        verdict = Verdict.NOT_MEMBER
    elif worst > 0:
        verdict = Verdict.MEMBER_WITHIN_TOL
    else:
        verdict = Verdict.MEMBER
    return MembershipReport(fam, verdict, witnesses, margins, 1.0)


__all__ = [
    "Family",
    "TargetClass",
    "Verdict",
    "MembershipReport",
    "check_family",
    "check_target",
    "parity_consequence",
    "Interval",
]
