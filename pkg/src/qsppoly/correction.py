"""Correction polynomials x^(2a+1) (1-x)^b and the end-to-end density pipelines.

A polynomial q with the right shape on [-1, 2] (from the monotone
interpolation step) is pushed into the family P or Q by adding a small
correction r = x^(2a+1) (1-x)^b. Two ways of choosing (a, b) are offered:
the constants of the existence argument (``PROOF_FAITHFUL``) and a search
over a lattice of small parameters (``MINIMAL_SEARCH``).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from . import bernstein as bern
from .certify import certify_halfline, certify_nonneg
from .errors import (
    BetaOverflow,
    ConstantPolynomial,
    ConvergenceBudgetExceeded,
    CorrectionFailed,
    InfeasibleAtMaxDegree,
    PreconditionFailed,
    TargetNotInClass,
)
from .membership import Family, MembershipReport, TargetClass, Verdict, check_family, check_target
from .mono_interp import build_nodes, guard_extend, monotone_interpolate
from .poly import Interval, Poly, poly_to_json, stable_eval, taylor_shift
from .targets import TargetFunction, is_identically_zero, piecewise_linear_extension, sample_grid

BETA_LIMIT = 10**6
SEARCH_ALPHA = 40
SEARCH_BETA = 400
MULTIPLICITY_TOL = 1e-9
GRID = 10_001


class Mode(enum.Enum):
    PROOF_FAITHFUL = "ProofFaithful"
    MINIMAL_SEARCH = "MinimalSearch"
    FAST_PATH = "FastPath"

    @classmethod
    def coerce(cls, m) -> "Mode":
        if isinstance(m, cls):
            return m
        for v in cls:
            if m in (v.value, v.name, v.value.lower()):
                return v
        raise ValueError(f"unknown correction mode {m!r}")


class TailVariant(enum.Enum):
    POSITIVE_BEYOND_2 = "PositiveBeyond2"
    NEGATIVE_BEYOND_2 = "NegativeBeyond2"
    NEGATIVE_BELOW_MINUS_1 = "NegativeBelowMinus1"


class Parity(enum.Enum):
    EVEN = 0
    ODD = 1


@dataclass(frozen=True)
class CorrectionParams:
    alpha: int
    beta: int

    def __post_init__(self):
        for name in ("alpha", "beta"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v!r}")

    @property
    def gamma(self) -> float:
        return self.beta / (2 * self.alpha + 1)

    @property
    def argmax(self) -> float:
        return 1.0 / (1.0 + self.gamma)

    @property
    def degree(self) -> int:
        return 2 * self.alpha + 1 + self.beta

    def to_json(self) -> dict:
        return {"alpha": int(self.alpha), "beta": int(self.beta)}


def r_poly(cp: CorrectionParams) -> Poly:
    """x^(2a+1) (1-x)^b, expanded exactly."""
    lo = 2 * cp.alpha + 1
    coeffs = [0] * lo + [math.comb(cp.beta, j) * (-1) ** j for j in range(cp.beta + 1)]
    return Poly.from_exact(coeffs)


def r_sup(cp: CorrectionParams) -> float:
    """Maximum of the correction over [0, 1], attained at 1/(1+gamma)."""
    g = cp.gamma
    # in logs, so large parameters underflow gracefully instead of overflowing
    return math.exp(-(2 * cp.alpha + 1) * math.log1p(g) - cp.beta * math.log1p(1 / g))


def r_values(cp: CorrectionParams, x):
    x = np.asarray(x, dtype=float)
    return x ** (2 * cp.alpha + 1) * (1 - x) ** cp.beta


def _smallest_with_parity(lower_exclusive: int, parity: Parity | None) -> int:
    b = max(1, lower_exclusive + 1)
    if parity is not None and b % 2 != parity.value:
        b += 1
    return b


def select_tail_params(h: Poly, variant, parity: Parity | None = None) -> CorrectionParams:
    """Parameters making r + h keep the required sign on a half-line.

    PositiveBeyond2: r + h > 0 on [2, inf) (parity must be even).
    NegativeBeyond2: r + h < 0 on [2, inf) (parity must be odd).
    NegativeBelowMinus1: r + h < 0 on (-inf, -1] (parity free).
    The choice follows the counting argument: a sum of absolute
    coefficients K bounds h against a power of the variable, and (a, b) are
    the smallest values that make the correction dominate it. The sign
    condition is then certified exactly.
    """
    variant = TailVariant(variant) if not isinstance(variant, TailVariant) else variant
    if isinstance(parity, str):
        parity = Parity[parity.upper()]
    deg = h.degree()
    if variant in (TailVariant.POSITIVE_BEYOND_2, TailVariant.NEGATIVE_BEYOND_2):
        want = Parity.EVEN if variant is TailVariant.POSITIVE_BEYOND_2 else Parity.ODD
        if parity is not None and parity is not want:
            raise ValueError(f"{variant.value} needs {want.name.lower()} beta")
        recentred = taylor_shift(h, Fraction(1)) if not h.is_zero() else h
        K = max(Fraction(1), sum((abs(c) for c in recentred.exact_coeffs()), Fraction(0)))
        beta = _smallest_with_parity(max(deg, 0), want)
        alpha = 1
        while 2 ** (2 * alpha + 1) <= K:
            alpha += 1
    else:
        K = max(Fraction(1), sum((abs(c) for c in h.exact_coeffs()), Fraction(0)))
        alpha = max(1, deg // 2 + 1)
        beta = _smallest_with_parity(0, parity)
        while 2**beta <= K:
            beta = _smallest_with_parity(beta, parity)
    cp = CorrectionParams(alpha, beta)
    if not _tail_holds(h, cp, variant):
        raise CorrectionFailed(f"{variant.value}: sign condition not certified for {cp}")
    return cp


def _tail_holds(h: Poly, cp: CorrectionParams, variant: TailVariant) -> bool:
    g = (r_poly(cp) + Poly.from_exact(h.exact_coeffs())).exact_coeffs()
    if variant is TailVariant.POSITIVE_BEYOND_2:
        return certify_halfline(g, 2, +1).certified
    neg = [-c for c in g]
    if variant is TailVariant.NEGATIVE_BEYOND_2:
        return certify_halfline(neg, 2, +1).certified
    return certify_halfline(neg, -1, -1).certified


@dataclass
class PipelineTrace:
    """Quantities of the correction step. Fields that a mode does not use stay None."""

    eps_internal: float
    mode: Mode
    final: CorrectionParams | None = None
    sup_r: float = 0.0
    mu_prime: float | None = None
    eta: float | None = None
    eta_prime: float | None = None
    m: int | None = None
    beta0: int | None = None
    tail_params: tuple[CorrectionParams, ...] | None = None
    candidates_checked: int = 0
    fallback: bool = False  # lattice exhausted, parameters from the proof recipe

    def to_json(self) -> dict:
        return {
            "eps_internal": self.eps_internal,
            "mode": self.mode.value,
            "final": self.final.to_json() if self.final else None,
            "sup_r": self.sup_r,
            "mu_prime": self.mu_prime,
            "eta": self.eta,
            "eta_prime": self.eta_prime,
            "m": self.m,
            "beta0": self.beta0,
            "tail_params": [t.to_json() for t in self.tail_params] if self.tail_params else None,
            "candidates_checked": self.candidates_checked,
            "fallback": self.fallback,
        }


def _exact(q: Poly) -> Poly:
    return q if q.exact is not None else Poly.from_exact(q.exact_coeffs())


def check_step2_shape(q: Poly, fam) -> list[str]:
    """Failed conditions among those the correction step relies on (empty if none).

    q(0) = 0; q(1) = 1 (P) or 0 (Q); 0 < q < 1 on (0, 1); q < 0 on [-1, 0);
    q > 1 (P) or q < 0 (Q) on (1, 2]. Checked exactly.
    """
    fam = Family.coerce(fam)
    c = list(_exact(q).exact_coeffs())
    right = 1 if fam.right_tail_up else 0
    failed = []
    if q.exact_at(0) != 0:
        failed.append("q(0) = 0")
    if q.exact_at(1) != right:
        failed.append(f"q(1) = {right}")
    one_minus = [Fraction(1) - (c[0] if c else 0)] + [-v for v in c[1:]]
    if not certify_nonneg(c, 0, 1, strict=True, open_lo=True, open_hi=True).certified:
        failed.append("q > 0 on (0, 1)")
    if not certify_nonneg(one_minus, 0, 1, strict=True, open_lo=True, open_hi=right == 1).certified:
        failed.append("q < 1 on (0, 1)")
    if not certify_nonneg([-v for v in c], -1, 0, strict=True, open_hi=True).certified:
        failed.append("q < 0 on [-1, 0)")
    if fam.right_tail_up:
        above = (c or [Fraction(0)])[:]
        above[0] -= 1
        if not certify_nonneg(above, 1, 2, strict=True, open_lo=True).certified:
            failed.append("q > 1 on (1, 2]")
    elif not certify_nonneg([-v for v in c], 1, 2, strict=True, open_lo=True).certified:
        failed.append("q < 0 on (1, 2]")
    return failed


def _base(fam: Family) -> Family:
    return Family.P if fam.right_tail_up else Family.Q


def correct_to_family(q: Poly, fam, eps: float, mode=Mode.MINIMAL_SEARCH) -> tuple[Poly, PipelineTrace]:
    """Return u = q + r in the family with sup of r on [0, 1] below ``eps``.

    ``q`` must have the shape produced by the interpolation step (see
    check_step2_shape); PreconditionFailed otherwise. If q already belongs
    to the family it is returned unchanged (mode FAST_PATH in the trace).
    """
    fam = Family.coerce(fam)
    mode = Mode.coerce(mode)
    if eps <= 0:
        raise ValueError("eps must be positive")
    q = _exact(q)
    failed = check_step2_shape(q, fam)
    if failed:
        raise PreconditionFailed("q lacks the required shape: " + "; ".join(failed))

    if check_family(q, fam).verdict is Verdict.MEMBER:
        return q, PipelineTrace(eps_internal=eps, mode=Mode.FAST_PATH)
    if mode is Mode.PROOF_FAITHFUL:
        cp, trace = _proof_params(q, fam, eps)
    else:
        try:
            cp, trace = _search_params(q, fam, eps)
        except CorrectionFailed:
            # the lattice is bounded; the proof's recipe is not
            cp, trace = _proof_params(q, fam, eps)
            trace.fallback = True
    u = q + r_poly(cp)
    trace.final = cp
    trace.sup_r = r_sup(cp)
    if check_family(u, fam).verdict is not Verdict.MEMBER:
        raise CorrectionFailed(f"{mode.value} parameters {cp} do not give a family member")
    return u, trace


def _grid_max(p: Poly, lo: float, hi: float, n: int = 4001) -> tuple[float, float]:
    """Max of p on [lo, hi]: dense grid, then a local golden-section polish."""
    if hi <= lo:
        return float(p.exact_at(lo)), lo
    xs = np.linspace(lo, hi, n)
    vals = stable_eval(p, xs, 0.0, 1.0)
    k = int(np.argmax(vals))
    a, b = xs[max(k - 1, 0)], xs[min(k + 1, n - 1)]
    f = lambda t: float(stable_eval(p, t, 0.0, 1.0))  # noqa: E731
    g = (math.sqrt(5) - 1) / 2
    for _ in range(60):
        c, d = b - g * (b - a), a + g * (b - a)
        if f(c) > f(d):
            b = d
        else:
            a = c
    x = 0.5 * (a + b)
    best = max((vals[k], xs[k]), (f(x), x))
    return float(best[0]), float(best[1])


def _tail_start(q: Poly) -> float:
    """Left end of the last stretch of [0, 1] on which q increases."""
    dq = q.derivative()
    xs = np.linspace(0.0, 1.0, 20_001)
    d = stable_eval(dq, xs, 0.0, 1.0)
    bad = np.nonzero(d <= 0)[0]
    bad = bad[xs[bad] < 1.0 - 1e-9] if len(bad) else bad
    if len(bad) == 0:
        return 0.0
    k = int(bad[-1])
    f = lambda t: float(stable_eval(dq, t, 0.0, 1.0))  # noqa: E731
    if k + 1 < len(xs) and f(xs[k]) < 0 < f(xs[k + 1]):
        return brentq(f, xs[k], xs[k + 1], xtol=1e-15)
    return float(xs[min(k + 1, len(xs) - 1)])


def _multiplicity_at_one(s: Poly) -> tuple[int, Poly]:
    """Multiplicity of the zero of s at 1 and the cofactor s / (1-x)^m."""
    exact = s.exact is not None
    c = list(s.exact_coeffs()) if exact else list(s.coeffs)
    m = 0
    while len(c) > 1:
        quot, acc = [], c[-1]
        for v in reversed(c[:-1]):
            quot.append(acc)
            acc = v + acc
        rem = acc
        scale = 1 + sum(abs(float(v)) for v in c)
        if (rem != 0) if exact else (abs(rem) > MULTIPLICITY_TOL * scale):
            break
        # s = (x - 1) * quot = (1 - x) * (-quot)
        c = [-v for v in reversed(quot)]
        m += 1
    return m, (Poly.from_exact(c) if exact else Poly(tuple(c)))


def _first_params(target: float, parity: Parity) -> CorrectionParams:
    """Smallest-degree (a, b) with the given parity of b and sup r < target."""
    best = None
    for alpha in range(1, 200):
        if best is not None and 2 * alpha + 2 > best.degree:
            break
        beta = 2 if parity is Parity.EVEN else 1
        while r_sup(CorrectionParams(alpha, beta)) >= target:
            beta += 2
            if beta > BETA_LIMIT:
                break
        cand = CorrectionParams(alpha, beta)
        if best is None or cand.degree < best.degree:
            best = cand
    return best


def _proof_params(q: Poly, fam: Family, eps: float) -> tuple[CorrectionParams, PipelineTrace]:
    trace = PipelineTrace(eps_internal=eps, mode=Mode.PROOF_FAITHFUL)
    q2 = q - q.exact_at(2)
    qm1 = q - q.exact_at(-1)
    if fam.right_tail_up:
        c = _tail_start(q)
        eta = _grid_max(q, 0.0, c)[0] if c > 0 else 0.0
        eta_p = max(eta, 1 - eps)
        level = 0.5 * (1 + eta_p)
        f = lambda t: float(stable_eval(q, t, 0.0, 1.0)) - level  # noqa: E731
        mu = brentq(f, c, 1.0, xtol=1e-15)
        m, cof = _multiplicity_at_one(Poly.from_exact([1]) - q)
        xs = np.linspace(mu, 1.0, 4001)
        K = 0.5 * float(np.min(stable_eval(cof, xs, 0.0, 1.0)))
        if K <= 0:
            raise CorrectionFailed("cofactor of 1 - q is not positive near 1")
        beta0 = 2
        while (1 - mu) ** beta0 >= K:
            beta0 += 2
            if beta0 > BETA_LIMIT:
                break
        t1 = _first_params(1 - float(q.exact_at(mu)), Parity.EVEN)
        t2 = select_tail_params(q2, TailVariant.POSITIVE_BEYOND_2, Parity.EVEN)
        t3 = select_tail_params(qm1, TailVariant.NEGATIVE_BELOW_MINUS_1, Parity.EVEN)
        beta = 2 * m + beta0 + t1.beta + t2.beta + t3.beta
        trace.mu_prime, trace.m, trace.beta0 = mu, m, beta0
    else:
        eta = _grid_max(q, 0.0, 1.0)[0]
        eta_p = max(eta, 1 - eps)
        t1 = _first_params(1 - eta_p, Parity.ODD)
        t2 = select_tail_params(q2, TailVariant.NEGATIVE_BEYOND_2, Parity.ODD)
        t3 = select_tail_params(qm1, TailVariant.NEGATIVE_BELOW_MINUS_1, Parity.ODD)
        beta = t1.beta + t2.beta + t3.beta
    alpha = t1.alpha + t2.alpha + t3.alpha
    trace.eta, trace.eta_prime, trace.tail_params = eta, eta_p, (t1, t2, t3)
    if beta > BETA_LIMIT:
        raise BetaOverflow(f"beta = {beta} exceeds {BETA_LIMIT}", params=trace.to_json())
    return CorrectionParams(alpha, beta), trace


def search_lattice(fam: Family, eps: float) -> list[CorrectionParams]:
    """Lattice points with the family's parity of beta and sup r < eps, by degree then sup r."""
    odd = not fam.right_tail_up
    out = []
    for a in range(1, SEARCH_ALPHA + 1):
        for b in range(1 if odd else 2, SEARCH_BETA + 1, 2):
            cp = CorrectionParams(a, b)
            s = r_sup(cp)
            if s < eps:
                out.append((cp.degree, s, cp))
    out.sort(key=lambda t: (t[0], t[1]))
    return [t[2] for t in out]


def _screen(q: Poly, fam: Family) -> Callable[[CorrectionParams], bool]:
    """Cheap float test of the membership clauses on a grid, reused across candidates."""
    inner = np.linspace(0.0, 1.0, 2001)
    left = np.linspace(-3.0, 0.0, 601)
    right = np.linspace(1.0, 4.0, 601)
    q_in = stable_eval(q, inner, 0.0, 1.0)
    q_left = stable_eval(q, left, -3.0, 0.0)
    q_right = stable_eval(q, right, 1.0, 4.0)
    # evaluation error grows with the size of q on each grid
    slack_in, slack_left, slack_right = (1e-10 * max(1.0, float(np.max(np.abs(v)))) for v in (q_in, q_left, q_right))
    qc = q.exact_coeffs()
    dq = len(qc) - 1
    right_sign = 1 if fam.right_tail_up else -1
    # far tails, |x| from 4 to 1e30, in log magnitude: q through its reversed
    # polynomial in y = 1/|x|, r in closed form
    far_y = np.geomspace(1e-30, 0.25, 400)
    log_x = -np.log(far_y)
    qf = np.array([float(c) for c in qc])
    far_q = {}
    for side in (1, -1):
        rev = np.polynomial.polynomial.polyval(far_y, (qf * float(side) ** np.arange(dq + 1))[::-1])
        with np.errstate(divide="ignore"):
            far_q[side] = (np.sign(rev) * side**dq, np.log(np.abs(rev)) + dq * log_x)
    log_1mx = {1: np.log(np.exp(log_x) - 1), -1: np.log1p(np.exp(log_x))}

    def ends_ok(cp: CorrectionParams) -> bool:
        # leading term of u: +x^odd for P, -x^even for Q
        dr = cp.degree
        r_lead = Fraction((-1) ** cp.beta)
        if dr > dq:
            deg, lead = dr, r_lead
        elif dr < dq:
            deg, lead = dq, qc[-1]
        else:
            deg, lead = dq, qc[-1] + r_lead
            if lead == 0:
                return True  # cancellation: leave it to the exact check
        if (lead > 0) != (right_sign > 0) or (deg % 2 == 1) != fam.right_tail_up:
            return False
        for side, want in ((1, right_sign), (-1, -1)):
            q_sign, q_log = far_q[side]
            r_sign = (-1) ** cp.beta if side > 0 else -1
            r_log = (2 * cp.alpha + 1) * log_x + cp.beta * log_1mx[side]
            # the sign of u is settled where one term is clearly larger
            u_sign = np.where(r_log > q_log + 1e-6, r_sign, np.where(q_log > r_log + 1e-6, q_sign, want))
            if np.any(u_sign != want):
                return False
        return True

    def ok(cp: CorrectionParams) -> bool:
        u_in = q_in + r_values(cp, inner)
        if np.any(u_in < -slack_in) or np.any(u_in > 1 + slack_in):
            return False
        if np.any(q_left + r_values(cp, left) > slack_left):
            return False
        u_right = q_right + r_values(cp, right)
        if fam.right_tail_up and np.any(u_right < 1 - slack_right):
            return False
        if not fam.right_tail_up and np.any(u_right > slack_right):
            return False
        return ends_ok(cp)

    return ok


def _search_params(q: Poly, fam: Family, eps: float) -> tuple[CorrectionParams, PipelineTrace]:
    trace = PipelineTrace(eps_internal=eps, mode=Mode.MINIMAL_SEARCH)
    ok = _screen(q, fam)
    for cp in search_lattice(fam, eps):
        if not ok(cp):
            continue
        trace.candidates_checked += 1
        if check_family(q + r_poly(cp), fam).verdict is Verdict.MEMBER:
            return cp, trace
    raise CorrectionFailed(
        f"no lattice point (alpha <= {SEARCH_ALPHA}, beta <= {SEARCH_BETA}) with sup r < {eps} gives a member"
    )


# ---------------------------------------------------------------- pipeline


@dataclass
class PipelineReport:
    """What approximate_in_family did, and how well it worked."""

    family: Family
    delta: float
    u: Poly
    measured_error: float
    membership: MembershipReport
    bernstein_degree: int | None = None
    node_count: int | None = None
    interp_degree: int | None = None
    node_eps: float | None = None
    trace: PipelineTrace | None = None
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "family": self.family.value,
            "delta": self.delta,
            "degree": self.u.degree(),
            "measured_error": self.measured_error,
            "verdict": self.membership.verdict.value,
            "bernstein_degree": self.bernstein_degree,
            "node_count": self.node_count,
            "interp_degree": self.interp_degree,
            "node_eps": self.node_eps,
            "trace": self.trace.to_json() if self.trace else None,
            "notes": self.notes,
            "poly": poly_to_json(self.u),
        }


def _values_on_unit(p, xs) -> np.ndarray:
    # Horner is accurate enough when the coefficients are small
    if isinstance(p, Poly) and p.exact is not None and sum(abs(c) for c in p.coeffs) > 1e3:
        return np.asarray(stable_eval(p, xs, 0.0, 1.0), dtype=float)
    return np.asarray(p(xs), dtype=float)


def _sup_diff(p, f, xs) -> float:
    return float(np.max(np.abs(_values_on_unit(p, xs) - np.asarray(f(xs), dtype=float))))


def bernstein_stage(f: TargetFunction, right: float, eps: float, max_degree: int = bern.MAX_DEGREE):
    """Least n with sup |B_n f - f| < eps on the grid and some sample strictly inside (0, 1).

    Samples are clipped to [0, 1] and the end samples set to 0 and ``right``
    exactly, so that B_n f meets the endpoint conditions exactly.
    """
    coarse = sample_grid(2001)
    fine = sample_grid(GRID)
    fvals_c = np.asarray(f(coarse), dtype=float)
    achieved = math.inf
    for n in range(1, max_degree + 1):
        vals = np.clip(np.asarray(f(np.arange(n + 1) / n), dtype=float), 0.0, 1.0)
        vals[0], vals[-1] = 0.0, right
        if not np.any((vals[1:-1] > 0) & (vals[1:-1] < 1)):
            continue
        form = bern.BernsteinForm(vals)
        err = float(np.max(np.abs(bern.basis_matrix(n, coarse) @ vals - fvals_c)))
        achieved = min(achieved, err)
        if err < eps:
            err = float(np.max(np.abs(bern.basis_matrix(n, fine) @ vals - np.asarray(f(fine), dtype=float))))
            achieved = min(achieved, err)
            if err < eps:
                return n, form
    raise ConvergenceBudgetExceeded(
        f"Bernstein degree cap {max_degree} reached with error {achieved:.3g} >= {eps:.3g}",
        achieved=achieved,
    )


def tilt(form, fam: Family, weight: float):
    """(1 - w) p + w b with b = x (P) or 4x(1-x) (Q), in Bernstein coefficients.

    b has the family's endpoint values and lies in (0, 1) inside, so the
    blend keeps the shape of p, moves it by at most w, and has slope about
    w wherever p is flat.
    """
    n = form.degree
    k = np.arange(n + 1)
    if fam.right_tail_up:
        b = k / n
    else:
        b = 4 * k * (n - k) / (n * (n - 1)) if n > 1 else np.zeros(n + 1)
    return bern.BernsteinForm((1 - weight) * form.values + weight * b)


def _snap(q: Poly, right: int) -> Poly:
    """Make q(0) = 0 and q(1) = right hold exactly (moves two coefficients by the residuals)."""
    c = list(q.exact_coeffs()) + [Fraction(0)] * 2
    c[0] = Fraction(0)
    c[1] += right - sum(c)
    return Poly.from_exact(c)


def interpolation_stage(form, fam: Family, eps: float):
    """q with the step-2 shape and sup |q - p| < eps on [0, 1].

    Nodes are first built for a coarser tolerance (fewer nodes, lower
    degree); the tolerance is halved until the measured distance is below
    eps. At the tolerance eps itself the bound holds by monotonicity
    between nodes, so the loop always ends there at the latest.
    """
    right = 1 if fam.right_tail_up else 0
    xs = sample_grid(GRID)
    pv = form(xs)
    last_exc = None
    for k in (3, 2, 1, 0):
        node_eps = eps * 2**k
        try:
            nodes = guard_extend(build_nodes(form, node_eps), _base(fam))
            q = _snap(monotone_interpolate(nodes), right)
        except InfeasibleAtMaxDegree as exc:
            last_exc = exc
            continue
        if float(np.max(np.abs(_values_on_unit(q, xs) - pv))) < eps and not check_step2_shape(q, fam):
            return q, nodes, node_eps
    raise last_exc or CorrectionFailed("interpolation stage did not reach the tolerance")


def approximate_in_family(f: TargetFunction, fam, delta: float, mode=Mode.MINIMAL_SEARCH):
    """Polynomial u in the family P or Q with sup |u - f| < delta on [0, 1].

    Three stages with the budget eps = delta/3 each: Bernstein
    approximation, monotone interpolation through guard-extended nodes,
    correction. Returns (u, PipelineReport).
    """
    fam = _base(Family.coerce(fam))
    if delta <= 0:
        raise ValueError("delta must be positive")
    cls = TargetClass.F1 if fam.right_tail_up else TargetClass.F2
    target_report = check_target(f, cls)
    if target_report.verdict is Verdict.NOT_MEMBER:
        raise TargetNotInClass(f"target is not in {cls.value}", report=target_report)
    xs = sample_grid(GRID)
    eps = delta / 3

    if not fam.right_tail_up and is_identically_zero(f):
        u = Poly.from_exact([0, Fraction(delta), -Fraction(delta)])
        err = _sup_diff(u, f, xs)
        report = PipelineReport(fam, delta, u, err, check_family(u, fam), notes=["zero target: u = delta x (1 - x)"])
        return u, report

    right = 1 if fam.right_tail_up else 0
    notes = []
    n, form = bernstein_stage(f, right, eps)
    try:
        q, nodes, node_eps = interpolation_stage(form, fam, eps)
    except ConstantPolynomial:
        # values too close to tell apart somewhere: give up a quarter of the budget for a tilt
        n, form = bernstein_stage(f, right, 0.75 * eps)
        form = tilt(form, fam, 0.25 * eps)
        notes.append("approximant numerically flat; blended with a strictly shaped polynomial")
        q, nodes, node_eps = interpolation_stage(form, fam, eps)
    u, trace = correct_to_family(q, fam, eps, mode)
    trace.eps_internal = eps
    err = _sup_diff(u, f, xs)
    membership = check_family(u, fam)
    report = PipelineReport(
        fam, delta, u, err, membership,
        bernstein_degree=n, node_count=len(nodes), interp_degree=q.degree(), node_eps=node_eps, trace=trace,
        notes=notes,
    )
    if err >= delta:
        raise ConvergenceBudgetExceeded(f"measured error {err:.3g} >= delta {delta}", achieved=err)
    return u, report


def approximate_on_subset(pieces, fam, eps: float, mode=Mode.MINIMAL_SEARCH) -> Poly:
    """Approximate f given on disjoint closed intervals A within [0, 1], in P' or Q'.

    ``pieces`` is a list of (Interval, callable). f is extended linearly
    across the gaps (0 forced at x = 0, and 1 for P' or 0 for Q' at x = 1 when
    uncovered), the extension is approximated within eps, and the result
    is checked for membership in the strict family.
    """
    fam = Family.coerce(fam)
    strict = {Family.P: Family.Pprime, Family.Q: Family.Qprime}.get(fam, fam)
    right = 1.0 if strict.right_tail_up else 0.0
    pieces = [(iv if isinstance(iv, Interval) else Interval(*iv), g) for iv, g in pieces]
    ext = piecewise_linear_extension(pieces, right)
    u, _ = approximate_in_family(ext, _base(strict), eps, mode)
    if check_family(u, strict).verdict is not Verdict.MEMBER:
        raise CorrectionFailed(f"result is not in {strict.value}")
    return u


def sup_error_on(u: Poly, pieces, n: int = 2001) -> float:
    """sup over the union of intervals of |u - f|, on a grid per interval."""
    worst = 0.0
    for iv, g in pieces:
        iv = iv if isinstance(iv, Interval) else Interval(*iv)
        xs = np.linspace(iv.lo, iv.hi, n)
        worst = max(worst, _sup_diff(u, g, xs))
    return worst
