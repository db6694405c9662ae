"""Symmetric polynomials with prescribed double zeros, and ripple balancing.

For zeros 0 < a_1 < ... < a_l < 1/2 there is a unique polynomial of degree
4l+1 with p(x) + p(1-x) = 1, p(0) = 0 and a double zero at every a_i. It is
odd about 1/2 up to the constant 1/2, so only the odd coefficients in
z = x - 1/2 are unknown. Between consecutive zeros it has a single peak;
the exchange iteration moves the interior zeros until the peaks match.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GapInsideRippleRegion, NotConverged, StructureViolation
from .linalg import COND_LIMIT, solve
from .poly import CenteredOddPoly, Interval, from_centered_odd, poly_to_json
from .roots import roots_in

KAPPA = 1e-4
MAX_ROUNDS = 200


@dataclass(frozen=True)
class ZeroConfig:
    ell: int
    a: tuple[float, ...]

    def __post_init__(self):
        a = tuple(float(v) for v in self.a)
        object.__setattr__(self, "a", a)
        if self.ell < 1 or len(a) != self.ell:
            raise ValueError("need ell >= 1 zeros")
        prev = 0.0
        for v in a:
            if not prev < v < 0.5:
                raise ValueError("zeros must satisfy 0 < a_1 < ... < a_l < 1/2")
            prev = v

    @classmethod
    def equispaced(cls, ell: int, a_ell: float) -> "ZeroConfig":
        return cls(ell, tuple((i + 1) * a_ell / ell for i in range(ell)))

    @property
    def with_origin(self) -> tuple[float, ...]:
        return (0.0, *self.a)

    def widths(self) -> list[float]:
        z = self.with_origin
        return [z[i + 1] - z[i] for i in range(self.ell)]


@dataclass(frozen=True)
class PeakData:
    b: tuple[float, ...]
    heights: tuple[float, ...]

    def spread(self) -> float:
        """(max - min) / mean of the heights."""
        h = self.heights
        return (max(h) - min(h)) / (sum(h) / len(h))


@dataclass
class EquiRippleResult:
    config: ZeroConfig
    poly: CenteredOddPoly
    peaks: PeakData
    delta: float
    rounds: int
    converged: bool
    kappa: float
    cond: float = math.nan
    in_P: bool | None = None
    spread_ok: bool = False
    history: list[float] = field(default_factory=list, repr=False)

    def to_json(self) -> dict:
        return {
            "ell": self.config.ell,
            "a": list(self.config.a),
            "poly": poly_to_json(self.poly),
            "b": list(self.peaks.b),
            "heights": list(self.peaks.heights),
            "delta": self.delta,
            "rounds": self.rounds,
            "converged": self.converged,
            "kappa": self.kappa,
            "cond": self.cond,
            "in_P": self.in_P,
            "relative_spread": self.peaks.spread(),
            "spread_ok": self.spread_ok,
        }


def system_matrix(cfg: ZeroConfig) -> tuple[np.ndarray, np.ndarray]:
    """Rows p(a_i) = 0 (i = 0..l) and p'(a_i) = 0 (i = 1..l) for the odd coefficients."""
    ks = np.arange(1, 4 * cfg.ell + 2, 2)
    z = np.array(cfg.with_origin) - 0.5
    values = z[:, None] ** ks
    slopes = ks * z[1:, None] ** (ks - 1)
    A = np.vstack([values, slopes])
    rhs = np.concatenate([np.full(len(z), -0.5), np.zeros(cfg.ell)])
    return A, rhs


def solve_R(cfg: ZeroConfig, cond_limit: float = COND_LIMIT) -> tuple[CenteredOddPoly, float]:
    """The polynomial for ``cfg`` and the condition number of its system."""
    A, rhs = system_matrix(cfg)
    c, kappa = solve(A, rhs, cond_limit)
    return CenteredOddPoly(tuple(c)), kappa


def build_R_poly(cfg: ZeroConfig) -> CenteredOddPoly:
    """Raises IllConditioned when the system's condition number exceeds 1e12."""
    return solve_R(cfg)[0]


def peaks(p: CenteredOddPoly, cfg: ZeroConfig) -> PeakData:
    """The single critical point strictly inside each (a_{i-1}, a_i) and its value."""
    dz = p.derivative_in_z()
    zs = [v - 0.5 for v in cfg.with_origin]
    bs, hs = [], []
    for i in range(cfg.ell):
        lo, hi = zs[i], zs[i + 1]
        # the ends are zeros of p' as well; keep only what lies clearly inside
        pad = 1e-7 * (hi - lo)
        inner = [r for r in roots_in(dz, Interval(lo, hi)) if lo + pad < r < hi - pad]
        if len(inner) != 1:
            raise StructureViolation(
                f"{len(inner)} critical points in ({cfg.with_origin[i]}, {cfg.a[i]}), expected 1"
            )
        b = inner[0] + 0.5
        bs.append(b)
        hs.append(float(p(b)))
    return PeakData(tuple(bs), tuple(hs))


def peak_bounds(cfg: ZeroConfig, i: int) -> tuple[float, float]:
    """Lower and upper bounds on the height of the i-th peak (1-based)."""
    ell = cfg.ell
    if not 1 <= i <= ell:
        raise ValueError("peak index out of range")
    w = cfg.with_origin[i] - cfg.with_origin[i - 1]
    gap = 0.5 - cfg.a[-1]
    lower = w ** (4 * ell - 1) / (4 * (4 * ell + 1) * math.comb(4 * ell, 2 * i - 1) * gap)
    upper = 2.0 ** (4 * ell) * w / gap ** (4 * ell + 1)
    return lower, upper


def _measure(a: tuple[float, ...]) -> PeakData:
    cfg = ZeroConfig(len(a), a)
    return peaks(build_R_poly(cfg), cfg)


def _ordered(a) -> bool:
    return all(x < y for x, y in zip((0.0, *a), a)) and a[-1] < 0.5


def iterate(cfg: ZeroConfig, kappa: float = KAPPA) -> ZeroConfig:
    """One exchange round: widen the lowest peak's interval at the expense of the highest.

    Zeros a_j with min(m, M) <= j < max(m, M) move together by s, where m
    and M index the smallest and largest peaks, so only those two intervals
    change width and a_l stays put. A move is kept while the smallest peak
    stays at or below the largest; otherwise s is halved, down to kappa, and
    an overshoot at kappa ends the round.
    """
    if not kappa > 0:
        raise ValueError("kappa must be positive")
    a = cfg.a
    h = _measure(a)
    M = int(np.argmax(h.heights)) + 1
    m = int(np.argmin(h.heights)) + 1
    if m == M:
        return cfg
    w = cfg.widths()
    s = min(w[m - 1], w[M - 1]) / 4
    if h.b[M - 1] < h.b[m - 1]:
        s = -s
    lo, hi = min(m, M), max(m, M)
    while abs(s) >= kappa:
        moved = tuple(v + s if lo <= j < hi else v for j, v in enumerate(a, start=1))
        accept = False
        if _ordered(moved):
            h2 = _measure(moved)
            accept = h2.heights[m - 1] <= h2.heights[M - 1]
        if accept:
            a = moved
        elif abs(s) == kappa:
            s = 0.0
        else:
            s = math.copysign(max(abs(s) / 2, kappa), s)
    return ZeroConfig(cfg.ell, a)


def equiripple_solve(
    cfg0: ZeroConfig, kappa: float = KAPPA, max_rounds: int = MAX_ROUNDS, check_membership: bool = True
) -> EquiRippleResult:
    """Repeat exchange rounds until the zeros stop moving.

    Raises NotConverged, carrying the last result, if ``max_rounds`` rounds
    pass without a fixpoint.
    """
    from .membership import Family, check_family

    if not kappa > 0:
        raise ValueError("kappa must be positive")
    cfg = cfg0
    rounds = 0
    converged = False
    history = []
    while rounds < max_rounds:
        nxt = iterate(cfg, kappa)
        rounds += 1
        if nxt.a == cfg.a:
            converged = True
            break
        cfg = nxt
        history.append(_measure(cfg.a).spread())
    poly, cond = solve_R(cfg)
    pk = peaks(poly, cfg)
    res = EquiRippleResult(
        config=cfg,
        poly=poly,
        peaks=pk,
        delta=float(np.mean(pk.heights)),
        rounds=rounds,
        converged=converged,
        kappa=kappa,
        cond=cond,
        spread_ok=pk.spread() <= 10 * kappa / cfg.a[-1],
        history=history,
    )
    if check_membership:
        res.in_P = check_family(from_centered_odd(poly), Family.P).ok
    if not converged:
        raise NotConverged(f"no fixpoint after {max_rounds} rounds", result=res)
    return res


def gap_report(res: EquiRippleResult, eps: float) -> dict:
    """Value at the edge of the gap, 1/2 - eps, against the ripple height."""
    if res.config.a[-1] >= 0.5 - eps:
        raise GapInsideRippleRegion(f"a_l = {res.config.a[-1]} is not below 1/2 - eps = {0.5 - eps}")
    at_gap = float(res.poly(0.5 - eps))
    return {"eps": eps, "p_at_gap": at_gap, "delta": res.delta, "residual": at_gap - res.delta}
