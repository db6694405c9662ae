"""Bernstein approximants, in particular of the unit step at 1/2."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.stats import binom

from .errors import EvenDegree
from .poly import Poly
from .targets import TargetFunction

MAX_DEGREE = 200


@dataclass(frozen=True)
class StepDomain:
    """The two closed intervals [0, 1/2 - eps] and [1/2 + eps, 1]."""

    eps: float

    def __post_init__(self):
        if not 0 < self.eps < 0.5:
            raise ValueError("eps must lie in (0, 1/2)")

    def __contains__(self, x) -> bool:
        return 0 <= x <= 0.5 - self.eps or 0.5 + self.eps <= x <= 1

    def grid(self, n: int = 2001) -> np.ndarray:
        left = np.linspace(0.0, 0.5 - self.eps, n // 2)
        right = np.linspace(0.5 + self.eps, 1.0, n - n // 2)
        return np.concatenate([left, right])


class BernsteinForm:
    """A polynomial stored by its Bernstein coefficients on [0, 1].

    Evaluation by de Casteljau is stable at any degree, unlike the monomial
    expansion, whose coefficients grow like binomials.
    """

    def __init__(self, values):
        self.values = np.asarray(values, dtype=float)
        if self.values.ndim != 1 or len(self.values) == 0:
            raise ValueError("need at least one Bernstein coefficient")

    @property
    def degree(self) -> int:
        return len(self.values) - 1

    def __call__(self, x):
        x_arr = np.asarray(x, dtype=float)
        t = x_arr[..., None]
        b = np.broadcast_to(self.values, x_arr.shape + self.values.shape).copy()
        for r in range(self.degree):
            b = b[..., :-1] * (1 - t) + b[..., 1:] * t
        out = b[..., 0]
        return float(out) if out.ndim == 0 else out

    def derivative(self) -> "BernsteinForm":
        if self.degree == 0:
            return BernsteinForm([0.0])
        return BernsteinForm(self.degree * np.diff(self.values))

    def to_poly(self) -> Poly:
        return Poly.from_exact(_bernstein_to_monomial([Fraction(v) for v in self.values]))


def basis_matrix(n: int, x) -> np.ndarray:
    """Bernstein basis values C(n,k) x^k (1-x)^(n-k), one row per point of x in [0, 1]."""
    x = np.asarray(x, dtype=float)
    return binom.pmf(np.arange(n + 1)[None, :], n, x[:, None])


def _bernstein_to_monomial(vals) -> list:
    n = len(vals) - 1
    out = []
    for j in range(n + 1):
        acc = 0
        for k in range(j + 1):
            if vals[k]:
                acc += vals[k] * math.comb(n, k) * math.comb(n - k, j - k) * (-1) ** (j - k)
        out.append(acc)
    return out


def _samples(f, n: int) -> list[float]:
    return [float(f(k / n)) for k in range(n + 1)]


def bernstein_form(f, n: int) -> BernsteinForm:
    if n < 1:
        raise ValueError("Bernstein degree must be >= 1")
    return BernsteinForm(_samples(f, n))


def bernstein(f: TargetFunction, n: int) -> Poly:
    """Degree-``n`` Bernstein approximant of ``f`` in the monomial basis.

    The expansion is accumulated in exact rational arithmetic from the float
    samples ``f(k/n)`` and the result keeps those exact coefficients, so no
    cancellation error enters; the float coefficients are the exact ones
    rounded once.
    """
    if n < 1:
        raise ValueError("Bernstein degree must be >= 1")
    if n > MAX_DEGREE:
        raise ValueError(f"Bernstein degree capped at {MAX_DEGREE}")
    vals = [Fraction(v) for v in _samples(f, n)]
    return Poly.from_exact(_bernstein_to_monomial(vals))


def step_values(L: int) -> list[int]:
    return [1 if 2 * k > L else 0 for k in range(L + 1)]


def bernstein_step(L: int) -> Poly:
    """Bernstein approximant of the unit step; L odd so 1/2 is never sampled."""
    if L < 1:
        raise ValueError("L must be a positive odd integer")
    if L % 2 == 0:
        raise EvenDegree(f"L = {L} is even")
    return Poly.from_exact(_bernstein_to_monomial(step_values(L)))


def bernstein_step_form(L: int) -> BernsteinForm:
    if L % 2 == 0:
        raise EvenDegree(f"L = {L} is even")
    return BernsteinForm(step_values(L))


def step_parity_check(L: int) -> bool:
    """Whether the step approximant of degree L lies in P."""
    from .membership import Family, Verdict, check_family

    return check_family(bernstein_step(L), Family.P).verdict is Verdict.MEMBER


def step_value_exact(L: int, x) -> Fraction:
    """Exact value of the step approximant at rational ``x`` (a binomial tail)."""
    x = Fraction(x)
    return sum(
        (math.comb(L, k) * x**k * (1 - x) ** (L - k) for k in range(L // 2 + 1, L + 1)),
        Fraction(0),
    )


def step_error(L: int, dom: StepDomain) -> tuple[float, float]:
    """Sup of |B_L(step) - step| over the gap domain, and the exponential bound.

    The approximant increases on [0, 1] and satisfies p(x) + p(1 - x) = 1, so
    the sup is attained at 1/2 - eps; it is computed there in exact arithmetic.
    """
    if L % 2 == 0:
        raise EvenDegree(f"L = {L} is even")
    measured = float(step_value_exact(L, Fraction(0.5 - dom.eps)))
    bound = 2 * math.exp(-2 * L * dom.eps**2)
    return measured, bound
