"""Dense real polynomials in the monomial basis and the centered odd form.

Coefficients are stored in ascending order (``coeffs[k]`` multiplies ``x**k``).
Trailing zeros are trimmed with an exact-zero test only; the empty tuple is
the zero polynomial.
"""

from __future__ import annotations

import functools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import DegreeTooLow

UNIT_ROUNDOFF = np.finfo(float).eps / 2


def _trim(coeffs: Iterable[float]) -> tuple[float, ...]:
    c = [float(v) for v in coeffs]
    while c and c[-1] == 0.0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        object.__setattr__(self, "lo", float(self.lo))
        object.__setattr__(self, "hi", float(self.hi))
        if not self.lo <= self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi


def _exact_scalar(c):
    """``c`` as a Fraction when it is an exact rational scalar, else None."""
    if isinstance(c, (int, Fraction)) or (isinstance(c, float) and math.isfinite(c)):
        return Fraction(c)
    return None


@dataclass(frozen=True)
class Poly:
    """Real polynomial with float coefficients.

    ``exact`` optionally carries the same polynomial with rational
    coefficients. Float coefficients of high-degree polynomials such as the
    Bernstein step approximant lose all accuracy through rounding, so
    constructions that know the exact values keep them here; arithmetic
    preserves them when every operand is exact, and membership checks use
    them in preference to the floats.
    """

    coeffs: tuple[float, ...] = ()
    exact: tuple[Fraction, ...] | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.exact is not None:
            ex = [Fraction(v) for v in self.exact]
            while ex and ex[-1] == 0:
                ex.pop()
            object.__setattr__(self, "exact", tuple(ex))
            object.__setattr__(self, "coeffs", tuple(float(v) for v in ex))
            return
        object.__setattr__(self, "coeffs", _trim(self.coeffs))

    @classmethod
    def from_exact(cls, coeffs: Iterable) -> "Poly":
        return cls(exact=tuple(Fraction(c) for c in coeffs))

    def exact_coeffs(self) -> tuple[Fraction, ...]:
        """Rational coefficients: the carried exact ones, or the floats read exactly."""
        if self.exact is not None:
            return self.exact
        return tuple(Fraction(c) for c in self.coeffs)

    def exact_at(self, x) -> Fraction:
        x = Fraction(x)
        acc = Fraction(0)
        for c in reversed(self.exact_coeffs()):
            acc = acc * x + c
        return acc

    @classmethod
    def constant(cls, c: float) -> "Poly":
        return cls((c,))

    @classmethod
    def x(cls) -> "Poly":
        return cls((0.0, 1.0))

    @classmethod
    def from_roots(cls, roots: Sequence[float], lead: float = 1.0) -> "Poly":
        p = cls((lead,))
        for r in roots:
            p = p * cls((-r, 1.0))
        return p

    def degree(self) -> int:
        """Degree, with -1 standing in for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self) -> float:
        return self.coeffs[-1] if self.coeffs else 0.0

    def __call__(self, x):
        if isinstance(x, np.ndarray):
            out = np.zeros_like(x, dtype=float)
            for c in reversed(self.coeffs):
                out = out * x + c
            return out
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def _lift(self, c) -> "Poly":
        fc = _exact_scalar(c) if self.exact is not None else None
        return Poly(exact=(fc,)) if fc is not None else Poly((c,))

    def __add__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            other = self._lift(other)
        return add(self, other)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return scale(self, -1.0)

    def __sub__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            other = self._lift(other)
        return add(self, -other)

    def __rsub__(self, other) -> "Poly":
        return self._lift(other) - self

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            return scale(self, other)
        return mul(self, other)

    __rmul__ = __mul__

    def derivative(self) -> "Poly":
        return derivative(self)

    def antiderivative(self) -> "Poly":
        """The antiderivative vanishing at 0."""
        if self.exact is not None:
            return Poly(exact=(Fraction(0),) + tuple(c / (k + 1) for k, c in enumerate(self.exact)))
        return Poly((0.0,) + tuple(c / (k + 1) for k, c in enumerate(self.coeffs)))

    def to_json(self) -> dict:
        return poly_to_json(self)


def eval(p: Poly, x):  # noqa: A001 - mirrors the public operation name
    return p(x)


def derivative(p: Poly) -> Poly:
    if p.exact is not None:
        return Poly(exact=tuple(k * c for k, c in enumerate(p.exact) if k > 0))
    return Poly(tuple(k * c for k, c in enumerate(p.coeffs) if k > 0))


def _add_lists(a, b, zero):
    n = max(len(a), len(b))
    a = tuple(a) + (zero,) * (n - len(a))
    b = tuple(b) + (zero,) * (n - len(b))
    return tuple(x + y for x, y in zip(a, b))


def add(p: Poly, q: Poly) -> Poly:
    if p.exact is not None and q.exact is not None:
        return Poly(exact=_add_lists(p.exact, q.exact, Fraction(0)))
    return Poly(_add_lists(p.coeffs, q.coeffs, 0.0))


def scale(p: Poly, c: float) -> Poly:
    fc = _exact_scalar(c) if p.exact is not None else None
    if fc is not None:
        return Poly(exact=tuple(fc * v for v in p.exact))
    return Poly(tuple(c * v for v in p.coeffs))


def _mul_lists(a, b, zero):
    out = [zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def mul(p: Poly, q: Poly) -> Poly:
    if p.is_zero() or q.is_zero():
        return Poly()
    if p.exact is not None and q.exact is not None:
        return Poly(exact=_mul_lists(p.exact, q.exact, Fraction(0)))
    return Poly(_mul_lists(p.coeffs, q.coeffs, 0.0))


def _shift_list(c: list, b) -> list:
    n = len(c)
    for i in range(n - 1):
        for j in range(n - 2, i - 1, -1):
            c[j] += b * c[j + 1]
    return c


def taylor_shift(p: Poly, b: float) -> Poly:
    """Coefficients of ``u -> p(u + b)`` by repeated synthetic division."""
    fb = _exact_scalar(b) if p.exact is not None else None
    if fb is not None:
        return Poly(exact=_shift_list(list(p.exact), fb))
    if b == 0.0:
        return Poly(p.coeffs)
    return Poly(_shift_list(list(p.coeffs), b))


def compose_affine(p: Poly, a: float, b: float) -> Poly:
    """Return the polynomial ``x -> p(a*x + b)``."""
    shifted = taylor_shift(p, b)
    if a == 1.0:
        return shifted
    fa = _exact_scalar(a) if shifted.exact is not None else None
    if fa is not None:
        return Poly(exact=tuple(c * fa**k for k, c in enumerate(shifted.exact)))
    return Poly(tuple(c * a**k for k, c in enumerate(shifted.coeffs)))


def divide_linear(p: Poly, r: float) -> tuple[Poly, float]:
    """Synthetic division by ``(x - r)``; returns (quotient, remainder)."""
    if p.is_zero():
        return Poly(), 0.0
    c = p.coeffs
    n = len(c) - 1
    q = [0.0] * n
    acc = c[-1]
    for k in range(n - 1, -1, -1):
        q[k] = acc
        acc = c[k] + acc * r
    return Poly(q), acc


def eval_error_bound(p: Poly, x: float) -> float:
    """A priori bound on the rounding error of Horner evaluation at ``x``."""
    n = max(len(p.coeffs), 1)
    gamma = 2 * n * UNIT_ROUNDOFF / (1 - 2 * n * UNIT_ROUNDOFF)
    ax = abs(x)
    acc = 0.0
    for c in reversed(p.coeffs):
        acc = acc * ax + abs(c)
    return gamma * acc


def cauchy_bound(p: Poly) -> float:
    """All real roots of ``p`` lie in ``[-B, B]`` with B = 1 + max|c_k / c_n|."""
    if p.degree() < 1:
        raise DegreeTooLow("Cauchy bound needs a polynomial of degree >= 1")
    lead = abs(p.coeffs[-1])
    return 1.0 + max(abs(c) / lead for c in p.coeffs[:-1])


def sup_abs_on(p: Poly, interval: Interval, tol: float = 1e-10) -> tuple[float, float]:
    """Maximum of ``|p|`` over the interval and a point attaining it."""
    from .roots import extrema

    ext = extrema(p, interval, tol)
    if abs(ext.max_value) >= abs(ext.min_value):
        return abs(ext.max_value), ext.argmax
    return abs(ext.min_value), ext.argmin


@dataclass(frozen=True)
class CenteredOddPoly:
    """``1/2 + sum_k odd_coeffs[k] * (x - 1/2)**(2k+1)``.

    Symmetric about (1/2, 1/2) by construction, so ``p(x) + p(1-x) = 1``
    holds identically whatever the coefficients.
    """

    odd_coeffs: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "odd_coeffs", tuple(float(c) for c in self.odd_coeffs))

    @property
    def degree(self) -> int:
        return 2 * len(self.odd_coeffs) - 1 if any(self.odd_coeffs) else 0

    def __call__(self, x):
        z = x - 0.5
        z2 = z * z
        acc = 0.0 * z
        for c in reversed(self.odd_coeffs):
            acc = acc * z2 + c
        return 0.5 + acc * z

    def deriv(self, x):
        z = x - 0.5
        z2 = z * z
        acc = 0.0 * z
        for k in range(len(self.odd_coeffs) - 1, -1, -1):
            acc = acc * z2 + (2 * k + 1) * self.odd_coeffs[k]
        return acc

    def in_z(self) -> Poly:
        """The same polynomial written in the centered variable ``z = x - 1/2``."""
        c = [0.5]
        for a in self.odd_coeffs:
            c.extend([a, 0.0])
        return Poly(c[:-1] if len(c) > 1 else c)

    def derivative_in_z(self) -> Poly:
        return derivative(self.in_z())

    def to_poly(self) -> Poly:
        return from_centered_odd(self)

    def to_json(self) -> dict:
        return poly_to_json(self)


def from_centered_odd(s: CenteredOddPoly) -> Poly:
    return compose_affine(s.in_z(), 1.0, -0.5)


def poly_to_json(p) -> dict:
    if isinstance(p, CenteredOddPoly):
        return {"schema": "v1", "basis": "centered_odd", "odd_coeffs": list(p.odd_coeffs)}
    out = {"schema": "v1", "basis": "monomial", "coeffs": list(p.coeffs)}
    if p.exact is not None:
        # rationals as "num/den" strings; the floats alone lose high-degree accuracy
        out["exact"] = [str(c) for c in p.exact]
    return out


def poly_from_json(obj) -> Poly | CenteredOddPoly:
    if isinstance(obj, str):
        obj = json.loads(obj)
    basis = obj.get("basis", "monomial")
    if basis == "monomial":
        if "exact" in obj:
            return Poly.from_exact(Fraction(str(c)) for c in obj["exact"])
        coeffs = obj["coeffs"]
        if not all(isinstance(c, (int, float)) and math.isfinite(c) for c in coeffs):
            raise ValueError("coefficients must be finite numbers")
        return Poly(coeffs)
    if basis == "centered_odd":
        return CenteredOddPoly(obj["odd_coeffs"])
    raise ValueError(f"unknown polynomial basis {basis!r}")


def as_monomial(p) -> Poly:
    return p.to_poly() if isinstance(p, CenteredOddPoly) else p


def _cheb_from_power_exact(c: Sequence[Fraction]) -> list[Fraction]:
    """Chebyshev coefficients (in t) of the power series ``sum c_k t^k``, exactly."""
    n = len(c)
    out = [Fraction(0)] * max(n, 1)
    # t^k expanded in Chebyshev polynomials, built up by t*T_j = (T_{j-1} + T_{j+1}) / 2
    power = [Fraction(1)]
    for k in range(n):
        if c[k]:
            for j, v in enumerate(power):
                out[j] += c[k] * v
        nxt = [Fraction(0)] * (len(power) + 1)
        for j, v in enumerate(power):
            if not v:
                continue
            if j == 0:
                nxt[1] += v
            else:
                nxt[j - 1] += v / 2
                nxt[j + 1] += v / 2
        power = nxt
    return out


def _power_from_cheb_exact(cheb: Sequence[Fraction]) -> list[Fraction]:
    n = len(cheb)
    out = [Fraction(0)] * max(n, 1)
    t_prev, t_cur = [Fraction(1)], [Fraction(0), Fraction(1)]
    for k in range(n):
        tk = t_prev if k == 0 else t_cur
        if k >= 2:
            nxt = [Fraction(0)] * (len(t_cur) + 1)
            for j, v in enumerate(t_cur):
                nxt[j + 1] += 2 * v
            for j, v in enumerate(t_prev):
                nxt[j] -= v
            t_prev, t_cur = t_cur, nxt
            tk = t_cur
        if cheb[k]:
            for j, v in enumerate(tk):
                out[j] += cheb[k] * v
    return out


def _affine_exact(c: Sequence[Fraction], a: Fraction, b: Fraction) -> list[Fraction]:
    """Coefficients of ``x -> p(a*x + b)`` in exact arithmetic."""
    c = _shift_list([Fraction(v) for v in c], Fraction(b))
    w = Fraction(1)
    for k in range(len(c)):
        c[k] *= w
        w *= a
    return c


def from_chebyshev(cheb: Sequence[float], lo: float, hi: float) -> Poly:
    """Exact monomial form of ``sum cheb[k] T_k(t)``, t = (2x - lo - hi) / (hi - lo).

    The float Chebyshev coefficients are taken as exact rationals, so the
    returned polynomial is exactly the one they describe.
    """
    lo, hi = Fraction(lo), Fraction(hi)
    in_t = _power_from_cheb_exact([Fraction(float(v)) for v in cheb])
    return Poly(exact=_affine_exact(in_t, 2 / (hi - lo), -(lo + hi) / (hi - lo)))


@functools.lru_cache(maxsize=256)
def _cheb_cache(exact: tuple, lo: float, hi: float) -> np.ndarray:
    flo, fhi = Fraction(lo), Fraction(hi)
    # x = mid + half * t
    in_t = _affine_exact(exact, (fhi - flo) / 2, (fhi + flo) / 2)
    return np.array([float(v) for v in _cheb_from_power_exact(in_t)])


def stable_eval(p: Poly, x, lo: float = -1.0, hi: float = 2.0):
    """Evaluate ``p`` through its Chebyshev expansion on [lo, hi].

    For polynomials of moderate size on [lo, hi] this avoids the
    cancellation of monomial Horner evaluation at high degree. The
    expansion is computed once from the exact coefficients and cached.
    """
    if p.is_zero():
        return np.zeros_like(np.asarray(x, dtype=float)) if np.ndim(x) else 0.0
    cheb = _cheb_cache(p.exact_coeffs(), float(lo), float(hi))
    t = (2 * np.asarray(x, dtype=float) - (lo + hi)) / (hi - lo)
    out = np.polynomial.chebyshev.chebval(t, cheb)
    return float(out) if np.ndim(out) == 0 else out
