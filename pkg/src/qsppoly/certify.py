"""Exact sign certification of polynomials on bounded intervals.

The polynomial is mapped onto [0, 1] and converted to the Bernstein basis
in integer arithmetic over a common denominator. All Bernstein coefficients
non-negative means the polynomial is non-negative on the piece; otherwise
the piece is halved by integer de Casteljau subdivision. Endpoint
coefficients are exact function values, which supply genuine witnesses of
violations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

MAX_DEPTH = 48
MAX_PIECES = 20_000


def integer_bernstein(coeffs: Sequence[Fraction], lo: Fraction, width: Fraction) -> tuple[list[int], int]:
    """Bernstein coefficients of ``s -> g(lo + width*s)`` on [0, 1] as (integers, common scale).

    The true coefficients are ``ints[k] / scale``. Everything runs in integer
    arithmetic: the coefficients are brought to one denominator, the affine
    map is applied by Horner's scheme in (a + b s), and the basis change
    uses integer binomial sums.
    """
    n = len(coeffs) - 1
    den = math.lcm(*(Fraction(c).denominator for c in coeffs))
    nums = [int(Fraction(c) * den) for c in coeffs]
    d = math.lcm(lo.denominator, width.denominator)
    a, b = int(lo * d), int(width * d)
    # P(s) = d^n * g(lo + width*s) * den, built as acc = acc*(a + b s) + nums[k]*d^(n-k)
    acc = [nums[n]]
    dpow = 1
    for k in range(n - 1, -1, -1):
        dpow *= d
        nxt = [0] * (len(acc) + 1)
        for i, v in enumerate(acc):
            nxt[i] += a * v
            nxt[i + 1] += b * v
        nxt[0] += nums[k] * dpow
        acc = nxt
    acc += [0] * (n + 1 - len(acc))
    # s^j = sum_k C(k, j)/C(n, j) B_k, and C(k, j)/C(n, j) = C(n-j, k-j)/C(n, k)
    binoms = [math.comb(n, k) for k in range(n + 1)]
    big = math.lcm(*binoms)
    ints = []
    for k in range(n + 1):
        t = sum(acc[j] * math.comb(n - j, k - j) for j in range(k + 1) if acc[j])
        ints.append(t * (big // binoms[k]))
    scale = den * d**n * big
    g = math.gcd(scale, *ints)
    return [v // g for v in ints], scale // g


def _split(b: list[int]) -> tuple[list[int], list[int]]:
    """Halve a Bernstein piece; both halves come back scaled by 2**n."""
    n = len(b) - 1
    left = [0] * (n + 1)
    right = [0] * (n + 1)
    row = list(b)
    left[0] = row[0] << n
    right[n] = row[n] << n
    for r in range(1, n + 1):
        row = [row[j] + row[j + 1] for j in range(n + 1 - r)]
        left[r] = row[0] << (n - r)
        right[n - r] = row[n - r] << (n - r)
    return left, right


@dataclass
class Certificate:
    """Outcome of certifying ``g >= 0`` (or ``g > 0``) on an interval.

    ``violation`` bounds ``max(0, -min g)`` over the parts that could not be
    certified, leaving out deficits within the noise floor. It is exact where
    witnessed, and pieces are not refined once they cannot beat the deepest
    witnessed deficit by more than a relative 1e-9. ``witnesses`` lists
    points with exactly computed values that violate the requirement.
    ``touch`` marks a strict requirement met only with equality (or within
    noise) somewhere. ``margin`` is a lower bound on ``min g``.
    """

    violation: float = 0.0
    touch: bool = False
    margin: float = math.inf
    witnesses: list[tuple[float, float]] = field(default_factory=list)

    @property
    def certified(self) -> bool:
        return self.violation == 0.0 and not self.touch


class NoiseFloor:
    """Rounding allowance ``gamma * sum |c_k| |x|^k`` of float coefficients c."""

    def __init__(self, coeffs: Sequence[float], gamma: float):
        self.absc = [abs(float(c)) for c in coeffs]
        self.gamma = gamma

    def __call__(self, x: float) -> float:
        acc = 0.0
        for c in reversed(self.absc):
            acc = acc * x + c
        return self.gamma * acc

    def homogeneous(self, A: float, B: float, n: int) -> float:
        """gamma * sum_k |c_k| A^k B^(n-k): the allowance after scaling by (1-s)^n."""
        return self.gamma * sum(c * A**k * B ** (n - k) for k, c in enumerate(self.absc[: n + 1]))


def certify_nonneg(
    coeffs: Sequence[Fraction],
    lo: Fraction,
    hi: Fraction,
    *,
    strict: bool = False,
    open_lo: bool = False,
    open_hi: bool = False,
    noise: Callable[[float], float] | None = None,
    stop_above: float = math.inf,
) -> Certificate:
    """Certify that the polynomial with rational ``coeffs`` is >= 0 on [lo, hi].

    With ``strict`` the requirement is ``> 0``, except at an endpoint flagged
    open. ``noise(x)`` is a tolerated deficit near ``x``; pieces whose lower
    bound stays above ``-noise`` are accepted without further splitting.
    Subdivision stops early once a witnessed violation exceeds ``stop_above``.
    """
    lo, hi = Fraction(lo), Fraction(hi)
    width = hi - lo
    if not coeffs or width == 0:
        return _degenerate(coeffs, lo, strict and not (open_lo or open_hi))
    ints, denom = integer_bernstein(coeffs, lo, width)

    def to_x(t):
        return lo + width * t

    def piece_noise(t, w):
        return noise(float(max(abs(to_x(t)), abs(to_x(t + w)))))

    return _subdivide(
        coeffs, ints, denom, to_x, None, strict, open_lo, open_hi,
        noise, piece_noise if noise is not None else None, stop_above,
    )


def _degenerate(coeffs, x, strict) -> Certificate:
    cert = Certificate()
    if not coeffs:
        cert.touch = strict
        cert.margin = 0.0
        return cert
    _point(cert, float(x), _horner(coeffs, x), strict)
    return cert


def _subdivide(coeffs, ints, denom, to_x, far, strict, open_lo, open_hi, noise, piece_noise, stop_above):
    """Bernstein subdivision over the parameter t in [0, 1], mapped to x by ``to_x``.

    ``to_x(1)`` is None for a half-line; ``far`` is then a point beyond every
    root, used as the witness when the leading term has the wrong sign.
    """
    cert = Certificate()
    one = Fraction(1)
    # (integer coefficients, scale, piece start, piece width, depth)
    stack = [(ints, Fraction(denom), Fraction(0), one, 0)]
    pieces = 0
    while stack:
        b, sc, a, w, depth = stack.pop()
        pieces += 1
        at_lo = a == 0
        at_hi = a + w == one
        bmin = min(b)
        if bmin >= 0:
            if strict and not _strict_ok(b, open_lo and at_lo, open_hi and at_hi):
                cert.touch = True
                _record_zero_witnesses(cert, b, to_x, a, w, open_lo and at_lo, open_hi and at_hi)
            cert.margin = min(cert.margin, as_float(Fraction(bmin) / sc))
            continue

        # witnessed endpoint violations, ignoring deficits inside the noise floor
        for idx, t in ((0, a), (len(b) - 1, a + w)):
            if b[idx] < 0:
                x = to_x(t)
                x = far if x is None else x
                val = as_float(_horner(coeffs, x))
                if noise is None or -val > noise(abs(float(x))):
                    cert.witnesses.append((float(x), val))
                    cert.violation = max(cert.violation, -val)

        lower = as_float(Fraction(bmin) / sc)
        if piece_noise is not None and -lower <= piece_noise(a, w):
            cert.margin = min(cert.margin, lower)
            if strict:
                cert.touch = True
            continue
        if cert.violation > stop_above:
            break
        if cert.violation > 0 and -lower <= cert.violation * (1 + 1e-9):
            # cannot go deeper than a deficit already witnessed
            cert.margin = min(cert.margin, lower)
            continue
        if depth >= MAX_DEPTH or pieces >= MAX_PIECES:
            # unresolved: the coefficient minimum bounds the deficit
            cert.violation = max(cert.violation, -lower)
            cert.margin = min(cert.margin, lower)
            mid = to_x(a + w / 2)
            cert.witnesses.append((float(mid), as_float(_horner(coeffs, mid))))
            if cert.violation > stop_above:
                break
            continue
        left, right = _split(b)
        sc2 = sc * (1 << (len(b) - 1))
        half = w / 2
        stack.append((right, sc2, a + half, half, depth + 1))
        stack.append((left, sc2, a, half, depth + 1))

    if cert.margin == math.inf:
        cert.margin = 0.0
    return cert


def _strict_ok(b: list[int], open_lo: bool, open_hi: bool) -> bool:
    if not any(b):
        return False
    if b[0] == 0 and not open_lo:
        return False
    if b[-1] == 0 and not open_hi:
        return False
    return True


def _record_zero_witnesses(cert, b, to_x, a, w, open_lo, open_hi):
    for idx, t, is_open in ((0, a, open_lo), (-1, a + w, open_hi)):
        x = to_x(t)
        if b[idx] == 0 and not is_open and x is not None:
            cert.witnesses.append((float(x), 0.0))


def _point(cert: Certificate, x: float, v: Fraction, strict: bool) -> None:
    if v < 0:
        cert.violation = -as_float(v)
        cert.witnesses.append((x, as_float(v)))
    elif v == 0 and strict:
        cert.touch = True
        cert.witnesses.append((x, 0.0))
    cert.margin = as_float(v)


def as_float(v) -> float:
    """float() that saturates to +-inf instead of overflowing."""
    try:
        return float(v)
    except OverflowError:
        return math.inf if v > 0 else -math.inf


def _horner(coeffs: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def horner_exact(coeffs: Sequence[Fraction], x) -> Fraction:
    return _horner(coeffs, Fraction(x))


def cauchy_bound_exact(coeffs: Sequence[Fraction]) -> Fraction:
    lead = abs(coeffs[-1])
    return 1 + max((abs(c) / lead for c in coeffs[:-1]), default=Fraction(0))


def halfline_bound(coeffs: Sequence[Fraction]) -> Fraction:
    """Power of two (at least 2) beyond which no root of the polynomial lies."""
    if len(coeffs) <= 1:
        return Fraction(2)
    cb = cauchy_bound_exact(coeffs)
    # rounded up to a power of two to keep the rational arithmetic light
    return max(Fraction(2), Fraction(2) ** math.ceil(math.log2(cb)))


def taylor_at(coeffs: Sequence[Fraction], c: Fraction, side: int = 1) -> list[Fraction]:
    """Coefficients of ``t -> g(c + side*t)``."""
    out = list(coeffs)
    n = len(out)
    for i in range(n - 1):
        for j in range(n - 2, i - 1, -1):
            out[j] += c * out[j + 1]
    if side < 0:
        out = [v if k % 2 == 0 else -v for k, v in enumerate(out)]
    return out


def certify_halfline(
    coeffs: Sequence[Fraction],
    start,
    side: int,
    *,
    strict: bool = True,
    open_start: bool = False,
    noise: NoiseFloor | None = None,
    stop_above: float = math.inf,
) -> Certificate:
    """Certify ``g >= 0`` (``> 0`` if strict) on [start, inf) for side=+1, (-inf, start] for side=-1.

    With x = start + side*s/(1-s), the polynomial (1-s)^n g(x) on [0, 1) has
    the Taylor coefficients of g at ``start`` over C(n, k) as its Bernstein
    coefficients, and its value at s = 1 is the leading coefficient. So the
    whole half-line is handled by subdividing [0, 1], without a root bound.
    """
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    start = Fraction(start)
    if len(coeffs) <= 1:
        return _degenerate(coeffs, start, strict)
    n = len(coeffs) - 1
    tay = taylor_at(coeffs, start, side)
    den = math.lcm(*(v.denominator for v in tay))
    binoms = [math.comb(n, k) for k in range(n + 1)]
    big = math.lcm(*binoms)
    ints = [int(v * den) * (big // binoms[k]) for k, v in enumerate(tay)]
    scale = den * big
    g = math.gcd(scale, *ints)
    ints, scale = [v // g for v in ints], scale // g
    far = start + side * 2 * halfline_bound(coeffs)

    def to_x(t):
        return None if t == 1 else start + side * t / (1 - t)

    piece_noise = None
    if noise is not None:

        def piece_noise(t, w):
            # bound on the allowance times (1-s)^n over the piece
            A = max(abs(float(start * (1 - u) + side * u)) for u in (t, t + w))
            return noise.homogeneous(A, float(1 - t), n)

    open_lo, open_hi = (open_start, False)
    return _subdivide(coeffs, ints, scale, to_x, far, strict, open_lo, open_hi, noise, piece_noise, stop_above)
