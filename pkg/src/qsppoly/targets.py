"""Continuous target functions on [0, 1]."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .poly import Interval, Poly

BUILTINS = ("identity", "square", "scaled_bump", "half_sine", "zero", "theta_step")


@dataclass(frozen=True)
class TargetFunction:
    """A target ``f`` to approximate, evaluable on [0, 1] (or on ``domain``).

    ``kind`` is one of ``builtin``, ``table``, ``poly`` or ``callable``.
    ``domain`` lists the closed intervals where ``f`` is meant to be
    approximated; it is [0, 1] except for the step function, which lives on
    the gap domain ``[0, 1/2 - eps] U [1/2 + eps, 1]``.
    """

    kind: str
    name: str
    func: Callable = field(repr=False, compare=False)
    params: dict = field(default_factory=dict)
    domain: tuple[Interval, ...] = (Interval(0.0, 1.0),)

    def __call__(self, x):
        return self.func(x)

    @property
    def continuous(self) -> bool:
        return self.name != "theta_step"

    @classmethod
    def builtin(cls, name: str, **params) -> "TargetFunction":
        if name == "identity":
            return cls("builtin", name, lambda x: x * 1.0)
        if name == "square":
            return cls("builtin", name, lambda x: x * x)
        if name == "scaled_bump":
            c = float(params.get("c", 1.0))
            return cls("builtin", name, lambda x: c * x * (1 - x), {"c": c})
        if name == "half_sine":
            return cls("builtin", name, lambda x: np.sin(np.pi * x / 2), {})
        if name == "zero":
            return cls("builtin", name, lambda x: 0.0 * x)
        if name == "theta_step":
            eps = float(params["eps"])
            if not 0 < eps < 0.5:
                raise ValueError("theta_step needs 0 < eps < 1/2")
            dom = (Interval(0.0, 0.5 - eps), Interval(0.5 + eps, 1.0))
            return cls("builtin", name, _theta, {"eps": eps}, dom)
        raise ValueError(f"unknown builtin target {name!r}; choose from {BUILTINS}")

    @classmethod
    def table(cls, xs, ys) -> "TargetFunction":
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        if xs.ndim != 1 or xs.shape != ys.shape or len(xs) < 2:
            raise ValueError("table needs matching 1-d xs and ys with at least 2 points")
        if not np.all(np.diff(xs) > 0):
            raise ValueError("table xs must be strictly increasing")
        if xs[0] != 0.0 or xs[-1] != 1.0:
            raise ValueError("table xs must start at 0 and end at 1")
        if np.any(ys < 0) or np.any(ys > 1):
            raise ValueError("table ys must lie in [0, 1]")
        xs_t, ys_t = tuple(xs), tuple(ys)
        return cls("table", "table", lambda x: np.interp(x, xs, ys), {"xs": xs_t, "ys": ys_t})

    @classmethod
    def from_poly(cls, p: Poly) -> "TargetFunction":
        return cls("poly", "poly", p, {"poly": p})

    @classmethod
    def from_callable(cls, f: Callable, name: str = "callable") -> "TargetFunction":
        return cls("callable", name, f)

    @classmethod
    def parse(cls, text: str) -> "TargetFunction":
        """Builtin from a CLI-style string: ``square``, ``scaled_bump:0.9``, ``theta_step:0.1``."""
        name, _, arg = text.partition(":")
        if name == "scaled_bump":
            return cls.builtin(name, c=float(arg) if arg else 1.0)
        if name == "theta_step":
            return cls.builtin(name, eps=float(arg) if arg else 0.1)
        return cls.builtin(name)


def _theta(x):
    x = np.asarray(x, dtype=float)
    out = np.where(x < 0.5, 0.0, np.where(x > 0.5, 1.0, 0.5))
    return float(out) if out.ndim == 0 else out


def piecewise_linear_extension(
    pieces: list[tuple[Interval, Callable]], right_value: float
) -> TargetFunction:
    """Extend ``f`` given on disjoint closed intervals to all of [0, 1].

    Gaps are bridged linearly between the neighbouring endpoint values; the
    value 0 is forced at x = 0 and ``right_value`` at x = 1 when those points
    are not covered.
    """
    pieces = sorted(pieces, key=lambda t: t[0].lo)
    for (a, _), (b, _) in zip(pieces, pieces[1:]):
        if b.lo <= a.hi:
            raise ValueError("intervals must be disjoint")
    for iv, _ in pieces:
        if iv.lo < 0 or iv.hi > 1:
            raise ValueError("intervals must lie within [0, 1]")

    knots_x = []
    knots_y = []
    if not pieces or pieces[0][0].lo > 0:
        knots_x.append(0.0)
        knots_y.append(0.0)
    for iv, f in pieces:
        knots_x.extend([iv.lo, iv.hi])
        knots_y.extend([float(f(iv.lo)), float(f(iv.hi))])
    if knots_x[-1] < 1:
        knots_x.append(1.0)
        knots_y.append(right_value)

    def g(x):
        x_arr = np.asarray(x, dtype=float)
        out = np.interp(x_arr, knots_x, knots_y)
        for iv, f in pieces:
            mask = (x_arr >= iv.lo) & (x_arr <= iv.hi)
            if np.any(mask):
                out = np.where(mask, f(np.where(mask, x_arr, iv.lo)), out)
        return float(out) if out.ndim == 0 else out

    return TargetFunction.from_callable(g, name="extension")


def sample_grid(n: int = 10_001) -> np.ndarray:
    return np.linspace(0.0, 1.0, n)


def is_identically_zero(f: TargetFunction, n: int = 4097) -> bool:
    if f.kind == "poly":
        return f.params["poly"].is_zero()
    return bool(np.all(np.asarray(f(sample_grid(n))) == 0.0))


def max_grid_error(f: Callable, g: Callable, n: int = 10_001) -> float:
    xs = sample_grid(n)
    return float(np.max(np.abs(np.asarray(f(xs), dtype=float) - np.asarray(g(xs), dtype=float))))


__all__ = [
    "TargetFunction",
    "piecewise_linear_extension",
    "sample_grid",
    "is_identically_zero",
    "max_grid_error",
]
