"""Dense linear solves with a conditioning check."""

from __future__ import annotations

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .errors import IllConditioned

COND_LIMIT = 1e12


def cond_1(A) -> float:
    """1-norm condition number; inf for a singular matrix."""
    A = np.asarray(A, dtype=float)
    try:
        return float(np.linalg.norm(A, 1) * np.linalg.norm(np.linalg.inv(A), 1))
    except np.linalg.LinAlgError:
        return float("inf")


def solve(A, b, cond_limit: float = COND_LIMIT) -> tuple[np.ndarray, float]:
    """Solve A x = b by LU with partial pivoting plus one refinement step.

    Returns (x, condition estimate). Raises IllConditioned when the estimate
    exceeds ``cond_limit``.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    kappa = cond_1(A)
    if not np.isfinite(kappa) or kappa > cond_limit:
        raise IllConditioned(f"condition number {kappa:.3g} exceeds {cond_limit:.3g}", cond=kappa)
    lu = lu_factor(A)
    x = lu_solve(lu, b)
    x = x + lu_solve(lu, b - A @ x)
    return x, kappa
