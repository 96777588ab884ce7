"""Single numeric tolerance regime shared by the whole library.

Everything is computed in 64-bit floats, so every predicate ("is this a
distribution", "is this row a convex combination", ...) needs a threshold.
Keeping them all in one value makes every test assertable against one
documented set of numbers, and lets the CLI override them globally.
"""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    """Thresholds used by all numeric predicates.

    zero    -- magnitudes at or below this count as exactly 0
    sum     -- slack for affine constraints (row sums, total mass)
    nonneg  -- how far below 0 a probability may drift
    rank    -- relative threshold for subspace membership / rank decisions
    lp      -- feasibility and objective threshold for the simplex solver
    """

    zero: float = 1e-12
    sum: float = 1e-9
    nonneg: float = 1e-9
    rank: float = 1e-9
    lp: float = 1e-9


_default = Tolerances()


def get_default() -> Tolerances:
    return _default


def set_default(tol: Tolerances) -> None:
    """Replace the process-wide default (used by the CLI's --tolerance flag)."""
    global _default
    _default = tol


def resolve(tol: Tolerances | None) -> Tolerances:
    return _default if tol is None else tol
