"""Dense real linear algebra used by every automaton module.

Norms, Kronecker products, boolean matrix patterns, incremental subspace
tracking (modified Gram-Schmidt) and a small two-phase simplex solver with
Bland's rule.  All matrices are plain numpy float64 arrays.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tolerances import Tolerances, resolve


def as_array(a) -> np.ndarray:
    out = np.asarray(a, dtype=float)
    if out.size == 0:
        raise ValueError("empty matrix or vector")
    if not np.all(np.isfinite(out)):
        raise ValueError("non-finite entries")
    return out


def norm_abs(a) -> float:
    """Max absolute entry of a vector or matrix."""
    return float(np.max(np.abs(as_array(a))))


def norm_spread(a) -> float:
    """Spread norm: max - min for vectors, max column spread for matrices."""
    arr = as_array(a)
    if arr.ndim == 1:
        return float(arr.max() - arr.min())
    if arr.ndim != 2:
        raise ValueError("expected a vector or a matrix")
    return float(np.max(arr.max(axis=0) - arr.min(axis=0)))


def kron(a, b) -> np.ndarray:
    return np.kron(np.asarray(a, dtype=float), np.asarray(b, dtype=float))


def is_distribution(v, tol: Tolerances | None = None) -> bool:
    t = resolve(tol)
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1 or arr.size == 0 or not np.all(np.isfinite(arr)):
        return False
    return bool(arr.min() >= -t.nonneg and abs(arr.sum() - 1.0) <= t.sum)


def validate_distribution(v, tol: Tolerances | None = None, what: str = "distribution") -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if not is_distribution(arr, tol):
        raise ValueError(f"{what} is not a probability distribution: {arr!r}")
    return arr


def is_stochastic(m, tol: Tolerances | None = None) -> bool:
    t = resolve(tol)
    arr = np.asarray(m, dtype=float)
    if arr.ndim != 2 or arr.size == 0 or not np.all(np.isfinite(arr)):
        return False
    if arr.min() < -t.nonneg:
        return False
    return bool(np.max(np.abs(arr.sum(axis=1) - 1.0)) <= t.sum)


def validate_stochastic(m, tol: Tolerances | None = None, what: str = "matrix") -> np.ndarray:
    arr = np.asarray(m, dtype=float)
    if not is_stochastic(arr, tol):
        raise ValueError(f"{what} is not row-stochastic: {arr!r}")
    return arr


def point_distribution(n: int, i: int) -> np.ndarray:
    out = np.zeros(n)
    out[i] = 1.0
    return out


# --- boolean patterns -------------------------------------------------------

def bool_pattern(a, tol: Tolerances | None = None) -> np.ndarray:
    """0/1 pattern of a matrix: entries with |a_ij| > tol.zero become 1."""
    t = resolve(tol)
    return np.abs(np.asarray(a, dtype=float)) > t.zero


def bool_mul(p, q) -> np.ndarray:
    """Boolean matrix product (1 + 1 = 1)."""
    return np.asarray(p, dtype=bool).astype(np.int64) @ np.asarray(q, dtype=bool).astype(np.int64) > 0


def is_primitive(p) -> bool:
    """True iff some boolean power of the square pattern is all ones.

    Searches powers up to the Wielandt bound (d-1)^2 + 1, which is reached
    by primitive matrices in the worst case.
    """
    pat = np.asarray(p, dtype=bool)
    if pat.ndim != 2 or pat.shape[0] != pat.shape[1]:
        raise ValueError("pattern must be square")
    d = pat.shape[0]
    power = pat
    for _ in range((d - 1) ** 2 + 1):
        if power.all():
            return True
        power = bool_mul(power, pat)
    return False


# --- incremental subspace ---------------------------------------------------

class Subspace:
    """Growable span of row vectors, kept orthonormal.

    Membership uses modified Gram-Schmidt with one re-orthogonalization pass;
    this is an accumulator object, the one deliberately mutable type in the
    library (basis construction is inherently incremental).
    """

    def __init__(self, ambient_dim: int, tol: Tolerances | None = None):
        if ambient_dim < 1:
            raise ValueError("ambient dimension must be >= 1")
        self.ambient_dim = ambient_dim
        self.tol = resolve(tol)
        self.basis: list[np.ndarray] = []

    @property
    def dim(self) -> int:
        return len(self.basis)

    def _residual(self, v: np.ndarray) -> np.ndarray:
        r = v.astype(float).copy()
        for _ in range(2):
            for b in self.basis:
                r -= (r @ b) * b
        return r

    def contains(self, v) -> bool:
        v = np.asarray(v, dtype=float)
        if v.shape != (self.ambient_dim,):
            raise ValueError("dimension mismatch")
        thresh = self.tol.rank * max(1.0, float(np.linalg.norm(v)))
        return bool(np.linalg.norm(self._residual(v)) <= thresh)

    def try_add(self, v) -> bool:
        """Add v if it is independent of the current span; return True if it grew."""
        v = np.asarray(v, dtype=float)
        if v.shape != (self.ambient_dim,):
            raise ValueError("dimension mismatch")
        if len(self.basis) >= self.ambient_dim:
            return False
        r = self._residual(v)
        nrm = float(np.linalg.norm(r))
        if nrm <= self.tol.rank * max(1.0, float(np.linalg.norm(v))):
            return False
        self.basis.append(r / nrm)
        return True


# --- linear programming -----------------------------------------------------

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LpProblem:
    """min c.x  subject to  a_eq.x = b_eq,  x >= 0."""

    c: np.ndarray
    a_eq: np.ndarray
    b_eq: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "c", np.asarray(self.c, dtype=float))
        object.__setattr__(self, "a_eq", np.atleast_2d(np.asarray(self.a_eq, dtype=float)))
        object.__setattr__(self, "b_eq", np.asarray(self.b_eq, dtype=float))
        if self.a_eq.shape != (self.b_eq.size, self.c.size):
            raise ValueError("inconsistent LP dimensions")


@dataclass(frozen=True)
class LpSolution:
    status: str
    x: np.ndarray | None
    objective: float | None


def _bland_pivot(tab: np.ndarray, basis: list[int], n_cols: int, tol: float) -> str:
    """Run simplex iterations on the tableau in place; Bland's rule throughout."""
    m = len(basis)
    while True:
        entering = -1
        for j in range(n_cols):
            if tab[-1, j] < -tol:
                entering = j
                break
        if entering < 0:
            return OPTIMAL
        leaving, best_ratio = -1, np.inf
        for i in range(m):
            a = tab[i, entering]
            if a > tol:
                ratio = tab[i, -1] / a
                if ratio < best_ratio - tol or (
                    abs(ratio - best_ratio) <= tol
                    and (leaving < 0 or basis[i] < basis[leaving])
                ):
                    leaving, best_ratio = i, ratio
        if leaving < 0:
            return UNBOUNDED
        piv = tab[leaving, entering]
        tab[leaving] /= piv
        for i in range(m + 1):
            if i != leaving and tab[i, entering] != 0.0:
                tab[i] -= tab[i, entering] * tab[leaving]
        basis[leaving] = entering


def lp_solve(problem: LpProblem, tol: Tolerances | None = None) -> LpSolution:
    """Dense two-phase simplex with Bland's anti-cycling rule."""
    t = resolve(tol)
    a = problem.a_eq.copy()
    b = problem.b_eq.copy()
    c = problem.c
    m, n = a.shape
    neg = b < 0
    a[neg] *= -1.0
    b[neg] *= -1.0

    # phase 1: artificial identity basis, minimize sum of artificials
    tab = np.zeros((m + 1, n + m + 1))
    tab[:m, :n] = a
    tab[:m, n:n + m] = np.eye(m)
    tab[:m, -1] = b
    tab[-1, :n] = -a.sum(axis=0)
    tab[-1, -1] = -b.sum()
    basis = list(range(n, n + m))
    status = _bland_pivot(tab, basis, n + m, t.lp)
    if status != OPTIMAL or -tab[-1, -1] > t.lp:
        return LpSolution(INFEASIBLE, None, None)

    # drive artificials out of the basis; drop redundant rows
    keep = []
    for i in range(m):
        if basis[i] >= n:
            pivot_col = -1
            for j in range(n):
                if abs(tab[i, j]) > t.lp:
                    pivot_col = j
                    break
            if pivot_col < 0:
                continue  # redundant constraint
            piv = tab[i, pivot_col]
            tab[i] /= piv
            for k in range(m + 1):
                if k != i and tab[k, pivot_col] != 0.0:
                    tab[k] -= tab[k, pivot_col] * tab[i]
            basis[i] = pivot_col
        keep.append(i)

    rows = keep
    tab2 = np.zeros((len(rows) + 1, n + 1))
    tab2[:len(rows), :n] = tab[rows][:, :n]
    tab2[:len(rows), -1] = tab[rows][:, -1]
    basis2 = [basis[i] for i in rows]
    tab2[-1, :n] = c
    for i, bi in enumerate(basis2):
        if abs(tab2[-1, bi]) > 0.0:
            tab2[-1] -= tab2[-1, bi] * tab2[i]
    status = _bland_pivot(tab2, basis2, n, t.lp)
    if status == UNBOUNDED:
        return LpSolution(UNBOUNDED, None, None)
    x = np.zeros(n)
    for i, bi in enumerate(basis2):
        x[bi] = tab2[i, -1]
    return LpSolution(OPTIMAL, x, float(c @ x))


def convex_combination_certificate(
    rows: np.ndarray, s: int, tol: Tolerances | None = None
) -> np.ndarray | None:
    """Coefficients expressing rows[s] as a convex combination of the others.

    Builds the slack LP: variables (x over other rows, y over columns),
    constraints x.W + y = rows[s] and sum(x) + sum(y) = 1, objective
    min sum(y).  Accepts iff the optimum exists and is <= tol.lp; the
    returned vector is indexed over the rows with s removed.
    """
    t = resolve(tol)
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    n, k = rows.shape
    if n < 2:
        return None
    others = [i for i in range(n) if i != s]
    w = rows[others]  # (n-1) x k
    m = n - 1
    target = rows[s]
    a_eq = np.zeros((k + 1, m + k))
    for j in range(k):
        a_eq[j, :m] = w[:, j]
        a_eq[j, m + j] = 1.0
    a_eq[k, :] = 1.0
    b_eq = np.concatenate([target, [1.0]])
    c = np.concatenate([np.zeros(m), np.ones(k)])
    sol = lp_solve(LpProblem(c, a_eq, b_eq), tol)
    if sol.status != OPTIMAL or sol.objective is None or sol.objective > t.lp:
        return None
    coeffs = np.clip(sol.x[:m], 0.0, None)
    if abs(coeffs.sum() - 1.0) > max(t.lp * 10.0, t.sum):
        return None
    residual = norm_abs(target - coeffs @ w) if k else 0.0
    if residual > t.lp * max(1.0, norm_abs(rows)) * 10.0:
        return None
    return coeffs
