"""Probabilistic automata of general form (input/output transducers).

Reactions, basis matrices, equivalence, LP-driven reduction, residual
reactions and realization from shift-stable cones.  A general PA is the
five-tuple (X, Y, S, P, initial) stored as one n-by-n matrix per
input/output pair, so the probability of reading u while emitting v is
initial . A[u,v] . ones.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType

import numpy as np

from . import linalg
from .dfa import Word, words_upto
from .tolerances import Tolerances, resolve


def _freeze(a: np.ndarray) -> np.ndarray:
    out = np.asarray(a, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class GeneralPA:
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    trans: dict[tuple[str, str], np.ndarray]
    initial: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        object.__setattr__(
            self,
            "trans",
            MappingProxyType({k: _freeze(v) for k, v in self.trans.items()}),
        )
        object.__setattr__(self, "initial", _freeze(self.initial))

    @property
    def n_states(self) -> int:
        return self.initial.size

    def matrix(self, x: str, y: str) -> np.ndarray:
        m = self.trans.get((x, y))
        if m is None:
            raise KeyError(f"unknown input/output pair ({x!r}, {y!r})")
        return m

    def input_matrix(self, x: str) -> np.ndarray:
        """Sum over outputs: the stochastic matrix of the input letter."""
        return sum(self.matrix(x, y) for y in self.outputs)

    def validate(self, tol: Tolerances | None = None) -> "GeneralPA":
        t = resolve(tol)
        n = self.n_states
        linalg.validate_distribution(self.initial, t, "initial distribution")
        for x in self.inputs:
            total = np.zeros((n, n))
            for y in self.outputs:
                m = self.matrix(x, y)
                if m.shape != (n, n):
                    raise ValueError(f"matrix for ({x!r},{y!r}) has shape {m.shape}")
                if m.min() < -t.nonneg:
                    raise ValueError(f"negative entry in matrix for ({x!r},{y!r})")
                total = total + m
            linalg.validate_stochastic(total, t, f"sum over outputs for input {x!r}")
        return self


def word_matrix(a: GeneralPA, u: Word, v: Word) -> np.ndarray:
    """A[u,v]: identity for (eps,eps), zero when lengths differ, else the product."""
    n = a.n_states
    if len(u) != len(v):
        return np.zeros((n, n))
    out = np.eye(n)
    for x, y in zip(u, v):
        out = out @ a.matrix(x, y)
    return out


def reaction(a: GeneralPA, u: Word, v: Word, xi: np.ndarray | None = None) -> float:
    """Probability of emitting v while reading u, starting from xi."""
    row = a.initial if xi is None else np.asarray(xi, dtype=float)
    if len(u) != len(v):
        return 0.0
    for x, y in zip(u, v):
        row = row @ a.matrix(x, y)
    return float(row.sum())


# --- reaction tables ----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ReactionTable:
    """Finite table of a probabilistic reaction on pairs with |u| = |v| <= depth."""

    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    depth: int
    values: dict[tuple[Word, Word], float] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        object.__setattr__(self, "values", MappingProxyType(dict(self.values)))

    def value(self, u: Word, v: Word) -> float:
        if len(u) != len(v):
            return 0.0
        if len(u) > self.depth:
            raise KeyError(f"pair beyond table depth {self.depth}: {(u, v)}")
        return self.values.get((u, v), 0.0)

    def pairs(self, length: int):
        for u in _words_exact(self.inputs, length):
            for v in _words_exact(self.outputs, length):
                yield u, v


def _words_exact(alphabet: tuple[str, ...], length: int):
    if length == 0:
        yield ()
        return
    for u in _words_exact(alphabet, length - 1):
        for x in alphabet:
            yield u + (x,)


def reaction_table(a: GeneralPA, depth: int, xi: np.ndarray | None = None) -> ReactionTable:
    """Tabulate the reaction to the given depth, sharing prefix products."""
    row0 = a.initial if xi is None else np.asarray(xi, dtype=float)
    values: dict[tuple[Word, Word], float] = {((), ()): float(row0.sum())}
    frontier = [((), (), row0)]
    for _ in range(depth):
        nxt = []
        for u, v, row in frontier:
            for x in a.inputs:
                for y in a.outputs:
                    row2 = row @ a.matrix(x, y)
                    u2, v2 = u + (x,), v + (y,)
                    values[(u2, v2)] = float(row2.sum())
                    nxt.append((u2, v2, row2))
        frontier = nxt
    return ReactionTable(a.inputs, a.outputs, depth, values)


def is_probabilistic_response(f: ReactionTable, tol: Tolerances | None = None) -> bool:
    """Check the defining recurrences of a probabilistic reaction on the table."""
    t = resolve(tol)
    if abs(f.value((), ()) - 1.0) > t.sum:
        return False
    for (u, v), val in f.values.items():
        if len(u) != len(v):
            if abs(val) > t.sum:
                return False
        elif val < -t.nonneg:
            return False
    for k in range(f.depth):
        for u, v in f.pairs(k):
            val = f.value(u, v)
            for x in f.inputs:
                total = sum(f.value(u + (x,), v + (y,)) for y in f.outputs)
                if abs(total - val) > t.sum * max(1.0, len(f.outputs)):
                    return False
    return True


def residual(f: ReactionTable, u: Word, v: Word, tol: Tolerances | None = None) -> ReactionTable:
    """Residual reaction f_{u,v}(u', v') = f(uu', vv') / f(u, v)."""
    t = resolve(tol)
    mass = f.value(u, v)
    if abs(mass) <= t.zero:
        raise ZeroDivisionError(f"residual at a zero-probability pair {(u, v)}")
    depth = f.depth - len(u)
    values = {
        (uu[len(u):], vv[len(v):]): val / mass
        for (uu, vv), val in f.values.items()
        if len(uu) >= len(u) and uu[: len(u)] == u and vv[: len(v)] == v
    }
    return ReactionTable(f.inputs, f.outputs, depth, values)


def tables_agree(f: ReactionTable, g: ReactionTable, tol: Tolerances | None = None) -> bool:
    """Compare two tables on their overlapping depth."""
    t = resolve(tol)
    depth = min(f.depth, g.depth)
    for k in range(depth + 1):
        for u, v in f.pairs(k):
            if abs(f.value(u, v) - g.value(u, v)) > max(t.zero * 100.0, 1e-10):
                return False
    return True


def residual_automaton(f: ReactionTable, tol: Tolerances | None = None) -> GeneralPA | None:
    """Rebuild an automaton from the residual reactions of f, if they close.

    Breadth-first search over residuals f_{u,v}; a new residual is matched
    against known ones on the overlapping table depth.  Returns None when a
    required residual would have no table left to compare (the finite
    evidence cannot certify closure), which genuinely happens: some
    realizable reactions have infinitely many residuals.
    """
    t = resolve(tol)
    states: list[ReactionTable] = [f]
    transitions: dict[tuple[int, str, str], tuple[int, float]] = {}
    queue = [0]
    while queue:
        i = queue.pop(0)
        g = states[i]
        for x in f.inputs:
            for y in f.outputs:
                p = g.value((x,), (y,))
                if p <= t.zero:
                    continue
                if g.depth - 1 < 1:
                    return None  # child table too shallow to identify
                child = residual(g, (x,), (y,), t)
                match = None
                for j, h in enumerate(states):
                    if tables_agree(child, h, t):
                        match = j
                        break
                if match is None:
                    states.append(child)
                    match = len(states) - 1
                    queue.append(match)
                transitions[(i, x, y)] = (match, p)
    n = len(states)
    trans = {}
    for x in f.inputs:
        for y in f.outputs:
            m = np.zeros((n, n))
            for i in range(n):
                hit = transitions.get((i, x, y))
                if hit is not None:
                    j, p = hit
                    m[i, j] = p
            trans[(x, y)] = m
    return GeneralPA(f.inputs, f.outputs, trans, linalg.point_distribution(n, 0))


# --- basis matrices and equivalence -------------------------------------------

def basis_matrix(a: GeneralPA, tol: Tolerances | None = None):
    """Basis of the column space spanned by the vectors A[u,v].ones.

    Returns (matrix, tags): columns in breadth-first discovery order with
    lexicographic (input, output) symbol order, tags giving the (u, v) pair
    of each column.  The sweep count never exceeds the state count.
    """
    t = resolve(tol)
    n = a.n_states
    span = linalg.Subspace(n, t)
    ones = np.ones(n)
    span.try_add(ones)
    columns: list[np.ndarray] = [ones]
    tags: list[tuple[Word, Word]] = [((), ())]
    sweeps = 0
    while True:
        grew = False
        snapshot = list(zip(columns, tags))
        for col, (u, v) in snapshot:
            for x in a.inputs:
                for y in a.outputs:
                    cand = a.matrix(x, y) @ col
                    if span.try_add(cand):
                        columns.append(cand)
                        tags.append(((x,) + u, (y,) + v))
                        grew = True
        sweeps += 1
        if not grew:
            break
        assert sweeps <= n, "basis sweeps exceeded the state count"
    return np.column_stack(columns), tags


def distributions_equivalent(
    a: GeneralPA, xi1, xi2, tol: Tolerances | None = None
) -> bool:
    """xi1 and xi2 produce the same reaction iff they agree against the basis."""
    t = resolve(tol)
    basis, _ = basis_matrix(a, t)
    diff = (np.asarray(xi1, dtype=float) - np.asarray(xi2, dtype=float)) @ basis
    return bool(np.max(np.abs(diff)) <= t.rank * max(1.0, linalg.norm_abs(basis)) * 10.0)


def disjoint_union(a1: GeneralPA, a2: GeneralPA) -> GeneralPA:
    if a1.inputs != a2.inputs or a1.outputs != a2.outputs:
        raise ValueError("alphabet mismatch")
    n1, n2 = a1.n_states, a2.n_states
    trans = {}
    for x in a1.inputs:
        for y in a1.outputs:
            m = np.zeros((n1 + n2, n1 + n2))
            m[:n1, :n1] = a1.matrix(x, y)
            m[n1:, n1:] = a2.matrix(x, y)
            trans[(x, y)] = m
    init = np.concatenate([a1.initial, np.zeros(n2)])
    return GeneralPA(a1.inputs, a1.outputs, trans, init)


def equivalent(a1: GeneralPA, a2: GeneralPA, tol: Tolerances | None = None) -> bool:
    """Equality of reactions, decided on the disjoint union's basis matrix."""
    union = disjoint_union(a1, a2)
    xi1 = np.concatenate([a1.initial, np.zeros(a2.n_states)])
    xi2 = np.concatenate([np.zeros(a1.n_states), a2.initial])
    return distributions_equivalent(union, xi1, xi2, tol)


# --- reduction ------------------------------------------------------------------

def reachable_part(a: GeneralPA, tol: Tolerances | None = None) -> GeneralPA:
    """Restrict to states carrying initial mass or reachable through a nonzero entry."""
    t = resolve(tol)
    n = a.n_states
    alive = {i for i in range(n) if a.initial[i] > t.zero}
    changed = True
    while changed:
        changed = False
        for (x, y), m in a.trans.items():
            for i in list(alive):
                for j in range(n):
                    if j not in alive and m[i, j] > t.zero:
                        alive.add(j)
                        changed = True
    order = sorted(alive)
    idx = np.array(order, dtype=int)
    trans = {k: m[np.ix_(idx, idx)] for k, m in a.trans.items()}
    return GeneralPA(a.inputs, a.outputs, trans, a.initial[idx])


def find_convex_state(a: GeneralPA, tol: Tolerances | None = None):
    """A state whose basis-matrix row is a convex combination of the others.

    Returns (state, coefficients-over-remaining-states) or None.  States are
    tried from the highest index down, matching the elimination normal form.
    """
    t = resolve(tol)
    if a.n_states < 2:
        return None
    basis, _ = basis_matrix(a, t)
    for s in range(a.n_states - 1, -1, -1):
        coeffs = linalg.convex_combination_certificate(basis, s, t)
        if coeffs is not None:
            return s, coeffs
    return None


def remove_convex_state(
    a: GeneralPA, s: int, coeffs: np.ndarray, tol: Tolerances | None = None
) -> GeneralPA:
    """Eliminate a convex-combination state, reindexing it last first.

    With s moved to the last position, each A[x,y] becomes A[x,y].M for the
    matrix M that rewrites the last coordinate as the certified mixture, and
    the now-unreachable last state is dropped.
    """
    t = resolve(tol)
    n = a.n_states
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape != (n - 1,):
        raise ValueError("certificate has wrong length")
    basis, _ = basis_matrix(a, t)
    others = [i for i in range(n) if i != s]
    residual_err = linalg.norm_abs(basis[s] - coeffs @ basis[others])
    if residual_err > max(t.lp * 100.0, 1e-8) * max(1.0, linalg.norm_abs(basis)):
        raise ValueError("certificate does not reproduce the basis row")
    trans = {}
    for key, m in a.trans.items():
        folded = m[np.ix_(others, others)] + np.outer(m[others, s], coeffs)
        trans[key] = folded
    init = a.initial[others] + a.initial[s] * coeffs
    return GeneralPA(a.inputs, a.outputs, trans, init)


def reduce(a: GeneralPA, tol: Tolerances | None = None) -> GeneralPA:
    """Iterate reachable-part extraction and convex-state removal to a fixed point."""
    t = resolve(tol)
    current = reachable_part(a, t)
    while True:
        hit = find_convex_state(current, t)
        if hit is None:
            return current
        s, coeffs = hit
        current = reachable_part(remove_convex_state(current, s, coeffs, t), t)


# --- cones of reactions ---------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ConeSpec:
    """A finite shift-stable family with mixing data.

    members      -- reactions f_1..f_n as tables
    initial      -- coefficients of f as a convex combination of the members
    shifts       -- per (x, y), the matrix whose row i expands the shifted
                    member f_i D^{xy} over the family
    """

    members: tuple[ReactionTable, ...]
    initial: tuple[float, ...]
    shifts: dict[tuple[str, str], np.ndarray]

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        object.__setattr__(self, "initial", tuple(float(v) for v in self.initial))
        object.__setattr__(
            self,
            "shifts",
            MappingProxyType({k: _freeze(v) for k, v in self.shifts.items()}),
        )

    def validate(self, tol: Tolerances | None = None) -> "ConeSpec":
        t = resolve(tol)
        n = len(self.members)
        linalg.validate_distribution(np.asarray(self.initial), t, "cone coefficients")
        inputs = self.members[0].inputs
        outputs = self.members[0].outputs
        for x in inputs:
            per_row = np.zeros(n)
            for y in outputs:
                m = self.shifts.get((x, y))
                if m is None or m.shape != (n, n):
                    raise ValueError(f"missing or misshapen shift matrix for ({x!r},{y!r})")
                if m.min() < -t.nonneg:
                    raise ValueError(f"negative shift coefficient for ({x!r},{y!r})")
                per_row = per_row + m.sum(axis=1)
            if np.max(np.abs(per_row - 1.0)) > t.sum * max(1.0, len(outputs)):
                raise ValueError(f"shift rows for input {x!r} do not sum to 1")
        return self


def pa_from_cone(cone: ConeSpec, tol: Tolerances | None = None) -> GeneralPA:
    """Automaton with one state per cone member and the shift matrices as behavior."""
    cone.validate(tol)
    inputs = cone.members[0].inputs
    outputs = cone.members[0].outputs
    trans = {(x, y): np.array(cone.shifts[(x, y)]) for x in inputs for y in outputs}
    return GeneralPA(inputs, outputs, trans, np.asarray(cone.initial)).validate(tol)


def enumerate_pairs(inputs, outputs, max_len: int):
    """(u, v) pairs with |u| = |v| <= max_len, in shortlex order."""
    for u in words_upto(tuple(inputs), max_len):
        for v in _words_exact(tuple(outputs), len(u)):
            yield u, v
