"""Moore probabilistic automata with numeric output.

Averaged reactions xi . A^u . lam, averaged basis matrices, reduction by
convex-combination elimination, Mealy/Moore classification of general
automata, and the 0/1 embedding of deterministic automata.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from types import MappingProxyType

import numpy as np

from . import linalg
from .dfa import Dfa, Word, dfa_reachable_part, words_upto
from .generalpa import GeneralPA
from .tolerances import Tolerances, resolve


def _freeze(a) -> np.ndarray:
    out = np.asarray(a, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class MoorePA:
    inputs: tuple[str, ...]
    trans: dict[str, np.ndarray]
    initial: np.ndarray
    lam: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(
            self, "trans", MappingProxyType({x: _freeze(m) for x, m in self.trans.items()})
        )
        object.__setattr__(self, "initial", _freeze(self.initial))
        object.__setattr__(self, "lam", _freeze(np.ravel(self.lam)))

    @property
    def n_states(self) -> int:
        return self.initial.size

    def matrix(self, x: str) -> np.ndarray:
        m = self.trans.get(x)
        if m is None:
            raise KeyError(f"unknown input symbol {x!r}")
        return m

    def word_matrix(self, u: Word) -> np.ndarray:
        out = np.eye(self.n_states)
        for x in u:
            out = out @ self.matrix(x)
        return out

    def validate(self, tol: Tolerances | None = None) -> "MoorePA":
        t = resolve(tol)
        n = self.n_states
        linalg.validate_distribution(self.initial, t, "initial distribution")
        if self.lam.shape != (n,) or not np.all(np.isfinite(self.lam)):
            raise ValueError("output column has wrong shape or non-finite entries")
        for x in self.inputs:
            m = self.matrix(x)
            if m.shape != (n, n):
                raise ValueError(f"matrix for {x!r} has shape {m.shape}")
            linalg.validate_stochastic(m, t, f"matrix for input {x!r}")
        return self


def avg_reaction(a: MoorePA, u: Word, xi: np.ndarray | None = None) -> float:
    """Expected output after reading u: xi . A^u . lam."""
    row = a.initial if xi is None else np.asarray(xi, dtype=float)
    for x in u:
        row = row @ a.matrix(x)
    return float(row @ a.lam)


def avg_reaction_table(a: MoorePA, depth: int) -> dict[Word, float]:
    """All averaged reactions to the given depth, sharing prefix products."""
    values = {(): float(a.initial @ a.lam)}
    frontier: list[tuple[Word, np.ndarray]] = [((), a.initial)]
    for _ in range(depth):
        nxt = []
        for u, row in frontier:
            for x in a.inputs:
                row2 = row @ a.matrix(x)
                values[u + (x,)] = float(row2 @ a.lam)
                nxt.append((u + (x,), row2))
        frontier = nxt
    return values


def avg_basis_matrix(a: MoorePA, tol: Tolerances | None = None):
    """Basis of the span of the columns A^u . lam, with word tags."""
    t = resolve(tol)
    n = a.n_states
    span = linalg.Subspace(n, t)
    columns: list[np.ndarray] = []
    tags: list[Word] = []
    if span.try_add(a.lam):
        columns.append(np.array(a.lam))
        tags.append(())
    if not columns:  # identically-zero output column still spans something trivial
        return np.zeros((n, 1)), [()]
    sweeps = 0
    while True:
        grew = False
        snapshot = list(zip(columns, tags))
        for col, u in snapshot:
            for x in a.inputs:
                cand = a.matrix(x) @ col
                if span.try_add(cand):
                    columns.append(cand)
                    tags.append((x,) + u)
                    grew = True
        sweeps += 1
        if not grew:
            break
        assert sweeps <= n, "basis sweeps exceeded the state count"
    return np.column_stack(columns), tags


def avg_distributions_equivalent(a: MoorePA, xi1, xi2, tol: Tolerances | None = None) -> bool:
    t = resolve(tol)
    basis, _ = avg_basis_matrix(a, t)
    diff = (np.asarray(xi1, dtype=float) - np.asarray(xi2, dtype=float)) @ basis
    return bool(np.max(np.abs(diff)) <= t.rank * max(1.0, linalg.norm_abs(basis)) * 10.0)


def moore_disjoint_union(a1: MoorePA, a2: MoorePA) -> MoorePA:
    if a1.inputs != a2.inputs:
        raise ValueError("alphabet mismatch")
    n1, n2 = a1.n_states, a2.n_states
    trans = {}
    for x in a1.inputs:
        m = np.zeros((n1 + n2, n1 + n2))
        m[:n1, :n1] = a1.matrix(x)
        m[n1:, n1:] = a2.matrix(x)
        trans[x] = m
    return MoorePA(
        a1.inputs,
        trans,
        np.concatenate([a1.initial, np.zeros(n2)]),
        np.concatenate([a1.lam, a2.lam]),
    )


def avg_equivalent(a1: MoorePA, a2: MoorePA, tol: Tolerances | None = None) -> bool:
    """Equal averaged reactions, decided on the disjoint union's basis."""
    union = moore_disjoint_union(a1, a2)
    xi1 = np.concatenate([a1.initial, np.zeros(a2.n_states)])
    xi2 = np.concatenate([np.zeros(a1.n_states), a2.initial])
    return avg_distributions_equivalent(union, xi1, xi2, tol)


def moore_reachable_part(a: MoorePA, tol: Tolerances | None = None) -> MoorePA:
    t = resolve(tol)
    n = a.n_states
    alive = {i for i in range(n) if a.initial[i] > t.zero}
    changed = True
    while changed:
        changed = False
        for x in a.inputs:
            m = a.matrix(x)
            for i in list(alive):
                for j in range(n):
                    if j not in alive and m[i, j] > t.zero:
                        alive.add(j)
                        changed = True
    idx = np.array(sorted(alive), dtype=int)
    return MoorePA(
        a.inputs,
        {x: a.matrix(x)[np.ix_(idx, idx)] for x in a.inputs},
        a.initial[idx],
        a.lam[idx],
    )


def find_convex_state_avg(a: MoorePA, tol: Tolerances | None = None):
    """Convex-combination state of the averaged basis matrix, highest index first."""
    t = resolve(tol)
    if a.n_states < 2:
        return None
    basis, _ = avg_basis_matrix(a, t)
    for s in range(a.n_states - 1, -1, -1):
        coeffs = linalg.convex_combination_certificate(basis, s, t)
        if coeffs is not None:
            return s, coeffs
    return None


def remove_convex_state_avg(
    a: MoorePA, s: int, coeffs: np.ndarray, tol: Tolerances | None = None
) -> MoorePA:
    """Fold the convex state into the mixture: B^x = (E 0) A^x (E ; xi)."""
    n = a.n_states
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape != (n - 1,):
        raise ValueError("certificate has wrong length")
    others = [i for i in range(n) if i != s]
    trans = {
        x: a.matrix(x)[np.ix_(others, others)] + np.outer(a.matrix(x)[others, s], coeffs)
        for x in a.inputs
    }
    init = a.initial[others] + a.initial[s] * coeffs
    return MoorePA(a.inputs, trans, init, a.lam[others])


def reduce_avg(a: MoorePA, tol: Tolerances | None = None) -> MoorePA:
    """Strip unreachable states and eliminate convex combinations to a fixed point."""
    t = resolve(tol)
    current = moore_reachable_part(a, t)
    while True:
        hit = find_convex_state_avg(current, t)
        if hit is None:
            return current
        s, coeffs = hit
        current = moore_reachable_part(remove_convex_state_avg(current, s, coeffs, t), t)


# --- classification of general automata --------------------------------------

class Classification(enum.Enum):
    MEALY = "mealy"
    MOORE_DET_OUT = "moore_det_out"
    GENERAL = "general"


def classify(a: GeneralPA, tol: Tolerances | None = None) -> Classification:
    """Factorization test P(s,x,s',y) = delta(s,x,s') . lam(s,x,y).

    Returns MOORE_DET_OUT when additionally the output law does not depend
    on the input and is deterministic; a Moore automaton with stochastic
    output classifies as MEALY.
    """
    t = resolve(tol)
    n = a.n_states
    slack = max(t.sum * 100.0, 1e-9)
    delta = {x: a.input_matrix(x) for x in a.inputs}
    lam = {
        x: np.column_stack([a.matrix(x, y).sum(axis=1) for y in a.outputs])
        for x in a.inputs
    }
    for x in a.inputs:
        for yi, y in enumerate(a.outputs):
            predicted = delta[x] * lam[x][:, yi][:, None]
            if linalg.norm_abs(predicted - a.matrix(x, y)) > slack:
                return Classification.GENERAL
    x0 = a.inputs[0]
    input_independent = all(
        linalg.norm_abs(lam[x] - lam[x0]) <= slack for x in a.inputs
    )
    deterministic = input_independent and all(
        np.max(lam[x0][s]) > 1.0 - slack for s in range(n)
    )
    if deterministic:
        return Classification.MOORE_DET_OUT
    return Classification.MEALY


def moore_to_general(a: MoorePA) -> GeneralPA:
    """Embed a numeric-output Moore automaton as a general transducer.

    Output symbols are the distinct output values (as printed); the emitted
    symbol is the label of the source state of each transition.
    """
    labels = [format(v, ".12g") for v in a.lam]
    outputs = tuple(dict.fromkeys(labels))
    trans = {}
    for x in a.inputs:
        m = a.matrix(x)
        for y in outputs:
            mask = np.array([1.0 if lab == y else 0.0 for lab in labels])
            trans[(x, y)] = m * mask[:, None]
    return GeneralPA(a.inputs, outputs, trans, a.initial)


# --- deterministic automata as probabilistic ones ------------------------------

def dfa_to_pa(d: Dfa) -> MoorePA:
    """0/1 Moore automaton of a DFA; its reaction is the language indicator.

    Products of deterministic 0/1 matrices stay exactly 0/1 in floats, so
    membership at cut point 0 is tolerance-free.
    """
    n = d.n_states
    trans = {}
    for x in d.alphabet:
        m = np.zeros((n, n))
        for s in range(n):
            m[s, d.trans[x][s]] = 1.0
        trans[x] = m
    lam = np.array([1.0 if s in d.accepting else 0.0 for s in range(n)])
    return MoorePA(d.alphabet, trans, linalg.point_distribution(n, d.start), lam)


__all__ = [
    "MoorePA",
    "avg_reaction",
    "avg_reaction_table",
    "avg_basis_matrix",
    "avg_distributions_equivalent",
    "avg_equivalent",
    "moore_disjoint_union",
    "moore_reachable_part",
    "find_convex_state_avg",
    "remove_convex_state_avg",
    "reduce_avg",
    "Classification",
    "classify",
    "moore_to_general",
    "dfa_to_pa",
    "dfa_reachable_part",
    "words_upto",
]
