"""Cut-point languages of probabilistic automata.

Membership and enumeration, the cut-point construction toolbox (initial
folding, output binarization, cut-point shifting, the general-transducer
language), isolation scanning, DFA extraction under an isolation
assumption, ergodicity and contraction analysis, definiteness, stability.
"""
from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType

import numpy as np

from . import linalg
from .dfa import Dfa, Word, dfa_minimize, words_of_length, words_upto
from .generalpa import GeneralPA
from .moorepa import MoorePA, avg_reaction, avg_reaction_table
from .tolerances import Tolerances, resolve


def member(a: MoorePA, cutpoint: float, u: Word) -> bool:
    """u belongs to the cut language iff the averaged reaction exceeds the cut."""
    if not 0.0 <= cutpoint < 1.0:
        raise ValueError("cut point must lie in [0, 1)")
    return avg_reaction(a, tuple(u)) > cutpoint


def enumerate_members(a: MoorePA, cutpoint: float, max_len: int) -> list[Word]:
    """Members of the cut language up to max_len, in shortlex order."""
    if not 0.0 <= cutpoint < 1.0:
        raise ValueError("cut point must lie in [0, 1)")
    table = avg_reaction_table(a, max_len)
    return [u for u in words_upto(a.inputs, max_len) if table[u] > cutpoint]


# --- cut-point constructions ---------------------------------------------------

def fold_initial(a: MoorePA, cutpoint: float = 0.0) -> MoorePA:
    """Equivalent automaton whose initial distribution is a point mass.

    One fresh state carries the old initial distribution in its outgoing
    rows; the reaction is preserved on every word, so any cut language is.
    """
    n = a.n_states
    trans = {}
    for x in a.inputs:
        m = np.zeros((n + 1, n + 1))
        m[0, 1:] = a.initial @ a.matrix(x)
        m[1:, 1:] = a.matrix(x)
        trans[x] = m
    lam = np.concatenate([[float(a.initial @ a.lam)], a.lam])
    return MoorePA(a.inputs, trans, linalg.point_distribution(n + 1, 0), lam)


def binarize_output(a: MoorePA, cutpoint: float = 0.0) -> MoorePA:
    """Equivalent automaton with 0/1 output column (doubles the states).

    Requires the output column inside [0, 1].  State j splits into an
    accepting and a rejecting copy reached with weights lam_j and 1-lam_j;
    the initial mass is split the same way so the reaction is preserved on
    every word, the empty one included.
    """
    lam = a.lam
    if lam.min() < 0.0 or lam.max() > 1.0:
        raise ValueError("output column must lie in [0, 1]")
    n = a.n_states
    trans = {}
    for x in a.inputs:
        m = a.matrix(x)
        big = np.zeros((2 * n, 2 * n))
        for j in range(n):
            col = m[:, j]
            for copy in (0, 1):
                big[2 * np.arange(n) + copy, 2 * j] = lam[j] * col
                big[2 * np.arange(n) + copy, 2 * j + 1] = (1.0 - lam[j]) * col
        trans[x] = big
    init = np.zeros(2 * n)
    init[0::2] = a.initial * lam
    init[1::2] = a.initial * (1.0 - lam)
    lam_b = np.zeros(2 * n)
    lam_b[0::2] = 1.0
    return MoorePA(a.inputs, trans, init, lam_b)


def shift_cutpoint(a: MoorePA, old: float, new: float) -> MoorePA:
    """Automaton whose cut language at `new` equals a's language at `old`.

    Lowering the cut scales the reaction by new/old (state doubling with the
    initial mass split alpha / 1-alpha); raising it mixes in an absorbing
    all-accepting state.  old == new returns the automaton unchanged.
    """
    if not 0.0 <= old < 1.0 or not 0.0 <= new < 1.0:
        raise ValueError("cut points must lie in [0, 1)")
    if new == old:
        return a
    n = a.n_states
    if new < old:
        if old == 0.0:
            raise ValueError("cannot scale a zero cut point down")
        alpha = new / old
        trans = {}
        for x in a.inputs:
            m = a.matrix(x)
            big = np.zeros((2 * n, 2 * n))
            big[:n, :n] = alpha * m
            big[:n, n:] = (1.0 - alpha) * m
            big[n:, :n] = alpha * m
            big[n:, n:] = (1.0 - alpha) * m
            trans[x] = big
        init = np.concatenate([alpha * a.initial, (1.0 - alpha) * a.initial])
        lam = np.concatenate([a.lam, np.zeros(n)])
        return MoorePA(a.inputs, trans, init, lam)
    alpha = (new - old) / (1.0 - old)
    trans = {}
    for x in a.inputs:
        big = np.zeros((n + 1, n + 1))
        big[0, 0] = 1.0
        big[1:, 1:] = a.matrix(x)
        trans[x] = big
    init = np.concatenate([[alpha], (1.0 - alpha) * a.initial])
    lam = np.concatenate([[1.0], a.lam])
    return MoorePA(a.inputs, trans, init, lam)


def general_language_pa(a: GeneralPA, y: str) -> MoorePA:
    """Moore automaton whose cut language (minus eps) is the y-output language.

    The reaction on ux equals the probability that the last output is y
    after reading ux; the empty word gets reaction 0 and is never a member.
    """
    if y not in a.outputs:
        raise KeyError(f"unknown output symbol {y!r}")
    n = a.n_states
    trans = {}
    for x in a.inputs:
        rest = sum(a.matrix(x, y2) for y2 in a.outputs if y2 != y)
        if isinstance(rest, int):
            rest = np.zeros((n, n))
        hit = a.matrix(x, y)
        big = np.zeros((2 * n, 2 * n))
        big[:n, :n] = rest
        big[:n, n:] = hit
        big[n:, :n] = rest
        big[n:, n:] = hit
        trans[x] = big
    init = np.concatenate([a.initial, np.zeros(n)])
    lam = np.concatenate([np.zeros(n), np.ones(n)])
    return MoorePA(a.inputs, trans, init, lam)


# --- isolation -----------------------------------------------------------------

@dataclass(frozen=True)
class IsolationReport:
    """Outcome of a bounded isolation scan; never a global claim."""

    status: str                 # "refuted" | "clear"
    delta: float
    max_len: int
    witness: Word | None = None
    witness_value: float | None = None

    @property
    def refuted(self) -> bool:
        return self.status == "refuted"


def isolation_scan(a: MoorePA, cutpoint: float, delta: float, max_len: int) -> IsolationReport:
    """Exhaustively scan |u| <= max_len for a reaction within delta of the cut.

    Whether a cut point is genuinely isolated is undecidable, so the result
    is either a concrete refutation witness or a bounded all-clear.
    Distances equal to delta up to a relative guard of 1e-9 count as clear,
    so exact-boundary instances are not refuted by rounding noise.
    """
    if delta <= 0.0:
        raise ValueError("delta must be positive")
    table = avg_reaction_table(a, max_len)
    guard = delta * (1.0 - 1e-9)
    for u in words_upto(a.inputs, max_len):
        if abs(table[u] - cutpoint) < guard:
            return IsolationReport("refuted", delta, max_len, u, table[u])
    return IsolationReport("clear", delta, max_len)


# --- DFA extraction under isolation ---------------------------------------------

def extract_dfa(a: MoorePA, cutpoint: float, delta: float,
                minimize: bool = True, tol: Tolerances | None = None) -> Dfa:
    """Regular-language extraction assuming the cut point is delta-isolated.

    Breadth-first search over the state-distribution rows xi . A^u; a row is
    merged into an earlier representative when their max-abs distance is at
    most 2 delta / (n^2 max(1, |lam|)).  That radius is sufficient: for any
    continuation w, |f(uw) - f(rw)| <= n^2 |v - r| |lam| <= 2 delta, so
    under delta-isolation the two rows accept exactly the same futures.
    The search terminates because only finitely many radius-separated rows
    fit in the simplex.  The result is Hopcroft-minimized unless disabled.
    """
    if delta <= 0.0:
        raise ValueError("delta must be positive")
    n = a.n_states
    radius = 2.0 * delta / (n * n * max(1.0, linalg.norm_abs(a.lam)))
    reps: list[np.ndarray] = [np.array(a.initial)]
    successors: dict[tuple[int, str], int] = {}
    frontier = [0]
    while frontier:
        i = frontier.pop(0)
        for x in a.inputs:
            row = reps[i] @ a.matrix(x)
            target = None
            for j, r in enumerate(reps):
                if float(np.max(np.abs(row - r))) <= radius:
                    target = j
                    break
            if target is None:
                reps.append(row)
                target = len(reps) - 1
                frontier.append(target)
            successors[(i, x)] = target
    accepting = {
        i for i, r in enumerate(reps) if float(r @ a.lam) > cutpoint
    }
    trans = {
        x: tuple(successors[(i, x)] for i in range(len(reps)))
        for x in a.inputs
    }
    raw = Dfa(
        alphabet=a.inputs,
        n_states=len(reps),
        start=0,
        trans=trans,
        accepting=frozenset(accepting),
    )
    return dfa_minimize(raw) if minimize else raw


def extraction_state_bound(n_states: int, delta: float) -> float:
    """The covering bound (1 + 1/delta)^(n-1) on the number of word classes."""
    return (1.0 + 1.0 / delta) ** (n_states - 1)


# --- ergodicity and contraction ---------------------------------------------------

def ergodic_test(a: MoorePA, tol: Tolerances | None = None) -> tuple[bool, str | None]:
    """Ergodicity criterion: every nonempty word matrix has a primitive pattern.

    Enumerates the finite monoid generated by the letter patterns under the
    boolean product; returns (False, witness word) on the first pattern that
    no boolean power makes all-ones.
    """
    t = resolve(tol)
    seen: dict[bytes, Word] = {}
    queue: list[tuple[np.ndarray, Word]] = []
    for x in a.inputs:
        pat = linalg.bool_pattern(a.matrix(x), t)
        key = pat.tobytes()
        if key not in seen:
            seen[key] = (x,)
            queue.append((pat, (x,)))
    while queue:
        pat, word = queue.pop(0)
        if not linalg.is_primitive(pat):
            return False, "".join(word) if all(len(s) == 1 for s in word) else " ".join(word)
        for x in a.inputs:
            nxt = linalg.bool_mul(pat, linalg.bool_pattern(a.matrix(x), t))
            key = nxt.tobytes()
            if key not in seen:
                seen[key] = word + (x,)
                queue.append((nxt, word + (x,)))
    return True, None


def contraction_bound(a: MoorePA, check_len: int = 5, tol: Tolerances | None = None):
    """Minimum letter-matrix entry c and the decay bound k -> (1-2c)^(k-1).

    The bound on the spread norm of word matrices is validated exhaustively
    for all words of length <= check_len before returning.
    """
    c = min(float(a.matrix(x).min()) for x in a.inputs)
    base = max(0.0, 1.0 - 2.0 * c)

    def bound(k: int) -> float:
        return 1.0 if k < 1 else base ** (k - 1)

    for k in range(1, check_len + 1):
        for u in words_of_length(a.inputs, k):
            spread = linalg.norm_spread(a.word_matrix(u))
            if spread > bound(k) + 1e-12:
                raise AssertionError(
                    f"contraction bound violated at {u!r}: {spread} > {bound(k)}"
                )
    return c, bound


# --- definite languages --------------------------------------------------------

@dataclass(frozen=True)
class DefiniteRep:
    """Membership data of a definite language: a suffix table plus short words."""

    k: int
    suffix_table: dict[Word, bool]
    short_table: dict[Word, bool]

    def __post_init__(self):
        object.__setattr__(self, "suffix_table", MappingProxyType(dict(self.suffix_table)))
        object.__setattr__(self, "short_table", MappingProxyType(dict(self.short_table)))

    def member(self, u: Word) -> bool:
        u = tuple(u)
        if len(u) < self.k:
            return self.short_table[u]
        return self.suffix_table[u[len(u) - self.k:]]


def definite_rep(a: MoorePA, cutpoint: float, delta: float,
                 table_limit: int = 1 << 16,
                 tol: Tolerances | None = None) -> DefiniteRep | None:
    """Suffix-determined representation of the cut language, when derivable.

    Assumes the caller asserts delta-isolation.  With strictly positive
    letter matrices the suffix length k is the first one making
    (1-2c)^(k-1) < 2 delta / (n |lam|); for merely ergodic automata k is
    found by scanning the word-matrix spread directly.  Returns None when
    neither hypothesis holds.  Suffix determination is re-validated
    exhaustively on all words with k <= |u| <= k+2.
    """
    t = resolve(tol)
    n = a.n_states
    threshold = 2.0 * delta / (n * max(1.0, linalg.norm_abs(a.lam)))
    c = min(float(a.matrix(x).min()) for x in a.inputs)
    k = None
    if c > t.zero:
        base = max(0.0, 1.0 - 2.0 * c)
        k = 1
        while (base ** (k - 1) if k > 1 else 1.0) >= threshold:
            k += 1
            if k > 4096:
                return None
    else:
        ergodic, _ = ergodic_test(a, t)
        if not ergodic:
            return None
        k = 1
        while True:
            worst = max(
                linalg.norm_spread(a.word_matrix(u))
                for u in words_of_length(a.inputs, k)
            )
            if worst < threshold:
                break
            k += 1
            if len(a.inputs) ** k > table_limit:
                return None
    if len(a.inputs) ** k > table_limit:
        raise ValueError(f"suffix table of size |X|^{k} exceeds the limit")
    suffix = {w: member(a, cutpoint, w) for w in words_of_length(a.inputs, k)}
    short = {w: member(a, cutpoint, w) for w in words_upto(a.inputs, k - 1)}
    rep = DefiniteRep(k, suffix, short)
    for extra in range(0, 3):
        for u in words_of_length(a.inputs, k + extra):
            if member(a, cutpoint, u) != rep.member(u):
                raise AssertionError(
                    f"suffix determination failed at {u!r}; the isolation "
                    "assumption does not hold at this delta"
                )
    return rep


# --- stability -----------------------------------------------------------------

STABLE_ALL = "stable_all"
POSITIVE_WORD_STABLE = "positive_word_stable"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class StabilityReport:
    status: str
    word_length: int | None = None


def stability_check(a: MoorePA, tol: Tolerances | None = None) -> StabilityReport:
    """Sufficient stability conditions for isolated cut points.

    StableAll when every letter matrix contracts the spread norm strictly;
    otherwise search for a layer l <= n^2 on which every word matrix is
    strictly positive; otherwise Unknown (the matching necessary condition
    is not implemented, only the sufficient directions are).
    """
    t = resolve(tol)
    worst = max(linalg.norm_spread(a.matrix(x)) for x in a.inputs)
    if worst < 1.0 - t.zero:
        return StabilityReport(STABLE_ALL)
    n = a.n_states
    for length in range(1, n * n + 1):
        if len(a.inputs) ** length > 1 << 16:
            break
        if all(
            float(a.word_matrix(u).min()) > t.zero
            for u in words_of_length(a.inputs, length)
        ):
            return StabilityReport(POSITIVE_WORD_STABLE, length)
    return StabilityReport(UNKNOWN)
