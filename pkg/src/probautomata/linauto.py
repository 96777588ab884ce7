"""Linear (weighted) automata over the reals and the string-function ring.

Evaluation, the block operation algebra (sum, product, convolution, scaling,
reversal, iteration), the convolution ring on finite tables with inverse and
iteration, Hankel-matrix minimal realization, reachability/distinguishability
degrees, state elimination to rational expressions, and the two embeddings
into probabilistic automata.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType

import numpy as np

from . import linalg
from .dfa import Dfa, Word, words_of_length, words_upto
from .moorepa import MoorePA
from .tolerances import Tolerances, resolve


def _freeze(a) -> np.ndarray:
    out = np.asarray(a, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class LinearAutomaton:
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
    def dim(self) -> int:
        return self.initial.size

    def matrix(self, x: str) -> np.ndarray:
        m = self.trans.get(x)
        if m is None:
            raise KeyError(f"unknown input symbol {x!r}")
        return m

    def word_matrix(self, u: Word) -> np.ndarray:
        out = np.eye(self.dim)
        for x in u:
            out = out @ self.matrix(x)
        return out

    def validate(self) -> "LinearAutomaton":
        n = self.dim
        if not np.all(np.isfinite(self.initial)) or not np.all(np.isfinite(self.lam)):
            raise ValueError("non-finite entries")
        if self.lam.shape != (n,):
            raise ValueError("output column has wrong length")
        for x in self.inputs:
            if self.matrix(x).shape != (n, n):
                raise ValueError(f"matrix for {x!r} is not {n}x{n}")
            if not np.all(np.isfinite(self.matrix(x))):
                raise ValueError(f"non-finite entries in matrix for {x!r}")
        return self


def la_reaction(l: LinearAutomaton, u: Word, xi: np.ndarray | None = None) -> float:
    row = l.initial if xi is None else np.asarray(xi, dtype=float)
    for x in u:
        row = row @ l.matrix(x)
    return float(row @ l.lam)


def la_table(l: LinearAutomaton, depth: int) -> "StringFunctionTable":
    """Tabulate the reaction to the given depth, sharing prefix products."""
    values = {(): float(l.initial @ l.lam)}
    frontier: list[tuple[Word, np.ndarray]] = [((), l.initial)]
    for _ in range(depth):
        nxt = []
        for u, row in frontier:
            for x in l.inputs:
                row2 = row @ l.matrix(x)
                values[u + (x,)] = float(row2 @ l.lam)
                nxt.append((u + (x,), row2))
        frontier = nxt
    return StringFunctionTable(l.inputs, depth, values)


# --- string-function tables and their ring ------------------------------------

@dataclass(frozen=True, eq=False)
class StringFunctionTable:
    """Finite table of a function on words, valid up to its depth."""

    alphabet: tuple[str, ...]
    depth: int
    values: dict[Word, float] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "values", MappingProxyType(dict(self.values)))

    def value(self, u: Word) -> float:
        u = tuple(u)
        if len(u) > self.depth:
            raise KeyError(f"word beyond table depth {self.depth}: {u}")
        return self.values.get(u, 0.0)

    def words(self):
        return words_upto(self.alphabet, self.depth)

    def _binary(self, other: "StringFunctionTable"):
        if self.alphabet != other.alphabet:
            raise ValueError("alphabet mismatch")
        return min(self.depth, other.depth)

    def add(self, other: "StringFunctionTable") -> "StringFunctionTable":
        depth = self._binary(other)
        vals = {u: self.value(u) + other.value(u) for u in words_upto(self.alphabet, depth)}
        return StringFunctionTable(self.alphabet, depth, vals)

    def sub(self, other: "StringFunctionTable") -> "StringFunctionTable":
        return self.add(other.scale(-1.0))

    def scale(self, a: float) -> "StringFunctionTable":
        return StringFunctionTable(
            self.alphabet, self.depth, {u: a * v for u, v in self.values.items()}
        )

    def pointwise_mul(self, other: "StringFunctionTable") -> "StringFunctionTable":
        depth = self._binary(other)
        vals = {u: self.value(u) * other.value(u) for u in words_upto(self.alphabet, depth)}
        return StringFunctionTable(self.alphabet, depth, vals)

    def convolve(self, other: "StringFunctionTable") -> "StringFunctionTable":
        """Cauchy product over all factorizations u = u1 u2."""
        depth = self._binary(other)
        vals = {}
        for u in words_upto(self.alphabet, depth):
            vals[u] = sum(
                self.value(u[:k]) * other.value(u[k:]) for k in range(len(u) + 1)
            )
        return StringFunctionTable(self.alphabet, depth, vals)

    def reverse(self) -> "StringFunctionTable":
        return StringFunctionTable(
            self.alphabet, self.depth, {tuple(reversed(u)): v for u, v in self.values.items()}
        )

    def inverse(self, tol: Tolerances | None = None) -> "StringFunctionTable":
        """Convolution inverse, defined when f(eps) != 0.

        Solves the triangular system g(eps) = 1/f(eps),
        g(u) = -(1/f(eps)) * sum over proper prefixes of f(u1) g(u2).
        """
        t = resolve(tol)
        head = self.value(())
        if abs(head) <= t.zero:
            raise ZeroDivisionError("function has no convolution inverse: f(eps) = 0")
        vals: dict[Word, float] = {(): 1.0 / head}
        for k in range(1, self.depth + 1):
            for u in words_of_length(self.alphabet, k):
                acc = sum(self.value(u[:j]) * vals[u[j:]] for j in range(1, len(u) + 1))
                vals[u] = -acc / head
        return StringFunctionTable(self.alphabet, self.depth, vals)

    def iterate(self, tol: Tolerances | None = None) -> "StringFunctionTable":
        """Kleene-plus in the convolution ring: (chi_eps - f)^-1 - chi_eps."""
        t = resolve(tol)
        if abs(self.value(()) - 1.0) <= t.zero:
            raise ZeroDivisionError("iteration undefined: f(eps) = 1")
        chi = chi_eps(self.alphabet, self.depth)
        return chi.sub(self).inverse(t).sub(chi)


def chi_eps(alphabet, depth: int) -> StringFunctionTable:
    return StringFunctionTable(tuple(alphabet), depth, {(): 1.0})


def chi_word(alphabet, word: Word, depth: int) -> StringFunctionTable:
    return StringFunctionTable(tuple(alphabet), depth, {tuple(word): 1.0})


# --- the operation algebra ------------------------------------------------------

def la_sum(l1: LinearAutomaton, l2: LinearAutomaton) -> LinearAutomaton:
    if l1.inputs != l2.inputs:
        raise ValueError("alphabet mismatch")
    n1, n2 = l1.dim, l2.dim
    trans = {}
    for x in l1.inputs:
        m = np.zeros((n1 + n2, n1 + n2))
        m[:n1, :n1] = l1.matrix(x)
        m[n1:, n1:] = l2.matrix(x)
        trans[x] = m
    return LinearAutomaton(
        l1.inputs, trans,
        np.concatenate([l1.initial, l2.initial]),
        np.concatenate([l1.lam, l2.lam]),
    )


def la_product(l1: LinearAutomaton, l2: LinearAutomaton) -> LinearAutomaton:
    """Pointwise product via the Kronecker construction."""
    if l1.inputs != l2.inputs:
        raise ValueError("alphabet mismatch")
    trans = {x: linalg.kron(l1.matrix(x), l2.matrix(x)) for x in l1.inputs}
    return LinearAutomaton(
        l1.inputs, trans,
        linalg.kron(l1.initial[None, :], l2.initial[None, :]).ravel(),
        linalg.kron(l1.lam[:, None], l2.lam[:, None]).ravel(),
    )


def la_convolution(l1: LinearAutomaton, l2: LinearAutomaton) -> LinearAutomaton:
    """Cauchy product: upper-triangular blocks glued by M = lam1 . xi2."""
    if l1.inputs != l2.inputs:
        raise ValueError("alphabet mismatch")
    n1, n2 = l1.dim, l2.dim
    m = np.outer(l1.lam, l2.initial)
    trans = {}
    for x in l1.inputs:
        blk = np.zeros((n1 + n2, n1 + n2))
        blk[:n1, :n1] = l1.matrix(x)
        blk[:n1, n1:] = l1.matrix(x) @ m
        blk[n1:, n1:] = l2.matrix(x)
        trans[x] = blk
    return LinearAutomaton(
        l1.inputs, trans,
        np.concatenate([l1.initial, l1.initial @ m]),
        np.concatenate([np.zeros(n1), l2.lam]),
    )


def la_combine(op: str, l1: LinearAutomaton, l2: LinearAutomaton) -> LinearAutomaton:
    table = {"sum": la_sum, "product": la_product, "convolution": la_convolution}
    if op not in table:
        raise ValueError(f"unknown binary operation {op!r}")
    return table[op](l1, l2)


def la_scale(a: float, l: LinearAutomaton) -> LinearAutomaton:
    return LinearAutomaton(l.inputs, dict(l.trans), l.initial, a * l.lam)


def la_reverse(l: LinearAutomaton) -> LinearAutomaton:
    return LinearAutomaton(
        l.inputs, {x: l.matrix(x).T for x in l.inputs}, l.lam, l.initial
    )


def la_iterate(l: LinearAutomaton, tol: Tolerances | None = None) -> LinearAutomaton:
    """Kleene-plus of the reaction; defined when f_L(eps) = 0."""
    t = resolve(tol)
    if abs(float(l.initial @ l.lam)) > t.zero:
        raise ValueError("iteration requires f_L(eps) = 0")
    bump = np.eye(l.dim) + np.outer(l.lam, l.initial)
    return LinearAutomaton(
        l.inputs, {x: l.matrix(x) @ bump for x in l.inputs}, l.initial, l.lam
    )


def la_unary(op: str, l: LinearAutomaton, a: float | None = None,
             tol: Tolerances | None = None) -> LinearAutomaton:
    if op == "scale":
        if a is None:
            raise ValueError("scale needs a coefficient")
        return la_scale(a, l)
    if op == "reverse":
        return la_reverse(l)
    if op == "iterate":
        return la_iterate(l, tol)
    raise ValueError(f"unknown unary operation {op!r}")


def la_zero(inputs, dim: int = 1) -> LinearAutomaton:
    inputs = tuple(inputs)
    return LinearAutomaton(
        inputs, {x: np.zeros((dim, dim)) for x in inputs}, np.zeros(dim), np.zeros(dim)
    )


def la_chi_symbol(inputs, symbol: str) -> LinearAutomaton:
    """Dimension-2 automaton realizing the indicator of a single letter."""
    inputs = tuple(inputs)
    trans = {x: np.zeros((2, 2)) for x in inputs}
    trans[symbol] = np.array([[0.0, 1.0], [0.0, 0.0]])
    return LinearAutomaton(inputs, trans, np.array([1.0, 0.0]), np.array([0.0, 1.0]))


def la_equivalent(l1: LinearAutomaton, l2: LinearAutomaton,
                  tol: Tolerances | None = None) -> bool:
    """Equal reactions, via reach/observe bases of the difference automaton."""
    t = resolve(tol)
    diff = la_sum(l1, la_scale(-1.0, l2))
    reach = _reach_basis(diff, t)
    obs = _obs_basis(diff, t)
    scale = max(1.0, linalg.norm_abs(diff.initial), linalg.norm_abs(diff.lam))
    for r in reach:
        for o in obs:
            if abs(float(r @ o)) > t.rank * scale * 100.0:
                return False
    return True


def _reach_basis(l: LinearAutomaton, t: Tolerances) -> list[np.ndarray]:
    span = linalg.Subspace(l.dim, t)
    frontier = []
    if span.try_add(l.initial):
        frontier = [span.basis[-1]]
    while frontier:
        nxt = []
        for v in frontier:
            for x in l.inputs:
                if span.try_add(v @ l.matrix(x)):
                    nxt.append(span.basis[-1])
        frontier = nxt
    # raw (unnormalized) spanning set: initial and its images suffice, but
    # the orthonormal basis spans the same space, which is all that matters
    return list(span.basis)


def _obs_basis(l: LinearAutomaton, t: Tolerances) -> list[np.ndarray]:
    span = linalg.Subspace(l.dim, t)
    frontier = []
    if span.try_add(l.lam):
        frontier = [span.basis[-1]]
    while frontier:
        nxt = []
        for v in frontier:
            for x in l.inputs:
                if span.try_add(l.matrix(x) @ v):
                    nxt.append(span.basis[-1])
        frontier = nxt
    return list(span.basis)


def reach_degree(l: LinearAutomaton, tol: Tolerances | None = None) -> int:
    """Smallest k at which the span of the rows xi . L^u, |u| <= k, stabilizes."""
    t = resolve(tol)
    span = linalg.Subspace(l.dim, t)
    frontier = []
    if span.try_add(l.initial):
        frontier = [span.basis[-1]]
    k = 0
    while True:
        nxt = []
        for v in frontier:
            for x in l.inputs:
                if span.try_add(v @ l.matrix(x)):
                    nxt.append(span.basis[-1])
        if not nxt:
            return k
        frontier = nxt
        k += 1


def disting_degree(l: LinearAutomaton, tol: Tolerances | None = None) -> int:
    """Smallest k at which the span of the columns L^u . lam stabilizes."""
    t = resolve(tol)
    span = linalg.Subspace(l.dim, t)
    frontier = []
    if span.try_add(l.lam):
        frontier = [span.basis[-1]]
    k = 0
    while True:
        nxt = []
        for v in frontier:
            for x in l.inputs:
                if span.try_add(l.matrix(x) @ v):
                    nxt.append(span.basis[-1])
        if not nxt:
            return k
        frontier = nxt
        k += 1


# --- Hankel matrices and minimal realization ------------------------------------

def _fn_of(f, alphabet=None) -> tuple[tuple[str, ...], int, callable]:
    if isinstance(f, StringFunctionTable):
        return f.alphabet, f.depth, f.value
    if callable(f):
        if alphabet is None:
            raise TypeError("a callable oracle needs an explicit alphabet")
        return tuple(alphabet), 1 << 30, f
    raise TypeError("expected a StringFunctionTable or a callable oracle")


def hankel_block(f, row_len: int, col_len: int, alphabet=None) -> np.ndarray:
    """Finite Hankel block H[u, v] = f(uv), tags in shortlex order.

    f is either a table or a word -> value oracle (then pass the alphabet).
    """
    alphabet, depth, fn = _fn_of(f, alphabet)
    if row_len + col_len > depth:
        raise ValueError("table too shallow for the requested block")
    rows = list(words_upto(alphabet, row_len))
    cols = list(words_upto(alphabet, col_len))
    return np.array([[fn(u + v) for v in cols] for u in rows])


@dataclass(frozen=True, eq=False)
class HankelBasis:
    """An invertible core of the Hankel matrix plus its per-letter shifts."""

    row_tags: tuple[Word, ...]
    col_tags: tuple[Word, ...]
    core: np.ndarray
    letters: dict[str, np.ndarray]
    alphabet: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "core", _freeze(self.core))
        object.__setattr__(
            self, "letters", MappingProxyType({x: _freeze(m) for x, m in self.letters.items()})
        )

    @property
    def rank(self) -> int:
        return self.core.shape[0]


def _greedy_tags(vectors: dict[Word, np.ndarray], candidates, ambient: int,
                 t: Tolerances) -> list[Word]:
    span = linalg.Subspace(ambient, t)
    chosen = []
    for tag in candidates:
        if span.try_add(vectors[tag]):
            chosen.append(tag)
    return chosen


def hankel_basis(f, rank_bound: int, tol: Tolerances | None = None) -> HankelBasis:
    """Row/column basis of the Hankel block with tags of length <= rank - 1.

    Greedy pivoted selection in shortlex order; the empty word is always the
    first tag of both sides.  Raises if the observed rank exceeds the bound
    or the table is too shallow to certify the basis.
    """
    t = resolve(tol)
    alphabet, depth, fn = _fn_of(f)
    if rank_bound < 1:
        raise ValueError("rank bound must be >= 1")
    max_tag = min(rank_bound - 1, max(0, (depth - 1) // 2))
    rows = list(words_upto(alphabet, max_tag))
    cols = list(words_upto(alphabet, max_tag))
    block = np.array([[fn(u + v) for v in cols] for u in rows])
    if linalg.norm_abs(block) <= t.zero:
        raise ValueError("identically zero function has no Hankel basis")
    row_vectors = {u: block[i] for i, u in enumerate(rows)}
    col_vectors = {v: block[:, j] for j, v in enumerate(cols)}
    row_basis = _greedy_tags(row_vectors, rows, len(cols), t)
    col_basis = _greedy_tags(col_vectors, cols, len(rows), t)
    r = len(row_basis)
    if r != len(col_basis):
        raise ValueError("row and column ranks disagree at this depth")
    if r > rank_bound:
        raise ValueError(f"Hankel rank {r} exceeds the stated bound {rank_bound}")
    if 2 * (r - 1) + 1 > depth:
        raise ValueError("table too shallow for the per-letter shift matrices")
    core = np.array([[fn(u + v) for v in col_basis] for u in row_basis])
    if np.linalg.cond(core) >= 1.0 / t.rank:
        raise ValueError("selected core is numerically singular")
    letters = {
        x: np.array([[fn(u + (x,) + v) for v in col_basis] for u in row_basis])
        for x in alphabet
    }
    return HankelBasis(tuple(row_basis), tuple(col_basis), core, letters, alphabet)


def e_f_dimension(f, depth: int | None = None, tol: Tolerances | None = None) -> int:
    """Rank of the Hankel block: the minimal realizing dimension (0 for zero f)."""
    t = resolve(tol)
    alphabet, table_depth, fn = _fn_of(f)
    depth = table_depth if depth is None else min(depth, table_depth)
    half = depth // 2
    rows = list(words_upto(alphabet, half))
    cols = list(words_upto(alphabet, depth - half))
    block = np.array([[fn(u + v) for v in cols] for u in rows])
    if linalg.norm_abs(block) <= t.zero:
        return 0
    span = linalg.Subspace(len(cols), t)
    return sum(1 for row in block if span.try_add(row))


def realize(f, rank_bound: int | None = None, tol: Tolerances | None = None) -> LinearAutomaton:
    """Minimal linear automaton reproducing the table.

    Built from a Hankel basis as (e1, {shift(x) . core^-1}, first core
    column); the identically-zero table realizes as the 1-dimensional zero
    automaton by convention.
    """
    t = resolve(tol)
    alphabet, depth, _ = _fn_of(f)
    if linalg.norm_abs(np.array(list(f.values.values()) or [0.0])) <= t.zero:
        return la_zero(alphabet)
    if rank_bound is None:
        rank_bound = max(1, (depth + 1) // 2)
    basis = hankel_basis(f, rank_bound, t)
    core_inv = np.linalg.inv(basis.core)
    trans = {x: basis.letters[x] @ core_inv for x in alphabet}
    init = linalg.point_distribution(basis.rank, 0)
    lam = basis.core[:, 0]
    return LinearAutomaton(alphabet, trans, init, lam)


# --- rational expressions --------------------------------------------------------

class Expr:
    """Base of the rational-expression tree."""

    __slots__ = ()


@dataclass(frozen=True)
class ChiEps(Expr):
    pass


@dataclass(frozen=True)
class ChiSym(Expr):
    symbol: str


@dataclass(frozen=True)
class Scale(Expr):
    coeff: float
    body: "Expr"


@dataclass(frozen=True)
class Sum(Expr):
    terms: tuple


@dataclass(frozen=True)
class Conv(Expr):
    factors: tuple


@dataclass(frozen=True)
class Iter(Expr):
    body: "Expr"


EXPR_ZERO = Scale(0.0, ChiEps())


def _is_zero(e: Expr) -> bool:
    return isinstance(e, Scale) and e.coeff == 0.0


def ex_sum(*terms: Expr) -> Expr:
    flat = []
    for e in terms:
        if _is_zero(e):
            continue
        if isinstance(e, Sum):
            flat.extend(e.terms)
        else:
            flat.append(e)
    if not flat:
        return EXPR_ZERO
    if len(flat) == 1:
        return flat[0]
    return Sum(tuple(flat))


def ex_conv(*factors: Expr) -> Expr:
    flat = []
    for e in factors:
        if _is_zero(e):
            return EXPR_ZERO
        if isinstance(e, ChiEps):
            continue
        if isinstance(e, Conv):
            flat.extend(e.factors)
        else:
            flat.append(e)
    if not flat:
        return ChiEps()
    if len(flat) == 1:
        return flat[0]
    return Conv(tuple(flat))


def ex_scale(a: float, e: Expr) -> Expr:
    if a == 0.0 or _is_zero(e):
        return EXPR_ZERO
    if a == 1.0:
        return e
    if isinstance(e, Scale):
        return Scale(a * e.coeff, e.body)
    return Scale(a, e)


def ex_closure(e: Expr) -> Expr:
    """chi_eps + e+, the Kleene-star shape used by elimination."""
    if _is_zero(e):
        return ChiEps()
    return ex_sum(ChiEps(), Iter(e))


def eval_expr(e: Expr, alphabet, depth: int, tol: Tolerances | None = None,
              _memo: dict | None = None) -> StringFunctionTable:
    """Interpret an expression over the table ring."""
    t = resolve(tol)
    alphabet = tuple(alphabet)
    memo = {} if _memo is None else _memo
    hit = memo.get(e)
    if hit is not None:
        return hit
    if isinstance(e, ChiEps):
        out = chi_eps(alphabet, depth)
    elif isinstance(e, ChiSym):
        out = chi_word(alphabet, (e.symbol,), depth)
    elif isinstance(e, Scale):
        out = eval_expr(e.body, alphabet, depth, t, memo).scale(e.coeff)
    elif isinstance(e, Sum):
        out = chi_eps(alphabet, depth).scale(0.0)
        for term in e.terms:
            out = out.add(eval_expr(term, alphabet, depth, t, memo))
    elif isinstance(e, Conv):
        out = chi_eps(alphabet, depth)
        for factor in e.factors:
            out = out.convolve(eval_expr(factor, alphabet, depth, t, memo))
    elif isinstance(e, Iter):
        body = eval_expr(e.body, alphabet, depth, t, memo)
        if abs(body.value(())) > t.zero:
            raise ValueError("iteration applied to an expression with f(eps) != 0")
        out = body.iterate(t)
    else:
        raise TypeError(f"unknown expression node {e!r}")
    memo[e] = out
    return out


def to_sexpr(e: Expr) -> str:
    if isinstance(e, ChiEps):
        return "chi-eps"
    if isinstance(e, ChiSym):
        return f"(chi {e.symbol})"
    if isinstance(e, Scale):
        return f"(scale {format(e.coeff, '.12g')} {to_sexpr(e.body)})"
    if isinstance(e, Sum):
        return "(+ " + " ".join(to_sexpr(x) for x in e.terms) + ")"
    if isinstance(e, Conv):
        return "(conv " + " ".join(to_sexpr(x) for x in e.factors) + ")"
    if isinstance(e, Iter):
        return f"(iter+ {to_sexpr(e.body)})"
    raise TypeError(f"unknown expression node {e!r}")


def _solve_linear_system(a: list[list[Expr]], c: list[Expr]) -> list[Expr]:
    """Solve (E_eps - A) B = C over the string-function ring by elimination.

    Every diagonal entry vanishes on the empty word throughout, so the
    closure operation stays legal at each step.
    """
    n = len(c)
    if n == 1:
        return [ex_conv(ex_closure(a[0][0]), c[0])]
    star = ex_closure(a[n - 1][n - 1])
    a2 = [
        [
            ex_sum(a[i][j], ex_conv(a[i][n - 1], star, a[n - 1][j]))
            for j in range(n - 1)
        ]
        for i in range(n - 1)
    ]
    c2 = [
        ex_sum(c[i], ex_conv(a[i][n - 1], star, c[n - 1]))
        for i in range(n - 1)
    ]
    b = _solve_linear_system(a2, c2)
    tail = ex_sum(c[n - 1], *[ex_conv(a[n - 1][j], b[j]) for j in range(n - 1)])
    b.append(ex_conv(star, tail))
    return b


def la_to_rational_expr(l: LinearAutomaton) -> Expr:
    """State elimination over the string-function ring.

    Builds the letter matrix A with entries sum_x L^x_ij . chi_x, solves
    (E_eps - A) B = lam . chi_eps, and returns sum_i xi_i . B_i.
    """
    n = l.dim
    a = [
        [
            ex_sum(*[ex_scale(float(l.matrix(x)[i, j]), ChiSym(x)) for x in l.inputs])
            for j in range(n)
        ]
        for i in range(n)
    ]
    c = [ex_scale(float(l.lam[i]), ChiEps()) for i in range(n)]
    b = _solve_linear_system(a, c)
    return ex_sum(*[ex_scale(float(l.initial[i]), b[i]) for i in range(n)])


# --- embeddings into probabilistic automata --------------------------------------

def _orthogonal_with_first_column(v: np.ndarray, tol: Tolerances) -> np.ndarray:
    """Orthogonal matrix whose first column points along v.

    Gram-Schmidt completion of the normalized column; keeping the basis
    orthonormal keeps the conjugated matrices the same size as the
    originals, which the embeddings need so the scale factor does not
    collapse below float resolution.
    """
    n = v.size
    span = linalg.Subspace(n, tol)
    if not span.try_add(v):
        raise ValueError("prescribed first column is zero")
    cols = [np.asarray(v, dtype=float) / float(np.linalg.norm(v))]
    for i in range(n):
        if span.try_add(np.eye(n)[i]):
            cols.append(span.basis[-1])
    return np.column_stack(cols)


def _affine_embed_core(l: LinearAutomaton, tol: Tolerances) -> tuple[MoorePA, float]:
    """Positive-automaton embedding for an automaton whose lam is e1."""
    n = l.dim
    pad = n + 2
    a1 = {}
    max_entry = 0.0
    for x in l.inputs:
        m = np.zeros((pad, pad))
        lx = l.matrix(x)
        m[:n, :n] = lx
        m[:n, n] = -lx.sum(axis=1)          # zero row sums for the first n rows
        m[n + 1, :n] = -lx.sum(axis=0)      # zero column sums for the first n cols
        m[n + 1, n] = lx.sum()
        a1[x] = m
        max_entry = max(max_entry, linalg.norm_abs(m))
    xi1 = np.concatenate([l.initial, [-l.initial.sum()], [0.0]])
    max_entry = max(max_entry, linalg.norm_abs(xi1))
    a = (1.0 / pad) / (1.0 + max_entry)
    uniform = np.full((pad, pad), 1.0 / pad)
    trans = {x: a * a1[x] + uniform for x in l.inputs}
    init = a * xi1 + np.full(pad, 1.0 / pad)
    lam = np.zeros(pad)
    lam[0] = 1.0
    return MoorePA(l.inputs, trans, init, lam).validate(tol), a


def la_to_pa_affine(l: LinearAutomaton, tol: Tolerances | None = None) -> tuple[MoorePA, float]:
    """Moore automaton A and scale a with f_A(u) = a^(|u|+1) f_L(u) + 1/(n+2).

    The zero-output automaton maps to the identity-transition automaton whose
    reaction is constantly 1/(n+2).
    """
    t = resolve(tol)
    n = l.dim
    if linalg.norm_abs(l.lam) <= t.zero:
        pad = n + 2
        trans = {x: np.eye(pad) for x in l.inputs}
        lam = np.zeros(pad)
        lam[0] = 1.0 / pad
        return MoorePA(l.inputs, trans, linalg.point_distribution(pad, 0), lam), 1.0 / pad
    work = l
    e1 = np.zeros(n)
    e1[0] = 1.0
    if linalg.norm_abs(l.lam - e1) > t.zero:
        # p = |lam| . Q with Q orthogonal keeps p e1 = lam exactly while the
        # conjugated matrices keep their scale (condition number 1)
        scale = float(np.linalg.norm(l.lam))
        q = _orthogonal_with_first_column(l.lam, t)
        p = scale * q
        p_inv = q.T / scale
        work = LinearAutomaton(
            l.inputs,
            {x: p_inv @ l.matrix(x) @ p for x in l.inputs},
            l.initial @ p,
            e1,
        )
    return _affine_embed_core(work, t)


def la_language_pa(l: LinearAutomaton, a: float, tol: Tolerances | None = None) -> tuple[MoorePA, float]:
    """Moore automaton with n+4 states whose cut language at 1/(n+4) is L_a.

    Shifts the cut point to 0, pins the empty-word value to 1 or 0 depending
    on whether eps belongs to the language, normalizes the output column and
    applies the affine embedding.  Returns (automaton, cut point).
    """
    t = resolve(tol)
    n = l.dim
    cut = 1.0 / (n + 4)
    # f_Lp = f_L - a
    lp = LinearAutomaton(
        l.inputs,
        {x: _diag_block(l.matrix(x), 1.0) for x in l.inputs},
        np.concatenate([l.initial, [1.0]]),
        np.concatenate([l.lam, [-a]]),
    )
    m = lp.dim
    f_eps = float(lp.initial @ lp.lam)
    xi1 = np.concatenate([lp.initial, [1.0]])
    if f_eps > 0.0:
        lam1 = np.concatenate([lp.lam, [1.0 - f_eps]])
    else:
        lam1 = np.concatenate([lp.lam, [-f_eps]])
        if linalg.norm_abs(lam1) <= t.zero:
            # identically-zero shifted reaction: the language is empty
            pad = m + 3
            trans = {x: np.eye(pad) for x in l.inputs}
            out = np.zeros(pad)
            out[0] = cut
            return (
                MoorePA(l.inputs, trans, linalg.point_distribution(pad, 0), out),
                cut,
            )
    # conjugating by an orthogonal completion rescales the reaction by
    # 1/|lam1| (sign-preserving, so membership is untouched) and keeps the
    # embedded matrices well conditioned
    p = _orthogonal_with_first_column(lam1, t)
    l1_trans = {x: _diag_block(lp.matrix(x), 0.0) for x in l.inputs}
    e1 = np.zeros(m + 1)
    e1[0] = 1.0
    l2 = LinearAutomaton(
        l.inputs,
        {x: p.T @ l1_trans[x] @ p for x in l.inputs},
        xi1 @ p,
        e1,
    )
    pa, _ = _affine_embed_core(l2, t)
    return pa, cut


def _diag_block(m: np.ndarray, corner: float) -> np.ndarray:
    n = m.shape[0]
    out = np.zeros((n + 1, n + 1))
    out[:n, :n] = m
    out[n, n] = corner
    return out


def laf_from_level_dfas(levels: list[tuple[float, Dfa]], check_depth: int = 4,
                        tol: Tolerances | None = None) -> LinearAutomaton:
    """Step function taking value a_i exactly on the i-th DFA's language.

    The DFAs must partition the set of words; the partition property is
    checked exhaustively on words up to check_depth.
    """
    if not levels:
        raise ValueError("need at least one level")
    alphabet = levels[0][1].alphabet
    if any(d.alphabet != alphabet for _, d in levels):
        raise ValueError("level DFAs must share one alphabet")
    for u in words_upto(alphabet, check_depth):
        hits = [i for i, (_, d) in enumerate(levels) if d.accepts(u)]
        if len(hits) != 1:
            raise ValueError(
                f"level DFAs do not partition the words: {u!r} matched {len(hits)} levels"
            )
    sizes = [d.n_states for _, d in levels]
    total = sum(sizes)
    offsets = np.cumsum([0] + sizes)
    trans = {x: np.zeros((total, total)) for x in alphabet}
    init = np.zeros(total)
    lam = np.zeros(total)
    for i, (value, d) in enumerate(levels):
        off = offsets[i]
        init[off + d.start] = 1.0
        for s in range(d.n_states):
            if s in d.accepting:
                lam[off + s] = value
            for x in alphabet:
                trans[x][off + s, off + d.trans[x][s]] = 1.0
    return LinearAutomaton(alphabet, trans, init, lam)
