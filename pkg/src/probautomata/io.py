"""JSON serialization for every automaton kind the toolkit handles.

One self-describing schema (``"schema": 1``): alphabets are string arrays,
matrices are row-major arrays of arrays, words in table keys are
space-separated symbol strings (the empty string is the empty word).
Loading re-validates module invariants and reports the JSON path of the
offending field.
"""
from __future__ import annotations

import json
from typing import Any

import numpy as np

from .dfa import Dfa, Word
from .generalpa import GeneralPA
from .linauto import LinearAutomaton, StringFunctionTable
from .moorepa import MoorePA
from .sequences import MarkovChain, RandomSequence
from .tolerances import Tolerances

SCHEMA_VERSION = 1

KINDS = (
    "general_pa",
    "moore_pa",
    "linear_automaton",
    "markov_chain",
    "dfa",
    "string_function",
    "random_sequence",
)


class SchemaError(ValueError):
    """Raised on malformed documents, carrying the JSON path of the problem."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def word_to_key(u: Word) -> str:
    return " ".join(u)


def key_to_word(key: str) -> Word:
    return tuple(key.split(" ")) if key else ()


def parse_word(text: str, alphabet: tuple[str, ...]) -> Word:
    """Parse a word from user input.

    Single-character alphabets allow the compact form "201"; otherwise (or
    when the compact parse fails) symbols are space- or comma-separated.
    """
    if text == "":
        return ()
    for sep in (" ", ","):
        if sep in text:
            parts = tuple(p for p in text.split(sep) if p)
            break
    else:
        parts = tuple(text) if all(len(s) == 1 for s in alphabet) else (text,)
    for p in parts:
        if p not in alphabet:
            raise SchemaError("$.input", f"symbol {p!r} not in the alphabet {list(alphabet)}")
    return parts


def _require(doc: dict, key: str, path: str) -> Any:
    if key not in doc:
        raise SchemaError(f"{path}.{key}", "missing field")
    return doc[key]


def _symbols(value: Any, path: str) -> tuple[str, ...]:
    if not isinstance(value, list) or not value or not all(isinstance(s, str) for s in value):
        raise SchemaError(path, "expected a non-empty array of symbol strings")
    if len(set(value)) != len(value):
        raise SchemaError(path, "duplicate symbols")
    return tuple(value)


def _matrix(value: Any, path: str) -> np.ndarray:
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise SchemaError(path, f"not a numeric matrix: {exc}") from None
    if arr.ndim != 2:
        raise SchemaError(path, "expected an array of arrays of numbers")
    return arr


def _vector(value: Any, path: str) -> np.ndarray:
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise SchemaError(path, f"not a numeric vector: {exc}") from None
    if arr.ndim != 1:
        raise SchemaError(path, "expected an array of numbers")
    return arr


def to_document(obj) -> dict:
    if isinstance(obj, GeneralPA):
        return {
            "schema": SCHEMA_VERSION,
            "kind": "general_pa",
            "inputs": list(obj.inputs),
            "outputs": list(obj.outputs),
            "trans": {f"{x}|{y}": obj.matrix(x, y).tolist() for x in obj.inputs for y in obj.outputs},
            "initial": obj.initial.tolist(),
        }
    if isinstance(obj, MoorePA):
        return {
            "schema": SCHEMA_VERSION,
            "kind": "moore_pa",
            "inputs": list(obj.inputs),
            "trans": {x: obj.matrix(x).tolist() for x in obj.inputs},
            "initial": obj.initial.tolist(),
            "lambda": obj.lam.tolist(),
        }
    if isinstance(obj, LinearAutomaton):
        return {
            "schema": SCHEMA_VERSION,
            "kind": "linear_automaton",
            "inputs": list(obj.inputs),
            "trans": {x: obj.matrix(x).tolist() for x in obj.inputs},
            "initial": obj.initial.tolist(),
            "lambda": obj.lam.tolist(),
        }
    if isinstance(obj, MarkovChain):
        return {
            "schema": SCHEMA_VERSION,
            "kind": "markov_chain",
            "signals": list(obj.signals),
            "matrix": obj.matrix.tolist(),
            "labels": list(obj.labels),
            "initial": obj.initial.tolist(),
        }
    if isinstance(obj, Dfa):
        return {
            "schema": SCHEMA_VERSION,
            "kind": "dfa",
            "alphabet": list(obj.alphabet),
            "states": obj.n_states,
            "start": obj.start,
            "trans": {x: list(obj.trans[x]) for x in obj.alphabet},
            "accepting": sorted(obj.accepting),
        }
    if isinstance(obj, StringFunctionTable):
        return {
            "schema": SCHEMA_VERSION,
            "kind": "string_function",
            "alphabet": list(obj.alphabet),
            "depth": obj.depth,
            "table": {word_to_key(u): v for u, v in sorted(obj.values.items())},
        }
    if isinstance(obj, RandomSequence):
        return {
            "schema": SCHEMA_VERSION,
            "kind": "random_sequence",
            "alphabet": list(obj.alphabet),
            "depth": obj.depth,
            "table": {word_to_key(u): v for u, v in sorted(obj.table.items())},
        }
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def from_document(doc: Any, tol: Tolerances | None = None, path: str = "$"):
    if not isinstance(doc, dict):
        raise SchemaError(path, "expected a JSON object")
    version = _require(doc, "schema", path)
    if version != SCHEMA_VERSION:
        raise SchemaError(f"{path}.schema", f"unsupported schema version {version!r}")
    kind = _require(doc, "kind", path)
    if kind not in KINDS:
        raise SchemaError(f"{path}.kind", f"unknown kind {kind!r}")
    try:
        if kind == "general_pa":
            inputs = _symbols(_require(doc, "inputs", path), f"{path}.inputs")
            outputs = _symbols(_require(doc, "outputs", path), f"{path}.outputs")
            raw = _require(doc, "trans", path)
            trans = {}
            for x in inputs:
                for y in outputs:
                    key = f"{x}|{y}"
                    if key not in raw:
                        raise SchemaError(f"{path}.trans.{key}", "missing matrix")
                    trans[(x, y)] = _matrix(raw[key], f"{path}.trans.{key}")
            return GeneralPA(
                inputs, outputs, trans, _vector(_require(doc, "initial", path), f"{path}.initial")
            ).validate(tol)
        if kind in ("moore_pa", "linear_automaton"):
            inputs = _symbols(_require(doc, "inputs", path), f"{path}.inputs")
            raw = _require(doc, "trans", path)
            trans = {}
            for x in inputs:
                if x not in raw:
                    raise SchemaError(f"{path}.trans.{x}", "missing matrix")
                trans[x] = _matrix(raw[x], f"{path}.trans.{x}")
            initial = _vector(_require(doc, "initial", path), f"{path}.initial")
            lam = _vector(_require(doc, "lambda", path), f"{path}.lambda")
            if kind == "moore_pa":
                return MoorePA(inputs, trans, initial, lam).validate(tol)
            return LinearAutomaton(inputs, trans, initial, lam).validate()
        if kind == "markov_chain":
            signals = _symbols(_require(doc, "signals", path), f"{path}.signals")
            return MarkovChain(
                signals,
                _matrix(_require(doc, "matrix", path), f"{path}.matrix"),
                tuple(_require(doc, "labels", path)),
                _vector(_require(doc, "initial", path), f"{path}.initial"),
            ).validate(tol)
        if kind == "dfa":
            alphabet = _symbols(_require(doc, "alphabet", path), f"{path}.alphabet")
            raw = _require(doc, "trans", path)
            trans = {}
            for x in alphabet:
                if x not in raw:
                    raise SchemaError(f"{path}.trans.{x}", "missing transition row")
                trans[x] = tuple(int(q) for q in raw[x])
            return Dfa(
                alphabet=alphabet,
                n_states=int(_require(doc, "states", path)),
                start=int(_require(doc, "start", path)),
                trans=trans,
                accepting=frozenset(int(q) for q in _require(doc, "accepting", path)),
            )
        # table kinds
        alphabet = _symbols(_require(doc, "alphabet", path), f"{path}.alphabet")
        depth = int(_require(doc, "depth", path))
        raw = _require(doc, "table", path)
        if not isinstance(raw, dict):
            raise SchemaError(f"{path}.table", "expected an object")
        table = {}
        for key, value in raw.items():
            word = key_to_word(key)
            if any(s not in alphabet for s in word):
                raise SchemaError(f"{path}.table.{key!r}", "symbol outside the alphabet")
            if len(word) > depth:
                raise SchemaError(f"{path}.table.{key!r}", "word longer than the depth")
            table[word] = float(value)
        if kind == "string_function":
            return StringFunctionTable(alphabet, depth, table)
        return RandomSequence(alphabet, depth, table).validate(tol)
    except SchemaError:
        raise
    except (ValueError, KeyError) as exc:
        raise SchemaError(path, str(exc)) from None


def load(filename: str, tol: Tolerances | None = None):
    with open(filename, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(
                f"{filename}:{exc.lineno}:{exc.colno}", f"malformed JSON: {exc.msg}"
            ) from None
    return from_document(doc, tol, path=f"{filename}:$")


def save(obj, filename: str) -> None:
    with open(filename, "w", encoding="utf-8") as fh:
        json.dump(to_document(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")


def dumps(obj) -> str:
    return json.dumps(to_document(obj), indent=2, sort_keys=True) + "\n"
