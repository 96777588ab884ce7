#!/usr/bin/env python3
"""Walk through the ternary-fraction automaton end to end.

Builds the two-state automaton whose averaged reaction reads its input as a
base-3 fraction, scans the cut point 1/2 for isolation, extracts the regular
language and prints its DOT graph.
"""
import numpy as np

from probautomata import (
    MoorePA,
    avg_reaction,
    dfa_to_dot,
    enumerate_members,
    ergodic_test,
    extract_dfa,
    extraction_state_bound,
    isolation_scan,
    stability_check,
)

cantor = MoorePA(
    inputs=("0", "2"),
    trans={
        "0": np.array([[1.0, 0.0], [2.0 / 3.0, 1.0 / 3.0]]),
        "2": np.array([[1.0 / 3.0, 2.0 / 3.0], [0.0, 1.0]]),
    },
    initial=np.array([1.0, 0.0]),
    lam=np.array([0.0, 1.0]),
).validate()

print("reactions (input read as a reversed ternary fraction):")
for text in ["2", "20", "02", "2202"]:
    u = tuple(text)
    print(f"  f({text:>6}) = {avg_reaction(cantor, u):.12g}")

report = isolation_scan(cantor, 0.5, 1.0 / 6.0, max_len=8)
print(f"\nisolation at 1/2 with delta 1/6: {report.status} up to length {report.max_len}")

members = enumerate_members(cantor, 0.5, 3)
print("members up to length 3:", ["".join(u) for u in members])

raw = extract_dfa(cantor, 0.5, 1.0 / 6.0, minimize=False)
minimized = extract_dfa(cantor, 0.5, 1.0 / 6.0)
bound = extraction_state_bound(cantor.n_states, 1.0 / 6.0)
print(f"\nextracted DFA: raw {raw.n_states} states, minimized {minimized.n_states},"
      f" covering bound {bound:.0f}")
print(dfa_to_dot(minimized))

ok, witness = ergodic_test(cantor)
print(f"ergodic: {ok} (witness: {witness})")
print(f"stability: {stability_check(cantor).status}")
