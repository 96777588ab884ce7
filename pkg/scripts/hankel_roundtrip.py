#!/usr/bin/env python3
"""Minimal-realization experiment: sample, tabulate, rebuild, compare.

Draws random linear automata, tabulates their reactions, rebuilds a minimal
automaton from the Hankel basis and reports dimensions and reconstruction
error.
"""
import argparse

import numpy as np

from probautomata import e_f_dimension, la_reaction, la_table, realize
from probautomata.linauto import LinearAutomaton


def random_la(rng, dim, alphabet):
    return LinearAutomaton(
        alphabet,
        {x: rng.uniform(-1, 1, (dim, dim)) * (0.9 / dim) for x in alphabet},
        rng.uniform(-1, 1, dim),
        rng.uniform(-1, 1, dim),
    )


def words(alphabet, depth):
    out = [()]
    frontier = [()]
    for _ in range(depth):
        frontier = [u + (x,) for u in frontier for x in alphabet]
        out.extend(frontier)
    return out


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=20)
    parser.add_argument("--dim", type=int, default=4)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    alphabet = ("a", "b")
    print(f"{'trial':>5} {'dim':>4} {'rank':>5} {'rebuilt':>8} {'max err':>12}")
    for trial in range(args.trials):
        dim = int(rng.integers(1, args.dim + 1))
        l = random_la(rng, dim, alphabet)
        table = la_table(l, 2 * dim)
        rank = e_f_dimension(table)
        rebuilt = realize(table, rank_bound=dim)
        err = max(
            abs(la_reaction(rebuilt, u) - table.value(u))
            for u in words(alphabet, 2 * dim)
        )
        print(f"{trial:>5} {dim:>4} {rank:>5} {rebuilt.dim:>8} {err:>12.3e}")


if __name__ == "__main__":
    main()
