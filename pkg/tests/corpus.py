"""Seeded random networks and queries for the property-test corpus."""

import string

import numpy as np

from bnquery import BayesianNetwork, Factor, Variable


def random_network(rng, n_vars, max_parents=3, deterministic_share=0.1):
    """A random DAG over binary variables with random (renormalized) CPTs.

    About ``deterministic_share`` of the rows are 0/1 point masses so the
    zero-handling paths get exercised.
    """
    names = list(string.ascii_uppercase[:n_vars])
    order = list(names)
    rng.shuffle(order)
    variables = [Variable(n, ("0", "1")) for n in names]
    by_name = {v.name: v for v in variables}

    parents = {}
    for i, name in enumerate(order):
        earlier = order[:i]
        k = min(len(earlier), int(rng.integers(0, max_parents + 1)))
        chosen = sorted(rng.choice(earlier, size=k, replace=False)) if k else []
        parents[name] = tuple(chosen)

    cpts = {}
    for name in names:
        scope = tuple(by_name[p] for p in parents[name]) + (by_name[name],)
        rows = 1
        for p in parents[name]:
            rows *= 2
        table = np.empty((rows, 2))
        for r in range(rows):
            if rng.random() < deterministic_share:
                hot = int(rng.integers(0, 2))
                table[r] = [0.0, 0.0]
                table[r, hot] = 1.0
            else:
                row = rng.random(2) + 1e-3
                table[r] = row / row.sum()
        cpts[name] = Factor(scope, table.reshape([2] * len(scope)))
    return BayesianNetwork(variables, parents, cpts)


def chain_network(n_vars, seed=7):
    """N00 -> N01 -> ... -> N{n-1}, binary, random smooth CPTs."""
    rng = np.random.default_rng(seed)
    names = [f"N{i:02d}" for i in range(n_vars)]
    variables = [Variable(n, ("0", "1")) for n in names]
    parents = {names[0]: ()}
    for prev, cur in zip(names, names[1:]):
        parents[cur] = (prev,)
    cpts = {}
    first = rng.random(2) + 0.1
    cpts[names[0]] = Factor([variables[0]], first / first.sum())
    for i in range(1, n_vars):
        rows = rng.random((2, 2)) + 0.1
        rows /= rows.sum(axis=1, keepdims=True)
        cpts[names[i]] = Factor([variables[i - 1], variables[i]], rows)
    return BayesianNetwork(variables, parents, cpts)


def random_query(rng, bn, observed=()):
    """Random disjoint (targets, given, evidence) pulled from the network."""
    free = [n for n in bn.names if n not in observed]
    rng.shuffle(free)
    n_targets = int(rng.integers(1, min(3, len(free)) + 1))
    targets = free[:n_targets]
    rest = free[n_targets:]
    n_given = int(rng.integers(0, min(2, len(rest)) + 1))
    given = rest[:n_given]
    rest = rest[n_given:]
    n_evidence = int(rng.integers(0, min(2, len(rest)) + 1))
    evidence = {name: int(rng.integers(0, 2)) for name in rest[:n_evidence]}
    return tuple(targets), tuple(given), evidence
