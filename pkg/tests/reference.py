"""Independent reference arithmetic for checking the factor primitives.

Everything here works on plain dicts keyed by full assignments, looked up
cell by cell, so it shares no indexing or broadcasting machinery with the
array implementation it is used to check.
"""

from itertools import product


def assignments(scope):
    """All full assignments of a scope, row-major (last variable fastest)."""
    names = [v.name for v in scope]
    for combo in product(*(range(v.cardinality) for v in scope)):
        yield dict(zip(names, combo))


def table_of(factor):
    """factor -> {tuple(sorted (name, state)): value} via per-cell lookup."""
    out = {}
    for a in assignments(factor.scope):
        out[tuple(sorted(a.items()))] = factor.value_at(a)
    return out


def ref_multiply(f, g):
    """Expected product table over the union scope, one scalar op per cell."""
    seen = {v.name: v for v in f.scope}
    scope = list(f.scope) + [v for v in g.scope if v.name not in seen]
    out = {}
    for a in assignments(scope):
        out[tuple(sorted(a.items()))] = f.value_at(a) * g.value_at(a)
    return scope, out


def ref_sum_out(f, names):
    names = set(names)
    scope = [v for v in f.scope if v.name not in names]
    dropped = [v for v in f.scope if v.name in names]
    out = {}
    for keep in assignments(scope):
        total = 0.0
        for extra in assignments(dropped):
            total += f.value_at({**keep, **extra})
        out[tuple(sorted(keep.items()))] = total
    return scope, out


def ref_substitute(f, name, state):
    scope = [v for v in f.scope if v.name != name]
    out = {}
    for a in assignments(scope):
        out[tuple(sorted(a.items()))] = f.value_at({**a, name: state})
    return scope, out


def ref_normalize(f, targets):
    targets = set(targets)
    context = [v for v in f.scope if v.name not in targets]
    group_vars = [v for v in f.scope if v.name in targets]
    out = {}
    for ctx in assignments(context):
        mass = 0.0
        for t in assignments(group_vars):
            mass += f.value_at({**ctx, **t})
        for t in assignments(group_vars):
            cell = {**ctx, **t}
            value = f.value_at(cell)
            out[tuple(sorted(cell.items()))] = value / mass if mass else 0.0
    return list(f.scope), out


def factor_matches(factor, scope, table, tol=0.0):
    """Compare a Factor cell-by-cell against a reference table."""
    assert sorted(v.name for v in factor.scope) == sorted(v.name for v in scope)
    for a in assignments(scope):
        expected = table[tuple(sorted(a.items()))]
        got = factor.value_at(a)
        if abs(got - expected) > tol:
            return False, a, expected, got
    return True, None, None, None
