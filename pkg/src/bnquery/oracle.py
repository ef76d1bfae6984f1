"""Brute-force reference: enumerate the full joint, answer by marginalizing.

This path deliberately uses nothing but the factor primitives in a single
multiply-everything-then-marginalize pattern.  No clique tree, no caching,
so its failure modes are independent of the engine it checks.
"""

from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np

from .errors import QueryError, StateSpaceError
from .factors import (
    Factor,
    OpCounters,
    multiply,
    normalize_conditional,
    reorder_scope,
    substitute,
    sum_out,
    unit_factor,
)
from .network import BayesianNetwork

DEFAULT_CELL_CAP = 1 << 22


def enumerate_joint(
    bn: BayesianNetwork,
    counters: OpCounters | None = None,
    cell_cap: int = DEFAULT_CELL_CAP,
) -> Factor:
    """Cell-by-cell product of all CPTs over the full variable scope."""
    cells = bn.state_space_size()
    if cells > cell_cap:
        raise StateSpaceError(
            f"joint table would need {cells} cells (cap is {cell_cap})"
        )
    joint = unit_factor()
    for v in bn.variables:
        joint = multiply(joint, bn.cpt(v.name), counters)
    return joint


def oracle_query(
    joint: Factor,
    targets: Sequence[str],
    given: Sequence[str] = (),
    evidence: Mapping[str, int] | None = None,
) -> Factor:
    """P(targets | given, evidence) by direct marginalization of the joint."""
    targets = tuple(targets)
    given = tuple(given)
    evidence = dict(evidence or {})
    groups = [set(targets), set(given), set(evidence)]
    for i in range(3):
        for j in range(i + 1, 3):
            overlap = groups[i] & groups[j]
            if overlap:
                raise QueryError(
                    f"targets, conditionals and evidence must be disjoint; "
                    f"{sorted(overlap)} repeats"
                )
    f = joint
    for name in sorted(evidence):
        f = substitute(f, name, evidence[name])
    keep = set(targets) | set(given)
    f = sum_out(f, set(f.names) - keep)
    return normalize_conditional(f, targets)


def evidence_probability(joint: Factor, evidence: Mapping[str, int]) -> float:
    """Total mass of the joint sliced at the evidence."""
    f = joint
    for name in sorted(evidence):
        f = substitute(f, name, evidence[name])
    return sum_out(f, set(f.names)).total()


def max_deviation(a: Factor, b: Factor) -> float:
    """Largest absolute cell difference after aligning scopes by name."""
    if sorted(a.names) != sorted(b.names):
        raise QueryError(
            f"cannot compare factors over {sorted(a.names)} and {sorted(b.names)}"
        )
    b = reorder_scope(b, a.names)
    if a.values.shape != b.values.shape:
        raise QueryError("factors disagree on variable cardinalities")
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a.values - b.values)))
