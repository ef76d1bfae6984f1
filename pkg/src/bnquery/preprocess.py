"""Per-clique distributions computed ahead of any query.

Each clique is charged with the CPTs of the variables whose family it is
the lowest-ranked clique to contain.  The collect pass (decreasing rank)
turns each clique's CPT product into the conditional of its residual given
its separator, forwarding the summed-out separator table to the parent;
the distribute pass (increasing rank) then forms every clique's joint
marginal.  All multiplication orders are fixed (CPTs by variable name,
child messages by child rank) so repeated runs are bit-identical.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cliquetree import CliqueTree
from .factors import Factor, multiply, normalize_conditional, ones_factor, sum_out
from .network import BayesianNetwork


@dataclass
class CliqueState:
    """Stored tables for one clique.

    ``conditional`` holds P(residual | separator), ``marginal`` holds the
    clique joint P(members).  ``potential`` is the raw product of assigned
    CPTs, kept for diagnostics and invariant checks.
    """

    clique_id: int
    potential: Factor
    conditional: Factor
    marginal: Factor
    assigned: tuple[str, ...]


@dataclass
class Preprocessed:
    states: dict[int, CliqueState]
    root_mass: dict[int, float]
    assignment: dict[str, int]


def assign_cpts(bn: BayesianNetwork, tree: CliqueTree) -> dict[str, int]:
    """Map each variable's CPT to the lowest-ranked clique holding its family."""
    assignment: dict[str, int] = {}
    for name in bn.names:
        family = set(bn.family(name))
        for c in tree.cliques:
            if family <= c.member_set:
                assignment[name] = c.id
                break
        else:  # compile_network guarantees containment
            raise AssertionError(f"no clique contains the family of {name!r}")
    return assignment


def compute_potentials(
    bn: BayesianNetwork, tree: CliqueTree, assignment: dict[str, int]
) -> dict[int, Factor]:
    """Product of assigned CPTs per clique, extended to the full member scope."""
    potentials: dict[int, Factor] = {}
    for c in tree.cliques:
        pot = ones_factor(tuple(bn.var(n) for n in c.members))
        for name in sorted(n for n, cid in assignment.items() if cid == c.id):
            pot = multiply(pot, bn.cpt(name))
        potentials[c.id] = pot
    return potentials


def collect_conditionals(
    tree: CliqueTree, potentials: dict[int, Factor]
) -> tuple[dict[int, Factor], dict[int, float]]:
    """Decreasing-rank pass producing P(residual | separator) per clique.

    Each clique's potential, with its children's separator messages folded
    in, is normalized over the residual; the message (the pre-normalization
    table summed over the residual) goes to the parent.  A root's message
    has empty scope and becomes that component's normalization mass, which
    is 1 up to rounding for a valid network.
    """
    messages: dict[int, Factor] = {}
    conditionals: dict[int, Factor] = {}
    root_mass: dict[int, float] = {}
    for c in reversed(tree.cliques):
        pot = potentials[c.id]
        for ch in tree.children[c.id]:  # ascending rank
            pot = multiply(pot, messages[ch])
        lam = sum_out(pot, c.residual)
        conditionals[c.id] = normalize_conditional(pot, c.residual)
        if c.parent is None:
            root_mass[c.id] = lam.total()
        else:
            messages[c.id] = lam
    return conditionals, root_mass


def distribute_marginals(
    tree: CliqueTree, conditionals: dict[int, Factor]
) -> dict[int, Factor]:
    """Increasing-rank pass producing each clique's joint P(members)."""
    marginals: dict[int, Factor] = {}
    for c in tree.cliques:
        if c.parent is None:
            marginals[c.id] = conditionals[c.id]
        else:
            parent = tree.cliques[c.parent]
            drop = set(parent.members) - set(c.separator)
            sep_marginal = sum_out(marginals[c.parent], drop)
            marginals[c.id] = multiply(conditionals[c.id], sep_marginal)
    return marginals


def node_marginals(
    bn: BayesianNetwork, tree: CliqueTree, marginals: dict[int, Factor]
) -> dict[str, Factor]:
    """Single-variable marginals, read from the lowest-ranked containing clique."""
    out: dict[str, Factor] = {}
    for name in bn.names:
        cid = tree.containing[name][0]
        members = set(tree.cliques[cid].members)
        out[name] = sum_out(marginals[cid], members - {name})
    return out


def preprocess(bn: BayesianNetwork, tree: CliqueTree) -> Preprocessed:
    assignment = assign_cpts(bn, tree)
    potentials = compute_potentials(bn, tree, assignment)
    conditionals, root_mass = collect_conditionals(tree, potentials)
    marginals = distribute_marginals(tree, conditionals)
    states = {
        c.id: CliqueState(
            clique_id=c.id,
            potential=potentials[c.id],
            conditional=conditionals[c.id],
            marginal=marginals[c.id],
            assigned=tuple(sorted(n for n, cid in assignment.items() if cid == c.id)),
        )
        for c in tree.cliques
    }
    return Preprocessed(states=states, root_mass=root_mass, assignment=assignment)
