"""Moralization, elimination, triangulation, and clique-tree assembly."""

from functools import lru_cache

import numpy as np
import pytest

import bnquery
from bnquery import (
    CompilationError,
    UndirectedGraph,
    compile_network,
    find_cliques,
    min_fill_order,
    moralize,
    triangulate,
)
from corpus import random_network


def graph_of(vertices, edges):
    g = UndirectedGraph(vertices)
    for u, v in edges:
        g.add_edge(u, v)
    return g


# -- moralize -----------------------------------------------------------------


def test_moralize_single_node():
    a = bnquery.Variable("a", ("0", "1"))
    bn = bnquery.BayesianNetwork(
        [a], {"a": ()}, {"a": bnquery.Factor([a], [0.5, 0.5])}
    )
    g = moralize(bn)
    assert g.vertices == ("a",)
    assert g.edges() == set()


def test_moralize_marries_v_structure():
    vs = {n: bnquery.Variable(n, ("0", "1")) for n in "BED"}
    bn = bnquery.BayesianNetwork(
        [vs["B"], vs["E"], vs["D"]],
        {"B": (), "E": (), "D": ("B", "E")},
        {
            "B": bnquery.Factor([vs["B"]], [0.5, 0.5]),
            "E": bnquery.Factor([vs["E"]], [0.5, 0.5]),
            "D": bnquery.Factor(
                [vs["B"], vs["E"], vs["D"]], np.full((2, 2, 2), 0.5)
            ),
        },
    )
    g = moralize(bn)
    assert g.edges() == {
        frozenset(p) for p in (("B", "D"), ("E", "D"), ("B", "E"))
    }


def test_moralize_asia_marries_both_parent_pairs(asia_bn):
    g = moralize(asia_bn)
    assert g.has_edge("T", "L")  # parents of E
    assert g.has_edge("B", "E")  # parents of D


# -- elimination order ----------------------------------------------------------


def test_tree_graph_eliminates_with_zero_fill():
    g = graph_of("abcd", [("a", "b"), ("b", "c"), ("b", "d")])
    order = min_fill_order(g)
    assert sorted(order) == list("abcd")
    _, fill = triangulate(g, order)
    assert fill == ()
    assert min_fill_order(g) == order  # reproducible


def test_four_cycle_needs_one_chord():
    g = graph_of("abcd", [("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")])
    _, fill = triangulate(g, min_fill_order(g))
    assert len(fill) == 1


def exhaustive_min_fill(g):
    """Exact minimum total fill over all elimination orders (memoized)."""
    vertices = tuple(sorted(g.vertices))
    base = frozenset(g.edges())

    @lru_cache(maxsize=None)
    def best(remaining, edges):
        if not remaining:
            return 0
        answer = None
        for v in remaining:
            nbrs = sorted(
                u for u in remaining if u != v and frozenset((u, v)) in edges
            )
            new_edges = set(edges)
            cost = 0
            for i in range(len(nbrs)):
                for j in range(i + 1, len(nbrs)):
                    e = frozenset((nbrs[i], nbrs[j]))
                    if e not in new_edges:
                        new_edges.add(e)
                        cost += 1
            rest = frozenset(x for x in remaining if x != v)
            live = frozenset(e for e in new_edges if e <= rest)
            sub = cost + best(rest, live)
            if answer is None or sub < answer:
                answer = sub
        return answer

    live = frozenset(e for e in base)
    return best(frozenset(vertices), live)


def test_asia_minimum_fill_is_one_and_greedy_achieves_it(asia_bn):
    g = moralize(asia_bn)
    assert exhaustive_min_fill(g) == 1
    _, fill = triangulate(g, min_fill_order(g))
    assert len(fill) == 1
    assert set(fill[0]) in ({"L", "B"}, {"S", "E"})  # the two 4-cycle chords


def test_documented_asia_order_fills_l_b(asia_bn):
    g = moralize(asia_bn)
    filled, fill = triangulate(g, bnquery.ASIA_GOLDEN_ORDER)
    assert fill == (("B", "L"),)
    cliques = find_cliques(filled, bnquery.ASIA_GOLDEN_ORDER)
    assert frozenset("LEB") in cliques


# -- triangulate / find_cliques ---------------------------------------------------


def test_chordal_input_with_perfect_order_adds_nothing():
    g = graph_of("abc", [("a", "b"), ("b", "c"), ("a", "c")])
    _, fill = triangulate(g, ("a", "b", "c"))
    assert fill == ()


def test_retriangulation_is_stable():
    g = graph_of("abcd", [("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")])
    order = min_fill_order(g)
    filled, fill = triangulate(g, order)
    assert len(fill) == 1
    again, fill2 = triangulate(filled, order)
    assert fill2 == ()


def test_triangulate_rejects_partial_order():
    g = graph_of("ab", [("a", "b")])
    with pytest.raises(CompilationError):
        triangulate(g, ("a",))


def test_find_cliques_single_edge_and_triangle():
    g = graph_of("ab", [("a", "b")])
    assert find_cliques(g, ("a", "b")) == (frozenset("ab"),)
    g = graph_of("abc", [("a", "b"), ("b", "c"), ("a", "c")])
    assert find_cliques(g, ("a", "b", "c")) == (frozenset("abc"),)


def test_asia_six_cliques(asia_bn):
    tree = compile_network(asia_bn, bnquery.ASIA_GOLDEN_ORDER)
    got = {c.member_set for c in tree.cliques}
    assert got == {
        frozenset("AT"),
        frozenset("TLE"),
        frozenset("LEB"),
        frozenset("BLS"),
        frozenset("EBD"),
        frozenset("EX"),
    }


# -- order_cliques / tree shape -----------------------------------------------------


def test_single_clique_tree():
    a = bnquery.Variable("a", ("0", "1"))
    b = bnquery.Variable("b", ("0", "1"))
    bn = bnquery.BayesianNetwork(
        [a, b],
        {"a": (), "b": ("a",)},
        {
            "a": bnquery.Factor([a], [0.5, 0.5]),
            "b": bnquery.Factor([a, b], [0.3, 0.7, 0.6, 0.4]),
        },
    )
    tree = compile_network(bn)
    assert len(tree.cliques) == 1
    c = tree.cliques[0]
    assert c.separator == () and set(c.residual) == {"a", "b"}
    assert tree.roots == (0,)


def test_asia_tree_structure(asia_bn):
    tree = compile_network(asia_bn, bnquery.ASIA_GOLDEN_ORDER)
    by_members = {c.member_set: c for c in tree.cliques}
    root = by_members[frozenset("AT")]
    assert root.parent is None and root.id == 0
    assert set(by_members[frozenset("TLE")].separator) == {"T"}
    assert set(by_members[frozenset("LEB")].separator) == {"L", "E"}
    assert set(by_members[frozenset("BLS")].separator) == {"B", "L"}
    assert set(by_members[frozenset("EBD")].separator) == {"E", "B"}
    assert set(by_members[frozenset("EX")].separator) == {"E"}
    # (EX) hangs below (EBD): its request path runs through that clique
    assert by_members[frozenset("EX")].parent == by_members[frozenset("EBD")].id
    assert tree.subtree[by_members[frozenset("EBD")].id] == frozenset("EBDX")


def test_chain_tree_families_and_assignments():
    from bnquery import assign_cpts

    vs = {n: bnquery.Variable(n, ("0", "1")) for n in "abc"}
    bn = bnquery.BayesianNetwork(
        [vs["a"], vs["b"], vs["c"]],
        {"a": (), "b": ("a",), "c": ("b",)},
        {
            "a": bnquery.Factor([vs["a"]], [0.5, 0.5]),
            "b": bnquery.Factor([vs["a"], vs["b"]], [0.3, 0.7, 0.6, 0.4]),
            "c": bnquery.Factor([vs["b"], vs["c"]], [0.2, 0.8, 0.9, 0.1]),
        },
    )
    tree = compile_network(bn)
    assignment = assign_cpts(bn, tree)
    ab = next(c.id for c in tree.cliques if c.member_set == frozenset("ab"))
    bc = next(c.id for c in tree.cliques if c.member_set == frozenset("bc"))
    assert assignment == {"a": ab, "b": ab, "c": bc}


# -- invariants over the random corpus -------------------------------------------


@pytest.mark.parametrize("seed", range(25))
def test_compile_invariants_random(seed):
    rng = np.random.default_rng(1000 + seed)
    bn = random_network(rng, int(rng.integers(3, 11)))
    tree = compile_network(bn)

    covered = set()
    for c in tree.cliques:
        covered |= c.member_set
        assert set(c.separator) | set(c.residual) == c.member_set
        assert not set(c.separator) & set(c.residual)
    assert covered == set(bn.names)

    for name in bn.names:
        family = set(bn.family(name))
        assert any(family <= c.member_set for c in tree.cliques)

    earlier = set()
    for c in tree.cliques:
        assert set(c.separator) == (c.member_set & earlier)
        if c.parent is not None:
            assert set(c.separator) <= tree.cliques[c.parent].member_set
            assert c.parent < c.id
        else:
            assert c.separator == ()
        earlier |= c.member_set

    for root in tree.roots:
        comp = tree.subtree[root]
        for c in tree.cliques:
            if tree.component_root(c.id) == root:
                assert c.member_set <= comp

    # variables partition into residuals
    owners = [n for c in tree.cliques for n in c.residual]
    assert sorted(owners) == sorted(bn.names)

    # determinism
    tree2 = compile_network(bn)
    assert [c.members for c in tree2.cliques] == [c.members for c in tree.cliques]
    assert [c.parent for c in tree2.cliques] == [c.parent for c in tree.cliques]
    assert tree2.fill_edges == tree.fill_edges

    # re-triangulating the filled graph along the same order adds nothing
    moral = moralize(bn)
    filled, _ = triangulate(moral, tree.elimination_order)
    _, fill2 = triangulate(filled, tree.elimination_order)
    assert fill2 == ()


def test_running_intersection_violation_is_reported():
    from bnquery import order_cliques

    # vertex numbering b,c,d,a ranks the sets {c,d}, {a,b}, {a,c}; the last
    # one's separator {a,c} then spans two earlier sets, which no single
    # tree parent can contain
    g = UndirectedGraph("bcda")
    bogus = [frozenset("ab"), frozenset("cd"), frozenset("ac")]
    priority = {n: i for i, n in enumerate("bcda")}
    with pytest.raises(CompilationError, match="running intersection"):
        order_cliques(bogus, g, priority)


def test_disconnected_network_compiles_to_forest():
    vs = {n: bnquery.Variable(n, ("0", "1")) for n in "abcd"}
    bn = bnquery.BayesianNetwork(
        [vs["a"], vs["b"], vs["c"], vs["d"]],
        {"a": (), "b": ("a",), "c": (), "d": ("c",)},
        {
            "a": bnquery.Factor([vs["a"]], [0.5, 0.5]),
            "b": bnquery.Factor([vs["a"], vs["b"]], [0.3, 0.7, 0.6, 0.4]),
            "c": bnquery.Factor([vs["c"]], [0.2, 0.8]),
            "d": bnquery.Factor([vs["c"], vs["d"]], [0.1, 0.9, 0.5, 0.5]),
        },
    )
    tree = compile_network(bn)
    assert len(tree.roots) == 2
    components = {frozenset(tree.subtree[r]) for r in tree.roots}
    assert components == {frozenset("ab"), frozenset("cd")}
