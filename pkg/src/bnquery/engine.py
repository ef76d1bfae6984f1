"""Goal-directed query answering over a preprocessed clique tree.

A query for a set of target variables is routed to the root clique of each
tree component it touches and decomposed recursively: at a clique, targets
inside the residual stay put, targets further down are requested from the
children whose subtrees contain them (children with no targets are never
asked), and the child answers are multiplied with the clique's stored
residual conditional before the unwanted residual variables are summed
away.  Every per-clique answer is cached under (clique, target set), so
repeated and overlapping queries reuse earlier work.

Evidence is incorporated by substitution: observing a variable slices its
dimension out of every stored and cached table that carries it.  The one
clique that owns the variable in its residual is left unnormalized by the
slice, so its residual conditional is renormalized and the extracted
separator likelihood is multiplied up the ancestor chain into the
component root, which therefore accumulates the evidence mass.  With that
done, child answers stay properly normalized, pruning target-free
children remains sound under any evidence placement, and a root's stored
table totals exactly P(evidence) for its component.  Joint queries hence
return unnormalized P(targets, evidence); conditional queries divide it
back out.

An engine instance is strictly single-threaded: queries may not overlap
observe/retract calls, and the caches are plain dicts.  The factor tables
themselves are immutable and may be shared freely.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .cliquetree import CliqueTree, compile_network
from .errors import BadStateError, EvidenceError, QueryError
from .factors import (
    Factor,
    OpCounters,
    multiply,
    normalize_conditional,
    reorder_scope,
    substitute,
    sum_out,
)
from .network import BayesianNetwork
from .preprocess import Preprocessed, preprocess


@dataclass(frozen=True)
class Query:
    """A parsed conditional-probability request."""

    targets: tuple[str, ...]
    given: tuple[str, ...] = ()
    transient_evidence: tuple[tuple[str, int], ...] = ()


@dataclass
class CacheEntry:
    targets: frozenset[str]
    answer: Factor
    evidence_version: int


@dataclass(frozen=True)
class TraceEvent:
    """One clique visit: what arrived, what was forwarded, how it resolved.

    ``resolution`` is "computed", "stored" (answered directly from the
    clique's own conditional), "cache" (per-clique cache hit), or "memo"
    (whole-query hit; clique_id is None).
    """

    clique_id: int | None
    targets: tuple[str, ...]
    separator: tuple[str, ...]
    requests: tuple[tuple[int, tuple[str, ...], tuple[str, ...]], ...]
    resolution: str


class QueryEngine:
    """Evidence-incremental exact inference for one Bayesian network."""

    def __init__(
        self,
        bn: BayesianNetwork,
        *,
        elimination_order: Sequence[str] | None = None,
        cache_enabled: bool = True,
        prune_children: bool = True,
    ):
        self.bn = bn
        self.tree: CliqueTree = compile_network(bn, elimination_order)
        self.prep: Preprocessed = preprocess(bn, self.tree)
        self.cache_enabled = cache_enabled
        self._prune_children = prune_children

        # live tables start as references to the pristine preprocessed ones
        self._conditional: dict[int, Factor] = {
            cid: st.conditional for cid, st in self.prep.states.items()
        }
        self._marginal: dict[int, Factor] = {
            cid: st.marginal for cid, st in self.prep.states.items()
        }

        self._evidence: dict[str, int] = {}
        self._applied_order: list[str] = []
        self.evidence_version = 0

        self._cache: dict[tuple[int, frozenset[str]], CacheEntry] = {}
        self._memo: dict[frozenset[str], Factor] = {}
        self._counters = OpCounters()

    # -- introspection ------------------------------------------------------

    @property
    def evidence(self) -> dict[str, int]:
        return dict(self._evidence)

    def stored_conditional(self, cid: int) -> Factor:
        return self._conditional[cid]

    def stored_marginal(self, cid: int) -> Factor:
        return self._marginal[cid]

    def op_counters(self) -> OpCounters:
        return self._counters.snapshot()

    def reset_counters(self) -> None:
        self._counters.reset()

    def cache_size(self) -> int:
        return len(self._cache)

    # -- queries ------------------------------------------------------------

    def query_joint(
        self, targets: Sequence[str], *, trace: list[TraceEvent] | None = None
    ) -> Factor:
        """Unnormalized P(targets, evidence) over the requested scope order."""
        tg = self._check_targets(targets)
        key = frozenset(tg)
        if self.cache_enabled and key in self._memo:
            self._counters.cache_hits += 1
            if trace is not None:
                trace.append(TraceEvent(None, tg, (), (), "memo"))
            return reorder_scope(self._memo[key], tg)
        if self.cache_enabled:
            self._counters.cache_misses += 1

        parts: list[Factor] = []
        for root in self.tree.roots:
            component = self.tree.subtree[root]
            sub = tuple(t for t in tg if t in component)
            has_evidence = any(v in component for v in self._evidence)
            if sub or has_evidence:
                parts.append(self._resolve(root, sub, trace))
        answer = parts[0]
        for part in parts[1:]:
            answer = multiply(answer, part, self._counters)
        if self.cache_enabled:
            self._memo[key] = answer
        return reorder_scope(answer, tg)

    def query_conditional(
        self,
        targets: Sequence[str],
        given: Sequence[str] = (),
        transient_evidence: Sequence[tuple[str, int]] = (),
        *,
        trace: list[TraceEvent] | None = None,
    ) -> Factor:
        """P(targets | given, evidence), normalized over the targets.

        Transient evidence is asserted before the computation and retracted
        afterwards.  Contexts of the conditioning variables with zero mass
        yield all-zero columns.
        """
        tg = tuple(targets)
        gv = tuple(given)
        overlap = set(tg) & set(gv)
        if overlap:
            raise QueryError(f"targets and conditionals overlap on {sorted(overlap)}")
        bad = (set(tg) | set(gv)) & {name for name, _ in transient_evidence}
        if bad:
            raise QueryError(
                f"transient evidence on {sorted(bad)} conflicts with the query scope"
            )
        applied: list[str] = []
        try:
            for name, state in transient_evidence:
                if name in self._evidence:
                    if self._evidence[name] != state:
                        raise EvidenceError(
                            f"{name!r} is already observed at a different state"
                        )
                    continue
                self.observe(name, state)
                applied.append(name)
            joint = self.query_joint(tg + gv, trace=trace)
            return normalize_conditional(joint, tg)
        finally:
            for name in reversed(applied):
                self.retract(name)

    def query(self, q: Query, *, trace: list[TraceEvent] | None = None) -> Factor:
        return self.query_conditional(
            q.targets, q.given, q.transient_evidence, trace=trace
        )

    def evidence_probability(self) -> float:
        """P(evidence): product of the evidence mass of each touched component."""
        mass = 1.0
        for root in self.tree.roots:
            component = self.tree.subtree[root]
            if any(v in component for v in self._evidence):
                mass *= self._resolve(root, (), None).total()
        return mass

    # -- evidence -----------------------------------------------------------

    def observe(self, name: str, state: int) -> None:
        """Assert name=state and fold it into every stored table.

        Re-observing the same state is a no-op; a different state is an
        error (retract first).
        """
        var = self.bn.var(name)
        if not 0 <= state < var.cardinality:
            raise BadStateError(
                f"state {state} out of range for {name!r} "
                f"(cardinality {var.cardinality})"
            )
        if name in self._evidence:
            if self._evidence[name] == state:
                return
            raise EvidenceError(
                f"{name!r} is already observed at state "
                f"{self._evidence[name]}; retract it before re-observing"
            )
        self._evidence[name] = state
        self._applied_order.append(name)
        self._apply_evidence(name, state)
        self.evidence_version += 1
        self._memo.clear()

    def retract(self, name: str) -> None:
        """Withdraw an observation: restore pristine tables, replay the rest."""
        if name not in self._evidence:
            raise EvidenceError(f"{name!r} is not observed")
        del self._evidence[name]
        self._applied_order.remove(name)
        for cid, st in self.prep.states.items():
            self._conditional[cid] = st.conditional
            self._marginal[cid] = st.marginal
        self._cache.clear()
        self._memo.clear()
        for other in self._applied_order:
            self._apply_evidence(other, self._evidence[other])
        self.evidence_version += 1

    def _apply_evidence(self, name: str, state: int) -> None:
        tree = self.tree
        for cid in tree.containing[name]:
            cond = self._conditional[cid]
            if name in cond.names:
                self._conditional[cid] = substitute(cond, name, state, self._counters)
            marg = self._marginal[cid]
            if name in marg.names:
                self._marginal[cid] = substitute(marg, name, state, self._counters)

        owner = tree.owner[name]
        stale = {owner, *tree.ancestors(owner)}
        for key in list(self._cache):
            cid, tg = key
            entry = self._cache[key]
            if cid in stale or name in tg:
                del self._cache[key]
            elif name in entry.answer.names:
                entry.answer = substitute(entry.answer, name, state, self._counters)

        # The slice leaves the owner's residual conditional carrying the
        # likelihood of the observation; peel it off and push it rootward so
        # every non-root table stays a proper conditional and the component
        # root accumulates the evidence mass.
        cid = owner
        while tree.cliques[cid].parent is not None:
            cond = self._conditional[cid]
            live_residual = [r for r in tree.cliques[cid].residual if r in cond.names]
            likelihood = sum_out(cond, live_residual, self._counters)
            self._conditional[cid] = normalize_conditional(cond, live_residual)
            parent = tree.cliques[cid].parent
            self._conditional[parent] = multiply(
                self._conditional[parent], likelihood, self._counters
            )
            cid = parent

    # -- recursion ----------------------------------------------------------

    def _resolve(
        self, cid: int, targets: tuple[str, ...], trace: list[TraceEvent] | None
    ) -> Factor:
        key = (cid, frozenset(targets))
        clique = self.tree.cliques[cid]
        if self.cache_enabled and key in self._cache:
            self._counters.cache_hits += 1
            if trace is not None:
                trace.append(
                    TraceEvent(cid, targets, clique.separator, (), "cache")
                )
            return self._cache[key].answer
        if self.cache_enabled:
            self._counters.cache_misses += 1

        members = clique.member_set
        residual = set(clique.residual)
        in_separator = [t for t in targets if t in set(clique.separator)]
        if in_separator:
            raise QueryError(
                f"routing bug: targets {in_separator} lie in the separator "
                f"of clique {self.tree.label(cid)}"
            )
        local = [t for t in targets if t in residual]
        remote = tuple(t for t in targets if t not in members)

        requests: list[tuple[int, tuple[str, ...], tuple[str, ...]]] = []
        for ch in self.tree.children[cid]:
            sub = tuple(t for t in remote if t in self.tree.subtree[ch])
            if sub or not self._prune_children:
                requests.append((ch, sub, self.tree.cliques[ch].separator))

        conditional = self._conditional[cid]
        sum_away = [
            r for r in clique.residual if r in conditional.names and r not in local
        ]
        resolution = "stored" if not requests and not sum_away else "computed"
        if trace is not None:
            trace.append(
                TraceEvent(cid, targets, clique.separator, tuple(requests), resolution)
            )

        product = conditional
        for ch, sub, _sep in requests:
            child_answer = self._resolve(ch, sub, trace)
            product = multiply(product, child_answer, self._counters)
        answer = sum_out(product, sum_away, self._counters) if sum_away else product

        if self.cache_enabled:
            self._cache[key] = CacheEntry(
                targets=frozenset(targets),
                answer=answer,
                evidence_version=self.evidence_version,
            )
        return answer

    # -- validation ---------------------------------------------------------

    def _check_targets(self, targets: Sequence[str]) -> tuple[str, ...]:
        tg = tuple(targets)
        if not tg:
            raise QueryError("a query needs at least one target variable")
        if len(set(tg)) != len(tg):
            raise QueryError(f"duplicate target in {list(tg)}")
        for name in tg:
            self.bn.var(name)  # raises MissingVariableError
            if name in self._evidence:
                raise QueryError(
                    f"{name!r} is observed; retract it to query its distribution"
                )
        return tg
