"""Discrete variables and dense factor tables.

A factor stores its table as a float64 ndarray whose shape is the tuple of
scope cardinalities, in C (row-major) order, so the flattened view lists
cells with the *last* scope variable varying fastest.  That layout is the
contract for every flat probability list in this package (CPT blocks in
network files, golden tables in tests).

Factors are immutable: the backing array is marked read-only and every
operation returns a new factor, so factors can be shared freely between
any number of readers.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping, Sequence

import numpy as np

from .errors import BadStateError, IncompatibleVariableError, MissingVariableError


@dataclass(frozen=True)
class Variable:
    """A named discrete variable with an ordered tuple of state labels."""

    name: str
    states: tuple[str, ...]

    def __post_init__(self):
        if not self.name:
            raise ValueError("variable name must be non-empty")
        states = tuple(self.states)
        object.__setattr__(self, "states", states)
        if len(states) < 1:
            raise ValueError(f"variable {self.name!r} needs at least one state")
        if len(set(states)) != len(states):
            raise ValueError(f"variable {self.name!r} has duplicate state labels")

    @property
    def cardinality(self) -> int:
        return len(self.states)

    def state_index(self, label: str) -> int:
        try:
            return self.states.index(label)
        except ValueError:
            raise BadStateError(
                f"{self.name!r} has no state {label!r}; states are {list(self.states)}"
            ) from None


@dataclass
class OpCounters:
    """Tallies of the scalar work done by the three table primitives.

    multiplications and summations count scalar operations (one per product
    cell, one per accumulated addition); substitutions count cells retained
    by a slice.  cache_hits/cache_misses are engine-level lookup tallies.
    """

    multiplications: int = 0
    summations: int = 0
    substitutions: int = 0
    cache_hits: int = 0
    cache_misses: int = 0

    def snapshot(self) -> "OpCounters":
        return replace(self)

    def reset(self) -> None:
        self.multiplications = 0
        self.summations = 0
        self.substitutions = 0
        self.cache_hits = 0
        self.cache_misses = 0


class Factor:
    """A dense nonnegative table over an ordered scope of variables."""

    __slots__ = ("scope", "values")

    scope: tuple[Variable, ...]
    values: np.ndarray

    def __init__(self, scope: Sequence[Variable], values):
        scope = tuple(scope)
        names = [v.name for v in scope]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variables in scope: {names}")
        shape = tuple(v.cardinality for v in scope)
        arr = np.asarray(values, dtype=np.float64)
        if arr.shape != shape:
            expected = int(np.prod(shape, dtype=np.int64)) if shape else 1
            if arr.size != expected:
                raise ValueError(
                    f"need {expected} values for scope {names}, got {arr.size}"
                )
            arr = arr.reshape(shape)
        if not np.all(np.isfinite(arr)):
            raise ValueError("factor values must be finite")
        if arr.size and arr.min() < 0:
            raise ValueError("factor values must be nonnegative")
        arr.setflags(write=False)
        object.__setattr__(self, "scope", scope)
        object.__setattr__(self, "values", arr)

    def __setattr__(self, name, value):
        raise AttributeError("Factor is immutable")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.scope)

    @property
    def size(self) -> int:
        return self.values.size

    @property
    def flat(self) -> np.ndarray:
        """Row-major cell list; the last scope variable varies fastest."""
        return self.values.reshape(-1)

    def variable(self, name: str) -> Variable:
        for v in self.scope:
            if v.name == name:
                return v
        raise MissingVariableError(f"{name!r} not in scope {list(self.names)}")

    def axis(self, name: str) -> int:
        for i, v in enumerate(self.scope):
            if v.name == name:
                return i
        raise MissingVariableError(f"{name!r} not in scope {list(self.names)}")

    def value_at(self, assignment: Mapping[str, int]) -> float:
        """Cell value at a (possibly wider) assignment of state indexes."""
        idx = []
        for v in self.scope:
            if v.name not in assignment:
                raise MissingVariableError(f"assignment does not bind {v.name!r}")
            s = assignment[v.name]
            if not 0 <= s < v.cardinality:
                raise BadStateError(
                    f"state {s} out of range for {v.name!r} (cardinality {v.cardinality})"
                )
            idx.append(s)
        return float(self.values[tuple(idx)])

    def total(self) -> float:
        return float(self.values.sum())

    def __repr__(self):
        dims = ", ".join(f"{v.name}:{v.cardinality}" for v in self.scope)
        return f"Factor({dims or 'scalar'})"


def unit_factor() -> Factor:
    """The empty-scope factor holding 1.0 (the multiplicative identity)."""
    return Factor((), [1.0])


def ones_factor(scope: Sequence[Variable]) -> Factor:
    scope = tuple(scope)
    return Factor(scope, np.ones(tuple(v.cardinality for v in scope)))


def _aligned(values: np.ndarray, names: Sequence[str], target: Sequence[str]) -> np.ndarray:
    """View of `values` broadcastable against an array over `target` scope."""
    pos = {n: i for i, n in enumerate(target)}
    slots = [pos[n] for n in names]
    order = sorted(range(len(slots)), key=slots.__getitem__)
    if order != list(range(len(slots))):
        values = values.transpose(order)
    shape = [1] * len(target)
    for axis, i in enumerate(order):
        shape[slots[i]] = values.shape[axis]
    return values.reshape(shape)


def multiply(f: Factor, g: Factor, counters: OpCounters | None = None) -> Factor:
    """Pointwise product; scope is f's variables then g's new ones.

    Shared variable names must refer to identical variables.
    """
    f_names = set(f.names)
    for v in g.scope:
        if v.name in f_names and f.variable(v.name) != v:
            raise IncompatibleVariableError(
                f"variable {v.name!r} has conflicting definitions"
            )
    extra = tuple(v for v in g.scope if v.name not in f_names)
    scope = f.scope + extra
    names = tuple(v.name for v in scope)
    out = _aligned(f.values, f.names, names) * _aligned(g.values, g.names, names)
    if counters is not None:
        counters.multiplications += out.size
    return Factor(scope, out)


def sum_out(f: Factor, names, counters: OpCounters | None = None) -> Factor:
    """Marginalize the named variables away, preserving remaining order."""
    names = set(names)
    missing = names - set(f.names)
    if missing:
        raise MissingVariableError(
            f"cannot sum out {sorted(missing)}; scope is {list(f.names)}"
        )
    if not names:
        return Factor(f.scope, f.values)
    axes = tuple(i for i, v in enumerate(f.scope) if v.name in names)
    out = f.values.sum(axis=axes)
    if counters is not None:
        counters.summations += f.values.size - out.size
    scope = tuple(v for v in f.scope if v.name not in names)
    return Factor(scope, out)


def substitute(f: Factor, name: str, state: int, counters: OpCounters | None = None) -> Factor:
    """Slice the table at name=state, eliminating that dimension."""
    axis = f.axis(name)
    card = f.scope[axis].cardinality
    if not 0 <= state < card:
        raise BadStateError(
            f"state {state} out of range for {name!r} (cardinality {card})"
        )
    out = np.take(f.values, state, axis=axis)
    if counters is not None:
        counters.substitutions += out.size
    scope = f.scope[:axis] + f.scope[axis + 1:]
    return Factor(scope, out)


def normalize_conditional(f: Factor, targets) -> Factor:
    """Rescale so the cells over `targets` sum to 1 for each context.

    Groups with zero mass are left all-zero (the 0/0 := 0 convention for
    impossible contexts).
    """
    targets = set(targets)
    missing = targets - set(f.names)
    if missing:
        raise MissingVariableError(
            f"cannot normalize over {sorted(missing)}; scope is {list(f.names)}"
        )
    axes = tuple(i for i, v in enumerate(f.scope) if v.name in targets)
    sums = f.values.sum(axis=axes, keepdims=True)
    out = np.divide(
        f.values,
        sums,
        out=np.zeros_like(f.values),
        where=sums != 0,
    )
    return Factor(f.scope, out)


def reorder_scope(f: Factor, names: Sequence[str]) -> Factor:
    """Transpose the table so its scope follows `names` (same variable set)."""
    names = tuple(names)
    if names == f.names:
        return f
    if sorted(names) != sorted(f.names):
        raise MissingVariableError(
            f"cannot reorder {list(f.names)} as {list(names)}"
        )
    current = {n: i for i, n in enumerate(f.names)}
    perm = [current[n] for n in names]
    return Factor(tuple(f.scope[i] for i in perm), f.values.transpose(perm))
