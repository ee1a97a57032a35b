"""Finite state spaces and the powerset lattice over them.

States are enumerated row-major over the declaration order (the last
declared variable varies fastest).  A :class:`StateSet` is a read-only
boolean vector indexed by that enumeration.
"""

from __future__ import annotations

from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence, Union

import numpy as np

from ptw.errors import SpaceMismatch, StateSpaceTooLarge
from ptw.syntax import BinOp, Const, Expr, Neg, Var, VarDecl

DEFAULT_MAX_STATES = 1 << 20

Value = Union[int, np.ndarray]


class StateSpace:
    def __init__(self, decls: Sequence[VarDecl], max_states: int = DEFAULT_MAX_STATES):
        self.decls = tuple(decls)
        names = [d.name for d in self.decls]
        if len(set(names)) != len(names):
            raise ValueError("duplicate variable names")
        size = 1
        for d in self.decls:
            size *= d.size
            if size > max_states:
                raise StateSpaceTooLarge(
                    f"state space exceeds --max-states={max_states}")
        self.size = size
        self.names = tuple(names)
        self.by_name = {d.name: d for d in self.decls}
        strides = []
        acc = 1
        for d in reversed(self.decls):
            strides.append(acc)
            acc *= d.size
        self.strides = tuple(reversed(strides))

    def __eq__(self, other):
        return isinstance(other, StateSpace) and self.decls == other.decls

    def __hash__(self):
        return hash(self.decls)

    def __repr__(self):
        return f"StateSpace({', '.join(d.show() for d in self.decls)} size={self.size})"

    @cached_property
    def columns(self) -> dict[str, np.ndarray]:
        """Value of each variable at every state index."""
        idx = np.arange(self.size, dtype=np.int64)
        out = {}
        for d, stride in zip(self.decls, self.strides):
            col = (idx // stride) % d.size + d.lo
            col.setflags(write=False)
            out[d.name] = col
        return out

    def encode(self, state: Union[Mapping[str, int], Sequence[int]]) -> int:
        if isinstance(state, Mapping):
            state = [state[n] for n in self.names]
        index = 0
        for d, stride, v in zip(self.decls, self.strides, state):
            if not d.lo <= v <= d.hi:
                raise ValueError(f"{d.name}={v} outside [{d.lo}..{d.hi}]")
            index += (v - d.lo) * stride
        return index

    def encode_columns(self, cols: Mapping[str, np.ndarray]) -> np.ndarray:
        """Vectorised :meth:`encode` for in-domain value columns."""
        index = np.zeros(self.size, dtype=np.int64)
        for d, stride in zip(self.decls, self.strides):
            index += (cols[d.name] - d.lo) * stride
        return index

    def decode(self, index: int) -> tuple[int, ...]:
        if not 0 <= index < self.size:
            raise IndexError(index)
        return tuple((index // stride) % d.size + d.lo
                     for d, stride in zip(self.decls, self.strides))

    def state(self, index: int) -> dict[str, int]:
        return dict(zip(self.names, self.decode(index)))

    def states(self) -> Iterator[tuple[int, ...]]:
        for i in range(self.size):
            yield self.decode(i)

    # lattice constructors
    def empty(self) -> "StateSet":
        return StateSet(self, np.zeros(self.size, dtype=bool))

    def full(self) -> "StateSet":
        return StateSet(self, np.ones(self.size, dtype=bool))

    def from_indices(self, indices: Iterable[int]) -> "StateSet":
        bits = np.zeros(self.size, dtype=bool)
        bits[list(indices)] = True
        return StateSet(self, bits)

    def from_predicate(self, pred) -> "StateSet":
        return self.from_indices(i for i in range(self.size) if pred(self.state(i)))


def enumerate_space(decls: Sequence[VarDecl], max_states: int = DEFAULT_MAX_STATES) -> StateSpace:
    return StateSpace(decls, max_states)


class StateSet:
    __slots__ = ("space", "bits")

    def __init__(self, space: StateSpace, bits: np.ndarray):
        bits = np.asarray(bits, dtype=bool)
        if bits.shape != (space.size,):
            bits = np.broadcast_to(bits, (space.size,)).copy()
        bits.setflags(write=False)
        self.space = space
        self.bits = bits

    def _same(self, other: "StateSet") -> None:
        if not isinstance(other, StateSet):
            raise TypeError(f"expected StateSet, got {type(other).__name__}")
        if other.space is not self.space and other.space != self.space:
            raise SpaceMismatch("state sets over different spaces")

    def union(self, other: "StateSet") -> "StateSet":
        self._same(other)
        return StateSet(self.space, self.bits | other.bits)

    def intersect(self, other: "StateSet") -> "StateSet":
        self._same(other)
        return StateSet(self.space, self.bits & other.bits)

    def difference(self, other: "StateSet") -> "StateSet":
        self._same(other)
        return StateSet(self.space, self.bits & ~other.bits)

    def complement(self) -> "StateSet":
        return StateSet(self.space, ~self.bits)

    def is_subset(self, other: "StateSet") -> bool:
        self._same(other)
        return not np.any(self.bits & ~other.bits)

    def is_equal(self, other: "StateSet") -> bool:
        self._same(other)
        return bool(np.array_equal(self.bits, other.bits))

    __or__ = union
    __and__ = intersect
    __sub__ = difference
    __invert__ = complement
    __le__ = is_subset

    def __ge__(self, other):
        return other.is_subset(self)

    def __eq__(self, other):
        return isinstance(other, StateSet) and self.space == other.space \
            and bool(np.array_equal(self.bits, other.bits))

    def __hash__(self):
        return hash((self.space, self.bits.tobytes()))

    def __len__(self):
        return int(np.count_nonzero(self.bits))

    def __bool__(self):
        return bool(self.bits.any())

    def __contains__(self, index: int) -> bool:
        return bool(self.bits[index])

    def __iter__(self) -> Iterator[int]:
        return iter(np.flatnonzero(self.bits).tolist())

    def __repr__(self):
        return f"StateSet({len(self)}/{self.space.size})"

    def min_index(self) -> int | None:
        nz = np.flatnonzero(self.bits)
        return int(nz[0]) if nz.size else None

    def is_full(self) -> bool:
        return bool(self.bits.all())


# -- expression evaluation -------------------------------------------------

def floor_mod(a: Value, b: Value) -> Value:
    """``a mod b`` with the sign of ``b``; ``a mod 0`` is ``a``."""
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        b_arr = np.asarray(b)
        safe = np.where(b_arr == 0, 1, b_arr)
        return np.where(b_arr == 0, a, np.mod(a, safe))
    return a if b == 0 else a % b


def eval_expr(e: Expr, env: Mapping[str, Value]) -> Value:
    """Evaluate over unbounded integers.

    ``env`` maps names to ints (a single state) or to aligned numpy columns
    (every state at once); the result has the matching shape.
    """
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        return env[e.name]
    if isinstance(e, Neg):
        return -eval_expr(e.operand, env)
    a = eval_expr(e.left, env)
    b = eval_expr(e.right, env)
    if e.op == "+":
        return a + b
    if e.op == "-":
        return a - b
    if e.op == "*":
        return a * b
    return floor_mod(a, b)


def wrap(value: Value, decl: VarDecl) -> Value:
    """Fold ``value`` into ``decl``'s domain modulo its size."""
    return decl.lo + (value - decl.lo) % decl.size
