"""Compositional wp / wlp / sp / slp over state sets.

Loops are solved by plain Kleene iteration: least fixed points from the
empty set, greatest from the full space.  Every iteration is recorded as a
:class:`FixpointTrace`.

slp has two routes that must agree: the De Morgan dual of sp (the default)
and the direct liberal recursion (:meth:`Engine.slp_direct`).  Likewise wlp
is computed by its own greatest-fixpoint recursion and can be compared with
the complement of wp on the complemented post.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ptw.errors import SpaceMismatch
from ptw.formula_eval import truth
from ptw.statespace import StateSet, StateSpace, eval_expr, wrap
from ptw.syntax import (
    Assign, Diverge, Formula, If, Seq, Skip, Stmt, While, show_formula,
)

Bits = np.ndarray


@dataclass
class FixpointTrace:
    kind: str  # transformer whose loop rule is being solved
    loop: str
    extreme: str  # "lfp" | "gfp"
    iterations: int = 0
    sizes: list[int] = field(default_factory=list)
    converged: bool = False
    limit: int = 0
    # set when the engine audits: does the least fixed point of the same map lie below the greatest?
    mu_below_nu: Optional[bool] = None

    def to_json(self) -> dict:
        out = {"kind": self.kind, "loop": self.loop, "extreme": self.extreme,
               "iterations": self.iterations, "sizes": self.sizes,
               "converged": self.converged}
        if self.mu_below_nu is not None:
            out["mu_below_nu"] = self.mu_below_nu
        return out


def kleene(phi: Callable[[Bits], Bits], start: Bits, limit: int) -> tuple[Bits, int, list[int], bool]:
    """Iterate ``phi`` from ``start`` until it stabilises or ``limit`` applications."""
    x = start
    sizes = [int(np.count_nonzero(x))]
    for k in range(1, limit + 1):
        nx = phi(x)
        sizes.append(int(np.count_nonzero(nx)))
        if np.array_equal(nx, x):
            return x, k, sizes, True
        x = nx
    return x, limit, sizes, False


class Engine:
    """One engine per state space; it caches assignment successor maps and guard sets."""

    def __init__(self, space: StateSpace, audit: bool = False):
        self.space = space
        self.audit = audit
        self.traces: list[FixpointTrace] = []
        self._succ: dict[int, tuple[Assign, np.ndarray]] = {}
        self._guards: dict[int, tuple[Formula, np.ndarray]] = {}
        self._zeros = np.zeros(space.size, dtype=bool)
        self._ones = np.ones(space.size, dtype=bool)

    # -- cached building blocks
    def successor(self, s: Assign) -> np.ndarray:
        hit = self._succ.get(id(s))
        if hit is not None:
            return hit[1]
        cols = self.space.columns
        decl = self.space.by_name[s.var]
        value = np.broadcast_to(eval_expr(s.expr, cols), (self.space.size,))
        new_cols = dict(cols)
        new_cols[s.var] = wrap(value.astype(np.int64), decl)
        succ = self.space.encode_columns(new_cols)
        self._succ[id(s)] = (s, succ)
        return succ

    def guard(self, g: Formula) -> Bits:
        hit = self._guards.get(id(g))
        if hit is not None:
            return hit[1]
        bits = np.broadcast_to(np.asarray(truth(g, self.space.columns), dtype=bool),
                               (self.space.size,)).copy()
        self._guards[id(g)] = (g, bits)
        return bits

    def _fix(self, kind: str, loop: While, phi, least: bool) -> Bits:
        limit = self.space.size + 1
        start = self._zeros if least else self._ones
        x, n, sizes, ok = kleene(phi, start, limit)
        tr = FixpointTrace(kind, f"while ({show_formula(loop.guard)})",
                           "lfp" if least else "gfp", n, sizes, ok, limit)
        if self.audit:
            other, *_ = kleene(phi, self._ones if least else self._zeros, limit)
            mu, nu = (x, other) if least else (other, x)
            tr.mu_below_nu = not np.any(mu & ~nu)
        self.traces.append(tr)
        return x

    # -- backward transformers
    def _wp(self, s: Stmt, c: Bits) -> Bits:
        if isinstance(s, Diverge):
            return self._zeros
        if isinstance(s, Assign):
            return c[self.successor(s)]
        if isinstance(s, Seq):
            return self._wp(s.first, self._wp(s.second, c))
        if isinstance(s, If):
            g = self.guard(s.guard)
            return (g & self._wp(s.then, c)) | (~g & self._wp(s.orelse, c))
        if isinstance(s, While):
            g = self.guard(s.guard)
            return self._fix("wp", s, lambda x: (~g & c) | (g & self._wp(s.body, x)), True)
        raise _bad(s)

    def _wlp(self, s: Stmt, c: Bits) -> Bits:
        if isinstance(s, Diverge):
            return self._ones
        if isinstance(s, Assign):
            return c[self.successor(s)]
        if isinstance(s, Seq):
            return self._wlp(s.first, self._wlp(s.second, c))
        if isinstance(s, If):
            g = self.guard(s.guard)
            return (g & self._wlp(s.then, c)) | (~g & self._wlp(s.orelse, c))
        if isinstance(s, While):
            g = self.guard(s.guard)
            return self._fix("wlp", s, lambda x: (~g & c) | (g & self._wlp(s.body, x)), False)
        raise _bad(s)

    # -- forward transformers
    def _sp(self, s: Stmt, b: Bits) -> Bits:
        if isinstance(s, Diverge):
            return self._zeros
        if isinstance(s, Assign):
            out = np.zeros(self.space.size, dtype=bool)
            out[self.successor(s)[b]] = True
            return out
        if isinstance(s, Seq):
            return self._sp(s.second, self._sp(s.first, b))
        if isinstance(s, If):
            g = self.guard(s.guard)
            return self._sp(s.then, b & g) | self._sp(s.orelse, b & ~g)
        if isinstance(s, While):
            g = self.guard(s.guard)
            head = self._fix("sp", s, lambda y: b | self._sp(s.body, y & g), True)
            return ~g & head
        raise _bad(s)

    def _slp_direct(self, s: Stmt, b: Bits) -> Bits:
        if isinstance(s, Diverge):
            return self._ones
        if isinstance(s, Assign):
            out = np.ones(self.space.size, dtype=bool)
            out[self.successor(s)[~b]] = False
            return out
        if isinstance(s, Seq):
            return self._slp_direct(s.second, self._slp_direct(s.first, b))
        if isinstance(s, If):
            g = self.guard(s.guard)
            return self._slp_direct(s.then, ~g | b) & self._slp_direct(s.orelse, g | b)
        if isinstance(s, While):
            g = self.guard(s.guard)
            inner = self._fix("slp", s, lambda y: b & self._slp_direct(s.body, ~g | y), False)
            return g | inner
        raise _bad(s)

    # -- loop characteristic maps, used by the proof-rule checker
    def wlp_map(self, loop: While, c: StateSet) -> Callable[[StateSet], StateSet]:
        g = self.guard(loop.guard)
        return lambda x: StateSet(self.space, (~g & c.bits) | (g & self._wlp(loop.body, x.bits)))

    def slp_map(self, loop: While, b: StateSet) -> Callable[[StateSet], StateSet]:
        g = self.guard(loop.guard)
        return lambda y: StateSet(self.space, b.bits & self._slp_direct(loop.body, ~g | y.bits))

    def gfp(self, kind: str, loop: While, phi: Callable[[StateSet], StateSet]) -> StateSet:
        bits = self._fix(kind, loop, lambda x: phi(StateSet(self.space, x)).bits, False)
        return StateSet(self.space, bits)

    def lfp(self, kind: str, loop: While, phi: Callable[[StateSet], StateSet]) -> StateSet:
        bits = self._fix(kind, loop, lambda x: phi(StateSet(self.space, x)).bits, True)
        return StateSet(self.space, bits)

    # -- public API on StateSets
    def _arg(self, a: StateSet) -> Bits:
        if a.space != self.space:
            raise SpaceMismatch("argument set not over the engine's space")
        return a.bits

    def wp(self, p: Stmt, c: StateSet) -> StateSet:
        return StateSet(self.space, self._wp(p, self._arg(c)))

    def wlp(self, p: Stmt, c: StateSet) -> StateSet:
        return StateSet(self.space, self._wlp(p, self._arg(c)))

    def wlp_dual(self, p: Stmt, c: StateSet) -> StateSet:
        return StateSet(self.space, ~self._wp(p, ~self._arg(c)))

    def sp(self, p: Stmt, b: StateSet) -> StateSet:
        return StateSet(self.space, self._sp(p, self._arg(b)))

    def slp(self, p: Stmt, b: StateSet) -> StateSet:
        return StateSet(self.space, ~self._sp(p, ~self._arg(b)))

    def slp_direct(self, p: Stmt, b: StateSet) -> StateSet:
        return StateSet(self.space, self._slp_direct(p, self._arg(b)))

    def apply(self, transformer: str, p: Stmt, arg: StateSet) -> StateSet:
        return getattr(self, transformer)(p, arg)

    def take_traces(self) -> list[FixpointTrace]:
        out, self.traces = self.traces, []
        return out


def _bad(s: Stmt) -> Exception:
    if isinstance(s, Skip):
        return ValueError("engine expects a desugared program (no 'skip')")
    return TypeError(f"not a statement: {s!r}")


# -- module-level conveniences --------------------------------------------

def wp(p: Stmt, c: StateSet) -> StateSet:
    return Engine(c.space).wp(p, c)


def wlp(p: Stmt, c: StateSet) -> StateSet:
    return Engine(c.space).wlp(p, c)


def sp(p: Stmt, b: StateSet) -> StateSet:
    return Engine(b.space).sp(p, b)


def slp(p: Stmt, b: StateSet) -> StateSet:
    return Engine(b.space).slp(p, b)
