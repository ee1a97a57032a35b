"""Forward annotations at every program point, in source order.

For ``slp`` each point carries the semantic set and, when a rule engine is
supplied, the syntactic formula the slp rules produce at that point.  ``sp``
annotations are semantic only and are rendered from the set.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ptw.formula_eval import states_of
from ptw.slp_rules import SlpRules, describe_set, simplify
from ptw.statespace import StateSet
from ptw.syntax import (
    And, Assign, Diverge, Formula, If, Not, Or, Seq, Stmt, While, show_expr,
    show_formula,
)
from ptw.transformers import Engine


@dataclass
class Annotation:
    point: str
    states: StateSet
    formula: Optional[Formula] = None

    @property
    def rendered(self) -> str:
        if self.formula is not None:
            return show_formula(self.formula)
        return describe_set(self.states)


class _Annotator:
    def __init__(self, engine: Engine, mode: str, rules: Optional[SlpRules]):
        if mode not in ("sp", "slp"):
            raise ValueError(f"forward annotations need sp or slp, got {mode!r}")
        self.engine = engine
        self.space = engine.space
        self.mode = mode
        self.rules = rules if mode == "slp" else None
        self.annotations: list[Annotation] = []
        self.lines: list[str] = []

    def note(self, point: str, s: StateSet, f: Optional[Formula], indent: int) -> None:
        a = Annotation(point, s, f)
        self.annotations.append(a)
        self.lines.append("  " * indent + "{ " + a.rendered + " }")

    def _set(self, bits) -> StateSet:
        return StateSet(self.space, bits)

    def walk(self, s: Stmt, b: StateSet, f: Optional[Formula], indent: int, path: str):
        pad = "  " * indent
        e = self.engine
        if isinstance(s, (Assign, Diverge)):
            self.lines.append(pad + (f"{s.var} := {show_expr(s.expr)}"
                                     if isinstance(s, Assign) else "diverge"))
            post = e.apply(self.mode, s, b)
            return post, (self.rules.slp(s, f) if self.rules else None)
        if isinstance(s, Seq):
            mid, mf = self.walk(s.first, b, f, indent, path + "1.")
            self.lines[self._last_stmt_line()] += ";"
            self.note(path + "1.exit", mid, mf, indent)
            return self.walk(s.second, mid, mf, indent, path + "2.")
        g = self._set(e.guard(s.guard))
        if isinstance(s, If):
            self.lines.append(f"{pad}if ({show_formula(s.guard)}) {{")
            if self.mode == "slp":
                tb, eb = ~g | b, g | b
                tf = self._simp(Or(Not(s.guard), f)) if self.rules else None
                ef = self._simp(Or(s.guard, f)) if self.rules else None
            else:
                tb, eb, tf, ef = b & g, b & ~g, None, None
            self.note(path + "then.entry", tb, tf, indent + 1)
            tp, tpf = self.walk(s.then, tb, tf, indent + 1, path + "then.")
            self.note(path + "then.exit", tp, tpf, indent + 1)
            self.lines.append(pad + "} else {")
            self.note(path + "else.entry", eb, ef, indent + 1)
            ep, epf = self.walk(s.orelse, eb, ef, indent + 1, path + "else.")
            self.note(path + "else.exit", ep, epf, indent + 1)
            self.lines.append(pad + "}")
            if self.mode == "slp":
                pf = self._simp(And(tpf, epf)) if self.rules else None
                return tp & ep, pf
            return tp | ep, None
        if isinstance(s, While):
            self.lines.append(f"{pad}while ({show_formula(s.guard)}) {{")
            if self.mode == "slp":
                inv = e.gfp("slp", s, e.slp_map(s, b))
                entry = ~g | inv
                yf = self.rules.loop_invariant(s, f) if self.rules else None
                entry_f = self._simp(Or(Not(s.guard), yf)) if self.rules else None
            else:
                head = e.lfp("sp", s, lambda y: b | e.sp(s.body, y & g))
                entry, entry_f = head & g, None
            self.note(path + "body.entry", entry, entry_f, indent + 1)
            ex, exf = self.walk(s.body, entry, entry_f, indent + 1, path + "body.")
            self.note(path + "body.exit", ex, exf, indent + 1)
            self.lines.append(pad + "}")
            if self.mode == "slp":
                return g | inv, (self._simp(Or(s.guard, yf)) if self.rules else None)
            return ~g & head, None
        raise TypeError(f"not a statement: {s!r}")

    def _simp(self, f: Formula) -> Formula:
        return simplify(f, self.space)

    def _last_stmt_line(self) -> int:
        for i in range(len(self.lines) - 1, -1, -1):
            if not self.lines[i].lstrip().startswith("{ "):
                return i
        raise AssertionError("no statement line")


def annotate(p: Stmt, b: StateSet, mode: str = "slp", pre: Optional[Formula] = None,
             engine: Optional[Engine] = None, syntactic: bool = True
             ) -> tuple[list[Annotation], list[str]]:
    """Annotations ``[pre, ..., post]`` and the interleaved listing.

    ``pre`` is the formula behind ``b``; without it (or with
    ``syntactic=False``) only semantic sets are produced.
    """
    engine = engine or Engine(b.space)
    rules = SlpRules(b.space) if (syntactic and pre is not None and mode == "slp") else None
    a = _Annotator(engine, mode, rules)
    a.note("pre", b, pre if rules else None, 0)
    post, pf = a.walk(p, b, pre if rules else None, 0, "")
    a.note("post", post, pf, 0)
    return a.annotations, a.lines


def annotation_agreement(annotations: list[Annotation]) -> bool:
    """Every syntactic formula has the same extension as its semantic set."""
    for a in annotations:
        if a.formula is not None:
            if not np.array_equal(states_of(a.formula, a.states.space).bits, a.states.bits):
                return False
    return True
