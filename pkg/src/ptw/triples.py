"""Validity of correctness and incorrectness triples.

    total correctness        pre  <= wp(p, post)
    partial correctness      pre  <= wlp(p, post)
    total incorrectness      post <= sp(p, pre)
    partial incorrectness    post <= slp(p, pre)

Invalid verdicts carry the lowest-index state of ``lhs - rhs`` as witness.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ptw.formula_eval import states_of
from ptw.statespace import StateSet, StateSpace
from ptw.syntax import Notion, Stmt, Triple
from ptw.transformers import Engine, FixpointTrace


@dataclass
class Verdict:
    notion: Notion
    valid: bool
    witness: Optional[dict[str, int]]
    lhs_size: int
    rhs_size: int
    triple: Optional[Triple] = None
    traces: list[FixpointTrace] = field(default_factory=list)
    witness_index: Optional[int] = None

    def __bool__(self):
        return self.valid


def subset_verdict(notion: Notion, lhs: StateSet, rhs: StateSet,
                   triple: Optional[Triple] = None,
                   traces: Optional[list[FixpointTrace]] = None) -> Verdict:
    diff = lhs - rhs
    idx = diff.min_index()
    witness = None if idx is None else lhs.space.state(idx)
    return Verdict(notion, idx is None, witness, len(lhs), len(rhs), triple,
                   list(traces or []), idx)


def check_sets(notion: Notion, b: StateSet, p: Stmt, c: StateSet,
               engine: Optional[Engine] = None) -> Verdict:
    engine = engine or Engine(b.space)
    start = len(engine.traces)
    if notion.is_correctness:
        lhs, rhs = b, engine.apply(notion.transformer, p, c)
    else:
        lhs, rhs = c, engine.apply(notion.transformer, p, b)
    return subset_verdict(notion, lhs, rhs, traces=engine.traces[start:])


def check(t: Triple, space: StateSpace, engine: Optional[Engine] = None) -> Verdict:
    b = states_of(t.pre, space)
    c = states_of(t.post, space)
    v = check_sets(t.notion, b, t.program, c, engine)
    v.triple = t
    return v


@dataclass
class Decomposition:
    """Total = partial + (termination | reachability), checked rather than assumed."""
    kind: str  # correctness | incorrectness
    partial: Verdict
    side: Verdict  # termination (correctness) or reachability (incorrectness)
    total: Verdict
    implied_total: bool
    direct_total: bool

    @property
    def sound(self) -> bool:
        return (not self.implied_total) or self.direct_total

    @property
    def side_name(self) -> str:
        return "termination" if self.kind == "correctness" else "reachability"


def decompose_correctness(b: StateSet, p: Stmt, c: StateSet,
                          engine: Optional[Engine] = None) -> Decomposition:
    engine = engine or Engine(b.space)
    full = b.space.full()
    partial = subset_verdict(Notion.PARTIAL_CORRECTNESS, b, engine.wlp(p, c))
    term = subset_verdict(Notion.TOTAL_CORRECTNESS, b, engine.wp(p, full))
    total = subset_verdict(Notion.TOTAL_CORRECTNESS, b, engine.wp(p, c))
    return Decomposition("correctness", partial, term, total,
                         partial.valid and term.valid, total.valid)


def decompose_incorrectness(b: StateSet, p: Stmt, c: StateSet,
                            engine: Optional[Engine] = None) -> Decomposition:
    engine = engine or Engine(b.space)
    full = b.space.full()
    partial = subset_verdict(Notion.PARTIAL_INCORRECTNESS, c, engine.slp(p, b))
    reach = subset_verdict(Notion.TOTAL_INCORRECTNESS, c, engine.sp(p, full))
    total = subset_verdict(Notion.TOTAL_INCORRECTNESS, c, engine.sp(p, b))
    return Decomposition("incorrectness", partial, reach, total,
                         partial.valid and reach.valid, total.valid)
