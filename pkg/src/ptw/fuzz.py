"""Random program generation and the property suites run by ``ptw fuzz``.

Everything is driven by one ``random.Random(seed)`` so a seed reproduces a
run exactly.  Each suite counts violations per property and keeps the first
few counterexamples for the report.
"""

from __future__ import annotations

import random
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ptw import oracle
from ptw.formula_eval import states_of
from ptw.slp_rules import set_to_formula, slp_formula
from ptw.statespace import StateSet, StateSpace
from ptw.syntax import (
    And, Assign, BinOp, BVar, Cmp, Const, Diverge, Expr, Formula, If, Not, Or,
    Stmt, Var, VarDecl, While, seq, show_stmt,
)
from ptw.transformers import Engine
from ptw.triples import decompose_correctness, decompose_incorrectness

MAX_EXAMPLES = 5


@dataclass
class FuzzConfig:
    seed: int = 0
    count: int = 500
    max_vars: int = 3
    max_domain: int = 5
    max_stmts: int = 12
    max_nesting: int = 2
    sets_per_program: int = 4
    syntactic: bool = True


class Generator:
    def __init__(self, rng: random.Random, cfg: FuzzConfig):
        self.rng = rng
        self.cfg = cfg

    def decls(self) -> list[VarDecl]:
        r = self.rng
        out = []
        for i in range(r.randint(1, self.cfg.max_vars)):
            name = "xyz"[i] if i < 3 else f"v{i}"
            if r.random() < 0.25:
                out.append(VarDecl.boolean(name))
            else:
                lo = r.choice((0, 0, 0, 1, -1))
                out.append(VarDecl.interval(name, lo, lo + r.randint(1, self.cfg.max_domain) - 1))
        return out

    def expr(self, decls: list[VarDecl], depth: int = 0) -> Expr:
        r = self.rng
        ints = [d for d in decls if not d.is_bool]
        if depth >= 2 or r.random() < 0.4:
            if ints and r.random() < 0.7:
                return Var(r.choice(ints).name)
            return Const(r.randint(-1, 3))
        op = r.choice(("+", "+", "-", "*", "%"))
        return BinOp(op, self.expr(decls, depth + 1), self.expr(decls, depth + 1))

    def guard(self, decls: list[VarDecl], depth: int = 0) -> Formula:
        r = self.rng
        if depth < 1 and r.random() < 0.25:
            op = r.choice((And, Or))
            return op(self.guard(decls, depth + 1), self.guard(decls, depth + 1))
        bools = [d for d in decls if d.is_bool]
        if bools and r.random() < 0.4:
            atom: Formula = BVar(r.choice(bools).name)
        else:
            atom = Cmp(r.choice(("==", "!=", "<", "<=", ">", ">=")),
                       self.expr(decls, 1), self.expr(decls, 1))
        return Not(atom) if r.random() < 0.2 else atom

    def assign(self, decls: list[VarDecl]) -> Assign:
        d = self.rng.choice(decls)
        if d.is_bool:
            r = self.rng.random()
            if r < 0.4:
                return Assign(d.name, Const(self.rng.randint(0, 1)))
            if r < 0.7:
                return Assign(d.name, BinOp("-", Const(1), Var(d.name)))
        return Assign(d.name, self.expr(decls))

    def stmt(self, decls: list[VarDecl], budget: list[int], nesting: int) -> Stmt:
        """One statement that consumes at least one unit from ``budget``."""
        r = self.rng
        budget[0] -= 1
        roll = r.random()
        if budget[0] > 0 and roll < 0.22 and nesting < self.cfg.max_nesting:
            return While(self.guard(decls), self.block(decls, budget, nesting + 1))
        if budget[0] > 1 and roll < 0.45:
            guard = self.guard(decls)
            budget[0] -= 1  # keep one unit for the else branch
            then = self.block(decls, budget, nesting)
            budget[0] += 1
            return If(guard, then, self.block(decls, budget, nesting))
        if roll > 0.97:
            return Diverge()
        return self.assign(decls)

    def block(self, decls: list[VarDecl], budget: list[int], nesting: int) -> Stmt:
        """A non-empty statement list; callers guarantee ``budget`` is at least 1."""
        n = self.rng.randint(1, min(3, budget[0]))
        parts = [self.stmt(decls, budget, nesting)]
        while len(parts) < n and budget[0] > 0:
            parts.append(self.stmt(decls, budget, nesting))
        return seq(*parts)

    def program(self, decls: list[VarDecl]) -> Stmt:
        budget = [self.rng.randint(1, self.cfg.max_stmts)]
        parts = [self.stmt(decls, budget, 0)]
        while budget[0] > 0:
            parts.append(self.stmt(decls, budget, 0))
        return seq(*parts)

    def loop(self, decls: list[VarDecl]) -> While:
        budget = [self.rng.randint(1, max(1, self.cfg.max_stmts - 1))]
        guard = self.guard(decls)
        return While(guard, self.block(decls, budget, 1))

    def subset(self, space: StateSpace) -> StateSet:
        r = self.rng
        roll = r.random()
        if roll < 0.05:
            return space.empty()
        if roll < 0.1:
            return space.full()
        density = r.random()
        bits = np.array([r.random() < density for _ in range(space.size)], dtype=bool)
        return StateSet(space, bits)


def count_statements(s: Stmt) -> int:
    if isinstance(s, (Assign, Diverge)):
        return 1
    if isinstance(s, If):
        return 1 + count_statements(s.then) + count_statements(s.orelse)
    if isinstance(s, While):
        return 1 + count_statements(s.body)
    return count_statements(s.first) + count_statements(s.second)


def loop_nesting(s: Stmt) -> int:
    if isinstance(s, While):
        return 1 + loop_nesting(s.body)
    if isinstance(s, If):
        return max(loop_nesting(s.then), loop_nesting(s.orelse))
    if hasattr(s, "first"):
        return max(loop_nesting(s.first), loop_nesting(s.second))
    return 0


def loops_in(s: Stmt) -> list[While]:
    out = []
    if isinstance(s, While):
        out.append(s)
        out.extend(loops_in(s.body))
    elif isinstance(s, If):
        out.extend(loops_in(s.then) + loops_in(s.orelse))
    elif hasattr(s, "first"):
        out.extend(loops_in(s.first) + loops_in(s.second))
    return out


@dataclass
class SuiteResult:
    name: str
    checks: Counter = field(default_factory=Counter)
    violations: Counter = field(default_factory=Counter)
    examples: list[dict] = field(default_factory=list)
    tallies: Counter = field(default_factory=Counter)
    programs: int = 0
    instances: int = 0
    max_iterations_ratio: float = 0.0
    elapsed: float = 0.0

    def record(self, prop: str, ok: bool, detail=None) -> None:
        self.checks[prop] += 1
        if not ok:
            self.violations[prop] += 1
            if len(self.examples) < MAX_EXAMPLES:
                self.examples.append({"property": prop, **(detail or {})})

    @property
    def total_violations(self) -> int:
        return sum(self.violations.values())

    def to_json(self) -> dict:
        return {
            "suite": self.name,
            "programs": self.programs,
            "instances": self.instances,
            "checks": dict(sorted(self.checks.items())),
            "violations": {k: self.violations.get(k, 0) for k in sorted(self.checks)},
            "total_violations": self.total_violations,
            "tallies": dict(sorted(self.tallies.items())),
            "examples": self.examples,
        }


def _trace_checks(res: SuiteResult, engine: Engine, detail: dict) -> None:
    for t in engine.take_traces():
        res.record("fixpoint_converged", t.converged, detail)
        res.record("fixpoint_bound", t.iterations <= engine.space.size + 1, detail)
        if t.mu_below_nu is not None:
            res.record("mu_below_nu", t.mu_below_nu, detail)
        res.max_iterations_ratio = max(res.max_iterations_ratio,
                                       t.iterations / (engine.space.size + 1))


def transformer_suite(cfg: FuzzConfig) -> SuiteResult:
    """Oracle equivalence, engine agreement, dualities, adjunctions, decompositions."""
    rng = random.Random(cfg.seed)
    gen = Generator(rng, cfg)
    res = SuiteResult("transformers")
    start = time.perf_counter()
    for k in range(cfg.count):
        decls = gen.decls()
        space = StateSpace(decls)
        p = gen.program(decls)
        engine = Engine(space, audit=True)
        rel = oracle.relation(p, space)
        res.programs += 1
        for _ in range(cfg.sets_per_program):
            b, c = gen.subset(space), gen.subset(space)
            res.instances += 1
            detail = {"program": k, "source": show_stmt(p),
                      "decls": [d.show() for d in decls]}
            wp, wlp = engine.wp(p, c), engine.wlp(p, c)
            sp, slp = engine.sp(p, b), engine.slp(p, b)
            res.record("oracle_wp", wp == oracle.ref_wp(rel, c), detail)
            res.record("oracle_wlp", wlp == oracle.ref_wlp(rel, c), detail)
            res.record("oracle_sp", sp == oracle.ref_sp(rel, b), detail)
            res.record("oracle_slp", slp == oracle.ref_slp(rel, b), detail)
            res.record("slp_direct_route", engine.slp_direct(p, b) == slp, detail)
            res.record("wlp_dual_route", engine.wlp_dual(p, c) == wlp, detail)
            if cfg.syntactic:
                formula, _ = slp_formula(p, set_to_formula(b), space)
                res.record("syntactic_slp", states_of(formula, space) == slp, detail)
            # dualities
            res.record("dual_slp_sp", slp == ~engine.sp(p, ~b), detail)
            res.record("dual_wlp_wp", wlp == ~engine.wp(p, ~c), detail)
            # adjunctions, plus a tight instance of each so the iff is not vacuous
            res.record("adjoint_sp_wlp", (sp <= c) == (b <= wlp), detail)
            res.record("adjoint_slp_wp", (c <= slp) == (engine.wp(p, c) <= b), detail)
            res.record("adjoint_sp_wlp_tight", b <= engine.wlp(p, sp), detail)
            res.record("adjoint_slp_wp_tight",
                       c <= engine.slp(p, engine.wp(p, c)), detail)
            res.record("wp_below_wlp", wp <= wlp, detail)
            # decompositions
            dc = decompose_correctness(b, p, c, engine)
            res.record("decompose_correctness", dc.sound, detail)
            res.record("total_implies_partial_correctness",
                       (not dc.total.valid) or dc.partial.valid, detail)
            di = decompose_incorrectness(b, p, c, engine)
            res.record("decompose_incorrectness", di.sound, detail)
            res.record("total_implies_partial_incorrectness",
                       (not di.total.valid) or di.partial.valid, detail)
            # monotonicity of the transformers in their argument
            big_c, big_b = c | gen.subset(space), b | gen.subset(space)
            res.record("monotone_wp", wp <= engine.wp(p, big_c), detail)
            res.record("monotone_wlp", wlp <= engine.wlp(p, big_c), detail)
            res.record("monotone_sp", sp <= engine.sp(p, big_b), detail)
            res.record("monotone_slp", slp <= engine.slp(p, big_b), detail)
            _trace_checks(res, engine, detail)
    res.elapsed = time.perf_counter() - start
    return res


def park_suite(cfg: FuzzConfig, loops: int = 100, invariants: int = 20) -> SuiteResult:
    """Park soundness and monotonicity of both characteristic maps."""
    rng = random.Random(cfg.seed + 1)
    gen = Generator(rng, cfg)
    res = SuiteResult("park")
    start = time.perf_counter()
    for k in range(loops):
        decls = gen.decls()
        space = StateSpace(decls)
        loop = gen.loop(decls)
        engine = Engine(space, audit=True)
        res.programs += 1
        detail = {"program": k, "source": show_stmt(loop), "decls": [d.show() for d in decls]}
        for kind in ("wlp", "slp"):
            arg = gen.subset(space)
            phi = engine.wlp_map(loop, arg) if kind == "wlp" else engine.slp_map(loop, arg)
            nu = engine.gfp(kind, loop, phi)
            res.record(f"{kind}_nu_is_fixpoint", phi(nu) == nu, detail)
            candidates = [gen.subset(space) for _ in range(invariants)]
            # small random subsets of nu give premise-passing certificates more often
            candidates += [space.empty(), nu, nu & gen.subset(space)]
            for inv in candidates:
                res.instances += 1
                image = phi(inv)
                premise = inv <= image
                res.tallies[f"{kind}_premise_held"] += int(premise)
                res.record(f"park_{kind}", (not premise) or inv <= nu, detail)
                wider = inv | gen.subset(space)
                res.record(f"monotone_phi_{kind}", image <= phi(wider), detail)
            _trace_checks(res, engine, detail)
    res.elapsed = time.perf_counter() - start
    return res


@dataclass
class FuzzSummary:
    config: FuzzConfig
    suites: list[SuiteResult]
    elapsed: float

    @property
    def total_violations(self) -> int:
        return sum(s.total_violations for s in self.suites)

    def to_json(self, timing: bool = False) -> dict:
        out = {
            "seed": self.config.seed,
            "count": self.config.count,
            "suites": [s.to_json() for s in self.suites],
            "total_violations": self.total_violations,
        }
        if timing:
            out["elapsed_seconds"] = round(self.elapsed, 3)
        return out


def run_fuzz(cfg: Optional[FuzzConfig] = None, park: bool = True) -> FuzzSummary:
    cfg = cfg or FuzzConfig()
    start = time.perf_counter()
    suites = [transformer_suite(cfg)]
    if park:
        suites.append(park_suite(cfg))
    return FuzzSummary(cfg, suites, time.perf_counter() - start)


def render_fuzz_text(summary: FuzzSummary, timing: bool = False) -> str:
    lines = [f"fuzz seed={summary.config.seed} count={summary.config.count}"]
    for s in summary.suites:
        lines.append(f"suite {s.name}: {s.programs} programs, {s.instances} instances")
        for prop in sorted(s.checks):
            bad = s.violations.get(prop, 0)
            lines.append(f"  {prop:40s} {s.checks[prop]:7d} checks  {bad} violations")
        for name, n in sorted(s.tallies.items()):
            lines.append(f"  {name:40s} {n:7d}")
        for ex in s.examples:
            lines.append(f"  counterexample: {ex}")
    lines.append(f"total violations: {summary.total_violations}")
    if timing:
        lines.append(f"time: {summary.elapsed:.2f}s")
    return "\n".join(lines) + "\n"
