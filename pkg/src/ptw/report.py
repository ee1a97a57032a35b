"""Running spec-file directives and rendering the results.

A report is a plain JSON-able dict so that the text and JSON renderings
come from the same data, and so that identical inputs give identical bytes.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from typing import Any, Optional

from ptw import oracle
from ptw.annotate import annotate, annotation_agreement
from ptw.errors import CertificateError
from ptw.formula_eval import states_of
from ptw.parser import (
    CheckDirective, DecomposeDirective, ParkDirective, QueryDirective,
    SpecFile, VariantDirective,
)
from ptw.proofs import (
    VariantCertificate, backward_variant_check, park_check_sets, variant_check,
)
from ptw.slp_rules import describe_set, slp_formula
from ptw.statespace import DEFAULT_MAX_STATES, StateSet, StateSpace
from ptw.syntax import Stmt, desugar, show_expr, show_formula
from ptw.transformers import Engine, FixpointTrace
from ptw.triples import (
    Verdict, decompose_correctness, decompose_incorrectness, subset_verdict,
)

ENGINES = ("semantic", "syntactic", "both")
# the operational oracle joins the agreement check up to this many states
ORACLE_LIMIT = 1 << 14


@dataclass
class Options:
    engine: str = "both"
    annotate: bool = False
    trace_fixpoints: bool = False
    max_states: int = DEFAULT_MAX_STATES
    timing: bool = False
    # test hook: corrupt the secondary route so agreement checks must fail
    inject_disagreement: bool = False


class Runner:
    def __init__(self, spec: SpecFile, opts: Options):
        self.spec = spec
        self.opts = opts
        self.space = StateSpace(spec.decls, opts.max_states)
        self.engine = Engine(self.space, audit=opts.trace_fixpoints)
        self._desugared: dict[int, Stmt] = {}
        self._relations: dict[int, oracle.OutcomeMap] = {}

    def prog(self, p: Stmt) -> Stmt:
        key = id(p)
        if key not in self._desugared:
            self._desugared[key] = desugar(p, self.spec.decls)
        return self._desugared[key]

    def relation(self, p: Stmt) -> Optional[oracle.OutcomeMap]:
        if self.opts.engine != "both" or self.space.size > ORACLE_LIMIT:
            return None
        if id(p) not in self._relations:
            self._relations[id(p)] = oracle.relation(p, self.space)
        return self._relations[id(p)]

    def _corrupt(self, s: StateSet) -> StateSet:
        return ~s if self.opts.inject_disagreement else s

    # -- transformer evaluation with cross-checks
    def transform(self, kind: str, p: Stmt, arg: StateSet, arg_formula=None):
        """Primary result plus the agreement record of every secondary route."""
        e = self.engine
        routes: dict[str, StateSet] = {}
        syntactic = None
        if kind == "slp" and self.opts.engine in ("syntactic", "both") and arg_formula is not None:
            syntactic, _ = slp_formula(p, arg_formula, self.space)
            routes["syntactic"] = states_of(syntactic, self.space)
        if self.opts.engine == "syntactic" and "syntactic" in routes:
            primary = routes.pop("syntactic")
            routes = {}
        else:
            primary = e.apply(kind, p, arg)
        if self.opts.engine == "both":
            if kind == "slp":
                routes["direct"] = e.slp_direct(p, arg)
            elif kind == "wlp":
                routes["dual"] = e.wlp_dual(p, arg)
            rel = self.relation(p)
            if rel is not None:
                ref = {"wp": oracle.ref_wp, "wlp": oracle.ref_wlp,
                       "sp": oracle.ref_sp, "slp": oracle.ref_slp}[kind]
                routes["oracle"] = ref(rel, arg)
        agreement = {name: self._corrupt(s) == primary for name, s in routes.items()}
        return primary, agreement, syntactic

    # -- directives
    def run(self) -> dict:
        start = time.perf_counter()
        entries = [self.run_directive(d) for d in self.spec.directives]
        agree = all(en["engine_agreement"] for en in entries)
        out: dict[str, Any] = {
            "states": self.space.size,
            "variables": [d.show() for d in self.spec.decls],
            "engine": self.opts.engine,
            "directives": entries,
            "engine_agreement": agree,
            "mismatches": sum(1 for en in entries if en["matches_expectation"] is False),
            "unsound": sum(1 for en in entries if en.get("sound") is False),
        }
        if self.opts.timing:
            out["timing_seconds"] = round(time.perf_counter() - start, 6)
        return out

    def _trace(self, traces: list[FixpointTrace]) -> dict:
        out: dict[str, Any] = {
            "fixpoints": len(traces),
            "max_iterations": max((t.iterations for t in traces), default=0),
            "all_converged": all(t.converged for t in traces),
            "within_bound": all(t.iterations <= self.space.size + 1 for t in traces),
        }
        if self.opts.trace_fixpoints:
            out["mu_below_nu"] = all(t.mu_below_nu is not False for t in traces)
            out["loops"] = [t.to_json() for t in traces]
        return out

    def _base(self, kind: str, d, notion: Optional[str]) -> dict:
        return {"kind": kind, "line": d.line, "program": d.program_name,
                "notion": notion, "valid": None, "expect": None,
                "matches_expectation": None, "witness": None,
                "annotations": [], "trace": {}, "engine_agreement": True}

    def _expect(self, entry: dict, expect: Optional[bool]) -> None:
        if expect is not None:
            entry["expect"] = "valid" if expect else "invalid"
            entry["matches_expectation"] = entry["valid"] == expect

    def _witness(self, w: Optional[dict[str, int]]) -> Optional[dict]:
        if w is None:
            return None
        return {d.name: (bool(w[d.name]) if d.is_bool else w[d.name]) for d in self.spec.decls}

    def run_directive(self, d) -> dict:
        mark = len(self.engine.traces)
        if isinstance(d, CheckDirective):
            entry = self.run_check(d)
        elif isinstance(d, QueryDirective):
            entry = self.run_query(d)
        elif isinstance(d, ParkDirective):
            entry = self.run_park(d)
        elif isinstance(d, VariantDirective):
            entry = self.run_variant(d)
        elif isinstance(d, DecomposeDirective):
            entry = self.run_decompose(d)
        else:
            raise TypeError(f"unknown directive {d!r}")
        entry["trace"] = self._trace(self.engine.traces[mark:])
        del self.engine.traces[mark:]
        return entry

    def run_check(self, d: CheckDirective) -> dict:
        t = d.triple
        entry = self._base("check", d, t.notion.value)
        p = self.prog(t.program)
        b = states_of(t.pre, self.space)
        c = states_of(t.post, self.space)
        kind = t.notion.transformer
        if t.notion.is_correctness:
            rhs, agreement, _ = self.transform(kind, p, c)
            v = subset_verdict(t.notion, b, rhs)
        else:
            rhs, agreement, _ = self.transform(kind, p, b, t.pre)
            v = subset_verdict(t.notion, c, rhs)
        entry.update(self._verdict(v))
        entry["pre"] = show_formula(t.pre)
        entry["post"] = show_formula(t.post)
        entry["routes"] = agreement
        entry["engine_agreement"] = all(agreement.values())
        rel = self.relation(p)
        if rel is not None and v.witness_index is not None:
            # the witness must also fail against the oracle's transformer
            ref = {"wp": oracle.ref_wp, "wlp": oracle.ref_wlp,
                   "sp": oracle.ref_sp, "slp": oracle.ref_slp}[kind]
            ref_rhs = ref(rel, c if t.notion.is_correctness else b)
            ok = v.witness_index not in ref_rhs
            entry["witness_confirmed"] = ok
            entry["engine_agreement"] = entry["engine_agreement"] and ok
        self._expect(entry, d.expect)
        return entry

    def _verdict(self, v: Verdict) -> dict:
        return {"valid": v.valid, "witness": self._witness(v.witness),
                "lhs_size": v.lhs_size, "rhs_size": v.rhs_size}

    def run_query(self, d: QueryDirective) -> dict:
        entry = self._base("query", d, None)
        entry["transformer"] = d.transformer
        entry["argument"] = show_formula(d.argument)
        p = self.prog(d.program)
        arg = states_of(d.argument, self.space)
        result, agreement, syn = self.transform(d.transformer, p, arg, d.argument)
        entry["size"] = len(result)
        entry["space_size"] = self.space.size
        entry["formula"] = show_formula(syn) if syn is not None else describe_set(result)
        entry["routes"] = agreement
        entry["engine_agreement"] = all(agreement.values())
        if self.opts.annotate and d.transformer in ("sp", "slp"):
            anns, lines = annotate(p, arg, d.transformer, d.argument, self.engine,
                                   syntactic=self.opts.engine != "semantic")
            entry["annotations"] = [
                {"point": a.point, "size": len(a.states), "formula": a.rendered}
                for a in anns]
            entry["listing"] = lines
            if not anns[-1].states.is_equal(result):
                entry["engine_agreement"] = False
            if not annotation_agreement(anns):
                entry["engine_agreement"] = False
        return entry

    def run_park(self, d: ParkDirective) -> dict:
        entry = self._base("park", d, None)
        entry["transformer"] = d.transformer
        entry["invariant"] = show_formula(d.invariant)
        entry["argument"] = show_formula(d.argument)
        loop = self.prog(d.loop)
        inv = states_of(d.invariant, self.space)
        arg = states_of(d.argument, self.space)
        r = park_check_sets(loop, d.transformer, inv, arg, self.engine)
        entry.update({
            "valid": r.premise,
            "premise": r.premise,
            "invariant_size": len(inv),
            "fixpoint_size": len(r.fixpoint),
            "conclusion_verified": r.conclusion_verified,
            "loop_bound_verified": r.loop_bound_verified,
            "sound": r.sound and (not r.premise or r.loop_bound_verified),
        })
        if not r.premise:
            entry["witness"] = self._witness(_first(inv - r.image))
        self._expect(entry, d.expect)
        return entry

    def run_variant(self, d: VariantDirective) -> dict:
        kind = "backward_variant" if d.backward else "variant"
        entry = self._base(kind, d, None)
        entry["variant"] = show_expr(d.variant)
        loop = self.prog(d.loop)
        cert = VariantCertificate(loop, d.variant, "reachability" if d.backward else "termination")
        try:
            r = (backward_variant_check if d.backward else variant_check)(
                cert, self.space, self.engine)
        except CertificateError as exc:
            entry.update({"valid": False, "error": str(exc), "levels": []})
            self._expect(entry, d.expect)
            return entry
        entry["levels"] = [{"n": lv.n, "valid": lv.valid, "witness": self._witness(lv.witness)}
                           for lv in r.levels]
        entry["valid"] = r.valid
        failed = [lv for lv in r.levels if not lv.valid]
        if failed:
            entry["witness"] = self._witness(failed[0].witness)
        if d.backward:
            entry.update({"claimed": r.claimed, "claim_levels": r.claim_levels,
                          "reachable_witness_size": len(r.reachable_witness_set),
                          "reachable_witness": describe_set(r.reachable_witness_set),
                          "sound": r.sound})
        else:
            entry.update({"universal_termination": r.universal_termination,
                          "engine_terminates": r.engine_terminates, "sound": r.sound})
        self._expect(entry, d.expect)
        return entry

    def run_decompose(self, d: DecomposeDirective) -> dict:
        entry = self._base("decompose", d, d.kind)
        p = self.prog(d.program)
        b = states_of(d.pre, self.space)
        c = states_of(d.post, self.space)
        fn = decompose_correctness if d.kind == "correctness" else decompose_incorrectness
        dec = fn(b, p, c, self.engine)
        entry.update({
            "pre": show_formula(d.pre),
            "post": show_formula(d.post),
            "valid": dec.direct_total,
            "partial": self._verdict(dec.partial),
            dec.side_name: self._verdict(dec.side),
            "total": self._verdict(dec.total),
            "implied_total": dec.implied_total,
            "direct_total": dec.direct_total,
            # total implies partial as well, in both families
            "sound": dec.sound and (not dec.direct_total or dec.partial.valid),
            "witness": self._witness(dec.total.witness),
        })
        self._expect(entry, d.expect)
        return entry


def _first(s: StateSet) -> Optional[dict[str, int]]:
    idx = s.min_index()
    return None if idx is None else s.space.state(idx)


def run_spec(spec: SpecFile, opts: Optional[Options] = None) -> dict:
    return Runner(spec, opts or Options()).run()


def exit_code(report: dict) -> int:
    ok = report["engine_agreement"] and report["mismatches"] == 0 and report["unsound"] == 0
    return 0 if ok else 1


# -- rendering -------------------------------------------------------------

def render_json(report: dict) -> str:
    return json.dumps(report, indent=2) + "\n"


def _yes(v) -> str:
    return {True: "yes", False: "no", None: "-"}[v]


def _fmt_state(w: Optional[dict]) -> str:
    if not w:
        return "-"
    return ", ".join(f"{k}={str(v).lower() if isinstance(v, bool) else v}" for k, v in w.items())


def render_text(report: dict) -> str:
    out = [f"# {report['states']} states: {' '.join(report['variables'])}"]
    for en in report["directives"]:
        out.append("")
        kind = en["kind"]
        if kind == "check":
            lb, rb = ("{", "}") if en["notion"].endswith("_correctness") and \
                "incorrectness" not in en["notion"] else ("[", "]")
            out.append(f"check {en['notion']} {lb}{en['pre']}{rb} {en['program']} "
                       f"{lb}{en['post']}{rb}   (line {en['line']})")
            out.append(f"  valid: {_yes(en['valid'])}   |lhs| = {en['lhs_size']}   "
                       f"|rhs| = {en['rhs_size']}")
        elif kind == "query":
            out.append(f"query {en['transformer']} {en['program']} {{{en['argument']}}}"
                       f"   (line {en['line']})")
            out.append(f"  {en['size']} of {en['space_size']} states")
            out.append(f"  = {en['formula']}")
            for line in en.get("listing", []):
                out.append("  | " + line)
        elif kind == "park":
            out.append(f"park {en['program']} {en['transformer']} {{{en['invariant']}}} "
                       f"{{{en['argument']}}}   (line {en['line']})")
            out.append(f"  premise I <= Phi(I): {_yes(en['premise'])}   "
                       f"I <= nu Phi (engine): {_yes(en['conclusion_verified'])}   "
                       f"loop bound (engine): {_yes(en['loop_bound_verified'])}")
        elif kind in ("variant", "backward_variant"):
            out.append(f"{kind} {en['program']} {en['variant']}   (line {en['line']})")
            if "error" in en:
                out.append(f"  error: {en['error']}")
            for lv in en["levels"]:
                status = "ok" if lv["valid"] else f"FAILS at {_fmt_state(lv['witness'])}"
                out.append(f"  n = {lv['n']}: {status}")
            if kind == "variant" and "error" not in en:
                out.append(f"  universal termination: {_yes(en['universal_termination'])}"
                           f"   engine: {_yes(en['engine_terminates'])}")
            elif "error" not in en:
                out.append(f"  claimed: {_yes(en['claimed'])}   "
                           f"fully reachable exit levels: {en['claim_levels']}")
                out.append(f"  reachable exit states ({en['reachable_witness_size']}): "
                           f"{en['reachable_witness']}")
        elif kind == "decompose":
            side = "termination" if en["notion"] == "correctness" else "reachability"
            lb, rb = ("{", "}") if en["notion"] == "correctness" else ("[", "]")
            out.append(f"decompose {en['notion']} {lb}{en['pre']}{rb} {en['program']} "
                       f"{lb}{en['post']}{rb}   (line {en['line']})")
            out.append(f"  partial: {_yes(en['partial']['valid'])}   "
                       f"{side}: {_yes(en[side]['valid'])}   "
                       f"implied total: {_yes(en['implied_total'])}   "
                       f"direct total: {_yes(en['direct_total'])}")
        if en.get("witness") and kind != "query":
            out.append(f"  witness: {_fmt_state(en['witness'])}")
        if en["expect"] is not None:
            status = "ok" if en["matches_expectation"] else "MISMATCH"
            out.append(f"  expect {en['expect']}: {status}")
        if en.get("routes"):
            routes = ", ".join(f"{k}={'agree' if v else 'DISAGREE'}" for k, v in en["routes"].items())
            out.append(f"  routes: {routes}")
        if not en["engine_agreement"]:
            out.append("  ENGINE DISAGREEMENT")
        if en.get("sound") is False:
            out.append("  UNSOUND: rule premise held but engine refutes the conclusion")
        tr = en["trace"]
        if tr.get("loops"):
            for t in tr["loops"]:
                extra = "" if "mu_below_nu" not in t else f" mu<=nu={_yes(t['mu_below_nu'])}"
                out.append(f"  fixpoint {t['kind']} {t['extreme']} {t['loop']}: "
                           f"{t['iterations']} iterations, sizes {t['sizes']}{extra}")
    out.append("")
    out.append(f"{len(report['directives'])} directives, {report['mismatches']} mismatches, "
               f"engine agreement: {_yes(report['engine_agreement'])}")
    if "timing_seconds" in report:
        out.append(f"time: {report['timing_seconds']:.3f}s")
    return "\n".join(out) + "\n"


def render_report(report: dict, fmt: str = "text") -> bytes:
    text = render_json(report) if fmt == "json" else render_text(report)
    return text.encode("utf-8")


__all__ = ["ENGINES", "Options", "Runner", "exit_code", "render_json",
           "render_report", "render_text", "run_spec"]

