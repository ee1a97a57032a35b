"""Certificate checking for Park induction and (backward) loop variants.

Each check evaluates the rule's premise and, independently, re-verifies the
rule's conclusion with the fixpoint engine.  A premise that holds while the
conclusion fails would be a soundness bug and is reported as ``sound=False``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ptw.errors import CertificateError
from ptw.formula_eval import states_of
from ptw.statespace import StateSet, StateSpace, eval_expr
from ptw.syntax import Expr, Formula, Stmt, While
from ptw.transformers import Engine


def _require_loop(loop: Stmt) -> While:
    if not isinstance(loop, While):
        raise CertificateError("certificate needs a program that is a single while loop")
    return loop


# -- Park induction --------------------------------------------------------

@dataclass(frozen=True)
class ParkCertificate:
    loop: While
    transformer: str  # wlp | slp
    invariant: Formula
    argument: Formula  # post for wlp, pre for slp


@dataclass
class ParkResult:
    transformer: str
    premise: bool  # I <= Phi(I)
    invariant: StateSet
    image: StateSet  # Phi(I)
    fixpoint: StateSet  # engine nu Phi
    conclusion_verified: bool  # I <= nu Phi
    # the bound on the whole loop: I <= wlp(loop, C), or g || I <= slp(loop, B)
    loop_bound: StateSet
    loop_bound_verified: bool

    @property
    def sound(self) -> bool:
        return (not self.premise) or self.conclusion_verified


def park_check_sets(loop: Stmt, transformer: str, inv: StateSet, arg: StateSet,
                    engine: Optional[Engine] = None) -> ParkResult:
    loop = _require_loop(loop)
    engine = engine or Engine(inv.space)
    if transformer == "wlp":
        phi = engine.wlp_map(loop, arg)
    elif transformer == "slp":
        phi = engine.slp_map(loop, arg)
    else:
        raise CertificateError(f"Park induction needs wlp or slp, got {transformer!r}")
    image = phi(inv)
    nu = engine.gfp(transformer, loop, phi)
    if transformer == "wlp":
        bound = inv
        whole = engine.wlp(loop, arg)
    else:
        bound = StateSet(inv.space, engine.guard(loop.guard)) | inv
        whole = engine.slp(loop, arg)
    return ParkResult(transformer, inv <= image, inv, image, nu, inv <= nu,
                      bound, bound <= whole)


def park_check(cert: ParkCertificate, space: StateSpace,
               engine: Optional[Engine] = None) -> ParkResult:
    return park_check_sets(cert.loop, cert.transformer,
                           states_of(cert.invariant, space),
                           states_of(cert.argument, space), engine)


# -- variants --------------------------------------------------------------

@dataclass(frozen=True)
class VariantCertificate:
    loop: While
    variant: Expr
    direction: str = "termination"  # termination | reachability


@dataclass
class LevelVerdict:
    n: int
    valid: bool
    witness: Optional[dict[str, int]] = None
    lhs_size: int = 0


@dataclass
class VariantResult:
    levels: list[LevelVerdict]
    universal_termination: bool  # what the rule concludes
    engine_terminates: bool  # wp(loop, true) = full, computed independently

    @property
    def valid(self) -> bool:
        return self.universal_termination

    @property
    def sound(self) -> bool:
        return (not self.universal_termination) or self.engine_terminates


@dataclass
class BackwardVariantResult:
    levels: list[LevelVerdict]
    all_levels_valid: bool
    # rule's conclusion: some level n has reachable exit states (not g and v = n)
    claimed: bool
    claim_levels: list[int]  # checked levels whose exit states all lie in sp(loop, true)
    reachable_witness_set: StateSet  # exit states at the checked levels that sp(loop, true) contains
    engine_reachable: Optional[StateSet] = field(repr=False, default=None)

    @property
    def valid(self) -> bool:
        return self.all_levels_valid

    @property
    def sound(self) -> bool:
        return (not self.claimed) or bool(self.claim_levels)


def _variant_values(v: Expr, space: StateSpace) -> np.ndarray:
    vals = np.broadcast_to(eval_expr(v, space.columns), (space.size,))
    neg = np.flatnonzero(vals < 0)
    if neg.size:
        st = space.state(int(neg[0]))
        raise CertificateError(f"variant is negative ({int(vals[neg[0]])}) at {st}")
    return vals


def _level(space: StateSpace, n: int, lhs: StateSet, rhs: StateSet) -> LevelVerdict:
    idx = (lhs - rhs).min_index()
    return LevelVerdict(n, idx is None, None if idx is None else space.state(idx), len(lhs))


def variant_check(cert: VariantCertificate, space: StateSpace,
                  engine: Optional[Engine] = None) -> VariantResult:
    """Per attained value n: {g && v == n} body {v < n} for total correctness."""
    loop = _require_loop(cert.loop)
    engine = engine or Engine(space)
    vals = _variant_values(cert.variant, space)
    g = StateSet(space, engine.guard(loop.guard))
    levels = []
    for n in sorted(set(vals.tolist())):
        pre = g & StateSet(space, vals == n)
        post = StateSet(space, vals < n)
        levels.append(_level(space, n, pre, engine.wp(loop.body, post)))
    concluded = all(lv.valid for lv in levels)
    terminates = engine.wp(loop, space.full()).is_full()
    return VariantResult(levels, concluded, terminates)


def backward_variant_check(cert: VariantCertificate, space: StateSpace,
                           engine: Optional[Engine] = None) -> BackwardVariantResult:
    """Per level n >= 1: [v < n && g] body [v == n] for total incorrectness.

    Levels are the values v takes on the loop's working region, the guard
    states plus whatever one body execution produces from them.
    """
    loop = _require_loop(cert.loop)
    engine = engine or Engine(space)
    vals = _variant_values(cert.variant, space)
    g = StateSet(space, engine.guard(loop.guard))
    region = g | engine.sp(loop.body, g)
    attained = sorted(set(vals[region.bits].tolist()))
    levels = []
    for n in attained:
        if n < 1:
            continue
        post = StateSet(space, vals == n)
        pre = StateSet(space, vals < n) & g
        levels.append(_level(space, n, post, engine.sp(loop.body, pre)))
    all_valid = all(lv.valid for lv in levels)
    reach = engine.sp(loop, space.full())
    exit_states = ~g
    witness = space.empty()
    claim_levels = []
    for n in (lv.n for lv in levels):
        at_n = exit_states & StateSet(space, vals == n)
        witness = witness | (at_n & reach)
        if at_n <= reach:
            claim_levels.append(n)
    claimed = all_valid and bool(levels)
    return BackwardVariantResult(levels, all_valid, claimed, claim_levels, witness, reach)
