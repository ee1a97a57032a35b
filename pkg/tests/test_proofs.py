import pytest

from ptw.errors import CertificateError
from ptw.formula_eval import states_of
from ptw.parser import parse_expr, parse_formula, parse_program
from ptw.proofs import (
    ParkCertificate, VariantCertificate, backward_variant_check, park_check,
    park_check_sets, variant_check,
)


def loop(space, text):
    return parse_program(text, list(space.decls))


def cert(space, text, v, direction="termination"):
    return VariantCertificate(loop(space, text), parse_expr(v, list(space.decls)), direction)


def test_termination_variant(x5):
    r = variant_check(cert(x5, "while (x > 0) { x := x - 1 }", "x"), x5)
    assert r.valid and r.engine_terminates and r.sound
    assert [lv.n for lv in r.levels] == [0, 1, 2, 3, 4]


def test_identity_body_fails_per_level(x5):
    r = variant_check(cert(x5, "while (x > 0) { x := x }", "x"), x5)
    assert not r.valid and not r.engine_terminates and r.sound
    assert [(lv.n, lv.valid) for lv in r.levels] == \
        [(0, True), (1, False), (2, False), (3, False), (4, False)]
    assert r.levels[2].witness == {"x": 2}


def test_backward_variant(x5):
    r = backward_variant_check(cert(x5, "while (x < 3) { x := x + 1 }", "x", "reachability"), x5)
    assert r.valid and r.claimed and r.sound
    assert [lv.n for lv in r.levels] == [1, 2, 3]
    assert list(r.reachable_witness_set) == [3]


def test_diverge_body_fails_per_level(x5):
    r = backward_variant_check(cert(x5, "while (x < 3) { diverge }", "x", "reachability"), x5)
    assert not r.valid and not r.claimed
    assert [(lv.n, lv.valid, lv.witness) for lv in r.levels] == \
        [(1, False, {"x": 1}), (2, False, {"x": 2})]
    assert len(r.reachable_witness_set) == 0


def test_negative_variant(x5):
    with pytest.raises(CertificateError):
        variant_check(cert(x5, "while (x > 0) { x := x - 1 }", "x - 2"), x5)


def test_not_a_loop(x5):
    with pytest.raises(CertificateError):
        variant_check(cert(x5, "x := 1", "x"), x5)


def test_park_wlp(x5):
    w = loop(x5, "while (x > 0) { x := x - 1 }")
    ok = park_check(ParkCertificate(w, "wlp", parse_formula("true"), parse_formula("x == 0")), x5)
    assert ok.premise and ok.conclusion_verified and ok.loop_bound_verified and ok.sound
    bad = park_check(ParkCertificate(w, "wlp", parse_formula("x == 2"), parse_formula("x == 1")), x5)
    assert not bad.premise and bad.sound


def test_park_slp(x5):
    w = loop(x5, "while (x < 3) { x := x + 1 }")
    inv = parse_formula("x <= 3")
    ok = park_check(ParkCertificate(w, "slp", inv, parse_formula("x <= 3")), x5)
    assert ok.premise and ok.conclusion_verified and ok.loop_bound_verified
    bad = park_check(ParkCertificate(w, "slp", inv, parse_formula("x <= 2")), x5)
    assert not bad.premise
    assert list(bad.invariant - bad.image) == [3]


def test_park_empty_and_nu(x5):
    w = loop(x5, "while (x != 4) { x := x + 2 }")
    arg = states_of(parse_formula("x == 4"), x5)
    empty = park_check_sets(w, "wlp", x5.empty(), arg)
    assert empty.premise and empty.sound
    nu = park_check_sets(w, "wlp", empty.fixpoint, arg)
    assert nu.premise and nu.conclusion_verified
    with pytest.raises(CertificateError):
        park_check_sets(w, "wp", x5.empty(), arg)
