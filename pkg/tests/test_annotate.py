from ptw.annotate import annotate, annotation_agreement
from ptw.formula_eval import states_of
from ptw.parser import parse_formula, parse_program

EVEN_ODD = "if (x % 2 == 0) { y := y + 1 } else { y := 2 * y }"


def ext(text, space):
    return states_of(parse_formula(text, list(space.decls)), space)


def run(space, text, pre, mode="slp"):
    decls = list(space.decls)
    f = parse_formula(pre, decls)
    return annotate(parse_program(text, decls), states_of(f, space), mode, f)


def test_even_odd_points(xy32):
    anns, lines = run(xy32, EVEN_ODD, "y == 10")
    assert [a.point for a in anns] == ["pre", "then.entry", "then.exit", "else.entry",
                                        "else.exit", "post"]
    by = {a.point: a.states for a in anns}
    assert by["then.entry"] == ext("x % 2 == 1 || y == 10", xy32)
    assert by["then.exit"] == ext("x % 2 == 1 || y == 11", xy32)
    assert by["else.entry"] == ext("x % 2 == 0 || y == 10", xy32)
    assert annotation_agreement(anns)
    assert lines[0] == "{ y == 10 }"
    assert lines[1] == "if (x % 2 == 0) {"
    assert lines[2] == "  { x % 2 != 0 || y == 10 }"


def test_sp_listing(xy32):
    anns, lines = run(xy32, EVEN_ODD, "y == 10", "sp")
    assert lines[-1] == "{ x % 2 == 0 && y == 11 || x % 2 == 1 && y == 20 }"
    assert all(a.formula is None for a in anns)


def test_cat_listing(cat_space):
    anns, lines = run(cat_space, "while (!open) { dead := spill }; dead := spill", "open")
    assert lines == [
        "{ open }",
        "while (!open) {",
        "  { open }",
        "  dead := spill",
        "  { dead != spill || open }",
        "};",
        "{ true }",
        "dead := spill",
        "{ true }",
    ]
    assert annotation_agreement(anns)
