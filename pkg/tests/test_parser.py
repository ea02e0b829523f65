import pytest
from hypothesis import given, settings

from streamcore.model import (
    TOP,
    And,
    Atom,
    BinOp,
    Const,
    Equation,
    Not,
    Op,
    Or,
    Prev,
    Var,
    WFKind,
)
from streamcore.parser import (
    ParseError,
    SpecValidationError,
    format_expr,
    format_pacing,
    format_spec,
    parse_expr,
    parse_pacing,
    parse_spec,
)

from .conftest import SPECS, load
from .strategies import exprs, pacings, well_formed_specs


def test_listing1_ast():
    spec = load("listing1.sc")
    assert spec.inputs == ("battery_level",)
    assert len(spec.equations) == 2
    drain = spec.equations[0]
    assert drain.target == "drain"
    assert drain.pacing == Atom("battery_level")
    assert drain.body == BinOp(Op.SUB, Prev("battery_level", Var("battery_level")), Var("battery_level"))


def test_undeclared_input_is_rejected():
    with pytest.raises(SpecValidationError) as info:
        parse_spec("output x @a := x")
    kinds = {e.kind for e in info.value.errors}
    assert WFKind.UNDECLARED_VARIABLE in kinds or WFKind.PACING_ATOM_NOT_INPUT in kinds


def test_count_equation_default():
    spec = parse_spec("input i output y @i := i.prev(or: 0) + 1")
    assert spec.equations[0].body == BinOp(Op.ADD, Prev("i", Const(0)), Const(1))


@pytest.mark.parametrize("name", ["listing1.sc", "running_avg.sc", "sync.sc", "hold.sc", "disjunctive.sc"])
def test_round_trip_corpus(name):
    spec = load(name)
    assert parse_spec(format_spec(spec)) == spec


def test_top_prints_as_true():
    assert format_spec(parse_spec("input a output x @true := 1")) == "input a: Int\noutput x @true := 1\n"


def test_closing_at_and_synonyms():
    a = parse_spec("input a input b output x @a & b@ := 1")
    b = parse_spec("input a input b output x @a && b := 1")
    assert a == b
    assert a.equations[0].pacing == And(Atom("a"), Atom("b"))


def test_only_int_type():
    with pytest.raises(ParseError):
        parse_spec("input a: Bool")


def test_pacing_is_mandatory():
    with pytest.raises(ParseError) as info:
        parse_spec("input a\noutput x := 1")
    assert info.value.span.line == 2


def test_precedence():
    assert parse_expr("1 + 2 * 3") == BinOp(Op.ADD, Const(1), BinOp(Op.MUL, Const(2), Const(3)))
    assert parse_expr("a < b && b < c || x") == BinOp(
        Op.OR,
        BinOp(Op.AND, BinOp(Op.LT, Var("a"), Var("b")), BinOp(Op.LT, Var("b"), Var("c"))),
        Var("x"),
    )
    assert parse_expr("!a * b") == BinOp(Op.MUL, Not(Var("a")), Var("b"))
    assert parse_expr("1 - 2 - 3") == BinOp(Op.SUB, BinOp(Op.SUB, Const(1), Const(2)), Const(3))
    assert parse_expr("-4") == Const(-4)
    assert parse_pacing("a | b & c") == Or(Atom("a"), And(Atom("b"), Atom("c")))
    assert parse_pacing("true") == TOP


def test_format_keeps_needed_parens():
    e = BinOp(Op.MUL, BinOp(Op.ADD, Var("a"), Const(1)), Var("b"))
    assert format_expr(e) == "(a + 1) * b"
    assert format_expr(BinOp(Op.SUB, Var("a"), BinOp(Op.SUB, Var("b"), Var("c")))) == "a - (b - c)"
    assert format_pacing(And(Or(Atom("a"), Atom("b")), Atom("c"))) == "(a | b) & c"


def test_comments_are_skipped():
    spec = parse_spec("// header\ninput a // trailing\noutput x @a := a // done\n")
    assert spec.equations[0] == Equation("x", Atom("a"), Var("a"))


def test_validation_errors_carry_spans():
    with pytest.raises(SpecValidationError) as info:
        parse_spec("input a\noutput x @a := 1\noutput x @a := 2\n")
    (err,) = info.value.errors
    assert err.kind is WFKind.DUPLICATE_TARGET
    assert err.span.line == 3


@given(exprs())
def test_expr_round_trip(e):
    assert parse_expr(format_expr(e)) == e


@given(pacings())
def test_pacing_round_trip(tau):
    assert parse_pacing(format_pacing(tau)) == tau


@given(well_formed_specs())
def test_spec_round_trip(spec):
    assert parse_spec(format_spec(spec)) == spec


BAD_INPUTS = [
    "",
    "input",
    "input a output",
    "input a output x @",
    "input a output x @a :=",
    "input a output x @a := (1",
    "input a output x @a := a.prev(0)",
    "input a output x @(a := 1",
    "input a output x @a := 1 +",
    "input a output x @a := $",
    "input a output x @a := 99999999999999999999",
    "input a\n\noutput x @a := a.hold(or 1)",
]


@pytest.mark.parametrize("text", BAD_INPUTS)
def test_parse_error_spans_inside_text(text):
    try:
        parse_spec(text)
    except ParseError as exc:
        lines = text.split("\n") if text else [""]
        assert 1 <= exc.span.line <= len(lines)
        assert 1 <= exc.span.column <= max(len(lines[exc.span.line - 1]), 1)
    except SpecValidationError:
        pytest.fail("expected a syntax error")
    else:
        assert text == ""  # an empty file is an empty specification


def test_files_parse():
    for path in sorted(SPECS.glob("*.sc")):
        parse_spec(path.read_text())
