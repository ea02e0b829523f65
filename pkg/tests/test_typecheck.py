import random

import pytest

from streamcore.model import TOP, And, Atom, BinOp, Const, Equation, Hold, Op, Prev, Specification, Var
from streamcore.parser import parse_spec
from streamcore.testkit import (
    GenConfig,
    check_spec_all_permutations,
    gen_well_typed_spec,
    mutate_spec,
    shuffled,
)
from streamcore.typecheck import (
    DependencyCycle,
    ErrorKind,
    Mode,
    TypingContext,
    check_expr_v1,
    check_expr_v2,
    check_spec,
    order_equations,
)

from .conftest import load

a, b, i = Atom("a"), Atom("b"), Atom("i")


class TestExprV1:
    def test_refinement_failure(self):
        (err,) = check_expr_v1({"x": b}, Var("x"), a)
        assert err.kind is ErrorKind.REFINEMENT_FAILURE
        assert (err.must, err.can) == (a, b)
        assert err.witness == {"a": True, "b": False}
        assert err.rule == "DirectOut"

    def test_matching_pacing(self):
        bat = Atom("battery_level")
        assert check_expr_v1({"drain": bat}, Var("drain"), bat) == []

    def test_no_self_rule(self):
        (err,) = check_expr_v1({}, Prev("x", Const(0)), i, {"i"}, stream="x")
        assert err.kind is ErrorKind.UNBOUND_OUTPUT
        assert err.rule == "PrevOut"

    def test_inputs(self):
        assert check_expr_v1({}, Var("i"), And(i, a), {"i", "a"}) == []
        (err,) = check_expr_v1({}, Var("i"), a, {"i", "a"})
        assert err.rule == "DirectIn"
        assert check_expr_v1({}, Hold("i", Const(0)), a, {"i", "a"}) == []

    def test_hold_out_needs_binding_only(self):
        assert check_expr_v1({"y": b}, Hold("y", Const(0)), a, {"a", "b"}) == []
        (err,) = check_expr_v1({}, Hold("y", Const(0)), a, {"a", "b"})
        assert (err.kind, err.rule) == (ErrorKind.UNBOUND_OUTPUT, "HoldOut")

    def test_default_checked_at_same_pacing(self):
        errs = check_expr_v1({"x": b}, Prev("a", Var("x")), a, {"a", "b"})
        assert [e.kind for e in errs] == [ErrorKind.REFINEMENT_FAILURE]
        assert errs[0].path == ("default",)


class TestExprV2:
    def test_count(self):
        e = BinOp(Op.ADD, Prev("count", Const(0)), Const(1))
        assert check_expr_v2({}, "count", e, i, {"i"}) == []

    def test_self_direct_and_hold(self):
        (e1,) = check_expr_v2({}, "x", Var("x"), i, {"i"})
        (e2,) = check_expr_v2({}, "x", Hold("x", Const(0)), i, {"i"})
        assert e1.kind is e2.kind is ErrorKind.SELF_ACCESS_FORBIDDEN
        assert (e1.rule, e2.rule) == ("Sr-DirectOut", "Sr-HoldOut")

    def test_self_default_still_checked(self):
        errs = check_expr_v2({}, "x", Prev("x", Var("a")), i, {"i", "a"})
        assert [e.rule for e in errs] == ["Sr-DirectIn"]


class TestContext:
    def test_extend_requires_fresh_name(self):
        g = TypingContext().extend("x", a)
        assert dict(g) == {"x": a}
        with pytest.raises(KeyError):
            g.extend("x", b)


class TestOrdering:
    def test_wrong_order_is_fixed(self):
        spec = load("ordering_wrong.sc")
        assert [spec.equations[k].target for k in order_equations(spec)] == ["y", "x"]

    def test_two_cycle(self):
        spec = parse_spec("input i output x @i := y output y @i := x")
        with pytest.raises(DependencyCycle) as info:
            order_equations(spec)
        assert info.value.components == [("x", "y")]

    def test_running_avg(self):
        spec = load("running_avg.sc")
        order = [spec.equations[k].target for k in order_equations(spec)]
        assert order.index("average") == 2

    def test_hold_induces_edge(self):
        spec = parse_spec("input i output x @i := y.hold(or: 0) output y @i := i")
        assert order_equations(spec) == (1, 0)

    def test_self_edges_omitted(self):
        spec = parse_spec("input i output x @i := x.prev(or: 0)")
        assert order_equations(spec) == (0,)


class TestCheckSpec:
    def test_listing1(self):
        spec = load("listing1.sc")
        assert check_spec(spec, Mode.V1).ok and check_spec(spec, Mode.V2).ok

    @pytest.mark.parametrize("mode", list(Mode))
    @pytest.mark.parametrize("reorder", [True, False])
    def test_invalid(self, mode, reorder):
        report = check_spec(load("invalid.sc"), mode, reorder)
        (err,) = report.errors
        assert err.kind is ErrorKind.REFINEMENT_FAILURE
        assert (err.stream, err.accessed, err.must, err.can) == ("y", "x", a, b)

    def test_running_avg(self):
        spec = load("running_avg.sc")
        v1 = check_spec(spec, Mode.V1)
        assert {e.kind for e in v1.errors} == {ErrorKind.UNBOUND_OUTPUT}
        assert {e.stream for e in v1.errors} == {"count", "sum"}
        assert check_spec(spec, Mode.V2).ok

    def test_ordering(self):
        spec = load("ordering_wrong.sc")
        (err,) = check_spec(spec, Mode.V2, reorder=False).errors
        assert (err.kind, err.accessed) == (ErrorKind.UNBOUND_OUTPUT, "y")
        assert check_spec(spec, Mode.V2, reorder=True).ok
        assert check_spec(load("ordering_corrected.sc"), Mode.V1, reorder=False).ok

    def test_cycle_reported(self):
        spec = parse_spec("input i output x @i := y output y @i := x output z @i := i")
        report = check_spec(spec)
        assert [e.kind for e in report.errors].count(ErrorKind.DEPENDENCY_CYCLE) == 1
        assert sorted(report.order) == [0, 1, 2]

    def test_duplicate_equation(self):
        spec = Specification(("i",), (Equation("x", i, Const(1)), Equation("x", i, Const(2))))
        (err,) = check_spec(spec, reorder=False).errors
        assert err.kind is ErrorKind.DUPLICATE_EQUATION

    def test_errors_accumulate(self):
        spec = parse_spec("input a input b output x @a := b output y @b := a + x")
        report = check_spec(spec)
        assert len(report.errors) == 3
        assert report.order == (0, 1)
        assert set(report.gamma) == {"x", "y"}

    def test_empty_spec(self):
        assert check_spec(Specification((), ())).ok

    def test_message_format(self):
        (err,) = check_spec(load("invalid.sc")).errors
        text = str(err)
        assert text.startswith("RefinementFailure[DirectOut]") or text.startswith("RefinementFailure[Sr-DirectOut]")
        assert "a ⊭ b" in text
        assert "{a: present, b: absent}" in text


def _corpus(n, mode, per=5):
    rng = random.Random(f"corpus:{mode.value}")
    for seed in range(n):
        cfg = GenConfig(seed=seed, num_equations=rng.randint(0, per), mode=mode)
        spec = gen_well_typed_spec(cfg)
        yield spec
        yield shuffled(spec, rng)
        m = mutate_spec(spec, mode, rng)
        if m is not None:
            yield m.spec


def test_v1_subset_of_v2():
    for spec in _corpus(100, Mode.V1):
        for reorder in (True, False):
            if check_spec(spec, Mode.V1, reorder).ok:
                assert check_spec(spec, Mode.V2, reorder).ok


@pytest.mark.parametrize("mode", list(Mode))
def test_permutation_fidelity(mode):
    for spec in _corpus(40, mode, per=4):
        assert check_spec(spec, mode, True).ok == check_spec_all_permutations(spec, mode)


@pytest.mark.parametrize("mode", list(Mode))
def test_verdict_is_order_insensitive(mode):
    rng = random.Random(5)
    for spec in _corpus(60, mode):
        verdict = check_spec(spec, mode).ok
        for _ in range(3):
            assert check_spec(shuffled(spec, rng), mode).ok == verdict


def test_report_order_is_permutation():
    for spec in _corpus(50, Mode.V2):
        report = check_spec(spec)
        assert sorted(report.order) == list(range(len(spec.equations)))
