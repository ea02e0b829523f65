"""Online evaluation of well-typed specifications.

Time points are processed one at a time.  Within a step, equations run in
dependency order, so every access in a body reads either:

* a value produced earlier in the same step (inputs, earlier outputs), or
* a memory cell holding a stream's last value from a previous step.

Cells are written only after the whole step, so during the step a cell is
exactly ``Last(w, n-1)``.  Memory is one cell per stream, independent of the
trace length.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from .model import (
    BinOp,
    Const,
    Equation,
    Expr,
    Hold,
    Not,
    OptValue,
    Pacing,
    Prev,
    RuntimeArithmeticError,
    Specification,
    StreamTrace,
    Var,
    iter_accesses,
)
from .pacing import fires
from .semantics import apply_not, apply_op
from .typecheck import DependencyCycle, Mode, TypingReport, check_spec, order_equations


class IllTypedSpecError(Exception):
    def __init__(self, report: TypingReport):
        self.report = report
        super().__init__("; ".join(str(e) for e in report.errors))


class EvaluationFailure(RuntimeError):
    """A required value was unavailable.  Impossible for well-typed specifications."""

    def __init__(self, stream: str, time: int, access: str):
        self.stream = stream
        self.time = time
        self.access = access
        super().__init__(f"evaluation of '{stream}' failed at time {time}: {access}")


@dataclass(frozen=True)
class PlannedEquation:
    target: str
    pacing: Pacing
    body: Expr
    self_ref: bool


@dataclass(frozen=True)
class EvalPlan:
    inputs: tuple
    equations: tuple  # of PlannedEquation, in evaluation order
    checked: bool = True

    @property
    def order(self) -> tuple:
        return tuple(eq.target for eq in self.equations)


@dataclass
class MonitorState:
    time: int = 0
    cells: dict = field(default_factory=dict)  # output -> last value; missing key: none yet
    input_cells: dict = field(default_factory=dict)


@dataclass(frozen=True)
class StepResult:
    time: int
    outputs: Mapping[str, OptValue]


def _planned(eq: Equation) -> PlannedEquation:
    self_ref = any(isinstance(a, Prev) and a.target == eq.target for a in iter_accesses(eq.body))
    return PlannedEquation(eq.target, eq.pacing, eq.body, self_ref)


def plan(spec: Specification, report: TypingReport) -> EvalPlan:
    if report.errors:
        raise IllTypedSpecError(report)
    return EvalPlan(spec.inputs, tuple(_planned(spec.equations[i]) for i in report.order))


def plan_unchecked(spec: Specification, order: Optional[Iterable[int]] = None) -> EvalPlan:
    """Plan without type checking, for demonstrating what the checker prevents."""
    if order is None:
        try:
            order = order_equations(spec)
        except DependencyCycle as cyc:
            order = cyc.partial_order
    return EvalPlan(spec.inputs, tuple(_planned(spec.equations[i]) for i in order), checked=False)


class _Step:
    """Evaluation context for one equation at one time point."""

    __slots__ = ("state", "current", "target", "time")

    def __init__(self, state: MonitorState, current: dict, target: str):
        self.state = state
        self.current = current
        self.target = target
        self.time = state.time

    def fail(self, what: str):
        raise EvaluationFailure(self.target, self.time, what)

    def cell(self, name: str):
        if name in self.state.cells:
            return True, self.state.cells[name]
        if name in self.state.input_cells:
            return True, self.state.input_cells[name]
        return False, None

    def eval(self, e: Expr) -> int:
        if isinstance(e, Const):
            return e.value
        if isinstance(e, BinOp):
            return apply_op(e.op, self.eval(e.left), self.eval(e.right))
        if isinstance(e, Not):
            return apply_not(self.eval(e.operand))

        if isinstance(e, Var):
            if e.name == self.target:
                self.fail(f"direct access to itself")
            value = self.current.get(e.name)
            if value is None:
                self.fail(f"'{e.name}' has no value now")
            return value

        if isinstance(e, Prev):
            if e.target == self.target:
                has, value = self.cell(e.target)
                return value if has else self.eval(e.default)
            if self.current.get(e.target) is None:
                self.fail(f"'{e.target}.prev' needs a value of '{e.target}' now")
            has, value = self.cell(e.target)
            return value if has else self.eval(e.default)

        if isinstance(e, Hold):
            if e.target == self.target:
                self.fail("hold access to itself")
            value = self.current.get(e.target)
            if value is not None:
                return value
            if e.target not in self.current:
                # a later-ordered output: not computed yet in this step
                self.fail(f"'{e.target}' is not available yet")
            has, value = self.cell(e.target)
            return value if has else self.eval(e.default)

        raise TypeError(f"not an expression: {e!r}")


def initial_state() -> MonitorState:
    return MonitorState()


def step(state: MonitorState, plan: EvalPlan, row: Mapping[str, OptValue]) -> tuple:
    """Evaluate one time point; returns ``(next_state, StepResult)``."""
    missing = [name for name in plan.inputs if name not in row]
    if missing:
        raise KeyError(f"row lacks input '{missing[0]}'")
    presence = {name: row[name] is not None for name in plan.inputs}
    current = {name: row[name] for name in plan.inputs}  # name -> value or None (absent)
    outputs: dict = {}
    for eq in plan.equations:
        if fires(eq.pacing, presence):
            try:
                value = _Step(state, current, eq.target).eval(eq.body)
            except RuntimeArithmeticError as exc:
                raise RuntimeArithmeticError(exc.message, eq.target, state.time) from None
        else:
            value = None
        current[eq.target] = value
        outputs[eq.target] = value

    cells = dict(state.cells)
    cells.update((k, v) for k, v in outputs.items() if v is not None)
    input_cells = dict(state.input_cells)
    input_cells.update((k, row[k]) for k in plan.inputs if row[k] is not None)
    return MonitorState(state.time + 1, cells, input_cells), StepResult(state.time, outputs)


def execute(plan: EvalPlan, inputs: StreamTrace) -> StreamTrace:
    """Fold :func:`step` over all rows of ``inputs``."""
    state = initial_state()
    columns = {name: [] for name in plan.inputs}
    outputs = {eq.target: [] for eq in plan.equations}
    for n in range(inputs.horizon):
        row = {name: inputs[name][n] for name in plan.inputs}
        state, result = step(state, plan, row)
        for name in plan.inputs:
            columns[name].append(row[name])
        for name, value in result.outputs.items():
            outputs[name].append(value)
    columns.update(outputs)
    return StreamTrace(columns, inputs.horizon)


def _declaration_order(spec: Specification, trace: StreamTrace) -> StreamTrace:
    return StreamTrace({name: trace[name] for name in spec.streams}, trace.horizon)


def run(spec: Specification, inputs: StreamTrace, mode: Mode = Mode.V2, reorder: bool = True) -> StreamTrace:
    """Type-check, then compute the minimal model over ``inputs`` (inputs + outputs)."""
    missing = [name for name in spec.inputs if name not in inputs]
    if missing:
        raise KeyError(f"trace lacks input '{missing[0]}'")
    report = check_spec(spec, mode, reorder)
    return _declaration_order(spec, execute(plan(spec, report), inputs))


def run_unchecked(spec: Specification, inputs: StreamTrace, order: Optional[Iterable[int]] = None) -> StreamTrace:
    return _declaration_order(spec, execute(plan_unchecked(spec, order), inputs))
