"""StreamCore: pacing-typed stream specifications for runtime monitoring."""

from .evaluator import EvalPlan, MonitorState, StepResult, initial_state, plan, run, step
from .model import (
    FAIL,
    Equation,
    Specification,
    StreamTrace,
    join_traces,
    validate_spec,
)
from .pacing import denotation_times, entails, fires
from .parser import format_spec, parse_spec
from .semantics import eval_memcell, eval_partial, eval_total, is_model
from .typecheck import Mode, TypingReport, check_spec, order_equations

__all__ = [
    "FAIL",
    "EvalPlan",
    "Equation",
    "Mode",
    "MonitorState",
    "Specification",
    "StepResult",
    "StreamTrace",
    "TypingReport",
    "check_spec",
    "denotation_times",
    "entails",
    "eval_memcell",
    "eval_partial",
    "eval_total",
    "fires",
    "format_spec",
    "initial_state",
    "is_model",
    "join_traces",
    "order_equations",
    "parse_spec",
    "plan",
    "run",
    "step",
    "validate_spec",
]
