"""Reference semantics of stream expressions and the model check for specifications.

Three evaluators share one recursion and differ only in how a stream access
is resolved:

``eval_total``
    every accessed stream must be in the map (a missing column is a caller bug).
``eval_partial``
    an access to a stream outside the map fails.
``eval_memcell``
    additionally, the equation's own stream is never in the map; its past
    value comes from a single memory cell, and only ``prev`` may read it.

Defaults of ``prev``/``hold`` are evaluated only on the branch that uses them.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .model import (
    FAIL,
    INT_MAX,
    INT_MIN,
    BinOp,
    Const,
    Expr,
    Hold,
    Not,
    Op,
    OptValue,
    Outcome,
    Prev,
    RuntimeArithmeticError,
    Specification,
    StreamTrace,
    Var,
)
from .pacing import denotation_times

# ---------------------------------------------------------------------------
# Checked integer arithmetic
# ---------------------------------------------------------------------------


def _checked(value: int, op: Op) -> int:
    if value < INT_MIN or value > INT_MAX:
        raise RuntimeArithmeticError(f"integer overflow in '{op.value}'")
    return value


def apply_op(op: Op, a: int, b: int) -> int:
    if op is Op.ADD:
        return _checked(a + b, op)
    if op is Op.SUB:
        return _checked(a - b, op)
    if op is Op.MUL:
        return _checked(a * b, op)
    if op is Op.DIV:
        if b == 0:
            raise RuntimeArithmeticError("division by zero")
        # truncate toward zero
        q = abs(a) // abs(b)
        return _checked(q if (a < 0) == (b < 0) else -q, op)
    if op is Op.EQ:
        return int(a == b)
    if op is Op.LT:
        return int(a < b)
    if op is Op.GT:
        return int(a > b)
    if op is Op.AND:
        return int(a != 0 and b != 0)
    if op is Op.OR:
        return int(a != 0 or b != 0)
    raise ValueError(f"unknown operator {op!r}")


def apply_not(a: int) -> int:
    return int(a == 0)


# ---------------------------------------------------------------------------
# Stream operators
# ---------------------------------------------------------------------------


def _check_index(w: Sequence[OptValue], n: int) -> None:
    if not 0 <= n < len(w):
        raise IndexError(f"time {n} outside stream of length {len(w)}")


def op_sync(w: Sequence[OptValue], n: int) -> Outcome:
    _check_index(w, n)
    v = w[n]
    return FAIL if v is None else v


def _last(w: Sequence[OptValue], n: int) -> Outcome:
    for m in range(n, -1, -1):
        if w[m] is not None:
            return w[m]
    return FAIL


def op_last(w: Sequence[OptValue], n: int) -> Outcome:
    """Most recent value of ``w`` at or before ``n``."""
    _check_index(w, n)
    return _last(w, n)


def last_tilde(w: Sequence[OptValue], m: int) -> Outcome:
    """``op_last`` extended with FAIL for negative times."""
    if m < 0:
        return FAIL
    return op_last(w, m)


def op_hold(w: Sequence[OptValue], n: int, d: Outcome) -> Outcome:
    _check_index(w, n)
    v = _last(w, n)
    return d if v is FAIL else v


def op_prev(w: Sequence[OptValue], n: int, d: Outcome) -> Outcome:
    _check_index(w, n)
    if w[n] is None:
        return FAIL
    if n == 0:
        return d
    v = _last(w, n - 1)
    return d if v is FAIL else v


# ---------------------------------------------------------------------------
# Expression semantics
# ---------------------------------------------------------------------------

_TOTAL, _PARTIAL = "total", "partial"


def _eval(e: Expr, cols, n: int, mode: str, self_name: Optional[str], cell: Outcome) -> Outcome:
    if isinstance(e, Const):
        return e.value

    if isinstance(e, BinOp):
        left = _eval(e.left, cols, n, mode, self_name, cell)
        if left is FAIL:
            return FAIL
        right = _eval(e.right, cols, n, mode, self_name, cell)
        if right is FAIL:
            return FAIL
        return apply_op(e.op, left, right)

    if isinstance(e, Not):
        v = _eval(e.operand, cols, n, mode, self_name, cell)
        return FAIL if v is FAIL else apply_not(v)

    if isinstance(e, Var):
        if e.name == self_name:
            return FAIL
        w = cols.get(e.name)
        if w is None:
            if mode == _TOTAL:
                raise KeyError(f"stream '{e.name}' is not in the map")
            return FAIL
        return FAIL if w[n] is None else w[n]

    if isinstance(e, Prev):
        if e.target == self_name:
            if n > 0 and cell is not FAIL:
                return cell
            return _eval(e.default, cols, n, mode, self_name, cell)
        w = cols.get(e.target)
        if w is None:
            if mode == _TOTAL:
                raise KeyError(f"stream '{e.target}' is not in the map")
            return FAIL
        if w[n] is None:
            return FAIL
        v = _last(w, n - 1) if n > 0 else FAIL
        if v is FAIL:
            return _eval(e.default, cols, n, mode, self_name, cell)
        return v

    if isinstance(e, Hold):
        if e.target == self_name:
            return FAIL
        w = cols.get(e.target)
        if w is None:
            if mode == _TOTAL:
                raise KeyError(f"stream '{e.target}' is not in the map")
            return FAIL
        v = _last(w, n)
        if v is FAIL:
            return _eval(e.default, cols, n, mode, self_name, cell)
        return v

    raise TypeError(f"not an expression: {e!r}")


def _check_time(rho: StreamTrace, n: int) -> None:
    if not 0 <= n < rho.horizon:
        raise IndexError(f"time {n} outside horizon {rho.horizon}")


def eval_total(e: Expr, rho: StreamTrace, n: int) -> Outcome:
    _check_time(rho, n)
    return _eval(e, rho.columns, n, _TOTAL, None, FAIL)


def eval_partial(e: Expr, rho: StreamTrace, n: int) -> Outcome:
    _check_time(rho, n)
    return _eval(e, rho.columns, n, _PARTIAL, None, FAIL)


def eval_memcell(e: Expr, rho: StreamTrace, n: int, self_name: str, cell: Outcome) -> Outcome:
    """Partial semantics where ``self_name``'s last value is held in ``cell`` (FAIL: none yet)."""
    if self_name in rho:
        raise ValueError(f"self stream '{self_name}' must not be in the map")
    _check_time(rho, n)
    return _eval(e, rho.columns, n, _PARTIAL, self_name, cell)


# ---------------------------------------------------------------------------
# Model check
# ---------------------------------------------------------------------------


class Reason(enum.Enum):
    EXPECTED_VALUE_MISMATCH = "ExpectedValueMismatch"
    OUTPUT_ABSENT_AT_PACED_TIME = "OutputAbsentAtPacedTime"
    EXPR_FAILED_AT_PACED_TIME = "ExprFailedAtPacedTime"


@dataclass(frozen=True)
class Violation:
    stream: str
    time: int
    reason: Reason

    def __str__(self) -> str:
        return f"{self.reason.value}({self.stream}, {self.time})"


@dataclass
class ModelReport:
    violations: list = field(default_factory=list)

    @property
    def is_model(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.is_model


def is_model(rho: StreamTrace, spec: Specification) -> ModelReport:
    """Check that ``rho`` satisfies every equation of ``spec`` at every paced time point."""
    report = ModelReport()
    inputs = rho.restrict(spec.inputs)
    for eq in spec.equations:
        column = rho[eq.target]
        for n in sorted(denotation_times(eq.pacing, inputs)):
            actual = column[n]
            expected = eval_total(eq.body, rho, n)
            if actual is None:
                report.violations.append(Violation(eq.target, n, Reason.OUTPUT_ABSENT_AT_PACED_TIME))
            if expected is FAIL:
                report.violations.append(Violation(eq.target, n, Reason.EXPR_FAILED_AT_PACED_TIME))
            elif actual is not None and actual != expected:
                report.violations.append(Violation(eq.target, n, Reason.EXPECTED_VALUE_MISMATCH))
    return report
