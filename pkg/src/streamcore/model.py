"""Abstract syntax, value domains and traces shared by the whole toolkit.

Streams are identified by name.  Whether a name denotes an input or an output
is decided by the enclosing :class:`Specification`, so expression trees carry
plain strings.

Two "missing" markers exist and must never be confused:

* ``None`` is the *absent* cell of a stream (no value at this time point).
* :data:`FAIL` is the outcome of an expression whose evaluation needed a value
  that was not available.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence, Union

INT_MIN = -(2**63)
INT_MAX = 2**63 - 1

IDENT_RE = re.compile(r"[a-zA-Z_][a-zA-Z0-9_]*\Z")


class _Fail:
    """Singleton marker for a failed evaluation."""

    _instance: Optional["_Fail"] = None

    def __new__(cls) -> "_Fail":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "FAIL"

    def __bool__(self) -> bool:
        raise TypeError("FAIL has no truth value; compare with `is FAIL`")

    def __reduce__(self):
        return (_Fail, ())


FAIL = _Fail()

#: A stream cell: an integer or ``None`` (absent).
OptValue = Optional[int]
#: Result of evaluating an expression: an integer or :data:`FAIL`.
Outcome = Union[int, _Fail]


class RuntimeArithmeticError(ArithmeticError):
    """Overflow or division by zero.  Distinct from the timing failure FAIL."""

    def __init__(self, message: str, stream: Optional[str] = None, time: Optional[int] = None):
        super().__init__(message)
        self.message = message
        self.stream = stream
        self.time = time

    def __str__(self) -> str:
        where = ""
        if self.stream is not None:
            where = f" in stream '{self.stream}'"
        if self.time is not None:
            where += f" at time {self.time}"
        return f"{self.message}{where}"


class Kind(enum.Enum):
    INPUT = "input"
    OUTPUT = "output"


@dataclass(frozen=True)
class StreamVar:
    name: str
    kind: Kind

    def __post_init__(self):
        if not IDENT_RE.match(self.name):
            raise ValueError(f"invalid stream name {self.name!r}")


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    length: int = 1

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


# ---------------------------------------------------------------------------
# Expressions
# ---------------------------------------------------------------------------


class Op(enum.Enum):
    ADD = "+"
    SUB = "-"
    MUL = "*"
    DIV = "/"
    EQ = "=="
    LT = "<"
    GT = ">"
    AND = "&&"
    OR = "||"


def _span_field():
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Const:
    value: int
    span: Optional[SourceSpan] = _span_field()


@dataclass(frozen=True)
class Var:
    name: str
    span: Optional[SourceSpan] = _span_field()


@dataclass(frozen=True)
class Prev:
    target: str
    default: "Expr"
    span: Optional[SourceSpan] = _span_field()


@dataclass(frozen=True)
class Hold:
    target: str
    default: "Expr"
    span: Optional[SourceSpan] = _span_field()


@dataclass(frozen=True)
class BinOp:
    op: Op
    left: "Expr"
    right: "Expr"
    span: Optional[SourceSpan] = _span_field()


@dataclass(frozen=True)
class Not:
    operand: "Expr"
    span: Optional[SourceSpan] = _span_field()


Expr = Union[Const, Var, Prev, Hold, BinOp, Not]


def children(e: Expr) -> tuple:
    if isinstance(e, (Prev, Hold)):
        return (e.default,)
    if isinstance(e, BinOp):
        return (e.left, e.right)
    if isinstance(e, Not):
        return (e.operand,)
    return ()


def iter_accesses(e: Expr):
    """Yield every stream access node (Var, Prev, Hold) in ``e``, defaults included."""
    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, (Var, Prev, Hold)):
            yield node
        stack.extend(reversed(children(node)))


def referenced_names(e: Expr) -> set:
    return {a.name if isinstance(a, Var) else a.target for a in iter_accesses(e)}


def access_target(node) -> str:
    return node.name if isinstance(node, Var) else node.target


# ---------------------------------------------------------------------------
# Pacing formulas
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Atom:
    name: str
    span: Optional[SourceSpan] = _span_field()


@dataclass(frozen=True)
class Top:
    span: Optional[SourceSpan] = _span_field()


@dataclass(frozen=True)
class And:
    left: "Pacing"
    right: "Pacing"


@dataclass(frozen=True)
class Or:
    left: "Pacing"
    right: "Pacing"


Pacing = Union[Atom, Top, And, Or]
TOP = Top()


def atoms(tau: Pacing) -> frozenset:
    if isinstance(tau, Atom):
        return frozenset((tau.name,))
    if isinstance(tau, Top):
        return frozenset()
    return atoms(tau.left) | atoms(tau.right)


def conj(*taus: Pacing) -> Pacing:
    out = taus[0]
    for t in taus[1:]:
        out = And(out, t)
    return out


def disj(*taus: Pacing) -> Pacing:
    out = taus[0]
    for t in taus[1:]:
        out = Or(out, t)
    return out


# ---------------------------------------------------------------------------
# Equations and specifications
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Equation:
    target: str
    pacing: Pacing
    body: Expr
    span: Optional[SourceSpan] = _span_field()


@dataclass(frozen=True)
class Specification:
    inputs: tuple = ()
    equations: tuple = ()
    input_spans: tuple = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "equations", tuple(self.equations))

    @property
    def outputs(self) -> tuple:
        return tuple(eq.target for eq in self.equations)

    @property
    def streams(self) -> tuple:
        """Declared inputs followed by equation targets, in declaration order."""
        seen = []
        for name in self.inputs + self.outputs:
            if name not in seen:
                seen.append(name)
        return tuple(seen)

    def kind_of(self, name: str) -> Optional[Kind]:
        if name in self.inputs:
            return Kind.INPUT
        if name in self.outputs:
            return Kind.OUTPUT
        return None

    def equation(self, target: str) -> Equation:
        for eq in self.equations:
            if eq.target == target:
                return eq
        raise KeyError(target)

    def with_equations(self, equations: Iterable[Equation]) -> "Specification":
        return Specification(self.inputs, tuple(equations), self.input_spans)


class WFKind(enum.Enum):
    DUPLICATE_TARGET = "DuplicateTarget"
    DUPLICATE_INPUT = "DuplicateInput"
    NAME_COLLISION = "NameCollision"
    UNDECLARED_VARIABLE = "UndeclaredVariable"
    PACING_ATOM_NOT_INPUT = "PacingAtomNotInput"
    INVALID_NAME = "InvalidName"


@dataclass(frozen=True)
class WellFormednessError:
    kind: WFKind
    name: str
    span: Optional[SourceSpan] = field(default=None, compare=False)

    def __str__(self) -> str:
        messages = {
            WFKind.DUPLICATE_TARGET: "output '{}' is defined by more than one equation",
            WFKind.DUPLICATE_INPUT: "input '{}' is declared more than once",
            WFKind.NAME_COLLISION: "'{}' is declared both as input and as output",
            WFKind.UNDECLARED_VARIABLE: "undeclared stream '{}'",
            WFKind.PACING_ATOM_NOT_INPUT: "pacing atom '{}' is not an input stream",
            WFKind.INVALID_NAME: "invalid stream name '{}'",
        }
        return messages[self.kind].format(self.name)


def _pacing_atoms_with_spans(tau: Pacing):
    if isinstance(tau, Atom):
        yield tau
    elif isinstance(tau, (And, Or)):
        yield from _pacing_atoms_with_spans(tau.left)
        yield from _pacing_atoms_with_spans(tau.right)


def validate_spec(spec: Specification) -> list:
    """Return every well-formedness violation of ``spec`` (empty list if valid)."""
    errors: list = []
    inputs = set()
    for i, name in enumerate(spec.inputs):
        span = spec.input_spans[i] if i < len(spec.input_spans) else None
        if not IDENT_RE.match(name):
            errors.append(WellFormednessError(WFKind.INVALID_NAME, name, span))
        if name in inputs:
            errors.append(WellFormednessError(WFKind.DUPLICATE_INPUT, name, span))
        inputs.add(name)

    outputs = set()
    for eq in spec.equations:
        if not IDENT_RE.match(eq.target):
            errors.append(WellFormednessError(WFKind.INVALID_NAME, eq.target, eq.span))
        if eq.target in inputs:
            errors.append(WellFormednessError(WFKind.NAME_COLLISION, eq.target, eq.span))
        elif eq.target in outputs:
            errors.append(WellFormednessError(WFKind.DUPLICATE_TARGET, eq.target, eq.span))
        outputs.add(eq.target)

    declared = inputs | outputs
    for eq in spec.equations:
        for atom in _pacing_atoms_with_spans(eq.pacing):
            if atom.name not in inputs:
                kind = WFKind.PACING_ATOM_NOT_INPUT if atom.name in outputs else WFKind.UNDECLARED_VARIABLE
                errors.append(WellFormednessError(kind, atom.name, atom.span or eq.span))
        for node in iter_accesses(eq.body):
            name = access_target(node)
            if name not in declared:
                errors.append(WellFormednessError(WFKind.UNDECLARED_VARIABLE, name, node.span or eq.span))
    return errors


# ---------------------------------------------------------------------------
# Traces
# ---------------------------------------------------------------------------


class HorizonMismatch(ValueError):
    pass


@dataclass(frozen=True)
class StreamTrace:
    """A finite prefix ``0..horizon-1`` of a stream map."""

    columns: Mapping[str, tuple]
    horizon: int = -1

    def __post_init__(self):
        cols = {name: tuple(col) for name, col in self.columns.items()}
        horizon = self.horizon
        if horizon < 0:
            lengths = {len(c) for c in cols.values()}
            if len(lengths) > 1:
                raise HorizonMismatch(f"columns have different lengths: {sorted(lengths)}")
            horizon = lengths.pop() if lengths else 0
        for name, col in cols.items():
            if len(col) != horizon:
                raise HorizonMismatch(f"column '{name}' has length {len(col)}, expected {horizon}")
            for cell in col:
                if cell is not None and (type(cell) is not int):
                    raise TypeError(f"column '{name}' holds non-integer cell {cell!r}")
        object.__setattr__(self, "columns", cols)
        object.__setattr__(self, "horizon", horizon)

    def __getitem__(self, name: str) -> tuple:
        return self.columns[name]

    def __contains__(self, name: str) -> bool:
        return name in self.columns

    @property
    def domain(self) -> frozenset:
        return frozenset(self.columns)

    def row(self, n: int) -> dict:
        return {name: col[n] for name, col in self.columns.items()}

    def presence(self, n: int, names: Optional[Iterable[str]] = None) -> dict:
        names = self.columns if names is None else names
        return {name: self.columns[name][n] is not None for name in names}

    def restrict(self, names: Iterable[str]) -> "StreamTrace":
        keep = set(names)
        return StreamTrace({k: v for k, v in self.columns.items() if k in keep}, self.horizon)

    def present_times(self, name: str) -> set:
        return {n for n, cell in enumerate(self.columns[name]) if cell is not None}

    @classmethod
    def from_presence(cls, horizon: int, present: Mapping[str, Iterable[int]], value: int = 1) -> "StreamTrace":
        cols = {}
        for name, times in present.items():
            times = set(times)
            cols[name] = tuple(value if n in times else None for n in range(horizon))
        return cls(cols, horizon)


def join_traces(a: StreamTrace, b: StreamTrace) -> StreamTrace:
    """Left-biased union of two stream maps."""
    if a.horizon != b.horizon:
        raise HorizonMismatch(f"cannot join traces of horizon {a.horizon} and {b.horizon}")
    cols = dict(a.columns)
    for name, col in b.columns.items():
        cols.setdefault(name, col)
    return StreamTrace(cols, a.horizon)


def singleton(name: str, column: Sequence[OptValue]) -> StreamTrace:
    return StreamTrace({name: tuple(column)})
