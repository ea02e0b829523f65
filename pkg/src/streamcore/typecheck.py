"""Pacing type checking.

Two systems are provided.  ``V1`` processes equations in order and lets a body
access only inputs and previously checked outputs.  ``V2`` additionally lets
an equation read its own previous value through ``x.prev(or: d)``.

With ``reorder=True`` the equations are first sorted along their access
dependencies.  Each rule premise only asks whether an accessed output is
already bound and what pacing it was annotated with, so a specification is
well-typed under some permutation iff it is well-typed in dependency order.
"""

from __future__ import annotations

import enum
import heapq
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Optional

from .model import (
    Atom,
    BinOp,
    Const,
    Expr,
    Hold,
    Not,
    Pacing,
    Prev,
    SourceSpan,
    Specification,
    Var,
    access_target,
    iter_accesses,
)
from .pacing import counterexample, format_valuation


class Mode(enum.Enum):
    V1 = "v1"
    V2 = "v2"


class ErrorKind(enum.Enum):
    UNBOUND_OUTPUT = "UnboundOutput"
    SELF_ACCESS_FORBIDDEN = "SelfAccessForbidden"
    REFINEMENT_FAILURE = "RefinementFailure"
    DEPENDENCY_CYCLE = "DependencyCycle"
    DUPLICATE_EQUATION = "DuplicateEquation"


@dataclass(frozen=True)
class PacingTypeError:
    kind: ErrorKind
    stream: str  # the equation being checked
    rule: str
    accessed: Optional[str] = None
    path: tuple = ()
    must: Optional[Pacing] = None
    can: Optional[Pacing] = None
    witness: Optional[dict] = field(default=None, compare=False)
    cycle: tuple = ()
    span: Optional[SourceSpan] = field(default=None, compare=False)

    def message(self) -> str:
        from .parser import format_pacing

        if self.kind is ErrorKind.REFINEMENT_FAILURE:
            return (
                f"access {self.stream} -> {self.accessed}: pacing {format_pacing(self.must)} ⊭ "
                f"{format_pacing(self.can)}; witness {format_valuation(self.witness)} "
                f"requires a value of '{self.accessed}' that is not available"
            )
        if self.kind is ErrorKind.UNBOUND_OUTPUT:
            return f"access {self.stream} -> {self.accessed}: output '{self.accessed}' is not bound at this point"
        if self.kind is ErrorKind.SELF_ACCESS_FORBIDDEN:
            return f"'{self.stream}' may only access itself through prev"
        if self.kind is ErrorKind.DEPENDENCY_CYCLE:
            return "cyclic dependency between " + ", ".join(self.cycle)
        return f"output '{self.stream}' is defined more than once"

    def __str__(self) -> str:
        return f"{self.kind.value}[{self.rule}]: {self.message()}"


class TypingContext(Mapping):
    """Immutable map from output names to their annotated pacing."""

    def __init__(self, bindings: Optional[Mapping[str, Pacing]] = None):
        self._bindings = dict(bindings or {})

    def __getitem__(self, name: str) -> Pacing:
        return self._bindings[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self._bindings)

    def __len__(self) -> int:
        return len(self._bindings)

    def extend(self, name: str, tau: Pacing) -> "TypingContext":
        if name in self._bindings:
            raise KeyError(f"'{name}' is already bound")
        out = dict(self._bindings)
        out[name] = tau
        return TypingContext(out)

    def __repr__(self) -> str:
        return f"TypingContext({self._bindings!r})"


@dataclass
class TypingReport:
    mode: Mode
    reordered: bool
    order: tuple
    gamma: TypingContext
    errors: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def __bool__(self) -> bool:
        return self.ok


# ---------------------------------------------------------------------------
# Expressions
# ---------------------------------------------------------------------------


def _sync_check(gamma, inputs, self_name, node, y, tau_must, path, rule_sfx, sr, out):
    prefix = "Sr-" if sr else ""
    if y in inputs:
        rule = f"{prefix}{rule_sfx}In"
        can: Pacing = Atom(y)
    elif y == self_name and sr:
        out.append(PacingTypeError(ErrorKind.SELF_ACCESS_FORBIDDEN, self_name, f"{prefix}{rule_sfx}Out",
                                   accessed=y, path=path, span=node.span))
        return
    elif y in gamma:
        rule = f"{prefix}{rule_sfx}Out"
        can = gamma[y]
    else:
        out.append(PacingTypeError(ErrorKind.UNBOUND_OUTPUT, self_name, f"{prefix}{rule_sfx}Out",
                                   accessed=y, path=path, span=node.span))
        return
    witness = counterexample(tau_must, can)
    if witness is not None:
        out.append(PacingTypeError(ErrorKind.REFINEMENT_FAILURE, self_name, rule, accessed=y, path=path,
                                   must=tau_must, can=can, witness=witness, span=node.span))


def _check(gamma, inputs, self_name, e: Expr, tau_must, path, sr: bool, out: list) -> None:
    prefix = "Sr-" if sr else ""
    if isinstance(e, Const):
        return
    if isinstance(e, BinOp):
        _check(gamma, inputs, self_name, e.left, tau_must, path + ("left",), sr, out)
        _check(gamma, inputs, self_name, e.right, tau_must, path + ("right",), sr, out)
        return
    if isinstance(e, Not):
        _check(gamma, inputs, self_name, e.operand, tau_must, path + ("operand",), sr, out)
        return
    if isinstance(e, Var):
        _sync_check(gamma, inputs, self_name, e, e.name, tau_must, path, "Direct", sr, out)
        return
    if isinstance(e, Prev):
        if sr and e.target == self_name:
            pass  # rule Self: only the default is checked
        else:
            _sync_check(gamma, inputs, self_name, e, e.target, tau_must, path, "Prev", sr, out)
        _check(gamma, inputs, self_name, e.default, tau_must, path + ("default",), sr, out)
        return
    if isinstance(e, Hold):
        y = e.target
        if y not in inputs:
            if sr and y == self_name:
                out.append(PacingTypeError(ErrorKind.SELF_ACCESS_FORBIDDEN, self_name, f"{prefix}HoldOut",
                                           accessed=y, path=path, span=e.span))
            elif y not in gamma:
                out.append(PacingTypeError(ErrorKind.UNBOUND_OUTPUT, self_name, f"{prefix}HoldOut",
                                           accessed=y, path=path, span=e.span))
        _check(gamma, inputs, self_name, e.default, tau_must, path + ("default",), sr, out)
        return
    raise TypeError(f"not an expression: {e!r}")


def check_expr_v1(gamma: Mapping[str, Pacing], e: Expr, tau_must: Pacing, inputs=frozenset(),
                  stream: str = "") -> list:
    """Errors preventing ``gamma |- e : tau_must`` (empty when derivable)."""
    out: list = []
    _check(gamma, frozenset(inputs), stream, e, tau_must, (), False, out)
    return out


def check_expr_v2(gamma: Mapping[str, Pacing], self_name: str, e: Expr, tau_must: Pacing,
                  inputs=frozenset()) -> list:
    """Errors preventing ``gamma |-^self e : tau_must`` (empty when derivable)."""
    out: list = []
    _check(gamma, frozenset(inputs), self_name, e, tau_must, (), True, out)
    return out


# ---------------------------------------------------------------------------
# Equation ordering
# ---------------------------------------------------------------------------


class DependencyCycle(Exception):
    def __init__(self, components: list, partial_order: tuple):
        self.components = components  # list of tuples of stream names
        self.partial_order = partial_order
        names = "; ".join(", ".join(c) for c in components)
        super().__init__(f"dependency cycle: {names}")


def dependency_graph(spec: Specification) -> dict:
    """``deps[x]``: outputs (other than ``x``) accessed anywhere in ``x``'s body."""
    outputs = set(spec.outputs)
    deps: dict = {}
    for eq in spec.equations:
        targets = {access_target(a) for a in iter_accesses(eq.body)}
        deps.setdefault(eq.target, set()).update(t for t in targets if t in outputs and t != eq.target)
    return deps


def _components(nodes: set, deps: dict) -> list:
    def reach(start):
        seen, stack = set(), [start]
        while stack:
            v = stack.pop()
            for w in deps.get(v, ()):
                if w in nodes and w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen

    reach_of = {v: reach(v) for v in nodes}
    comps, done = [], set()
    for v in sorted(nodes):
        if v in done or v not in reach_of[v]:
            continue
        comp = {u for u in nodes if u in reach_of[v] and v in reach_of[u]}
        done |= comp
        comps.append(tuple(sorted(comp)))
    return comps


def order_equations(spec: Specification) -> tuple:
    """Equation indices in a dependency-respecting order, preferring source order.

    Raises :class:`DependencyCycle` when no such order exists.
    """
    index = {eq.target: i for i, eq in enumerate(spec.equations)}
    deps = dependency_graph(spec)
    users: dict = {name: set() for name in index}
    pending = {}
    for name, ds in deps.items():
        pending[name] = len(ds)
        for d in ds:
            users[d].add(name)

    ready = [index[name] for name, k in pending.items() if k == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        i = heapq.heappop(ready)
        order.append(i)
        for u in users[spec.equations[i].target]:
            pending[u] -= 1
            if pending[u] == 0:
                heapq.heappush(ready, index[u])

    if len(order) < len(spec.equations):
        left = {eq.target for i, eq in enumerate(spec.equations) if i not in set(order)}
        remaining = tuple(i for i in range(len(spec.equations)) if i not in set(order))
        raise DependencyCycle(_components(left, deps), tuple(order) + remaining)
    return tuple(order)


# ---------------------------------------------------------------------------
# Specifications
# ---------------------------------------------------------------------------


def check_spec(spec: Specification, mode: Mode = Mode.V2, reorder: bool = True) -> TypingReport:
    errors: list = []
    if reorder:
        try:
            order = order_equations(spec)
        except DependencyCycle as cyc:
            order = cyc.partial_order
            for comp in cyc.components:
                errors.append(PacingTypeError(ErrorKind.DEPENDENCY_CYCLE, comp[0], "Permutation", cycle=comp,
                                              span=spec.equation(comp[0]).span))
    else:
        order = tuple(range(len(spec.equations)))

    inputs = frozenset(spec.inputs)
    sr = mode is Mode.V2
    eq_rule = "Sr-Eq" if sr else "Equation"
    gamma = TypingContext()
    for i in order:
        eq = spec.equations[i]
        if eq.target in gamma:
            errors.append(PacingTypeError(ErrorKind.DUPLICATE_EQUATION, eq.target, eq_rule, span=eq.span))
            continue
        if sr:
            errors.extend(check_expr_v2(gamma, eq.target, eq.body, eq.pacing, inputs))
        else:
            errors.extend(check_expr_v1(gamma, eq.body, eq.pacing, inputs, stream=eq.target))
        # bind even after a failure so later equations report their own errors
        gamma = gamma.extend(eq.target, eq.pacing)
    return TypingReport(mode, reorder, tuple(order), gamma, errors)
