"""Independent oracles and random generators for the property suites.

The oracles here deliberately avoid the code paths they check:

* :func:`entails_bruteforce` enumerates valuations; :func:`streamcore.pacing.entails`
  works on DNF clauses.
* :func:`check_spec_all_permutations` tries every equation order;
  :func:`streamcore.typecheck.check_spec` sorts by dependencies.
* :func:`whole_stream_construct` builds each output column over the whole
  horizon with the memory-cell semantics; the evaluator steps through time.

Generated specifications are kept clear of integer overflow and division by
zero for traces drawn from :data:`VALUE_RANGE`, so that a failing property
always points at pacing rather than arithmetic.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, replace
from typing import Optional

from .model import (
    FAIL,
    TOP,
    And,
    Atom,
    BinOp,
    Const,
    Equation,
    Expr,
    Hold,
    Not,
    Op,
    Or,
    Pacing,
    Prev,
    Specification,
    StreamTrace,
    Var,
    atoms,
    children,
    join_traces,
    singleton,
    access_target,
)
from .pacing import denotation_times, fires
from .semantics import eval_memcell, last_tilde
from .typecheck import DependencyCycle, Mode, TypingReport, check_spec, dependency_graph, order_equations

VALUE_RANGE = (-9, 9)
MAGNITUDE_LIMIT = 2**62
SELF_PREV_RATE = 0.3


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    num_inputs: int = 3
    num_equations: int = 5
    max_expr_depth: int = 3
    horizon: int = 20
    presence_density: float = 0.5
    mode: Mode = Mode.V2

    def __post_init__(self):
        if not 0 <= self.num_inputs <= 4:
            raise ValueError("num_inputs must be in 0..4")
        if not 0 <= self.num_equations <= 8:
            raise ValueError("num_equations must be in 0..8")
        if not 0 <= self.max_expr_depth <= 4:
            raise ValueError("max_expr_depth must be in 0..4")
        if not 0 <= self.horizon <= 50:
            raise ValueError("horizon must be in 0..50")
        if not 0.0 <= self.presence_density <= 1.0:
            raise ValueError("presence_density must be in [0, 1]")


# ---------------------------------------------------------------------------
# Brute-force oracles
# ---------------------------------------------------------------------------


def entails_bruteforce(t1: Pacing, t2: Pacing) -> bool:
    names = sorted(atoms(t1) | atoms(t2))
    for bits in itertools.product((False, True), repeat=len(names)):
        row = dict(zip(names, bits))
        if fires(t1, row) and not fires(t2, row):
            return False
    return True


def check_spec_all_permutations(spec: Specification, mode: Mode) -> bool:
    if len(spec.equations) > 6:
        raise ValueError("refusing to enumerate more than 6! equation orders")
    return any(
        check_spec(spec.with_equations(perm), mode, reorder=False).ok
        for perm in itertools.permutations(spec.equations)
    )


class OracleFailure(AssertionError):
    pass


def whole_stream_construct(spec: Specification, inputs: StreamTrace, report: TypingReport) -> StreamTrace:
    """Build each output column in checking order with the memory-cell semantics."""
    if report.errors:
        raise ValueError("whole_stream_construct needs a well-typed specification")
    horizon = inputs.horizon
    rho = inputs.restrict(spec.inputs)
    input_part = rho
    for i in report.order:
        eq = spec.equations[i]
        paced = denotation_times(eq.pacing, input_part)
        column: list = []
        for n in range(horizon):
            if n in paced:
                prefix = column + [0] * (horizon - n)
                v = eval_memcell(eq.body, rho, n, eq.target, last_tilde(prefix, n - 1))
                if v is FAIL:
                    raise OracleFailure(f"w_e failed for '{eq.target}' at time {n}")
                column.append(v)
            else:
                column.append(None)
        rho = join_traces(rho, singleton(eq.target, column))
    return StreamTrace({name: rho[name] for name in spec.streams}, horizon)


# ---------------------------------------------------------------------------
# Traces
# ---------------------------------------------------------------------------


def random_stream(rng: random.Random, horizon: int, density: float) -> tuple:
    lo, hi = VALUE_RANGE
    return tuple(rng.randint(lo, hi) if rng.random() < density else None for _ in range(horizon))


def gen_trace(cfg: GenConfig, inputs) -> StreamTrace:
    rng = random.Random(f"{cfg.seed}:trace")
    cols = {name: random_stream(rng, cfg.horizon, cfg.presence_density) for name in inputs}
    return StreamTrace(cols, cfg.horizon)


# ---------------------------------------------------------------------------
# Pacing formulas
# ---------------------------------------------------------------------------


def random_pacing(rng: random.Random, names, max_connectives: int = 3, top_rate: float = 0.1) -> Pacing:
    names = list(names)
    if not names:
        return TOP

    def build(k: int) -> Pacing:
        if k == 0:
            return TOP if rng.random() < top_rate else Atom(rng.choice(names))
        left = rng.randint(0, k - 1)
        cls = And if rng.random() < 0.5 else Or
        return cls(build(left), build(k - 1 - left))

    return build(rng.randint(0, max_connectives))


def all_pacings(names, max_connectives: int, with_top: bool = True) -> list:
    """Every formula tree over ``names`` (plus Top) with at most ``max_connectives`` nodes."""
    leaves = [Atom(n) for n in names] + ([TOP] if with_top else [])
    by_size = {0: leaves}
    for k in range(1, max_connectives + 1):
        trees = []
        for left in range(k):
            for l, r in itertools.product(by_size[left], by_size[k - 1 - left]):
                trees.append(And(l, r))
                trees.append(Or(l, r))
        by_size[k] = trees
    return by_size


# ---------------------------------------------------------------------------
# Well-typed specification generator
# ---------------------------------------------------------------------------


class _Unbounded(Exception):
    pass


def _bound(e: Expr, stream_bound: dict, self_name: str, acc: list) -> tuple:
    """``(a, b)`` with ``|value| <= a * S + b``, ``S`` bounding the stream's own past values.

    ``acc`` collects the componentwise maximum over all sub-expressions.
    """
    if isinstance(e, Const):
        out = (0, abs(e.value))
    elif isinstance(e, Var):
        out = (0, stream_bound[e.name])
    elif isinstance(e, (Prev, Hold)):
        d = _bound(e.default, stream_bound, self_name, acc)
        own = (1, 0) if e.target == self_name else (0, stream_bound[e.target])
        out = (max(own[0], d[0]), max(own[1], d[1]))
    elif isinstance(e, Not):
        _bound(e.operand, stream_bound, self_name, acc)
        out = (0, 1)
    elif isinstance(e, BinOp):
        l = _bound(e.left, stream_bound, self_name, acc)
        r = _bound(e.right, stream_bound, self_name, acc)
        if e.op in (Op.ADD, Op.SUB):
            out = (l[0] + r[0], l[1] + r[1])
        elif e.op is Op.MUL:
            if l[0] and r[0]:
                raise _Unbounded()
            out = (l[0] * r[1] + r[0] * l[1], l[1] * r[1])
        elif e.op is Op.DIV:
            if not (isinstance(e.right, Const) and e.right.value != 0):
                raise _Unbounded()
            out = l
        else:
            out = (0, 1)
    else:
        raise TypeError(e)
    acc[0] = max(acc[0], out[0])
    acc[1] = max(acc[1], out[1])
    return out


def stream_magnitude(e: Expr, stream_bound: dict, self_name: str, horizon: int) -> Optional[int]:
    """Bound on every intermediate value of ``e``'s stream over ``horizon`` steps, or None."""
    acc = [0, 0]
    try:
        a, b = _bound(e, stream_bound, self_name, acc)
    except _Unbounded:
        return None
    s = 0
    for _ in range(horizon):
        s = max(s, a * s + b)
        if s > MAGNITUDE_LIMIT:
            return None
    worst = max(s, acc[0] * s + acc[1])
    return worst if worst <= MAGNITUDE_LIMIT else None


class _ExprGen:
    def __init__(self, rng: random.Random, inputs, gamma: dict, self_name: str, mode: Mode):
        self.rng = rng
        self.inputs = list(inputs)
        self.gamma = gamma
        self.self_name = self_name
        self.mode = mode

    def sync_targets(self, tau: Pacing) -> list:
        ins = [y for y in self.inputs if entails_bruteforce(tau, Atom(y))]
        outs = [y for y, t in self.gamma.items() if entails_bruteforce(tau, t)]
        return ins + outs

    def const(self) -> Const:
        lo, hi = VALUE_RANGE
        return Const(self.rng.randint(lo, hi))

    def access(self, tau: Pacing, depth: int) -> Expr:
        rng = self.rng
        if self.mode is Mode.V2 and rng.random() < SELF_PREV_RATE:
            return Prev(self.self_name, self.expr(tau, depth - 1))
        sync = self.sync_targets(tau)
        anything = self.inputs + list(self.gamma)
        kinds = []
        if sync:
            kinds += ["var", "var", "prev"]
        if anything:
            kinds += ["hold"]
        if not kinds:
            return self.const()
        kind = rng.choice(kinds)
        if kind == "var":
            return Var(rng.choice(sync))
        if kind == "prev":
            return Prev(rng.choice(sync), self.expr(tau, depth - 1))
        return Hold(rng.choice(anything), self.expr(tau, depth - 1))

    def expr(self, tau: Pacing, depth: int) -> Expr:
        rng = self.rng
        depth = max(depth, 0)
        r = rng.random()
        if depth == 0 or r < 0.25:
            return self.const() if rng.random() < 0.3 else self.access(tau, depth)
        if r < 0.35:
            return Not(self.expr(tau, depth - 1))
        if r < 0.5:
            return self.access(tau, depth)
        op = rng.choice([Op.ADD, Op.ADD, Op.SUB, Op.SUB, Op.MUL, Op.DIV, Op.EQ, Op.LT, Op.GT, Op.AND, Op.OR])
        left = self.expr(tau, depth - 1)
        if op is Op.DIV:
            right: Expr = Const(rng.choice([-3, -2, 2, 3]))
        elif op is Op.MUL:
            right = Const(rng.choice([-2, -1, 0, 1, 2]))
        else:
            right = self.expr(tau, depth - 1)
        if rng.random() < 0.5 and op not in (Op.DIV,):
            left, right = right, left
        return BinOp(op, left, right)


def _pick_pacing(rng: random.Random, inputs, gamma: dict) -> Pacing:
    roll = rng.random()
    if gamma and roll < 0.25:
        return rng.choice(list(gamma.values()))
    if gamma and inputs and roll < 0.4:
        return And(rng.choice(list(gamma.values())), Atom(rng.choice(list(inputs))))
    return random_pacing(rng, inputs, max_connectives=3)


def gen_well_typed_spec(cfg: GenConfig) -> Specification:
    """A random specification accepted by ``check_spec(., cfg.mode, reorder=False)``."""
    rng = random.Random(f"{cfg.seed}:spec")
    inputs = tuple(f"i{k}" for k in range(cfg.num_inputs))
    stream_bound = {name: max(abs(v) for v in VALUE_RANGE) for name in inputs}
    gamma: dict = {}
    equations = []
    for j in range(cfg.num_equations):
        name = f"o{j}"
        tau = _pick_pacing(rng, inputs, gamma)
        gen = _ExprGen(rng, inputs, gamma, name, cfg.mode)
        for _ in range(30):
            body = gen.expr(tau, rng.randint(0, cfg.max_expr_depth))
            magnitude = stream_magnitude(body, stream_bound, name, max(cfg.horizon, 1))
            if magnitude is not None:
                break
        else:
            body = gen.const()
            magnitude = abs(body.value)
        stream_bound[name] = max(magnitude, 1)
        equations.append(Equation(name, tau, body))
        gamma[name] = tau
    return Specification(inputs, tuple(equations))


# ---------------------------------------------------------------------------
# Random expressions over arbitrary maps (for semantics lemmas)
# ---------------------------------------------------------------------------


def random_expr(rng: random.Random, names, depth: int) -> Expr:
    names = list(names)
    if depth <= 0 or rng.random() < 0.25:
        if not names or rng.random() < 0.3:
            return Const(rng.randint(-5, 5))
        kind = rng.choice(["var", "prev", "hold"])
        y = rng.choice(names)
        if kind == "var":
            return Var(y)
        cls = Prev if kind == "prev" else Hold
        return cls(y, random_expr(rng, names, depth - 1))
    r = rng.random()
    if r < 0.1:
        return Not(random_expr(rng, names, depth - 1))
    if r < 0.4 and names:
        cls = rng.choice([Prev, Hold])
        return cls(rng.choice(names), random_expr(rng, names, depth - 1))
    op = rng.choice(list(Op))
    return BinOp(op, random_expr(rng, names, depth - 1), random_expr(rng, names, depth - 1))


# ---------------------------------------------------------------------------
# Mutations producing ill-typed specifications
# ---------------------------------------------------------------------------


def iter_paths(e: Expr, path: tuple = ()):
    yield path, e
    for i, child in enumerate(children(e)):
        yield from iter_paths(child, path + (i,))


def replace_at(e: Expr, path: tuple, new: Expr) -> Expr:
    if not path:
        return new
    i, rest = path[0], path[1:]
    if isinstance(e, (Prev, Hold)):
        return replace(e, default=replace_at(e.default, rest, new))
    if isinstance(e, BinOp):
        if i == 0:
            return replace(e, left=replace_at(e.left, rest, new))
        return replace(e, right=replace_at(e.right, rest, new))
    if isinstance(e, Not):
        return replace(e, operand=replace_at(e.operand, rest, new))
    raise ValueError("path leads through a leaf")


@dataclass(frozen=True)
class Mutant:
    spec: Specification
    kind: str
    reorder: bool  # the check_spec setting under which it must be rejected


def _sync_accesses(eq: Equation, spec: Specification, mode: Mode) -> list:
    out = []
    for path, node in iter_paths(eq.body):
        if isinstance(node, (Var, Prev)):
            y = access_target(node)
            if y == eq.target:
                continue
            out.append((path, node))
    return out


def _can(spec: Specification, y: str) -> Pacing:
    return Atom(y) if y in spec.inputs else spec.equation(y).pacing


def _weaken_pacing(rng, spec, mode) -> Optional[Mutant]:
    candidates = []
    for k, eq in enumerate(spec.equations):
        for path, node in _sync_accesses(eq, spec, mode):
            candidates.append((k, node))
    rng.shuffle(candidates)
    for k, node in candidates:
        eq = spec.equations[k]
        can = _can(spec, access_target(node))
        options = [TOP] + [Or(eq.pacing, Atom(z)) for z in spec.inputs] + [Atom(z) for z in spec.inputs]
        options = [t for t in options if not entails_bruteforce(t, can)]
        if options:
            new_eq = replace(eq, pacing=rng.choice(options))
            eqs = list(spec.equations)
            eqs[k] = new_eq
            return Mutant(spec.with_equations(eqs), "weaken_pacing", True)
    return None


def _retarget(rng, spec, mode) -> Optional[Mutant]:
    candidates = []
    for k, eq in enumerate(spec.equations):
        for path, node in _sync_accesses(eq, spec, mode):
            candidates.append((k, path, node))
    rng.shuffle(candidates)
    for k, path, node in candidates:
        eq = spec.equations[k]
        others = [z for z in spec.inputs + spec.outputs[:k] if z != access_target(node)]
        others = [z for z in others if not entails_bruteforce(eq.pacing, _can(spec, z))]
        if others:
            z = rng.choice(others)
            new_node = replace(node, name=z) if isinstance(node, Var) else replace(node, target=z)
            eqs = list(spec.equations)
            eqs[k] = replace(eq, body=replace_at(eq.body, path, new_node))
            return Mutant(spec.with_equations(eqs), "retarget", True)
    return None


def _self_access(rng, spec, mode) -> Optional[Mutant]:
    if not spec.equations:
        return None
    k = rng.randrange(len(spec.equations))
    eq = spec.equations[k]
    paths = [p for p, _ in iter_paths(eq.body)]
    path = rng.choice(paths)
    new_node = Var(eq.target) if rng.random() < 0.5 else Hold(eq.target, Const(0))
    eqs = list(spec.equations)
    eqs[k] = replace(eq, body=replace_at(eq.body, path, new_node))
    return Mutant(spec.with_equations(eqs), "self_access", True)


def _forward_cycle(rng, spec, mode) -> Optional[Mutant]:
    deps = dependency_graph(spec)
    pairs = []
    for x in spec.outputs:
        # outputs that (transitively) depend on x
        for y in spec.outputs:
            if y != x and _reaches(deps, y, x):
                pairs.append((x, y))
    if not pairs:
        return None
    x, y = rng.choice(pairs)
    k = spec.outputs.index(x)
    eq = spec.equations[k]
    path = rng.choice([p for p, _ in iter_paths(eq.body)])
    eqs = list(spec.equations)
    eqs[k] = replace(eq, body=replace_at(eq.body, path, Hold(y, Const(0))))
    return Mutant(spec.with_equations(eqs), "cycle", True)


def _reaches(deps: dict, start: str, goal: str) -> bool:
    seen, stack = set(), [start]
    while stack:
        v = stack.pop()
        if v == goal:
            return True
        for w in deps.get(v, ()):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return False


def _reverse(rng, spec, mode) -> Optional[Mutant]:
    deps = dependency_graph(spec)
    if not any(deps.values()):
        return None
    return Mutant(spec.with_equations(reversed(spec.equations)), "reverse_order", False)


MUTATORS = {
    "weaken_pacing": _weaken_pacing,
    "retarget": _retarget,
    "self_access": _self_access,
    "cycle": _forward_cycle,
    "reverse_order": _reverse,
}


def mutate_spec(spec: Specification, mode: Mode, rng: random.Random, kinds=None) -> Optional[Mutant]:
    """Apply one randomly chosen mutation that makes ``spec`` ill-typed, or None."""
    kinds = list(kinds or MUTATORS)
    rng.shuffle(kinds)
    for kind in kinds:
        mutant = MUTATORS[kind](rng, spec, mode)
        if mutant is not None:
            return mutant
    return None


def shuffled(spec: Specification, rng: random.Random) -> Specification:
    eqs = list(spec.equations)
    rng.shuffle(eqs)
    return spec.with_equations(eqs)


def evaluation_order(spec: Specification) -> tuple:
    try:
        return order_equations(spec)
    except DependencyCycle as cyc:
        return cyc.partial_order
