"""Acceptance criteria 1-7.  A summary line per criterion is printed at the end of the run."""

import itertools
import random
import time

import pytest

from streamcore.evaluator import EvaluationFailure, run, run_unchecked
from streamcore.model import FAIL, Atom, RuntimeArithmeticError, StreamTrace, join_traces
from streamcore.pacing import entails
from streamcore.semantics import eval_memcell, eval_partial, eval_total, is_model, last_tilde
from streamcore.testkit import (
    GenConfig,
    all_pacings,
    check_spec_all_permutations,
    entails_bruteforce,
    gen_trace,
    gen_well_typed_spec,
    mutate_spec,
    random_expr,
    random_pacing,
    random_stream,
    shuffled,
    whole_stream_construct,
)
from streamcore.typecheck import ErrorKind, Mode, check_spec

from .conftest import load

DENSITIES = (0.0, 0.3, 0.7, 1.0)


def _present(col):
    return {n for n, v in enumerate(col) if v is not None}


# ---------------------------------------------------------------------------
# 1. verdict table for the example listings
# ---------------------------------------------------------------------------

VERDICTS = [
    # file, mode, reorder, accepted
    ("listing1.sc", Mode.V1, True, True),
    ("listing1.sc", Mode.V2, True, True),
    ("sync.sc", Mode.V2, True, True),
    ("hold.sc", Mode.V2, True, True),
    ("disjunctive.sc", Mode.V2, True, True),
    ("invalid.sc", Mode.V1, True, False),
    ("invalid.sc", Mode.V2, True, False),
    ("ordering_wrong.sc", Mode.V2, False, False),
    ("ordering_wrong.sc", Mode.V2, True, True),
    ("running_avg.sc", Mode.V1, True, False),
    ("running_avg.sc", Mode.V2, True, True),
]


@pytest.mark.criterion(1)
def test_c1_verdict_table():
    start = time.perf_counter()
    for name, mode, reorder, accepted in VERDICTS:
        report = check_spec(load(name), mode, reorder)
        assert report.ok is accepted, (name, mode, reorder)
    for mode in Mode:
        (err,) = check_spec(load("invalid.sc"), mode).errors
        assert err.kind is ErrorKind.REFINEMENT_FAILURE
        assert (err.must, err.can) == (Atom("a"), Atom("b"))
    assert time.perf_counter() - start < 1.0


# ---------------------------------------------------------------------------
# 2. timing patterns on the derived trace
# ---------------------------------------------------------------------------


@pytest.mark.criterion(2)
@pytest.mark.parametrize("name, expected", [
    ("sync.sc", {3}),
    ("hold.sc", {1, 3, 5}),
    ("disjunctive.sc", {1, 2, 3, 4, 5}),
])
def test_c2_presence_sets(async_trace, name, expected):
    assert _present(async_trace["battery_level"]) == {1, 3, 5}
    assert _present(async_trace["temperature"]) == {2, 3, 4}
    out = run(load(name), async_trace)
    assert _present(out["temp_warning"]) == expected


# ---------------------------------------------------------------------------
# 3. golden values through two code paths
# ---------------------------------------------------------------------------


@pytest.mark.criterion(3)
def test_c3_drain():
    spec = load("listing1.sc")
    trace = StreamTrace({"battery_level": (100, 98, 95)})
    for out in (run(spec, trace), whole_stream_construct(spec, trace, check_spec(spec))):
        assert out["drain"] == (0, 2, 3)


@pytest.mark.criterion(3)
def test_c3_running_average():
    spec = load("running_avg.sc")
    trace = StreamTrace({"i": (4, 6, 10)})
    for out in (run(spec, trace), whole_stream_construct(spec, trace, check_spec(spec))):
        assert out["count"] == (1, 2, 3)
        assert out["sum"] == (4, 10, 20)
        assert out["average"] == (4, 5, 6)


# ---------------------------------------------------------------------------
# 4. safety on generated well-typed specs (and 5c: online = whole-stream)
# ---------------------------------------------------------------------------


def safety_corpus(mode, count=500):
    rng = random.Random(f"safety:{mode.value}")
    for k in range(count):
        cfg = GenConfig(
            seed=rng.getrandbits(64),
            num_inputs=rng.randint(1, 4),
            num_equations=rng.randint(1, 8),
            max_expr_depth=rng.randint(0, 4),
            mode=mode,
        )
        spec = gen_well_typed_spec(cfg)
        for density in DENSITIES:
            tcfg = GenConfig(seed=cfg.seed, horizon=rng.randint(1, 50), presence_density=density, mode=mode)
            yield spec, gen_trace(tcfg, spec.inputs)


_CORPUS: dict = {}


def _corpus_results(mode):
    if mode not in _CORPUS:
        results = []
        start = time.perf_counter()
        for spec, trace in safety_corpus(mode):
            out = run(spec, trace, mode)  # raises EvaluationFailure on any Fail
            results.append((spec, trace, out))
        _CORPUS[mode] = (results, time.perf_counter() - start)
    return _CORPUS[mode]


@pytest.mark.criterion(4)
@pytest.mark.parametrize("mode", list(Mode))
def test_c4_safety(mode):
    start = time.perf_counter()
    results, build_time = _corpus_results(mode)
    assert len({id(spec) for spec, _, _ in results}) == 500
    for spec, trace, out in results:
        report = is_model(out, spec)
        assert report.is_model, (spec, report.violations)
    assert build_time + (time.perf_counter() - start) < 60.0


@pytest.mark.criterion(5)
@pytest.mark.parametrize("mode", list(Mode))
def test_c5_run_equals_whole_stream(mode):
    results, _ = _corpus_results(mode)
    for spec, trace, out in results:
        oracle = whole_stream_construct(spec, trace, check_spec(spec, mode))
        assert out == oracle
        assert is_model(oracle, spec).is_model


# ---------------------------------------------------------------------------
# 5. oracle equivalences
# ---------------------------------------------------------------------------


@pytest.mark.criterion(5)
def test_c5_entails_exhaustive():
    by_size = all_pacings(["a", "b", "c", "d"], 3)
    checked = 0
    for k1, k2 in itertools.product(range(4), repeat=2):
        if k1 + k2 > 3:
            continue
        for t1 in by_size[k1]:
            for t2 in by_size[k2]:
                assert entails(t1, t2) == entails_bruteforce(t1, t2), (t1, t2)
                checked += 1
    assert checked > 300_000


@pytest.mark.criterion(5)
def test_c5_entails_random():
    rng = random.Random(2024)
    names = ["a", "b", "c", "d", "e", "f"]
    for _ in range(10_000):
        t1 = random_pacing(rng, names, max_connectives=6)
        t2 = random_pacing(rng, names, max_connectives=6)
        assert entails(t1, t2) == entails_bruteforce(t1, t2), (t1, t2)


@pytest.mark.criterion(5)
def test_c5_reorder_equals_permutations():
    rng = random.Random("perm")
    total = accepted = 0
    while total < 200:
        mode = Mode.V1 if total % 2 else Mode.V2
        cfg = GenConfig(seed=rng.getrandbits(32), num_equations=rng.randint(1, 5), mode=mode)
        spec = shuffled(gen_well_typed_spec(cfg), rng)
        if rng.random() < 0.5:
            m = mutate_spec(spec, mode, rng)
            if m is None:
                continue
            spec = shuffled(m.spec, rng)
        verdict = check_spec(spec, mode, reorder=True).ok
        assert verdict == check_spec_all_permutations(spec, mode), spec
        accepted += verdict
        total += 1
    assert 30 < accepted < 170  # both verdicts are exercised


# ---------------------------------------------------------------------------
# 6. semantics lemmas on random samples
# ---------------------------------------------------------------------------

LEMMA_NAMES = ["a", "b", "c", "x"]


def _eval(fn, *args):
    try:
        return fn(*args)
    except RuntimeArithmeticError:
        return "arith"


def _lemma_samples(seed, count=10_000):
    rng = random.Random(seed)
    for _ in range(count):
        horizon = rng.randint(1, 8)
        density = rng.choice(DENSITIES[1:])
        rho = StreamTrace({k: random_stream(rng, horizon, density) for k in LEMMA_NAMES}, horizon)
        e = random_expr(rng, LEMMA_NAMES, rng.randint(0, 4))
        n = rng.randrange(horizon)
        keep = [k for k in LEMMA_NAMES if rng.random() < 0.6]
        yield rng, e, rho, n, keep


@pytest.mark.criterion(6)
def test_c6_partial_total():
    defined = 0
    for _, e, rho, n, keep in _lemma_samples("pden"):
        partial = _eval(eval_partial, e, rho.restrict(keep), n)
        if partial is FAIL or partial == "arith":
            continue
        defined += 1
        assert partial == _eval(eval_total, e, rho, n), (e, rho, n, keep)
    assert defined > 2000


@pytest.mark.criterion(6)
def test_c6_memcell():
    defined = 0
    for rng, e, rho, n, keep in _lemma_samples("memcell"):
        w = list(rho["x"])
        if w[n] is None:
            w[n] = rng.randint(-9, 9)
        w = tuple(w)
        rest = rho.restrict([k for k in keep if k != "x"])
        got = _eval(eval_memcell, e, rest, n, "x", last_tilde(w, n - 1))
        if got is FAIL or got == "arith":
            continue
        defined += 1
        full = join_traces(join_traces(rest, StreamTrace({"x": w}, rho.horizon)), rho)
        assert got == _eval(eval_total, e, full, n), (e, rho, n, keep)
    assert defined > 2000


# ---------------------------------------------------------------------------
# 7. mutated specs are rejected, and rejections are not vacuous
# ---------------------------------------------------------------------------


def _mutants(count=200):
    rng = random.Random("mutants")
    out = []
    while len(out) < count:
        mode = Mode.V2 if len(out) % 2 == 0 else Mode.V1
        cfg = GenConfig(seed=rng.getrandbits(32), num_inputs=rng.randint(1, 4),
                        num_equations=rng.randint(1, 6), mode=mode)
        m = mutate_spec(gen_well_typed_spec(cfg), mode, rng)
        if m is not None:
            out.append((mode, m))
    return out


def _finds_fail(mutant, rng, tries=50):
    order = None if mutant.reorder else range(len(mutant.spec.equations))
    for k in range(tries):
        cfg = GenConfig(seed=rng.getrandbits(32), horizon=rng.randint(1, 30),
                        presence_density=DENSITIES[1 + k % 3])
        trace = gen_trace(cfg, mutant.spec.inputs)
        try:
            run_unchecked(mutant.spec, trace, order)
        except EvaluationFailure:
            return True
        except RuntimeArithmeticError:
            continue
    return False


@pytest.mark.criterion(7)
def test_c7_negative_suite():
    rng = random.Random("search")
    mutants = _mutants()
    refinement_only = hits = 0
    for mode, m in mutants:
        report = check_spec(m.spec, mode, m.reorder)
        assert not report.ok, m
        if {e.kind for e in report.errors} == {ErrorKind.REFINEMENT_FAILURE}:
            refinement_only += 1
            hits += _finds_fail(m, rng)
    assert refinement_only >= 20
    rate = hits / refinement_only
    print(f"\nrefinement-only mutants: {refinement_only}, Fail found: {hits} ({rate:.0%})")
    assert rate >= 0.8
