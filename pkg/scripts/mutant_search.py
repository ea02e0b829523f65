"""Mutate well-typed specs into ill-typed ones and search random traces for a Fail.

For every mutant the checker must reject it.  For the mutants rejected only
because of refinement failures, the unchecked evaluator is run on up to
``--tries`` random traces; the script reports how often a Fail shows up,
broken down by mutation kind.
"""

import argparse
import random
from collections import Counter

from streamcore.evaluator import EvaluationFailure, run_unchecked
from streamcore.model import RuntimeArithmeticError
from streamcore.testkit import GenConfig, gen_trace, gen_well_typed_spec, mutate_spec
from streamcore.typecheck import ErrorKind, Mode, check_spec


def search(mutant, rng, tries):
    order = None if mutant.reorder else range(len(mutant.spec.equations))
    for k in range(tries):
        cfg = GenConfig(seed=rng.getrandbits(32), horizon=rng.randint(1, 30),
                        presence_density=(0.3, 0.7, 1.0)[k % 3])
        try:
            run_unchecked(mutant.spec, gen_trace(cfg, mutant.spec.inputs), order)
        except EvaluationFailure:
            return k + 1
        except RuntimeArithmeticError:
            pass
    return None


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=200)
    ap.add_argument("--tries", type=int, default=50)
    ap.add_argument("--seed", default="mutants")
    args = ap.parse_args()

    rng = random.Random(args.seed)
    kinds, accepted, refinement, found = Counter(), 0, Counter(), Counter()
    made = 0
    while made < args.count:
        mode = Mode.V2 if made % 2 == 0 else Mode.V1
        cfg = GenConfig(seed=rng.getrandbits(32), num_inputs=rng.randint(1, 4),
                        num_equations=rng.randint(1, 6), mode=mode)
        m = mutate_spec(gen_well_typed_spec(cfg), mode, rng)
        if m is None:
            continue
        made += 1
        kinds[m.kind] += 1
        report = check_spec(m.spec, mode, m.reorder)
        accepted += report.ok
        if {e.kind for e in report.errors} == {ErrorKind.REFINEMENT_FAILURE}:
            refinement[m.kind] += 1
            found[m.kind] += search(m, rng, args.tries) is not None

    print(f"mutants: {made}, wrongly accepted: {accepted}")
    print(f"{'kind':16} {'made':>5} {'refine-only':>12} {'Fail found':>11}")
    for kind in sorted(kinds):
        print(f"{kind:16} {kinds[kind]:5} {refinement[kind]:12} {found[kind]:11}")
    total = sum(refinement.values())
    if total:
        print(f"Fail found for {sum(found.values())}/{total} refinement-only mutants "
              f"({sum(found.values()) / total:.0%})")


if __name__ == "__main__":
    main()
