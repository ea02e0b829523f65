"""Run generated well-typed specs on random traces and compare against the whole-stream oracle.

Reports how many runs hit Fail (should be zero), model-check failures,
oracle disagreements and a few corpus statistics.
"""

import argparse
import random
import time
from collections import Counter

from streamcore.evaluator import EvaluationFailure, run
from streamcore.semantics import is_model
from streamcore.testkit import GenConfig, gen_trace, gen_well_typed_spec, whole_stream_construct
from streamcore.typecheck import Mode, check_spec


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=500, help="specs per mode")
    ap.add_argument("--seed", default="safety")
    ap.add_argument("--densities", default="0.0,0.3,0.7,1.0")
    args = ap.parse_args()
    densities = [float(d) for d in args.densities.split(",")]

    for mode in Mode:
        rng = random.Random(f"{args.seed}:{mode.value}")
        stats = Counter()
        start = time.perf_counter()
        for _ in range(args.count):
            cfg = GenConfig(seed=rng.getrandbits(64), num_inputs=rng.randint(1, 4),
                            num_equations=rng.randint(1, 8), max_expr_depth=rng.randint(0, 4), mode=mode)
            spec = gen_well_typed_spec(cfg)
            report = check_spec(spec, mode)
            stats["equations"] += len(spec.equations)
            for density in densities:
                tcfg = GenConfig(seed=cfg.seed, horizon=rng.randint(1, 50), presence_density=density)
                trace = gen_trace(tcfg, spec.inputs)
                stats["runs"] += 1
                try:
                    out = run(spec, trace, mode)
                except EvaluationFailure:
                    stats["fail"] += 1
                    continue
                stats["not_model"] += not is_model(out, spec).is_model
                stats["oracle_mismatch"] += out != whole_stream_construct(spec, trace, report)
                stats["cells"] += sum(v is not None for name in spec.outputs for v in out[name])
        elapsed = time.perf_counter() - start
        print(f"{mode.value}: {args.count} specs, {stats['equations']} equations, {stats['runs']} runs, "
              f"{stats['cells']} output values, {elapsed:.1f}s")
        print(f"    Fail: {stats['fail']}  not a model: {stats['not_model']}  "
              f"oracle mismatches: {stats['oracle_mismatch']}")


if __name__ == "__main__":
    main()
