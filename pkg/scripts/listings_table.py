"""Print type-checking verdicts for the bundled listings and the timing patterns on the small trace.

    python scripts/listings_table.py
"""

import argparse
from pathlib import Path

from streamcore.evaluator import run
from streamcore.parser import parse_spec
from streamcore.traces import read_csv
from streamcore.typecheck import Mode, check_spec

SPECS = Path(__file__).resolve().parent.parent / "specs"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--specs", type=Path, default=SPECS)
    args = ap.parse_args()

    print(f"{'spec':24} {'v1':6} {'v2':6} {'v2 --no-reorder':16}")
    for path in sorted(args.specs.glob("*.sc")):
        spec = parse_spec(path.read_text())
        cells = [check_spec(spec, Mode.V1).ok, check_spec(spec, Mode.V2).ok,
                 check_spec(spec, Mode.V2, reorder=False).ok]
        print(f"{path.name:24} " + " ".join(f"{'ok' if c else 'reject':6}" for c in cells[:2])
              + f" {'ok' if cells[2] else 'reject'}")

    trace = read_csv((args.specs / "async_trace.csv").read_text())
    print("\ntemp_warning presence on async_trace.csv")
    for name in ("sync.sc", "hold.sc", "disjunctive.sc"):
        out = run(parse_spec((args.specs / name).read_text()), trace)
        times = [n for n, v in enumerate(out["temp_warning"]) if v is not None]
        print(f"  {name:16} {times}")


if __name__ == "__main__":
    main()
