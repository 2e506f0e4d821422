"""Stage-timing sweep over model sizes, written as CSV and JSON.

    python3 scripts/bench_sweep.py [--n-list 1,2,4,8,16,39] [--repeats 5] [--out bench-out]
"""

import argparse
import sys

from zkai.pipeline import PipelineConfig, run_bench
from zkai.seeds import seed_from_env


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n-list", default="1,2,4,8,16,39")
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--seed", type=int, default=seed_from_env(42))
    ap.add_argument("--out", default="bench-out")
    args = ap.parse_args()

    res = run_bench([int(v) for v in args.n_list.split(",")], args.repeats,
                    PipelineConfig(seed=args.seed), args.out)
    print(f"{'n':>4} {'phase2 median (s)':>18}")
    for n, med in res.phase2_medians().items():
        print(f"{n:>4} {med:>18.6f}")
    print(f"proof bytes {sorted(res.proof_lengths)}, failures {len(res.failures)}, "
          f"output in {args.out}/")
    return 1 if res.failures else 0


if __name__ == "__main__":
    sys.exit(main())
