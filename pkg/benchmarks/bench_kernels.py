"""Time the compiled search kernel against the pure-Python one.

    python3 benchmarks/bench_kernels.py [--sizes 24,40,56] [--instances 40] [--seed 0]

Each instance is a random 3-CNF at clause ratio 3.5 plus m/4 random XORs of
width m/2, the shape the counter produces at mid-range s. Both kernels solve
the same prepared instances; verdicts are cross-checked as they run.
"""

import argparse
import random
import sys
import time

from xorcount.formula import CnfFormula, ConstrainedFormula, XorConstraint
from xorcount.solver import KERNELS, Prepared


def instance(rng: random.Random, m: int) -> Prepared:
    clauses = tuple(
        tuple(v if rng.random() < 0.5 else -v for v in rng.sample(range(1, m + 1), 3)) for _ in range(int(3.5 * m))
    )
    xors = tuple(XorConstraint(rng.sample(range(1, m + 1), m // 2), rng.randint(0, 1)) for _ in range(m // 4))
    return Prepared(ConstrainedFormula(CnfFormula(m, clauses), xors))


def time_kernel(fn, preps) -> tuple[float, list[int]]:
    t0 = time.perf_counter()
    statuses = [p.search(kernel=fn)[0] for p in preps]
    return time.perf_counter() - t0, statuses


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="24,40,56")
    ap.add_argument("--instances", type=int, default=40)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    if "compiled" not in KERNELS:
        print("compiled kernel not built; run `pip install -e . --no-build-isolation` first", file=sys.stderr)
        return 1

    rng = random.Random(args.seed)
    print(f"{'m':>4} {'n':>4} {'sat':>4} {'python_s':>10} {'compiled_s':>11} {'speedup':>8}")
    for m in (int(x) for x in args.sizes.split(",")):
        preps = [instance(rng, m) for _ in range(args.instances)]
        t_py, s_py = time_kernel(KERNELS["python"], preps)
        t_c, s_c = time_kernel(KERNELS["compiled"], preps)
        if s_py != s_c:
            print(f"verdict mismatch at m={m}", file=sys.stderr)
            return 2
        n_sat = sum(1 for p in preps if p.search()[1] is not None)
        print(f"{m:>4} {len(preps):>4} {n_sat:>4} {t_py:>10.3f} {t_c:>11.3f} {t_py / max(t_c, 1e-9):>7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
