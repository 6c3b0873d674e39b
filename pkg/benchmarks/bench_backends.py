"""Time the compiled round kernel against the pure-Python round loop.

    python benchmarks/bench_backends.py --seeds 3 --max-rounds 10000

Both backends must produce identical per-round metrics; the script exits
non-zero if they do not.
"""

import argparse
import sys
import time

from wsnsim import engine
from wsnsim.cli import SCENARIOS
from wsnsim.model import NetworkConfig
from wsnsim.protocols import Protocol


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--scenario", default="s1", choices=list(SCENARIOS))
    p.add_argument("--seeds", type=int, default=2)
    p.add_argument("--max-rounds", type=int, default=10000)
    args = p.parse_args(argv)

    if not engine.HAVE_COMPILED:
        print("compiled kernel not built; nothing to compare", file=sys.stderr)
        return 1

    print(f"{'protocol':<8} {'python s':>10} {'compiled s':>11} {'speedup':>8}  identical")
    mismatches = 0
    for proto in Protocol:
        t_py = t_c = 0.0
        same = True
        for seed in range(args.seeds):
            cfg = NetworkConfig(heterogeneity=SCENARIOS[args.scenario], max_rounds=args.max_rounds, rng_seed=seed)
            t0 = time.perf_counter()
            py = engine.run_simulation(cfg, proto, backend="python")
            t1 = time.perf_counter()
            c = engine.run_simulation(cfg, proto, backend="compiled")
            t2 = time.perf_counter()
            t_py += t1 - t0
            t_c += t2 - t1
            same &= py.per_round == c.per_round
        mismatches += not same
        print(f"{proto.value:<8} {t_py:>10.3f} {t_c:>11.4f} {t_py / t_c:>7.1f}x  {same}")
    return 1 if mismatches else 0


if __name__ == "__main__":
    sys.exit(main())
