#!/usr/bin/env python3
"""Growth of the expected count when only L rows/columns are truncated.

Sweeps N over powers of two at fixed small L and fits the slope of the
expected count against log N; the slope should approach 1/B(mL/2, 1/2).

Run:  python scripts/weak_sweep.py [--L 2] [--m 1] [--n-max 8192]
"""
import argparse
import math
import time

import numpy as np

from realeig import GjTable, expected_real_sum, weak_asymptotic
from realeig.gammafns import log_beta


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--L", type=int, default=2)
    ap.add_argument("--m", type=int, default=1)
    ap.add_argument("--n-min", type=int, default=256)
    ap.add_argument("--n-max", type=int, default=8192)
    ap.add_argument("--threads", type=int, default=4)
    args = ap.parse_args()

    Ns = []
    n = args.n_min
    while n <= args.n_max:
        Ns.append(n)
        n *= 2
    t0 = time.time()
    table = GjTable(args.L, args.m)
    table.ensure(max(Ns) - 2, threads=args.threads)
    print(f"coefficient table to j={max(Ns) - 2} in {time.time() - t0:.1f}s")

    values = {}
    for N in Ns:
        values[N] = expected_real_sum(N, args.L, args.m, table=table)
        print(f"  N={N:6d}: E={values[N]:.6f}  log-law="
              f"{weak_asymptotic(N, args.L, args.m):.6f}")
    for a, b in zip(Ns[:-1], Ns[1:]):
        print(f"  increment {a:5d}->{b:5d}: {values[b] - values[a]:.6f} "
              f"(target {math.log(b / a) / math.exp(log_beta(args.m * args.L / 2.0, 0.5)):.6f})")
    top = Ns[len(Ns) // 2:]
    slope = float(np.polyfit(np.log(top), [values[N] for N in top], 1)[0])
    target = 1.0 / math.exp(log_beta(args.m * args.L / 2.0, 0.5))
    print(f"fitted slope over top half: {slope:.6f}  target {target:.6f} "
          f"(gap {abs(slope / target - 1) * 100:.2f}%)")


if __name__ == "__main__":
    main()
