#!/usr/bin/env python3
"""Remainder of the square-root/arctanh law at proportional truncation.

With L = N the expected count should track sqrt(2 m N / pi) arctanh(1/sqrt 2)
up to a bounded remainder; this prints the remainder along a doubling sweep.

Run:  python scripts/arctanh_law.py [--n-max 160] [--m 1 2]
"""
import argparse
import time

from realeig import asympt_expected, expected_real_sum


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n-max", type=int, default=160)
    ap.add_argument("--m", type=int, nargs="+", default=[1, 2])
    ap.add_argument("--threads", type=int, default=4)
    args = ap.parse_args()

    Ns = []
    n = 20
    while n <= args.n_max:
        Ns.append(n)
        n *= 2
    for m in args.m:
        print(f"m = {m}")
        for N in Ns:
            t0 = time.time()
            exact = expected_real_sum(N, N, m, threads=args.threads)
            lead = asympt_expected(N, N, m)
            print(f"  N=L={N:4d}: exact={exact:10.6f} leading={lead:10.6f} "
                  f"remainder={exact - lead:+.4f} ({time.time() - t0:.2f}s)")


if __name__ == "__main__":
    main()
