#!/usr/bin/env python3
"""Empirical slack between the matchers' outputs and their guarantees.

Runs seeded trials per algorithm and n, printing the worst observed output
size next to the clamped bound.  A violation would be a contradiction of a
proved inequality, so any line flagged BELOW-BOUND is the headline result.

Usage: python scripts/guarantee_sweep.py [--trials 50] [--seed 0]
"""

import argparse
import math

from agreetree._rng import SplitMix64
from agreetree.bounds import general_bound, match1_bound, match2_bound
from agreetree.decompose import agree_general
from agreetree.generators import RandomModel, gen_balanced, gen_random, relabel
from agreetree.matchers import default_delta, match1, match2


def permuted_balanced(m, seed):
    rng = SplitMix64(seed)
    perm = list(range(1, 2**m + 1))
    rng.shuffle(perm)
    return relabel(gen_balanced(m), {i + 1: perm[i] for i in range(2**m)})


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--trials", type=int, default=50)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    rng = SplitMix64(args.seed)

    d1 = default_delta("match1")
    for m in range(2, 11):
        n = 2**m
        worst = None
        for _ in range(args.trials):
            t2 = gen_random(n, RandomModel("uniform", rng.next_u64()), rooted=True)
            size = len(match1(gen_balanced(m), t2, d1)[0])
            worst = size if worst is None else min(worst, size)
        bound = max(1.0, match1_bound(m, n, d1))
        flag = "" if worst >= bound - 1e-9 else "  BELOW-BOUND"
        print(f"match1 m={m:2d} n={n:5d}: worst={worst:3d} bound={bound:7.3f}{flag}")

    d2 = default_delta("match2")
    for m in range(2, 9):
        n = 2**m
        worst = None
        for _ in range(args.trials):
            a = permuted_balanced(m, rng.next_u64())
            b = permuted_balanced(m, rng.next_u64())
            size = len(match2(a, b, d2)[0])
            worst = size if worst is None else min(worst, size)
        bound = max(1.0, match2_bound(m, m, n, d2))
        flag = "" if worst >= bound - 1e-9 else "  BELOW-BOUND"
        print(f"match2 m={m:2d} n={n:5d}: worst={worst:3d} bound={bound:7.3f}{flag}")

    for n in (8, 64, 512, 4096):
        worst = None
        for _ in range(args.trials):
            a = gen_random(n, RandomModel("uniform", rng.next_u64()))
            b = gen_random(n, RandomModel("uniform", rng.next_u64()))
            size = len(agree_general(a, b)[0])
            worst = size if worst is None else min(worst, size)
        bound = max(1.0, general_bound(n))
        srt = (0.205597 / 2) * math.sqrt(math.log2(n))
        flag = "" if worst >= bound - 1e-9 else "  BELOW-BOUND"
        print(
            f"agree n={n:5d}: worst={worst:3d} bound={bound:7.3f} "
            f"(raw term {srt:5.3f}){flag}"
        )


if __name__ == "__main__":
    main()
