"""Sieve success rate per (l, k, eps, delta) family on generated systems meeting the hypotheses."""

import argparse
import random
import sys

from rsnwt.errors import BudgetExhausted
from rsnwt.intmat import certify_nonsingular_treepack
from rsnwt.sieve import SieveConfig, generate_admissible_system, sieve_run, verify_conditions

FAMILIES = [(1, 1, 0.5, 1.0), (1, 2, 0.9, 4.0), (2, 1, 0.8, 2.0), (3, 1, 0.9, 2.0), (2, 2, 0.95, 4.0)]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=100)
    ap.add_argument("--c", type=float, default=8.0)
    ap.add_argument("--t", type=int, nargs=2, default=[10, 12])
    ap.add_argument("--n", type=int, nargs=2, default=[32, 40])
    a = ap.parse_args()

    print("l k eps delta | generated ok budget event")
    for l, k, eps, delta in FAMILIES:
        gen = ok = budget = event = 0
        for seed in range(a.seeds):
            rng = random.Random(seed)
            t, n = rng.randint(*a.t), rng.randint(*a.n)
            cfg = SieveConfig(eps=eps, delta=delta, l=l, k=k, c=a.c, seed=seed)
            s = generate_admissible_system(t, n, cfg, seed=rng)
            if s is None:
                continue
            gen += 1
            try:
                tr = sieve_run(s, cfg)
            except BudgetExhausted:
                budget += 1
                continue
            assert all(verify_conditions(s, tr.final_J, tr.final_sets, k).values())
            certify_nonsingular_treepack(tr.final_system(n), None, k)
            ok += 1
            event += tr.concentration_event
        print(f"{l} {k} {eps} {delta} | {gen} {ok} {budget} {event}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
