"""Survey the statevector order-finding demo over every unit a mod n.

For each (a, n) with n <= 64 this prints the exact per-shot probability of
decoding the true order and the fraction of seeded repetitions in which the
pruned LCM over 20 shots recovers it.

    python scripts/calibrate_qorder.py --max-n 64 --reps 100
"""

import argparse
import csv
import math
import sys

from sympy import n_order

from ghelab.oracle import quantum_order_finding, shot_success_probability
from ghelab.rng import trial_rng


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-n", type=int, default=64)
    ap.add_argument("--reps", type=int, default=100)
    ap.add_argument("--shots", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["a", "n", "t", "order", "shot_rate", "recovered"])
    worst_shot, worst_rec = 1.0, 1.0
    for n in range(3, args.max_n + 1):
        t = min(2 * math.ceil(math.log2(n)), 12)
        for a in range(2, n):
            if math.gcd(a, n) != 1:
                continue
            r = int(n_order(a, n))
            rate = shot_success_probability(a, n, t)
            hits = sum(quantum_order_finding(a, n, t, args.shots,
                                             trial_rng(args.seed, rep, "calib", a, n))[0] == r
                       for rep in range(args.reps))
            worst_shot = min(worst_shot, rate)
            worst_rec = min(worst_rec, hits / args.reps)
            w.writerow([a, n, t, r, f"{rate:.6g}", f"{hits / args.reps:.6g}"])
    print(f"# worst per-shot rate {worst_shot:.6g}, worst recovery {worst_rec:.6g}", file=sys.stderr)


if __name__ == "__main__":
    main()
