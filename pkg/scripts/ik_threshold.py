"""Smallest N0 with sum_k I_k < 1 on [N0, n_hi], evaluated exactly.

    python3 scripts/ik_threshold.py [n_hi]
"""

import sys

from arboreal.correlation import ik_bound_threshold, sum_I


def main(n_hi: int = 500) -> None:
    n0, table = ik_bound_threshold(n_hi)
    print(f"N0 = {n0} (checked up to {n_hi})")
    for n in (5, 6, 10, 20, 50, 100, n_hi):
        if n <= n_hi:
            print(f"  n={n:>4}  sum I_k ~ {float(sum_I(n)):.6f}")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 500)
