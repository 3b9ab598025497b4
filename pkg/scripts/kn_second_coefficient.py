"""Compare the K_n second margin coefficient computed three ways.

    python3 scripts/kn_second_coefficient.py [n_max]

Direct polynomial coefficient, two-tree forest sum, and the closed form
(both the plain k-sum and the one weighting k = n/2 by 1/2).
"""

import sys

from arboreal.correlation import kn_closed_forms, second_coeff, second_coeff_two_tree
from arboreal.graph import complete


def main(n_max: int = 7) -> None:
    print(f"{'n':>3} {'direct':>10} {'two-tree':>10} {'closed':>10} {'plain sum':>10}")
    for n in range(5, n_max + 1):
        kn = complete(n)
        a, b = 0, kn.m - 1
        k = kn_closed_forms(n)
        row = (second_coeff(kn, a, b), second_coeff_two_tree(kn, a, b), k.second_coeff_from_cases, k.second_coeff_literal)
        print(f"{n:>3} " + " ".join(f"{str(x):>10}" for x in row))


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 7)
