"""Scan every pair of edges on small connected graphs for negative margins.

    python3 scripts/small_graph_scan.py [n_max] [betas] [workers]

e.g. ``python3 scripts/small_graph_scan.py 6 1/10,1,10 4``.
"""

import json
import sys

from arboreal.cli import scan


def main() -> None:
    n_max = int(sys.argv[1]) if len(sys.argv) > 1 else 5
    betas = (sys.argv[2] if len(sys.argv) > 2 else "1/10,1,10").split(",")
    workers = int(sys.argv[3]) if len(sys.argv) > 3 else 1
    res, verdicts, witnesses = scan(n_max, betas, workers)
    print(json.dumps({"results": res, "verdicts": verdicts}, indent=2, default=str))
    if witnesses:
        print(f"{len(witnesses['files'])} witness files written")


if __name__ == "__main__":
    main()
