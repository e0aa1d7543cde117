"""Tabulate closed classes over a range of orders and codimensions.

Each row reports the wall time for a cold computation, so the table
doubles as a quick benchmark of the residue engine.
"""

import argparse
import time

from thomcalc import QhatRegistry, thom_polynomial


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--max-d", type=int, default=5, help="largest order to compute")
    parser.add_argument(
        "--max-codim", type=int, default=2, help="largest codimension shift"
    )
    args = parser.parse_args()

    for d in range(1, args.max_d + 1):
        for codim in range(args.max_codim + 1):
            registry = QhatRegistry()  # fresh registry defeats the cache
            start = time.perf_counter()
            tp = thom_polynomial(d, codim, registry)
            elapsed = time.perf_counter() - start
            label = f"d={d} codim={codim}"
            print(f"{label:<16} ({elapsed:6.2f}s)  {tp.display_body().to_text()}")


if __name__ == "__main__":
    main()
