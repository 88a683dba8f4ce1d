"""Fill the oracle CSV cache used by the test suite and the sweep scripts.

    python scripts/build_oracle_cache.py [--out tests/data/oracle_cache.csv]

Covers K_nu(x) on the 200-point order grid x {0.05, 0.5, 1, 3.94, 8, 13.57, 30}
and dK/dnu on the same orders at x = 3.94 and 13.57.  Takes a few minutes.
"""

import argparse
import pathlib
import time

from maternk.harness import SWEEP_X, ORACLE_X, order_grid
from maternk.oracle import OracleCache, besselk_reference, dbesselk_dnu_reference

ROOT = pathlib.Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(ROOT / "tests" / "data" / "oracle_cache.csv"))
    args = ap.parse_args()
    cache = OracleCache(args.out)
    t0 = time.time()
    grid = order_grid()
    for x in ORACLE_X:
        for nu in grid:
            besselk_reference(nu, x, cache=cache)
        cache.save()
        print(f"K   x={x:<6} done, {len(cache)} cached, {time.time() - t0:.0f}s", flush=True)
    for x in SWEEP_X:
        for nu in grid:
            dbesselk_dnu_reference(nu, x, cache=cache)
        cache.save()
        print(f"dK  x={x:<6} done, {len(cache)} cached, {time.time() - t0:.0f}s", flush=True)


if __name__ == "__main__":
    main()
