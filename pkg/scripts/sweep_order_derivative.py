"""Order-derivative accuracy sweeps at a small and a large fixed argument.

    python scripts/sweep_order_derivative.py [--outdir results] [--threshold 10]

Writes sweep_x3.94.csv and sweep_x13.57.csv (CS, central FD and the naive
closed form against the oracle) and prints the ordering summary.  Pass
``--threshold 10`` to see the plain two-series dispatch instead of the default.
"""

import argparse
import pathlib

from maternk.besselk import SeriesConfig
from maternk.harness import SWEEP_X, SweepSpec, order_grid, run_sweep, summarize_sweep
from maternk.oracle import OracleCache

ROOT = pathlib.Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--outdir", default="results")
    ap.add_argument("--threshold", type=float, default=SeriesConfig.dispatch_threshold)
    ap.add_argument("--cache", default=str(ROOT / "tests" / "data" / "oracle_cache.csv"))
    args = ap.parse_args()
    out = pathlib.Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    cache = OracleCache(args.cache)
    cfg = SeriesConfig(dispatch_threshold=args.threshold)
    for tag, x in zip("ab", SWEEP_X):
        path = out / f"sweep_x{x}.csv"
        spec = SweepSpec("fixed-x", x, order_grid(), ("cs", "fd", "naive"), str(path))
        rows = run_sweep(spec, cfg=cfg, cache=cache)
        s = summarize_sweep(rows)
        naive = [r["rel_err"] for r in rows if r["method"] == "naive" and r["status"] == "ok"]
        print(f"x = {x}: {s['points']} nudge-free orders, CS <= FD at {100 * s['cs_le_fd']:.1f}%, "
              f"CS max rel err {s['cs_max_rel_err']:.2e}, naive max rel err {max(naive):.2e}, "
              f"paths {s['cs_paths']} -> {path}")


if __name__ == "__main__":
    main()
