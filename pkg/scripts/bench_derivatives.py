"""Timing of CS vs adaptive FD order derivatives on the 5 x 5 grid.

    python scripts/bench_derivatives.py [--out results/bench.csv] [--repeats 500]

Prints a median-microsecond table.  Absolute numbers depend on the machine;
only the CS < FD ordering is meaningful.
"""

import argparse
import pathlib

from maternk.harness import BENCH_NU, BENCH_X, run_bench


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="results/bench.csv")
    ap.add_argument("--repeats", type=int, default=500)
    args = ap.parse_args()
    pathlib.Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    rows = run_bench(BENCH_NU, BENCH_X, repeats=args.repeats, output_path=args.out)
    med = {(r["nu"], r["x"], r["method"]): r["median_us"] for r in rows}
    print("nu \\ x  " + "".join(f"{x:>16}" for x in BENCH_X))
    for nu in BENCH_NU:
        cells = "".join(f"{med[nu, x, 'cs']:7.1f} /{med[nu, x, 'fd']:7.1f}" for x in BENCH_X)
        print(f"{nu:<7} {cells}")
    wins = sum(med[nu, x, "cs"] < med[nu, x, "fd"] for nu in BENCH_NU for x in BENCH_X)
    print(f"CS / FD median microseconds; CS faster at {wins}/25 points -> {args.out}")


if __name__ == "__main__":
    main()
