#!/usr/bin/env python3
"""
Summarize benchmark CSV output.

Prints one affine fit (slope, intercept, R²) per suite and implementation,
plus the mean time at every parameter value.
"""

import argparse
import sys
from pathlib import Path

import pandas as pd

from revocable_abe.bench.harness import COLUMNS, fit_by_impl


def load_results(paths: list[Path]) -> pd.DataFrame:
    """Concatenate benchmark CSVs, checking the column schema."""
    frames = []
    for path in paths:
        df = pd.read_csv(path)
        missing = [c for c in COLUMNS if c not in df.columns]
        if missing:
            raise ValueError(f"{path}: missing columns {', '.join(missing)}")
        frames.append(df[COLUMNS])
    return pd.concat(frames, ignore_index=True)


def main():
    parser = argparse.ArgumentParser(description="Summarize revocable-abe benchmark CSVs")
    parser.add_argument("csv", nargs="+", type=Path, help="CSV files written by 'revocable-abe bench'")
    parser.add_argument(
        "--min-r2",
        type=float,
        default=None,
        help="Exit with status 1 if any fit falls below this R²"
    )
    args = parser.parse_args()

    results = load_results(args.csv)
    fits = fit_by_impl(results)

    pivot = results.pivot_table(index=["suite", "value"], columns="impl", values="mean_s")
    print(pivot.to_string(float_format=lambda v: f"{v * 1e3:.2f} ms"))
    print()
    print(fits.to_string(index=False, float_format=lambda v: f"{v:.4g}"))

    if args.min_r2 is not None and (fits["r2"] < args.min_r2).any():
        low = fits[fits["r2"] < args.min_r2]
        print(f"\n{len(low)} fits below R² {args.min_r2}", file=sys.stderr)
        sys.exit(1)


if __name__ == "__main__":
    main()
