"""Regenerate the bundled on-chain sample dataset.

Daily rows with a handful of network metrics and a price column. Price is
driven by a few of the metrics plus noise, so feature selection has something
to find and something to discard.

    python3 scripts/make_sample_dataset.py [--rows 365] [--seed 7] [--out PATH]
"""

import argparse
import csv
import datetime as dt
from pathlib import Path

import numpy as np

DEFAULT_OUT = Path(__file__).resolve().parents[1] / "src" / "zkai" / "data" / "sample_onchain.csv"


def generate(rows: int, seed: int) -> tuple[list[str], list[list]]:
    rng = np.random.default_rng(seed)
    t = np.arange(rows)
    adoption = np.cumsum(rng.normal(0.4, 1.0, rows)) + 50
    hash_rate = 120 + 0.15 * t + 0.8 * adoption + rng.normal(0, 4, rows)
    difficulty = hash_rate * 1.9e11 * (1 + rng.normal(0, 0.01, rows))
    active_addresses = 8.5e5 + 6e3 * adoption + rng.normal(0, 2.5e4, rows)
    tx_count = 2.6e5 + 900 * adoption + rng.normal(0, 1.5e4, rows)
    mempool_mb = np.abs(rng.normal(40, 15, rows))
    block_size_kb = 1200 + rng.normal(0, 60, rows)
    exchange_volume = np.exp(21.5 + 0.01 * adoption + rng.normal(0, 0.25, rows))
    price = (9000 + 310 * adoption + 0.004 * (active_addresses - 8.5e5)
             + 2e-7 * exchange_volume + rng.normal(0, 900, rows))

    header = ["date", "hash_rate", "difficulty", "active_addresses", "tx_count",
              "mempool_mb", "block_size_kb", "exchange_volume", "price"]
    start = dt.date(2021, 1, 1)
    out = []
    for i in range(rows):
        out.append([(start + dt.timedelta(days=i)).isoformat(),
                    f"{hash_rate[i]:.3f}", f"{difficulty[i]:.6e}",
                    f"{active_addresses[i]:.0f}", f"{tx_count[i]:.0f}",
                    f"{mempool_mb[i]:.2f}", f"{block_size_kb[i]:.1f}",
                    f"{exchange_volume[i]:.0f}", f"{price[i]:.2f}"])
    return header, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[1])
    ap.add_argument("--rows", type=int, default=365)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--out", type=Path, default=DEFAULT_OUT)
    args = ap.parse_args()
    header, rows = generate(args.rows, args.seed)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    print(f"wrote {len(rows)} rows to {args.out}")


if __name__ == "__main__":
    main()
