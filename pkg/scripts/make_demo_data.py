#!/usr/bin/env python3
"""Generate a synthetic intrusion-style train/test CSV pair plus schema.

The data mimics flow-record logs: numeric volume/duration columns, a few
nominal protocol-ish columns, and a binary label. Two numeric and one
nominal column carry real signal; the rest are noise, so both filter and
wrapper selection have something meaningful to find.

Usage:
    python scripts/make_demo_data.py --out demo_data --rows 2000
"""

from __future__ import annotations

import argparse
import csv
from pathlib import Path

import numpy as np

SCHEMA_LINES = [
    "duration,numeric",
    "src_bytes,numeric",
    "dst_bytes,numeric",
    "rate,numeric",
    "ttl,numeric",
    "jitter,numeric",
    "proto,nominal",
    "service,nominal",
    "state,nominal",
    "label,class",
]

PROTOS = ["tcp", "udp", "icmp", "arp"]
SERVICES = ["http", "dns", "smtp", "ftp", "ssh", "-"]
STATES = ["FIN", "CON", "INT", "REQ"]


def sample_rows(rng: np.random.Generator, n: int) -> list[list[str]]:
    rows = []
    for _ in range(n):
        attack = rng.random() < 0.45
        # signal columns: attacks burst more bytes at higher rates over udp
        src_bytes = rng.lognormal(8.0 if attack else 6.0, 1.0)
        rate = rng.gamma(4.0 if attack else 2.0, 25.0)
        proto = rng.choice(PROTOS, p=[0.25, 0.55, 0.15, 0.05] if attack
                           else [0.6, 0.2, 0.1, 0.1])
        # noise columns
        duration = rng.exponential(2.0)
        dst_bytes = rng.lognormal(6.5, 1.2)
        ttl = float(rng.choice([32, 64, 128, 255]))
        jitter = rng.normal(0.0, 5.0)
        service = rng.choice(SERVICES)
        state = rng.choice(STATES)
        rows.append([
            f"{duration:.6f}", f"{src_bytes:.2f}", f"{dst_bytes:.2f}",
            f"{rate:.4f}", f"{ttl:.0f}", f"{jitter:.4f}",
            str(proto), str(service), str(state),
            "1" if attack else "0",
        ])
    return rows


def write_csv(path: Path, rows: list[list[str]]) -> None:
    header = [line.split(",")[0] for line in SCHEMA_LINES]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--out", default="demo_data", help="output directory")
    parser.add_argument("--rows", type=int, default=2000, help="training rows")
    parser.add_argument("--test-rows", type=int, default=800, help="test rows")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(args.seed)

    write_csv(out / "train.csv", sample_rows(rng, args.rows))
    write_csv(out / "test.csv", sample_rows(rng, args.test_rows))
    (out / "schema.txt").write_text("\n".join(SCHEMA_LINES) + "\n", encoding="utf-8")

    print(f"wrote {args.rows} train rows, {args.test_rows} test rows -> {out}/")
    print(f"try: fsel-ids bench --train {out}/train.csv --test {out}/test.csv "
          f"--schema {out}/schema.txt --fs infogain --k 4 --algo tree --out {out}/bench")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
