#!/usr/bin/env python3
"""Fetch or generate extra regression benchmarks as CSVs the CLI can read.

Produces files with a header row and one numeric target column, consumable
via `larsen bench --dataset <csv> --target <column>`.  The abalone and red wine
sets are downloaded from the UCI repository, so those two need network
access; waveform is generated locally from its textbook definition and is
deterministic in --seed.
"""

import argparse
import csv
import io
import random
import sys
import urllib.error
import urllib.request
from pathlib import Path

UCI = "https://archive.ics.uci.edu/ml/machine-learning-databases"


def _download(url: str) -> bytes:
    try:
        with urllib.request.urlopen(url, timeout=60) as resp:
            return resp.read()
    except (urllib.error.URLError, OSError) as e:
        sys.exit(
            f"error: could not download {url}\n"
            f"  reason: {e}\n"
            "  This step needs outbound network access to archive.ics.uci.edu.\n"
            "  If the machine is offline, fetch the file elsewhere and convert "
            "it by hand, or use only the locally generated sets (waveform)."
        )


def fetch_abalone(out: Path) -> Path:
    raw = _download(f"{UCI}/abalone/abalone.data").decode("ascii")
    path = out / "abalone.csv"
    with path.open("w", newline="") as f:
        w = csv.writer(f)
        w.writerow(
            ["sex_m", "sex_f", "sex_i", "length", "diameter", "height",
             "whole_weight", "shucked_weight", "viscera_weight", "shell_weight",
             "rings"]
        )
        for line in raw.splitlines():
            if not line.strip():
                continue
            sex, *rest = line.split(",")
            onehot = {"M": [1, 0, 0], "F": [0, 1, 0], "I": [0, 0, 1]}[sex]
            w.writerow(onehot + rest)
    return path


def fetch_redwine(out: Path) -> Path:
    raw = _download(f"{UCI}/wine-quality/winequality-red.csv").decode("ascii")
    path = out / "winequality_red.csv"
    with path.open("w", newline="") as f:
        w = csv.writer(f)
        for row in csv.reader(io.StringIO(raw), delimiter=";"):
            w.writerow(c.strip().strip('"').replace(" ", "_") for c in row)
    return path


def generate_waveform(out: Path, n: int, seed: int) -> Path:
    # Three triangular base waves on 21 points; each sample is a random convex
    # combination of two of them plus unit noise, labelled by the pair chosen.
    def h(peak, i):
        return max(6 - abs(i - peak), 0)

    pairs = [(7, 15), (7, 11), (15, 11)]
    rng = random.Random(seed)
    path = out / "waveform.csv"
    with path.open("w", newline="") as f:
        w = csv.writer(f)
        w.writerow([f"x{i}" for i in range(1, 22)] + ["class"])
        for _ in range(n):
            cls = rng.randrange(3)
            a, b = pairs[cls]
            u = rng.random()
            row = [
                f"{u * h(a, i) + (1 - u) * h(b, i) + rng.gauss(0, 1):.6f}"
                for i in range(1, 22)
            ]
            w.writerow(row + [cls])
    return path


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument(
        "names", nargs="*", default=["abalone", "redwine", "waveform"],
        help="which datasets to produce (default: all)")
    ap.add_argument("--out", default="data", help="output directory")
    ap.add_argument("--waveform-rows", type=int, default=5000)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    makers = {
        "abalone": lambda: fetch_abalone(out),
        "redwine": lambda: fetch_redwine(out),
        "waveform": lambda: generate_waveform(out, args.waveform_rows, args.seed),
    }
    targets = {"abalone": "rings", "redwine": "quality", "waveform": "class"}
    for name in args.names or ["abalone", "redwine", "waveform"]:
        if name not in makers:
            sys.exit(f"error: unknown dataset '{name}' "
                     f"(choose from {', '.join(sorted(makers))})")
        path = makers[name]()
        print(f"{name}: wrote {path} (target column: {targets[name]})")


if __name__ == "__main__":
    main()
