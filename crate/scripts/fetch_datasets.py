#!/usr/bin/env python3
"""Fetch the two datasets that cannot be redistributed with the repo.

iris.csv and wine.csv ship in data/ already. The Pima diabetes table and
the UCI "new-thyroid" table must be downloaded separately; this script
pulls them and rewrites them to match the schema files in data/.

Usage: python3 scripts/fetch_datasets.py [--out data]
"""

import argparse
import csv
import io
import sys
import urllib.request

UCI = "https://archive.ics.uci.edu/ml/machine-learning-databases"

SOURCES = {
    # 768 rows, 8 numeric attributes, binary outcome in the last column.
    # The UCI original was withdrawn; this mirror keeps the same layout.
    "pima": (
        "https://raw.githubusercontent.com/jbrownlee/Datasets/master/"
        "pima-indians-diabetes.data.csv",
        None,
    ),
    # 215 rows, class label first, then 5 lab measurements.
    "thyroid": (f"{UCI}/thyroid-disease/new-thyroid.data", None),
}


def fetch(url: str) -> str:
    with urllib.request.urlopen(url, timeout=60) as r:
        return r.read().decode("utf-8")


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="data")
    args = ap.parse_args()

    for name, (url, _) in SOURCES.items():
        dest = f"{args.out}/{name}.csv"
        print(f"fetching {name} from {url}")
        try:
            text = fetch(url)
        except Exception as e:
            print(f"  failed: {e}", file=sys.stderr)
            print(f"  download manually and save as {dest}", file=sys.stderr)
            continue
        rows = [r for r in csv.reader(io.StringIO(text)) if r]
        with open(dest, "w", newline="") as f:
            csv.writer(f).writerows(rows)
        print(f"  wrote {dest} ({len(rows)} rows)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
