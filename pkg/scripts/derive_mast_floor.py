#!/usr/bin/env python3
"""Compute min-over-all-topology-pairs MAST values by full enumeration and
persist them as regression goldens.

The values for n >= 4 are derived, not assumed: this script is the source
of tests/goldens/mast_floor.json.  Rerun it after any change to the exact
oracles; the test suite recomputes n <= 5 and compares against the file.

Usage: python scripts/derive_mast_floor.py [--nmax-unrooted 5] [--nmax-rooted 5]
"""

import argparse
import json
import pathlib
import time

from agreetree.exactmast import mast_floor

GOLDEN_PATH = pathlib.Path(__file__).resolve().parent.parent / "tests" / "goldens" / "mast_floor.json"


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--nmax-unrooted", type=int, default=5)
    parser.add_argument("--nmax-rooted", type=int, default=5)
    args = parser.parse_args()

    golden = {"unrooted": {}, "rooted": {}}
    for n in range(3, args.nmax_unrooted + 1):
        start = time.perf_counter()
        value = mast_floor(n, rooted=False)
        golden["unrooted"][str(n)] = value
        print(f"unrooted n={n}: mast floor = {value}  ({time.perf_counter() - start:.2f}s)")
    for n in range(2, args.nmax_rooted + 1):
        start = time.perf_counter()
        value = mast_floor(n, rooted=True)
        golden["rooted"][str(n)] = value
        print(f"rooted   n={n}: mast floor = {value}  ({time.perf_counter() - start:.2f}s)")

    GOLDEN_PATH.parent.mkdir(parents=True, exist_ok=True)
    GOLDEN_PATH.write_text(json.dumps(golden, indent=2, sort_keys=True) + "\n")
    print(f"wrote {GOLDEN_PATH}")


if __name__ == "__main__":
    main()
