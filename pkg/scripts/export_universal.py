#!/usr/bin/env python
"""Write the universal Witt polynomial families to JSON, one file per (op, k).

Sums and products go up to the configured ceiling. A Frobenius family F_n at
length k has n*k inputs, so it is exported only while n*k stays within the
ceiling; past that the derivation grows far faster than the other families.
"""
import json
import os
import sys
from pathlib import Path

from cartier_lab.codec import canonical_json
from cartier_lab.settings import load_settings
from cartier_lab.universal import derive_universal_polynomials


OUTPUT_DIR = Path(os.getenv("CARTIER_LAB_EXPORT_DIR", "universal_polynomials"))

# (operation, Frobenius index) pairs
FAMILIES = [
    ("add", 1),
    ("mul", 1),
    ("frobenius", 2),
    ("frobenius", 3),
    ("frobenius", 4),
]


def max_length(op: str, n: int, ceiling: int) -> int:
    return ceiling // n if op == "frobenius" else ceiling


def main() -> None:
    ceiling = load_settings().universal_ceiling
    OUTPUT_DIR.mkdir(parents=True, exist_ok=True)
    print(f"Exporting universal Witt polynomials up to k={ceiling} into {OUTPUT_DIR}")
    for op, n in FAMILIES:
        for k in range(1, max_length(op, n, ceiling) + 1):
            family = derive_universal_polynomials(op, k, n)
            name = f"{op}_k{k}.json" if op != "frobenius" else f"{op}{n}_k{k}.json"
            (OUTPUT_DIR / name).write_text(canonical_json(family.to_json()) + "\n", encoding="utf-8")
            print(f"  {name}: {family.term_count} terms")
    index = {
        "ceiling": ceiling,
        "families": [{"op": op, "n": n, "max_k": max_length(op, n, ceiling)} for op, n in FAMILIES],
    }
    (OUTPUT_DIR / "index.json").write_text(json.dumps(index, sort_keys=True, indent=2) + "\n", encoding="utf-8")


if __name__ == "__main__":
    try:
        main()
    except KeyboardInterrupt:
        sys.exit(130)
