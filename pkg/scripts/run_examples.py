#!/usr/bin/env python3
"""Run the bundled example knowledge bases end to end.

Solves both KBs, dumps the full world distribution of each, and queries the
probability of the axiom the toddler KB rejects.
"""
import sys
from pathlib import Path

from probel.cli import main

KBS = Path(__file__).resolve().parents[1] / "kbs"


def run(*argv):
    print(f"$ probel {' '.join(argv)}")
    code = main(list(argv))
    print(f"(exit {code})\n")
    return code


def main_script() -> int:
    toddler = str(KBS / "toddler.kb")
    two_year_old = str(KBS / "two_year_old.kb")
    query = str(KBS / "queries" / "toddler_is_adult.kb")
    worst = 0
    for argv in (
        ("solve", toddler),
        ("solve", two_year_old),
        ("oracle", toddler),
        ("prob", toddler, "--query", query),
        ("solve", toddler, "--format", "json", "--explain"),
    ):
        worst = max(worst, run(*argv))
    return worst


if __name__ == "__main__":
    sys.exit(main_script())
