#!/usr/bin/env python3
"""Search/oracle agreement experiment on random small systems.

Samples normed silent-free systems, runs the exhaustive decision procedure
against the bounded oracle, and reports verdict distributions plus any
contradiction (there must be none).

Usage: random_agreement.py [--seed N] [--samples N] [--max-nodes N]
"""

from __future__ import annotations

import argparse
import pathlib
import random
import sys
import time

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from bpabis.oracle import NO, YES, approximant_check
from bpabis.sampling import random_config, random_normed_system
from bpabis.search import EQUIVALENT, EXHAUSTIVE, INEQUIVALENT, SearchBounds, decide_equivalence


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--samples", type=int, default=40)
    parser.add_argument("--max-nodes", type=int, default=8_000)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    bounds = SearchBounds(max_nodes=args.max_nodes)
    tally: dict[tuple[str, str], int] = {}
    contradictions = 0
    started = time.monotonic()
    for i in range(args.samples):
        system = random_normed_system(rng)
        left = random_config(rng, system, max_len=2)
        right = random_config(rng, system, max_len=2)
        verdict = decide_equivalence(system, left, right, strategy=EXHAUSTIVE, bounds=bounds)
        answer = approximant_check(system, left, right)
        key = (verdict.status, answer.value)
        tally[key] = tally.get(key, 0) + 1
        if (verdict.status, answer.value) in ((EQUIVALENT, NO), (INEQUIVALENT, YES)):
            contradictions += 1
            print(f"CONTRADICTION at sample {i}: {verdict.status} vs oracle {answer.value}")
    print(f"{args.samples} samples in {time.monotonic() - started:.1f}s (seed {args.seed})")
    for (search_v, oracle_v), count in sorted(tally.items()):
        print(f"  search={search_v:<13} oracle={oracle_v:<8} {count}")
    print("contradictions:", contradictions)
    return 1 if contradictions else 0


if __name__ == "__main__":
    sys.exit(main())
