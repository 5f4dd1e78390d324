#!/usr/bin/env python3
"""End-to-end walk through the three-action running system.

Builds the intended base with the oracle, certifies it, prints the golden
decompositions, redundancy sets and class-change norms, then decides the
golden configuration pairs.
"""

from __future__ import annotations

import pathlib
import sys
import time

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from bpabis.base_model import EMPTY, cc_norm, cc_norm_table, pd, red_of
from bpabis.grammar import compute_norms, parse_system
from bpabis.search import certify, decide_equivalence, propose_base
from bpabis.semantics import parse_config, render_config

DATA = pathlib.Path(__file__).resolve().parent.parent / "data" / "example1.bpa"


def main() -> int:
    system = parse_system(DATA.read_text())
    norms = compute_norms(system)
    print(f"system: {len(system.variables)} variables, {len(system.rules)} rules")
    print("norms:", " ".join(f"{v}={norms[v]}" for v in system.variables))

    started = time.monotonic()
    proposal = propose_base(system)
    report, problems = certify(system, proposal.prebase)
    assert not problems and report.status == "consistent", (problems, report)
    base = proposal.prebase
    print(f"\nintended base built and certified in {time.monotonic() - started:.2f}s")
    print(f"domain: {len(base.domain)} contexts, "
          f"{len(base.dec)} decompositions, {len(base.prop)} propagations")

    for text, ctx in [("C", ""), ("C", "M2,S2"), ("C", "M23,M2,M3,S2,S3"), ("S2 C M23", "")]:
        context = frozenset(n for n in ctx.split(",") if n)
        image = pd(base, context, parse_config(text, system))
        print(f"pd({text!r} | {{{ctx}}}) = {render_config(image)}")
    print("red(C) =", " ".join(sorted(red_of(base, EMPTY, ("C",)))))

    table = cc_norm_table(base)
    for text in ["S1 M12", "M12 S1", "C"]:
        value = cc_norm(base, table, EMPTY, parse_config(text, system))
        print(f"cc-norm({text!r}) = {value}")

    for left, right in [("S2 M23", "M23"), ("M3 M23", "M23"), ("M23", "M3 M2")]:
        verdict = decide_equivalence(
            system, parse_config(left, system), parse_config(right, system)
        )
        print(f"decide({left!r} ~ {right!r}) -> {verdict.status}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
