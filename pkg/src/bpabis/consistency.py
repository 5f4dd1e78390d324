"""Consistency of a base: every triple must have matching legal-move outcomes.

A triple claims an equivalence (a non-prime equals its decomposition body, or
a redundant variable in front of a prime can be dropped).  The checkable
content of that claim is a set of *legal-move outcomes*: the decomposition
images reachable by silent moves that keep the image fixed, followed by one
move.  Outcome sets are built over a *silent closure* of the configuration;
self-inflating silent rules can make that closure infinite, so it is capped
and a capped computation downgrades the verdict to "indeterminate" rather
than ever reporting a possibly-wrong boolean.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .base_model import Context, ContextNotInDomain, PreBase, pd, red_of
from .grammar import TAU
from .semantics import Config, render_config, transitions

# an outcome is (action label, decomposition image)
Outcome = tuple[str, Config]

CONSISTENT = "consistent"
INCONSISTENT = "inconsistent"
INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class ClosureCaps:
    """Caps for the silent closure; ``len_cap=None`` derives a default of
    |seed| + |variables| * max-rule-body-length."""

    len_cap: int | None = None
    size_cap: int = 100_000

    def resolved_len(self, base, seed: Config) -> int:
        if self.len_cap is not None:
            return self.len_cap
        system = base.system
        return len(seed) + len(system.variables) * max(1, system.max_body_len())


@dataclass
class ClosureResult:
    members: frozenset[Config]
    truncated: bool


def tau_closure(base, context: Context, seed: Config, caps: ClosureCaps = ClosureCaps()) -> ClosureResult:
    """Least set of configurations silently reachable from the seed without
    changing the decomposition image.

    Growth rules, for a member starting with Y over tail g (whose context is
    R'): a silent rule of Y whose body is absorbed by R' extends the set when
    Y itself is absorbed; otherwise the body is kept up to its last
    non-absorbed symbol, provided that prefix has the same image as Y.
    Members beyond the caps are kept but not expanded, and flagged.
    """
    if not base.has_context(context):
        raise ContextNotInDomain(context)
    system = base.system
    len_cap = caps.resolved_len(base, seed)
    members: set[Config] = {seed}
    queue: deque[Config] = deque([seed])
    truncated = False
    tail_ctx: dict[Config, Context] = {}

    def add(cfg: Config) -> None:
        nonlocal truncated
        if cfg in members:
            return
        if len(members) >= caps.size_cap:
            truncated = True
            return
        members.add(cfg)
        queue.append(cfg)

    while queue:
        cfg = queue.popleft()
        if not cfg:
            continue
        if len(cfg) > len_cap:
            truncated = True
            continue  # kept as a member, not expanded
        head, tail = cfg[0], cfg[1:]
        ctx = tail_ctx.get(tail)
        if ctx is None:
            ctx = red_of(base, context, tail)
            tail_ctx[tail] = ctx
        for rule in system.rules_by_head[head]:
            if not rule.silent:
                continue
            body = rule.body
            if head in ctx:
                if all(sym in ctx for sym in body):
                    add(body + tail)
                continue
            k = len(body)
            while k > 0 and body[k - 1] in ctx:
                k -= 1
            if k == 0:
                continue  # the body is fully absorbed but the head is not
            prefix = body[:k]
            if pd(base, ctx, prefix) == pd(base, ctx, (head,)):
                add(prefix + tail)
    return ClosureResult(frozenset(members), truncated)


def legal_moves(
    base, context: Context, config: Config, caps: ClosureCaps = ClosureCaps()
) -> tuple[frozenset[Outcome], bool]:
    """The image-preserving-silent-steps-then-one-move outcomes of a configuration."""
    closure = tau_closure(base, context, config, caps)
    outcomes: set[Outcome] = {(TAU, pd(base, context, config))}
    for member in closure.members:
        for tr in transitions(base.system, member):
            outcomes.add((tr.label, pd(base, context, tr.target)))
    return frozenset(outcomes), closure.truncated


def _sorted_outcomes(outcomes) -> list[Outcome]:
    return sorted(outcomes)


@dataclass
class PairReport:
    """Outcome comparison for one claimed equivalence (left = single variable)."""

    var: str
    body: Config
    context: Context
    status: str
    missing: list[Outcome] = field(default_factory=list)  # on the left, not the right
    extra: list[Outcome] = field(default_factory=list)    # on the right, not the left
    truncated: bool = False
    pd_mismatch: tuple[Config, Config] | None = None

    def to_payload(self) -> dict:
        return {
            "triple": {"var": self.var, "body": list(self.body), "context": sorted(self.context)},
            "side": "body-vs-var",
            "missing": [[label, list(image)] for label, image in self.missing],
            "extra": [[label, list(image)] for label, image in self.extra],
            "truncated": self.truncated,
            "status": self.status,
        }

    def render(self) -> str:
        head = f"({self.var}, {render_config(self.body)}, {{{', '.join(sorted(self.context))}}})"
        if self.status == CONSISTENT:
            return f"{head}: outcomes agree"
        if self.pd_mismatch:
            left, right = self.pd_mismatch
            return f"{head}: images differ: {render_config(left)} vs {render_config(right)}"
        bits = [f"{head}: {self.status}"]
        for label, image in self.missing:
            bits.append(f"  missing on body side: ({label}, {render_config(image)})")
        for label, image in self.extra:
            bits.append(f"  extra on body side: ({label}, {render_config(image)})")
        if self.truncated:
            bits.append("  (silent closure truncated)")
        return "\n".join(bits)


def consistent_pair(
    base, context: Context, var: str, body: Config, caps: ClosureCaps = ClosureCaps()
) -> PairReport:
    """Compare the legal-move outcomes of a variable and its claimed equal.

    Definite only when both closures are complete; any truncation yields
    ``indeterminate``, never a silently-true verdict.
    """
    left_pd = pd(base, context, (var,))
    right_pd = pd(base, context, body)
    if left_pd != right_pd:
        return PairReport(var, body, context, INCONSISTENT, pd_mismatch=(left_pd, right_pd))
    left, left_trunc = legal_moves(base, context, (var,), caps)
    right, right_trunc = legal_moves(base, context, body, caps)
    truncated = left_trunc or right_trunc
    missing = _sorted_outcomes(left - right)
    extra = _sorted_outcomes(right - left)
    if truncated:
        status = INDETERMINATE
    elif missing or extra:
        status = INCONSISTENT
    else:
        status = CONSISTENT
    return PairReport(var, body, context, status, missing, extra, truncated)


@dataclass
class ConsistencyReport:
    status: str
    witness: PairReport | None
    reports: list[PairReport]

    def to_payload(self) -> dict:
        return {
            "status": self.status,
            "witness": self.witness.to_payload() if self.witness else None,
            "failures": [r.to_payload() for r in self.reports if r.status != CONSISTENT],
        }


def check_consistency(base: PreBase, caps: ClosureCaps = ClosureCaps()) -> ConsistencyReport:
    """Check every decomposition and propagation triple of a base.

    Returns "consistent" only when every pair agrees with complete closures;
    a definite disagreement wins over indeterminate pairs.
    """
    reports: list[PairReport] = []
    for t in base.dec:
        reports.append(consistent_pair(base, t.context, t.var, t.body, caps))
    for t in base.prop:
        reports.append(consistent_pair(base, t.context, t.prime, (t.redundant, t.prime), caps))
    witness = next((r for r in reports if r.status == INCONSISTENT), None)
    if witness is not None:
        return ConsistencyReport(INCONSISTENT, witness, reports)
    if any(r.status == INDETERMINATE for r in reports):
        return ConsistencyReport(INDETERMINATE, None, reports)
    return ConsistencyReport(CONSISTENT, None, reports)
