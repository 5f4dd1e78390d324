"""Decomposition bases: guessed prime structure and its induced evaluators.

A *pre-base* fixes, for every context set in its domain, which variables are
primes, how every non-prime decomposes (one decomposition triple each), and
which variables are redundant in front of each prime (propagation triples).
The *context set* plays the role of "variables currently absorbed by the
suffix"; the empty context is always present and the domain is exactly what
propagation from the empty context reaches.

From that structure three evaluators are induced, all right-to-left folds:

* ``pd``      -- the prime-decomposition image of a configuration,
* ``red_of``  -- the context a configuration leaves behind for its prefix,
* ``rff``     -- the redundancy-free form (drop symbols the context absorbs).

A pre-base whose images respect the norm bound and whose decomposition bodies
are fixed points of ``pd`` is a *base*.  Nothing here claims semantic truth:
that is what the consistency check is for.  Evaluation is guarded by a
substitution budget so that malformed guesses are reported, never looped on.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property

from .grammar import BpaSystem, compute_norms
from .semantics import Config

Context = frozenset[str]

EMPTY: Context = frozenset()

IN_CONTEXT = "context"
PRIME = "prime"
NON_PRIME = "nonprime"


class BaseEvalError(ValueError):
    """Evaluation against a (pre-)base failed; the candidate is malformed."""


class ContextNotInDomain(BaseEvalError):
    def __init__(self, context: Context):
        self.context = context
        super().__init__(f"context {{{', '.join(sorted(context))}}} not in the base domain")


class MissingDecomposition(BaseEvalError):
    def __init__(self, var: str, context: Context):
        self.var = var
        self.context = context
        super().__init__(f"no decomposition for non-prime {var} at {{{', '.join(sorted(context))}}}")


class PdBudgetExceeded(BaseEvalError):
    def __init__(self) -> None:
        super().__init__("prime-decomposition evaluation exceeded its substitution budget")


class CcNormDiverged(BaseEvalError):
    def __init__(self, detail: str):
        super().__init__(f"class-change norm iteration did not stabilize: {detail}")


@dataclass(frozen=True)
class DecTriple:
    """States that ``var`` is a non-prime at ``context`` with image ``body``."""

    var: str
    body: Config
    context: Context


@dataclass(frozen=True)
class PropTriple:
    """States that ``redundant`` is absorbed in front of the prime ``prime``."""

    prime: str
    redundant: str
    context: Context


def _ctx_sort_key(system: BpaSystem, context: Context) -> tuple:
    return tuple(sorted(system.var_index[v] for v in context))


@dataclass(frozen=True)
class PreBase:
    """A candidate decomposition structure over a fixed system.

    ``primes`` maps every domain context to its prime set; ``dec`` and
    ``prop`` hold the triples.  Construction normalizes triple order, so two
    structurally equal candidates compare equal.
    """

    system: BpaSystem
    domain: frozenset[Context]
    primes: dict[Context, frozenset[str]]
    dec: tuple[DecTriple, ...]
    prop: tuple[PropTriple, ...]

    def __post_init__(self) -> None:
        key = lambda ctx: _ctx_sort_key(self.system, ctx)  # noqa: E731
        object.__setattr__(
            self, "dec",
            tuple(sorted(self.dec, key=lambda t: (key(t.context), self.system.var_index.get(t.var, -1)))),
        )
        object.__setattr__(
            self, "prop",
            tuple(sorted(
                self.prop,
                key=lambda t: (
                    key(t.context),
                    self.system.var_index.get(t.prime, -1),
                    self.system.var_index.get(t.redundant, -1),
                ),
            )),
        )

    @cached_property
    def norms(self) -> dict[str, int]:
        return compute_norms(self.system)

    @cached_property
    def dec_map(self) -> dict[tuple[str, Context], Config]:
        table: dict[tuple[str, Context], Config] = {}
        for t in self.dec:
            table.setdefault((t.var, t.context), t.body)
        return table

    @cached_property
    def prop_map(self) -> dict[tuple[str, Context], frozenset[str]]:
        table: dict[tuple[str, Context], set[str]] = {}
        for t in self.prop:
            table.setdefault((t.prime, t.context), set()).add(t.redundant)
        return {k: frozenset(v) for k, v in table.items()}

    # -- the evaluation surface shared with partial candidates in the search --

    def has_context(self, context: Context) -> bool:
        return context in self.primes

    def classify(self, sym: str, context: Context) -> str:
        if sym in context:
            return IN_CONTEXT  # absorbed; needs no partition of the context
        primes = self.primes.get(context)
        if primes is None:
            raise ContextNotInDomain(context)
        if sym in primes:
            return PRIME
        return NON_PRIME

    def red_prime(self, sym: str, context: Context) -> Context:
        return self.prop_map.get((sym, context), EMPTY)

    def dec_body(self, sym: str, context: Context) -> Config:
        body = self.dec_map.get((sym, context))
        if body is None:
            raise MissingDecomposition(sym, context)
        return body


# A base is a pre-base that passes check_base; operations that require one
# state it as a precondition rather than using a distinct type.
Base = PreBase


def pd_eval(base, context: Context, config: Config) -> tuple[Config, Context]:
    """Right-to-left fold computing both the image and the final context.

    Context symbols are dropped, primes are emitted (advancing the context by
    their propagation set), non-primes are substituted by their decomposition
    body.  The number of substitutions is capped by the total norm of the
    input plus one: any legal base stays below it, so exceeding the budget
    convicts the candidate.
    """
    if not base.has_context(context):
        raise ContextNotInDomain(context)
    norms = base.norms
    budget = sum(norms[s] for s in config) + 1
    substitutions = 0
    work = list(config)
    image: deque[str] = deque()
    ctx = context
    while work:
        sym = work.pop()
        kind = base.classify(sym, ctx)
        if kind == IN_CONTEXT:
            continue
        if kind == PRIME:
            image.appendleft(sym)
            ctx = base.red_prime(sym, ctx)
            continue
        substitutions += 1
        if substitutions > budget:
            raise PdBudgetExceeded()
        work.extend(base.dec_body(sym, ctx))
    return tuple(image), ctx


def pd(base, context: Context, config: Config) -> Config:
    """Prime-decomposition image of a configuration at a context."""
    return pd_eval(base, context, config)[0]


def red_of(base, context: Context, config: Config) -> Context:
    """The context a configuration presents to whatever stands before it."""
    return pd_eval(base, context, config)[1]


def rff(base, context: Context, config: Config) -> Config:
    """Redundancy-free form: drop each symbol absorbed by its running context."""
    if not base.has_context(context):
        raise ContextNotInDomain(context)
    out: deque[str] = deque()
    ctx = context
    for sym in reversed(config):
        if sym in ctx:
            continue
        out.appendleft(sym)
        ctx = red_of(base, ctx, (sym,))
    return tuple(out)


def check_pre_base(system: BpaSystem, candidate: PreBase) -> list[str]:
    """Structural diagnostics; empty means the candidate is a pre-base.

    Checks the partition per context, triple shapes, uniqueness of
    decompositions, and that the domain is exactly the propagation closure of
    the empty context.
    """
    problems: list[str] = []
    declared = set(system.variables)
    if EMPTY not in candidate.domain:
        problems.append("domain must contain the empty context")
    if set(candidate.primes) != set(candidate.domain):
        problems.append("primes must be assigned for exactly the domain contexts")
    for ctx in sorted(candidate.domain, key=lambda c: _ctx_sort_key(system, c)):
        name = "{" + ", ".join(system.sort_vars(ctx)) + "}"
        if not ctx <= declared:
            problems.append(f"context {name} mentions undeclared variables")
            continue
        primes = candidate.primes.get(ctx, frozenset())
        if not primes <= declared - ctx:
            problems.append(f"primes at {name} must be declared variables outside the context")
        non_primes = declared - ctx - primes
        decs_here = [t for t in candidate.dec if t.context == ctx]
        seen: set[str] = set()
        for t in decs_here:
            if t.var in seen:
                problems.append(f"duplicate decomposition for {t.var} at {name}")
            seen.add(t.var)
            if t.var not in non_primes:
                problems.append(f"decomposition target {t.var} at {name} is not a non-prime")
            if not t.body:
                problems.append(f"empty decomposition body for {t.var} at {name}")
            elif not set(t.body) <= declared:
                problems.append(f"decomposition body of {t.var} at {name} uses undeclared variables")
            elif t.body[-1] not in primes:
                problems.append(f"decomposition body of {t.var} at {name} does not end in a prime")
        for var in system.sort_vars(non_primes - seen):
            problems.append(f"non-prime {var} at {name} has no decomposition")
    for t in candidate.prop:
        name = "{" + ", ".join(system.sort_vars(t.context)) + "}"
        if t.context not in candidate.domain:
            problems.append(f"propagation triple for {t.prime} uses context {name} outside the domain")
        elif t.prime not in candidate.primes.get(t.context, frozenset()):
            problems.append(f"propagation triple for {t.prime} at {name}: not a prime there")
        if t.redundant not in declared:
            problems.append(f"propagation triple for {t.prime} names undeclared {t.redundant}")
    # propagation closure from the empty context must give exactly the domain
    reached: set[Context] = {EMPTY}
    queue: deque[Context] = deque([EMPTY])
    while queue:
        ctx = queue.popleft()
        if ctx not in candidate.domain:
            name = "{" + ", ".join(system.sort_vars(ctx)) + "}"
            problems.append(f"domain not propagation-closed: missing {name}")
            continue
        for prime in candidate.primes.get(ctx, frozenset()):
            nxt = candidate.prop_map.get((prime, ctx), EMPTY)
            if nxt not in reached:
                reached.add(nxt)
                queue.append(nxt)
    for ctx in candidate.domain - reached:
        name = "{" + ", ".join(system.sort_vars(ctx)) + "}"
        problems.append(f"domain context {name} unreachable by propagation")
    return problems


def check_base(system: BpaSystem, candidate: PreBase) -> list[str]:
    """Base-level diagnostics, assuming the pre-base checks pass.

    Verifies the norm bound on every image and that every decomposition body
    is a fixed point of ``pd``; evaluation failures (budget, missing pieces)
    are reported as violations.
    """
    problems: list[str] = []
    norms = candidate.norms
    for ctx in sorted(candidate.domain, key=lambda c: _ctx_sort_key(system, c)):
        name = "{" + ", ".join(system.sort_vars(ctx)) + "}"
        for var in system.variables:
            try:
                image = pd(candidate, ctx, (var,))
            except BaseEvalError as exc:
                problems.append(f"pd({var}) at {name} failed: {exc}")
                continue
            if len(image) > norms[var]:
                problems.append(
                    f"pd({var}) at {name} has length {len(image)} > norm {norms[var]}"
                )
    for t in candidate.dec:
        name = "{" + ", ".join(system.sort_vars(t.context)) + "}"
        try:
            image = pd(candidate, t.context, t.body)
        except BaseEvalError as exc:
            problems.append(f"decomposition body of {t.var} at {name} failed to evaluate: {exc}")
            continue
        if image != t.body:
            problems.append(
                f"decomposition body of {t.var} at {name} is not in prime form "
                f"(pd gives {' '.join(image) or '.'})"
            )
    return problems


def cc_norm_table(base: PreBase, norms: dict[str, int] | None = None) -> dict[tuple[str, Context], int]:
    """Least number of class-changing steps to erase each variable, per context.

    Value iteration from above on: value(X, R) = 0 for X in R, otherwise the
    minimum over rules X -a-> Z1..Zk of [image changed? 1 : 0] plus the sum of
    value(Zi, Ri) over the body, each Zi taken at the context its suffix
    leaves behind.  A candidate whose iteration fails to stabilize within
    |V| * |domain| * max-norm rounds is reported as malformed.
    """
    system = base.system
    if norms is None:
        norms = base.norms
    domain = sorted(base.domain, key=lambda c: _ctx_sort_key(system, c))
    inf = math.inf
    value: dict[tuple[str, Context], float] = {}
    for ctx in domain:
        for var in system.variables:
            value[(var, ctx)] = 0 if var in ctx else inf
    # per (rule, context): the class-change weight and the body evaluation plan
    plans: dict[Context, list[tuple[str, int, list[tuple[str, Context]]]]] = {}
    for ctx in domain:
        rows: list[tuple[str, int, list[tuple[str, Context]]]] = []
        for rule in base.system.rules:
            if rule.head in ctx:
                continue
            change = 0 if pd(base, ctx, rule.body) == pd(base, ctx, (rule.head,)) else 1
            parts: list[tuple[str, Context]] = []
            running = ctx
            for sym in reversed(rule.body):
                parts.append((sym, running))
                running = red_of(base, running, (sym,))
            rows.append((rule.head, change, parts))
        plans[ctx] = rows
    # allow the full budget of changing rounds plus one quiet confirming round
    max_rounds = max(1, len(system.variables)) * max(1, len(domain)) * max(norms.values(), default=1)
    for _ in range(max_rounds + 1):
        changed = False
        for ctx in domain:
            for head, change, parts in plans[ctx]:
                total: float = change
                for sym, part_ctx in parts:
                    v = value[(sym, part_ctx)]
                    if v is inf or v == inf:
                        total = inf
                        break
                    total += v
                if total < value[(head, ctx)]:
                    value[(head, ctx)] = total
                    changed = True
        if not changed:
            break
    else:
        raise CcNormDiverged("no fixpoint within the iteration cap")
    for (var, ctx), v in value.items():
        if v == inf:
            raise CcNormDiverged(f"value of {var} at context never became finite")
    return {k: int(v) for k, v in value.items()}


def cc_norm(base: PreBase, table: dict[tuple[str, Context], int], context: Context, config: Config) -> int:
    """Class-change norm of a configuration: the context-propagated symbol sum."""
    total = 0
    ctx = context
    for sym in reversed(config):
        total += table[(sym, ctx)]
        ctx = red_of(base, ctx, (sym,))
    return total


def context_key(system: BpaSystem, context: Context) -> str:
    return ",".join(system.sort_vars(context))


def base_to_payload(base: PreBase) -> dict:
    """Certificate payload (JSON-ready); loading it back is lossless."""
    system = base.system
    domain = sorted(base.domain, key=lambda c: _ctx_sort_key(system, c))
    prop_groups: dict[tuple[str, Context], list[str]] = {}
    for t in base.prop:
        prop_groups.setdefault((t.prime, t.context), []).append(t.redundant)
    return {
        "domain": [list(system.sort_vars(ctx)) for ctx in domain],
        "primes": {
            context_key(system, ctx): list(system.sort_vars(base.primes[ctx])) for ctx in domain
        },
        "dec": [
            {"var": t.var, "body": list(t.body), "context": list(system.sort_vars(t.context))}
            for t in base.dec
        ],
        "prop": [
            {
                "prime": prime,
                "redundant": list(system.sort_vars(reds)),
                "context": list(system.sort_vars(ctx)),
            }
            for (prime, ctx), reds in sorted(
                prop_groups.items(),
                key=lambda kv: (_ctx_sort_key(system, kv[0][1]), system.var_index[kv[0][0]]),
            )
        ],
    }


def base_from_payload(system: BpaSystem, payload: dict) -> PreBase:
    """Rebuild a candidate from its certificate payload.

    Purely structural: the result still has to pass the pre-base and base
    checks before anything relies on it.
    """
    try:
        domain = frozenset(frozenset(names) for names in payload["domain"])
        primes = {
            frozenset(key.split(",")) if key else EMPTY: frozenset(values)
            for key, values in payload["primes"].items()
        }
        dec = tuple(
            DecTriple(entry["var"], tuple(entry["body"]), frozenset(entry["context"]))
            for entry in payload["dec"]
        )
        prop = tuple(
            PropTriple(entry["prime"], red, frozenset(entry["context"]))
            for entry in payload["prop"]
            for red in entry["redundant"]
        )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed base payload: {exc}") from exc
    return PreBase(system, domain, primes, dec, prop)
