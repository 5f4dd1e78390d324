"""Deciding equivalence: guess bases, verify them, certify or exhaust.

Two engines cooperate:

* ``propose_base`` builds the base an exact decision would use, by estimating
  classes and redundancy sets with the bounded oracle.  Its output is only a
  candidate: certification (structure checks plus consistency) happens
  downstream, so oracle imprecision can never leak into a verdict.
* ``enumerate_bases`` walks every candidate base within syntactic bounds
  (decomposition bodies never longer than the norm, domains capped by the
  number of variable subsets).  The walk assigns one decision at a time --
  a context's prime set, a prime's propagation set, a non-prime's body --
  and eagerly re-checks every triple whose evaluation cone is complete,
  cutting a subtree as soon as one triple is *definitely* inconsistent.
  Eager cuts only ever remove candidates that could never certify anything,
  so a completed, truncation-free walk supports a sound negative verdict.

"equivalent" verdicts always carry a re-verified certificate; "inequivalent"
is only ever claimed from a fully drained, truncation-free enumeration or
from an untainted oracle refutation.
"""

from __future__ import annotations

import itertools
import time
from collections import deque
from dataclasses import dataclass, field

from .base_model import (
    EMPTY,
    BaseEvalError,
    CcNormDiverged,
    Context,
    DecTriple,
    PreBase,
    PropTriple,
    cc_norm,
    cc_norm_table,
    check_base,
    check_pre_base,
    pd,
    pd_eval,
)
from .consistency import (
    CONSISTENT,
    INCONSISTENT,
    INDETERMINATE,
    ClosureCaps,
    ConsistencyReport,
    PairReport,
    check_consistency,
    consistent_pair,
)
from .grammar import BpaSystem, compute_norms, detect_silent_variables
from .oracle import (
    NO,
    OracleParams,
    approximant_check,
    build_arena,
    finite_branching_quotient,
)
from .semantics import Config, render_config

GUIDED = "guided"
EXHAUSTIVE = "exhaustive"
AUTO = "auto"

EQUIVALENT = "equivalent"
INEQUIVALENT = "inequivalent"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class SearchBounds:
    """Budgets for enumeration and checking; ``None`` means the natural bound."""

    max_contexts: int | None = None   # default: one per variable subset
    max_nodes: int = 200_000          # decision assignments in the walk
    max_candidates: int | None = None
    # tighter closure cap than the standalone consistency default: a single
    # triple check must stay cheap inside the walk; truncation degrades the
    # candidate to indeterminate, never to a wrong verdict
    caps: ClosureCaps = ClosureCaps(size_cap=5_000)
    eager_consistency: bool = True
    cc_prune: bool = True
    oracle: OracleParams = OracleParams()
    jobs: int = 1

    def context_limit(self, system: BpaSystem) -> int:
        if self.max_contexts is not None:
            return self.max_contexts
        return 2 ** len(system.variables)


@dataclass
class Verdict:
    status: str
    certificate: PreBase | None = None
    evidence: str | None = None
    budgets: dict = field(default_factory=dict)
    trace: list | None = None

    def exit_code(self) -> int:
        return {EQUIVALENT: 0, INEQUIVALENT: 1}.get(self.status, 2)


class _Pending(Exception):
    """Evaluation hit a decision that the search has not assigned yet."""

    def __init__(self, decision: tuple):
        self.decision = decision
        super().__init__(str(decision))


class _Partial:
    """A partially assigned candidate, duck-typing the base evaluation surface.

    Accessors optionally record what they observed, so that a triple check can
    be memoized together with exactly the fragment it depended on and reused
    in sibling branches that agree on that fragment.
    """

    def __init__(self, system: BpaSystem, norms: dict[str, int]):
        self.system = system
        self.norms = norms
        self.primes: dict[Context, frozenset[str]] = {}
        self.red: dict[tuple[str, Context], frozenset[str]] = {}
        self.bodies: dict[tuple[str, Context], Config] = {}
        self.reads: dict | None = None

    def has_context(self, context: Context) -> bool:
        if context not in self.primes:
            raise _Pending(("partition", context))
        return True

    def classify(self, sym: str, context: Context) -> str:
        if sym in context:
            return "context"  # partition-independent
        primes = self.primes.get(context)
        if primes is None:
            raise _Pending(("partition", context))
        kind = "prime" if sym in primes else "nonprime"
        if self.reads is not None:
            self.reads[("cls", sym, context)] = kind
        return kind

    def red_prime(self, sym: str, context: Context) -> Context:
        got = self.red.get((sym, context))
        if got is None:
            raise _Pending(("red", sym, context))
        if self.reads is not None:
            self.reads[("red", sym, context)] = got
        return got

    def dec_body(self, sym: str, context: Context) -> Config:
        got = self.bodies.get((sym, context))
        if got is None:
            raise _Pending(("body", sym, context))
        if self.reads is not None:
            self.reads[("body", sym, context)] = got
        return got

    def fact_value(self, fact: tuple):
        """Current value of a recorded observation; None when unassigned."""
        kind = fact[0]
        if kind == "cls":
            _, sym, context = fact
            primes = self.primes.get(context)
            if primes is None:
                return None
            return "prime" if sym in primes else "nonprime"
        if kind == "red":
            return self.red.get((fact[1], fact[2]))
        return self.bodies.get((fact[1], fact[2]))


@dataclass
class _Check:
    """One triple claim awaiting (or holding) its consistency verdict."""

    kind: str  # "dec" | "prop"
    var: str
    body: Config
    context: Context
    status: str | None = None  # None = unresolved
    need: tuple | None = None
    report: PairReport | None = None


class BaseEnumeration:
    """Iterator over candidate bases, with exhaustiveness accounting.

    After draining, ``complete`` tells whether every candidate in the bounded
    space was either yielded or cut by a *sound* prune; budget stops and
    context-cap skips clear it.  ``with_reports`` pairs each candidate with
    its eager consistency report when eager checking is on.
    """

    def __init__(self, system: BpaSystem, norms: dict[str, int], bounds: SearchBounds):
        self.system = system
        self.norms = norms
        self.bounds = bounds
        self.nodes = 0
        self.candidates = 0
        self.budget_stop = False
        self.context_cap_hit = False

    @property
    def complete(self) -> bool:
        return not (self.budget_stop or self.context_cap_hit)

    # ---- choice generators (deterministic order) ----

    def _subsets(self, names: tuple[str, ...], include_empty: bool):
        start = 0 if include_empty else 1
        for size in range(start, len(names) + 1):
            for combo in itertools.combinations(names, size):
                yield frozenset(combo)

    def _partition_choices(self, context: Context):
        rest = tuple(v for v in self.system.variables if v not in context)
        if not rest:
            yield frozenset()
            return
        yield from self._subsets(rest, include_empty=False)

    def _red_choices(self):
        yield from self._subsets(self.system.variables, include_empty=True)

    def _body_choices(self, partial: _Partial, var: str, context: Context):
        """Candidate decomposition bodies: prime-led chains, shortest first.

        Built right to left; where a chain context is already assigned only
        its primes extend the chain, otherwise any variable may (the final
        fixed-point check culls pretenders).
        """
        max_len = self.norms[var]
        chains: list[Config] = []

        def extend(chain: tuple[str, ...], ctx: Context | None):
            if chain:
                chains.append(chain)
            if len(chain) >= max_len:
                return
            if ctx is not None and ctx in partial.primes:
                symbols = partial.primes[ctx]
            else:
                symbols = self.system.variables
            for sym in self.system.sort_vars(symbols):
                nxt = partial.red.get((sym, ctx)) if ctx is not None else None
                extend((sym,) + chain, nxt)

        for first in self.system.sort_vars(partial.primes[context]):
            extend((first,), partial.red.get((first, context)))
        chains.sort(key=lambda c: (len(c), tuple(self.system.var_index[s] for s in c)))
        yield from chains

    # ---- the walk ----

    def __iter__(self):
        for base, _report in self._walk():
            yield base

    def with_reports(self):
        yield from self._walk()

    def _walk(self):
        system = self.system
        partial = _Partial(system, self.norms)
        queue: list[tuple] = [("partition", EMPTY)]
        checks: list[_Check] = []
        ctx_limit = self.bounds.context_limit(system)

        def next_decision():
            for check in checks:
                if check.status is None and check.need is not None:
                    return check.need
            for d in queue:
                if not self._assigned(partial, d):
                    return d
            return None

        # Two-level cache per claim: the key sets an evaluation read, and for
        # each, a table from the read values to the verdict.  An evaluation is
        # a pure function of what it reads, so value-equality of the reads
        # makes the cached verdict exact; unassigned reads (None) never match.
        memo: dict[tuple, list[tuple[tuple, dict]]] = {}

        def _fact_order(fact: tuple):
            kind, sym, context = fact
            return (kind, sym, tuple(sorted(context)))

        def evaluate_check(check: _Check):
            key = (check.var, check.body, check.context)
            buckets = memo.setdefault(key, [])
            for keys, table in buckets:
                hit = table.get(tuple(partial.fact_value(k) for k in keys))
                if hit is not None:
                    return hit
            partial.reads = {}
            try:
                report = consistent_pair(
                    partial, check.context, check.var, check.body, self.bounds.caps
                )
                outcome = (report.status, report)
            except BaseEvalError:
                outcome = ("reject", None)
            finally:
                reads, partial.reads = partial.reads, None
            keys = tuple(sorted(reads.keys(), key=_fact_order))
            values = tuple(reads[k] for k in keys)
            for existing_keys, table in buckets:
                if existing_keys == keys:
                    table[values] = outcome
                    break
            else:
                if len(buckets) < 64:
                    buckets.append((keys, {values: outcome}))
            return outcome

        def run_checks(journal):
            if not self.bounds.eager_consistency:
                return True
            for check in checks:
                if check.status is not None:
                    continue
                if check.need is not None and not self._assigned(partial, check.need):
                    continue
                try:
                    status, report = evaluate_check(check)
                except _Pending as pending:
                    journal.append(("need", check, check.need))
                    check.need = pending.decision
                    continue
                if status == "reject":
                    return False  # evaluation convicted the assigned fragment
                journal.append(("status", check, check.status, check.need))
                check.status = status
                check.need = None
                check.report = report
                if status == INCONSISTENT:
                    return False
            return True

        def undo(journal):
            for entry in reversed(journal):
                tag = entry[0]
                if tag == "need":
                    _, check, old = entry
                    check.need = old
                elif tag == "status":
                    _, check, old_status, old_need = entry
                    check.status = old_status
                    check.need = old_need
                    check.report = None
                elif tag == "primes":
                    del partial.primes[entry[1]]
                elif tag == "red":
                    del partial.red[entry[1]]
                elif tag == "body":
                    del partial.bodies[entry[1]]
                elif tag == "queue":
                    for _ in range(entry[1]):
                        queue.pop()
                elif tag == "checks":
                    for _ in range(entry[1]):
                        checks.pop()

        def apply(decision, choice, journal) -> bool:
            """Mutate the state for one decision; False = reject this choice."""
            kind = decision[0]
            if kind == "partition":
                context = decision[1]
                partial.primes[context] = choice
                journal.append(("primes", context))
                added_q = 0
                for prime in system.sort_vars(choice):
                    queue.append(("red", prime, context))
                    added_q += 1
                for var in system.variables:
                    if var not in context and var not in choice:
                        queue.append(("body", var, context))
                        added_q += 1
                journal.append(("queue", added_q))
            elif kind == "red":
                _, prime, context = decision
                partial.red[(prime, context)] = choice
                journal.append(("red", (prime, context)))
                added_q = 0
                added_c = 0
                if choice not in partial.primes and all(
                    q != ("partition", choice) for q in queue
                ):
                    known = len(partial.primes) + sum(1 for q in queue if q[0] == "partition" and q[1] not in partial.primes)
                    if known >= ctx_limit:
                        self.context_cap_hit = True
                        return False
                    queue.append(("partition", choice))
                    added_q += 1
                for red_var in system.sort_vars(choice):
                    checks.append(_Check("prop", prime, (red_var, prime), context))
                    added_c += 1
                journal.append(("queue", added_q))
                journal.append(("checks", added_c))
            else:  # body
                _, var, context = decision
                partial.bodies[(var, context)] = choice
                journal.append(("body", (var, context)))
                checks.append(_Check("dec", var, choice, context))
                journal.append(("checks", 1))
            return True

        def finalize():
            # bodies must be fixed points; everything else the walk guarantees
            # by construction (partitions, closure, body shape and length)
            try:
                for (var, context), body in partial.bodies.items():
                    image, _ = pd_eval(partial, context, body)
                    if image != body:
                        return None
            except (BaseEvalError, _Pending):
                return None
            domain = frozenset(partial.primes)
            dec = tuple(DecTriple(v, b, c) for (v, c), b in partial.bodies.items())
            prop = tuple(
                PropTriple(p, x, c) for (p, c), reds in partial.red.items() for x in reds
            )
            candidate = PreBase(system, domain, dict(partial.primes), dec, prop)
            report = None
            if self.bounds.eager_consistency:
                if all(c.status is not None for c in checks):
                    pair_reports = [c.report for c in checks if c.report is not None]
                    status = (
                        INDETERMINATE
                        if any(c.status == INDETERMINATE for c in checks)
                        else CONSISTENT
                    )
                    report = ConsistencyReport(status, None, pair_reports)
            # the class-change-norm filter is only worth paying for when the
            # consistency of the candidate is not already settled
            if report is None and self.bounds.cc_prune:
                try:
                    table = cc_norm_table(candidate, self.norms)
                except CcNormDiverged:
                    return None
                for t in candidate.dec:
                    if table[(t.var, t.context)] != cc_norm(candidate, table, t.context, t.body):
                        return None
            return candidate, report

        stop = False

        def dfs():
            nonlocal stop
            if stop:
                return
            decision = next_decision()
            if decision is None:
                result = finalize()
                if result is not None:
                    self.candidates += 1
                    yield result
                    if (
                        self.bounds.max_candidates is not None
                        and self.candidates >= self.bounds.max_candidates
                    ):
                        self.budget_stop = True
                        stop = True
                return
            kind = decision[0]
            if kind == "partition":
                choices = self._partition_choices(decision[1])
            elif kind == "red":
                choices = self._red_choices()
            else:
                choices = self._body_choices(partial, decision[1], decision[2])
            for choice in choices:
                if stop:
                    return
                self.nodes += 1
                if self.nodes > self.bounds.max_nodes:
                    self.budget_stop = True
                    stop = True
                    return
                journal: list = []
                ok = apply(decision, choice, journal)
                if ok and run_checks(journal):
                    yield from dfs()
                undo(journal)

        yield from dfs()

    def _assigned(self, partial: _Partial, decision: tuple) -> bool:
        kind = decision[0]
        if kind == "partition":
            return decision[1] in partial.primes
        if kind == "red":
            return (decision[1], decision[2]) in partial.red
        return (decision[1], decision[2]) in partial.bodies


def enumerate_bases(system: BpaSystem, norms: dict[str, int], bounds: SearchBounds | None = None) -> BaseEnumeration:
    """Stream of candidate bases within the bounds (see BaseEnumeration).

    With ``eager_consistency`` on (the default), candidates whose triples are
    provably inconsistent are cut early; switch it off for the raw stream of
    everything passing the structural checks.
    """
    if detect_silent_variables(system):
        raise ValueError("enumerate_bases requires a silent-free system")
    return BaseEnumeration(system, norms, bounds or SearchBounds())


# ---------------------------------------------------------------------------
# Oracle-guided proposal of the intended base
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProposeParams:
    oracle: OracleParams = OracleParams()
    max_contexts: int = 64
    max_chains_per_context: int = 20_000


@dataclass
class ProposeResult:
    prebase: PreBase
    complete: bool
    notes: list[str]


class _ContextInfo:
    def __init__(self):
        self.primes: frozenset[str] = frozenset()
        self.red: dict[str, frozenset[str]] = {}
        self.equivalents: dict[str, list[Config]] = {}


def _quotient_blocks(system, seeds, params: OracleParams):
    """Shared arena quotient; returns (block id per config, complete flag)."""
    seeds = list(dict.fromkeys(seeds))
    cap = max(params.len_cap, max((len(s) for s in seeds), default=0))
    arena = build_arena(system, seeds, cap, params.max_states)
    block = finite_branching_quotient(arena.lts)
    return {cfg: block[arena.index[cfg]] for cfg in seeds}, arena.complete


def _analyze_context(system, norms, context, gamma, params: ProposeParams, notes):
    """Estimate classes, decomposability, primes and propagation sets at one context."""
    info = _ContextInfo()
    oracle = params.oracle
    non_ctx = [v for v in system.variables if v not in context]
    max_norm = max((norms[v] for v in non_ctx), default=1)

    # redundancy estimates per chain suffix, shared across chain construction
    red_cache: dict[Config, frozenset[str]] = {}
    complete = True

    def est_red(suffix: Config) -> frozenset[str]:
        nonlocal complete
        got = red_cache.get(suffix)
        if got is not None:
            return got
        seeds = [suffix + gamma] + [(v,) + suffix + gamma for v in system.variables]
        blocks, ok = _quotient_blocks(system, seeds, oracle)
        if not ok:
            complete = False
        base_block = blocks[suffix + gamma]
        result = frozenset(
            v for v in system.variables if blocks[(v,) + suffix + gamma] == base_block
        )
        red_cache[suffix] = result
        return result

    # context-redundancy-free chains, built right to left; only variables with
    # norm at least 2 can decompose, and an equivalent chain must show exactly
    # the same visible labels, which prunes the pool hard
    wanted_labels = {system.visible_labels[v] for v in non_ctx if norms[v] >= 2}
    chains: list[Config] = []
    frontier: list[Config] = [()]
    while frontier:
        suffix = frontier.pop()
        if len(suffix) >= max_norm:
            continue
        absorbed = context if suffix == () else est_red(suffix)
        for sym in system.sort_vars(set(system.variables) - absorbed):
            chain = (sym,) + suffix
            if len(chains) >= params.max_chains_per_context:
                notes.append("chain pool capped; proposal may be partial")
                complete = False
                frontier.clear()
                break
            chains.append(chain)
            frontier.append(chain)

    # keep long chains only when their visible labels match some target
    def labels_of(chain: Config) -> frozenset[str]:
        out: set[str] = set()
        for sym in chain:
            out |= system.visible_labels[sym]
        return frozenset(out)

    pool = [c for c in chains if len(c) == 1 or labels_of(c) in wanted_labels]

    seeds = [gamma] + [(v,) + gamma for v in non_ctx] + [c + gamma for c in pool if len(c) >= 2]
    blocks, ok = _quotient_blocks(system, seeds, oracle)
    if not ok:
        complete = False

    class_of = {v: blocks[(v,) + gamma] for v in non_ctx}
    chain_class = {c: blocks[c + gamma] for c in pool if len(c) >= 2}

    decomposable: set[str] = set()
    for v in non_ctx:
        if norms[v] < 2:
            continue
        for chain, blk in chain_class.items():
            if 2 <= len(chain) <= norms[v] and blk == class_of[v]:
                decomposable.add(v)
                break

    by_class: dict[int, list[str]] = {}
    for v in non_ctx:
        by_class.setdefault(class_of[v], []).append(v)
    primes: set[str] = set()
    for members in by_class.values():
        ordered = system.sort_vars(members)
        candidates = [m for m in ordered if m not in decomposable]
        if candidates:
            primes.add(candidates[0])
    info.primes = frozenset(primes)

    for prime in system.sort_vars(primes):
        info.red[prime] = est_red((prime,))

    for v in non_ctx:
        if v in primes:
            continue
        options: list[Config] = []
        for other in by_class[class_of[v]]:
            if other in primes:
                options.append((other,))
        for chain, blk in chain_class.items():
            if blk == class_of[v] and 2 <= len(chain) <= norms[v]:
                options.append(chain)
        options.sort(key=lambda c: (len(c), tuple(system.var_index[s] for s in c)))
        info.equivalents[v] = options
    return info, complete


def propose_base(system: BpaSystem, params: ProposeParams | None = None) -> ProposeResult:
    """Construct the candidate base an exact decision procedure intends.

    Oracle estimates drive every choice (classes, decomposability, redundancy
    propagation); representatives are the declaration-least non-decomposable
    member of each class.  The result must still pass the structure and
    consistency checks before it certifies anything.
    """
    params = params or ProposeParams()
    if detect_silent_variables(system):
        raise ValueError("propose_base requires a silent-free system")
    norms = compute_norms(system)
    notes: list[str] = []
    complete = True

    reprs: dict[Context, Config] = {EMPTY: ()}
    order: list[Context] = [EMPTY]
    queue: deque[Context] = deque([EMPTY])
    infos: dict[Context, _ContextInfo] = {}
    while queue:
        context = queue.popleft()
        if context in infos:
            continue
        if len(infos) >= params.max_contexts:
            notes.append("context budget exhausted; proposal flagged unusable")
            complete = False
            break
        info, ctx_complete = _analyze_context(system, norms, context, reprs[context], params, notes)
        complete = complete and ctx_complete
        infos[context] = info
        for prime in system.sort_vars(info.primes):
            red = info.red[prime]
            if red not in reprs:
                reprs[red] = (prime,) + reprs[context]
                order.append(red)
                queue.append(red)

    primes_map = {ctx: infos[ctx].primes for ctx in infos}
    prop = tuple(
        PropTriple(prime, red_var, ctx)
        for ctx in order
        if ctx in infos
        for prime in system.sort_vars(infos[ctx].primes)
        for red_var in system.sort_vars(infos[ctx].red[prime])
    )

    def chain_ok(body: Config, context: Context) -> bool:
        ctx = context
        for sym in reversed(body):
            if ctx not in primes_map or sym not in primes_map[ctx]:
                return False
            ctx = infos[ctx].red.get(sym, EMPTY)
        return True

    dec: list[DecTriple] = []
    for ctx in order:
        if ctx not in infos:
            continue
        info = infos[ctx]
        for var, options in info.equivalents.items():
            body = next((b for b in options if chain_ok(b, ctx)), None)
            if body is None:
                notes.append(f"no decomposition found for {var}; proposal flagged unusable")
                complete = False
                body = options[0] if options else (var,)
            dec.append(DecTriple(var, body, ctx))

    prebase = PreBase(system, frozenset(infos), primes_map, tuple(dec), prop)
    return ProposeResult(prebase, complete, notes)


# ---------------------------------------------------------------------------
# The decision procedure
# ---------------------------------------------------------------------------


def certify(system: BpaSystem, candidate: PreBase, caps: ClosureCaps = ClosureCaps()):
    """Full certification: structure checks then consistency."""
    problems = check_pre_base(system, candidate)
    if problems:
        return None, problems
    problems = check_base(system, candidate)
    if problems:
        return None, problems
    return check_consistency(candidate, caps), []


def _verified_equivalent(system, base, left, right, caps) -> bool:
    """Independent re-verification backing every positive verdict."""
    report, problems = certify(system, base, caps)
    if problems or report is None or report.status != CONSISTENT:
        return False
    return pd(base, EMPTY, left) == pd(base, EMPTY, right)


def render_trace(trace: list | None) -> str:
    if not trace:
        return "oracle refutation"
    bits = []
    for step in trace:
        if "action" in step:
            bits.append(
                f"{step['attacker']} plays {render_config(step['from'])} "
                f"-{step['action']}-> {render_config(step['to'])}"
            )
        else:
            resp = step.get("response")
            bits.append(
                "defender response "
                + (render_config(resp) if resp is not None else "stays")
                + " fails"
            )
    return "; ".join(bits)


def _checked_candidates(enum: BaseEnumeration, bounds: SearchBounds):
    """Candidates paired with consistency reports, filling gaps left by the
    eager checker; with jobs > 1 the fills run on a thread pool, joined in
    deterministic order so verdicts never depend on timing."""
    if bounds.jobs <= 1:
        for candidate, report in enum.with_reports():
            yield candidate, report or check_consistency(candidate, bounds.caps)
        return
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=bounds.jobs) as pool:
        batch: list = []

        def drain(batch):
            missing = [c for c, r in batch if r is None]
            fresh = iter(pool.map(lambda c: check_consistency(c, bounds.caps), missing))
            for candidate, report in batch:
                yield candidate, report if report is not None else next(fresh)

        for item in enum.with_reports():
            batch.append(item)
            if len(batch) >= bounds.jobs * 4:
                yield from drain(batch)
                batch = []
        yield from drain(batch)


def decide_equivalence(
    system: BpaSystem,
    left: Config,
    right: Config,
    strategy: str = AUTO,
    bounds: SearchBounds | None = None,
) -> Verdict:
    """Decide whether two configurations are branching bisimilar.

    guided: propose a base, certify it, compare images -- positive answers only.
    exhaustive: additionally drain the bounded enumeration; a certificate-free,
    truncation-free drain refutes.  auto: guided, then an oracle refutation
    attempt, then exhaustive.
    """
    bounds = bounds or SearchBounds()
    if strategy not in (GUIDED, EXHAUSTIVE, AUTO):
        raise ValueError(f"unknown strategy {strategy!r}")
    silent = detect_silent_variables(system)
    if silent:
        raise ValueError("decide_equivalence requires a silent-free system")
    for sym in (*left, *right):
        if sym not in system.var_index:
            raise ValueError(f"undeclared variable {sym!r} in configuration")

    budgets: dict = {"strategy": strategy}
    started = time.monotonic()
    norms = compute_norms(system)

    proposal = propose_base(system, ProposeParams(oracle=bounds.oracle))
    budgets["proposal_complete"] = proposal.complete
    report, problems = certify(system, proposal.prebase, bounds.caps)
    guided_ok = not problems and report is not None and report.status == CONSISTENT
    budgets["guided_certified"] = guided_ok
    if guided_ok and pd(proposal.prebase, EMPTY, left) == pd(proposal.prebase, EMPTY, right):
        if _verified_equivalent(system, proposal.prebase, left, right, bounds.caps):
            budgets["elapsed_s"] = time.monotonic() - started
            return Verdict(EQUIVALENT, certificate=proposal.prebase, budgets=budgets)

    if strategy == GUIDED:
        budgets["elapsed_s"] = time.monotonic() - started
        return Verdict(UNKNOWN, evidence="guided search did not certify", budgets=budgets)

    if strategy == AUTO:
        res = approximant_check(
            system, left, right,
            depth=bounds.oracle.depth, len_cap=bounds.oracle.len_cap,
            tau_cap=bounds.oracle.tau_cap, max_states=bounds.oracle.max_states,
        )
        if res.value == NO:
            budgets["elapsed_s"] = time.monotonic() - started
            return Verdict(
                INEQUIVALENT,
                evidence="oracle refutation: " + render_trace(res.trace),
                trace=res.trace,
                budgets=budgets,
            )

    enum = enumerate_bases(system, norms, bounds)
    indeterminate = 0
    for candidate, rep in _checked_candidates(enum, bounds):
        if rep.status == CONSISTENT:
            if pd(candidate, EMPTY, left) == pd(candidate, EMPTY, right):
                if _verified_equivalent(system, candidate, left, right, bounds.caps):
                    budgets.update(nodes=enum.nodes, candidates=enum.candidates)
                    budgets["elapsed_s"] = time.monotonic() - started
                    return Verdict(EQUIVALENT, certificate=candidate, budgets=budgets)
        elif rep.status == INDETERMINATE:
            indeterminate += 1
    budgets.update(
        nodes=enum.nodes,
        candidates=enum.candidates,
        indeterminate_candidates=indeterminate,
        enumeration_complete=enum.complete,
    )
    budgets["elapsed_s"] = time.monotonic() - started
    if enum.complete and indeterminate == 0:
        return Verdict(INEQUIVALENT, evidence="search space exhausted", budgets=budgets)
    return Verdict(
        UNKNOWN,
        evidence="bounded search inconclusive (budget or indeterminate consistency)",
        budgets=budgets,
    )
