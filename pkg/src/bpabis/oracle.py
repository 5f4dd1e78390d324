"""Base-free approximation of branching bisimilarity, for cross-validation.

Two layers:

* an exact branching-bisimulation quotient on finite LTSs, by iterated
  signature splitting;
* a three-valued check on BPA configurations that explores a truncated
  fragment of the (possibly infinite) configuration LTS.  Truncation can
  hide behaviour, so states whose outgoing transitions were discarded are
  *tainted* and every definite answer must be supported away from taint:
  "yes" demands a fully explored fragment, "no" demands a refutation whose
  defender searches stayed within untainted states.  Anything else is
  "unknown"; a capped oracle must never contradict a certificate.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .grammar import TAU, BpaSystem
from .semantics import Config, transitions

YES = "yes"
NO = "no"
UNKNOWN = "unknown"

_REFUTED = "refuted"
_CLEARED = "cleared"
_UNKNOWN = "unknown"


@dataclass(frozen=True)
class OracleParams:
    """Exploration budgets for the approximate checks."""

    depth: int = 8
    len_cap: int = 8
    tau_cap: int = 8
    max_states: int = 50_000


@dataclass
class FiniteLts:
    """A finite LTS: states 0..n-1, out[s] lists (label, target) pairs."""

    n_states: int
    out: list[list[tuple[str, int]]]

    @classmethod
    def from_triples(cls, n_states: int, triples) -> "FiniteLts":
        out: list[list[tuple[str, int]]] = [[] for _ in range(n_states)]
        for src, label, dst in triples:
            out[src].append((label, dst))
        return cls(n_states, out)


@dataclass
class ThreeValued:
    value: str  # yes | no | unknown
    trace: list | None = None
    complete: bool = False


@dataclass
class Arena:
    """A truncated fragment of the configuration LTS, with taint tracking."""

    system: BpaSystem
    configs: list[Config]
    index: dict[Config, int]
    lts: FiniteLts
    tainted: set[int]

    @property
    def complete(self) -> bool:
        return not self.tainted


def build_arena(system: BpaSystem, seeds, len_cap: int, max_states: int) -> Arena:
    """Breadth-first closure of the seeds, discarding over-long successors.

    A state that had any successor discarded (too long, or beyond the state
    budget) is tainted: its observable behaviour in the arena is incomplete.
    """
    configs: list[Config] = []
    index: dict[Config, int] = {}
    queue: deque[Config] = deque()

    def intern(cfg: Config) -> int:
        got = index.get(cfg)
        if got is not None:
            return got
        i = len(configs)
        index[cfg] = i
        configs.append(cfg)
        queue.append(cfg)
        return i

    for seed in seeds:
        intern(tuple(seed))
    out: list[list[tuple[str, int]]] = []
    tainted: set[int] = set()
    while queue:
        cfg = queue.popleft()
        i = index[cfg]
        while len(out) <= i:
            out.append([])
        row = out[i]
        for tr in transitions(system, cfg):
            if len(tr.target) > len_cap:
                tainted.add(i)
                continue
            if tr.target not in index and len(configs) >= max_states:
                tainted.add(i)
                continue
            row.append((tr.label, intern(tr.target)))
    while len(out) < len(configs):
        out.append([])
    return Arena(system, configs, index, FiniteLts(len(configs), out), tainted)


def _signatures(lts: FiniteLts, block: list[int]) -> list[frozenset]:
    """Per state: the (action, target-block) moves reachable after in-block
    silent stuttering, with silent self-block moves dropped as trivially matched."""
    n = lts.n_states
    sig: list[set] = [set() for _ in range(n)]
    rev: list[list[int]] = [[] for _ in range(n)]
    for s in range(n):
        b = block[s]
        for label, t in lts.out[s]:
            tb = block[t]
            if label == TAU and tb == b:
                rev[t].append(s)
            else:
                sig[s].add((label, tb))
    pending = deque(range(n))
    queued = [True] * n
    while pending:
        t = pending.popleft()
        queued[t] = False
        st = sig[t]
        for s in rev[t]:
            before = len(sig[s])
            sig[s] |= st
            if len(sig[s]) != before and not queued[s]:
                pending.append(s)
                queued[s] = True
    return [frozenset(x) for x in sig]


def finite_branching_quotient(lts: FiniteLts) -> list[int]:
    """Coarsest branching-bisimulation partition of a finite LTS.

    Starts from a single block and repeatedly splits by move signatures until
    stable.  Block ids are assigned deterministically (sorted signatures), so
    identical inputs produce identical partitions.
    """
    n = lts.n_states
    block = [0] * n
    while True:
        sig = _signatures(lts, block)
        keys = sorted({(block[s], tuple(sorted(sig[s]))) for s in range(n)})
        ids = {key: i for i, key in enumerate(keys)}
        new_block = [ids[(block[s], tuple(sorted(sig[s])))] for s in range(n)]
        if new_block == block:
            return block
        block = new_block


def quotient_iterations(lts: FiniteLts) -> int:
    """Number of refinement rounds the quotient needs; a refutation-depth bound."""
    n = lts.n_states
    block = [0] * n
    rounds = 0
    while True:
        sig = _signatures(lts, block)
        keys = sorted({(block[s], tuple(sorted(sig[s]))) for s in range(n)})
        ids = {key: i for i, key in enumerate(keys)}
        new_block = [ids[(block[s], tuple(sorted(sig[s])))] for s in range(n)]
        if new_block == block:
            return rounds
        block = new_block
        rounds += 1


class _Game:
    """Refutation game on an arena, three-valued under taint and caps.

    A pair is *refuted* only when some attacker move has no valid defender
    response and the exhaustive response search stayed clear of tainted
    states and caps; refutations are therefore sound for the full LTS.
    """

    def __init__(self, arena: Arena, tau_cap: int):
        self.arena = arena
        self.out = arena.lts.out
        self.tainted = arena.tainted
        self.tau_cap = tau_cap
        self.refuted: dict[tuple[int, int], list] = {}
        self.other: dict[tuple[int, int, int], str] = {}
        self.stack: set[tuple[int, int]] = set()

    def refute(self, i: int, j: int, depth: int) -> tuple[str, list | None]:
        if i == j:
            return _CLEARED, None
        key = (i, j) if i <= j else (j, i)
        if key in self.refuted:
            return _REFUTED, self.refuted[key]
        cached = self.other.get((key[0], key[1], depth))
        if cached is not None:
            return cached, None
        if key in self.stack:
            return _CLEARED, None  # on a cycle: optimistically related
        if depth <= 0:
            return _UNKNOWN, None
        self.stack.add(key)
        try:
            any_unknown = False
            for side, (u, v) in (("left", (i, j)), ("right", (j, i))):
                for label, u2 in self.out[u]:
                    status, trace = self._attack(u, v, label, u2, depth)
                    if status == _REFUTED:
                        step = {
                            "attacker": side,
                            "action": label,
                            "from": self.arena.configs[u],
                            "to": self.arena.configs[u2],
                        }
                        full = [step] + (trace or [])
                        self.refuted[key] = full
                        return _REFUTED, full
                    if status == _UNKNOWN:
                        any_unknown = True
            status = _UNKNOWN if any_unknown else _CLEARED
            self.other[(key[0], key[1], depth)] = status
            return status, None
        finally:
            self.stack.discard(key)

    def _attack(self, u: int, v: int, label: str, u2: int, depth: int):
        """Outcome of one attacker move u -label-> u2 against defender state v."""
        any_unknown = False
        continuation: tuple[list, list | None] | None = None
        if label == TAU:
            status, _ = self.refute(u2, v, depth - 1)
            if status == _CLEARED:
                return _CLEARED, None
            if status == _UNKNOWN:
                any_unknown = True
            elif continuation is None:
                sub = self.refuted.get((u2, v) if u2 <= v else (v, u2))
                continuation = ([{"response": None, "note": "silent step not absorbed"}], sub)
        # stuttering search: silent paths from v through states related to u
        visited = {v}
        fringe = deque([(v, 0)])
        while fringe:
            w, steps = fringe.popleft()
            for lbl, w2 in self.out[w]:
                if lbl == label:
                    status, _ = self.refute(u2, w2, depth - 1)
                    if status == _CLEARED:
                        return _CLEARED, None
                    if status == _UNKNOWN:
                        any_unknown = True
                    elif continuation is None:
                        sub = self.refuted.get((u2, w2) if u2 <= w2 else (w2, u2))
                        continuation = (
                            [{"response": self.arena.configs[w2], "via": self.arena.configs[w]}],
                            sub,
                        )
            if w in self.tainted:
                any_unknown = True  # a discarded move might have been a response
            if steps >= self.tau_cap:
                if any(lbl == TAU and w2 not in visited for lbl, w2 in self.out[w]):
                    any_unknown = True  # unexplored stuttering space beyond the cap
                continue
            for lbl, w2 in self.out[w]:
                if lbl != TAU or w2 in visited:
                    continue
                # Traverse unless the intermediate is solidly unrelated: giving
                # the defender extra paths can only make refutation harder, so
                # refutations found this way remain sound.
                status, _ = self.refute(u, w2, depth - 1)
                if status != _REFUTED:
                    visited.add(w2)
                    fringe.append((w2, steps + 1))
        if any_unknown:
            return _UNKNOWN, None
        if continuation is not None:
            note, sub = continuation
            return _REFUTED, note + (sub or [])
        return _REFUTED, None  # no response candidates at all


def approximant_check(
    system: BpaSystem,
    left: Config,
    right: Config,
    depth: int = 8,
    len_cap: int = 8,
    tau_cap: int = 8,
    max_states: int = 50_000,
) -> ThreeValued:
    """Three-valued branching-bisimilarity check on a truncated LTS.

    On a fully explored fragment the answer is exact.  Otherwise "no" is
    returned only with a taint-free refutation (replayable trace), and "yes"
    is never returned, since truncation could hide distinguishing behaviour.
    """
    left, right = tuple(left), tuple(right)
    cap = max(len_cap, len(left), len(right))
    arena = build_arena(system, [left, right], cap, max_states)
    i, j = arena.index[left], arena.index[right]
    if arena.complete:
        block = finite_branching_quotient(arena.lts)
        if block[i] == block[j]:
            return ThreeValued(YES, None, complete=True)
        game = _Game(arena, tau_cap=arena.lts.n_states + 1)
        status, trace = game.refute(i, j, max(depth, quotient_iterations(arena.lts) + 1))
        return ThreeValued(NO, trace if status == _REFUTED else None, complete=True)
    game = _Game(arena, tau_cap)
    status, trace = game.refute(i, j, depth)
    if status == _REFUTED:
        return ThreeValued(NO, trace, complete=False)
    return ThreeValued(UNKNOWN, None, complete=False)


def replay_refutation(
    system: BpaSystem,
    left: Config,
    right: Config,
    trace: list,
    len_cap: int = 8,
    tau_cap: int = 8,
    max_states: int = 50_000,
) -> bool:
    """Check that a recorded refutation replays on the truncated LTS.

    Walks the recorded attacker line verifying every claimed move exists,
    then re-runs the game on the original pair and demands it still refutes.
    """
    left, right = tuple(left), tuple(right)
    lens = [len_cap, len(left), len(right)]
    for step in trace:
        for k in ("from", "to", "response", "via"):
            val = step.get(k)
            if isinstance(val, tuple):
                lens.append(len(val))
    arena = build_arena(system, [left, right], max(lens), max_states)
    pair = (left, right)
    k = 0
    while k < len(trace):
        step = trace[k]
        if "action" not in step:
            return False  # malformed: expected an attack step
        u_cfg = tuple(step["from"])
        target = tuple(step["to"])
        if u_cfg not in pair or u_cfg not in arena.index:
            return False
        u = arena.index[u_cfg]
        if not any(
            lbl == step["action"] and arena.configs[t] == target
            for lbl, t in arena.lts.out[u]
        ):
            return False
        other = pair[1] if u_cfg == pair[0] else pair[0]
        k += 1
        if k < len(trace) and "action" not in trace[k]:
            resp = trace[k].get("response")
            pair = (target, other if resp is None else tuple(resp))
            k += 1
        else:
            pair = (target, other)
    if arena.complete:
        depth = max(len(trace) + 2, quotient_iterations(arena.lts) + 1)
        game = _Game(arena, tau_cap=arena.lts.n_states + 1)
    else:
        depth = max(len(trace) + 2, 8)
        game = _Game(arena, tau_cap)
    status, _ = game.refute(arena.index[left], arena.index[right], depth)
    return status == _REFUTED


def estimate_red(system: BpaSystem, gamma: Config, params: OracleParams = OracleParams()) -> frozenset[str]:
    """Variables estimated redundant over ``gamma``: those X with X+gamma ~ gamma.

    Advisory only: exact when the shared exploration fragment is complete,
    otherwise it falls back to individual three-valued checks and keeps only
    definite yes answers.
    """
    gamma = tuple(gamma)
    seeds = [gamma] + [(name,) + gamma for name in system.variables]
    cap = max(params.len_cap, len(gamma) + 1)
    arena = build_arena(system, seeds, cap, params.max_states)
    if arena.complete:
        block = finite_branching_quotient(arena.lts)
        base_block = block[arena.index[gamma]]
        return frozenset(
            name for name in system.variables if block[arena.index[(name,) + gamma]] == base_block
        )
    out = set()
    for name in system.variables:
        res = approximant_check(
            system, (name,) + gamma, gamma,
            depth=params.depth, len_cap=params.len_cap,
            tau_cap=params.tau_cap, max_states=params.max_states,
        )
        if res.value == YES:
            out.add(name)
    return frozenset(out)
