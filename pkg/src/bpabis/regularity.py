"""Deciding whether a configuration is bisimilar to some finite-state process.

Over a consistent base, the reachable decomposition images are finite exactly
when no reachable position can pump its image: a *pump* is a cycle in the
(variable, context) graph that crosses at least one arc adding a nonempty
image (a "blue" arc).  Regularity is certified by one consistent base with no
reachable pump; irregularity needs the whole bounded candidate space to agree,
exactly like negative equivalence verdicts.  A direct breadth-first walk over
images cross-checks finite cases.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .base_model import EMPTY, Context, PreBase, pd, red_of
from .consistency import CONSISTENT, INDETERMINATE, check_consistency
from .grammar import BpaSystem, compute_norms, detect_silent_variables
from .search import (
    AUTO,
    EXHAUSTIVE,
    GUIDED,
    ProposeParams,
    SearchBounds,
    certify,
    enumerate_bases,
    propose_base,
)
from .semantics import Config, transitions

REGULAR = "regular"
IRREGULAR = "irregular"
UNKNOWN = "unknown"

Vertex = tuple[str, Context]


@dataclass
class PdGraph:
    """Arcs between (variable, context) pairs induced by the rules.

    An arc runs from (A, R) to (B, R') when some rule of A exposes B over a
    trailing part whose context at R is R'; it is blue when some witnessing
    trailing part has a nonempty image, i.e. the step grows the decomposition.
    """

    vertices: frozenset[Vertex]
    arcs: dict[tuple[Vertex, Vertex], bool]  # True = blue

    def successors(self, v: Vertex):
        for (src, dst), blue in self.arcs.items():
            if src == v:
                yield dst, blue


def build_pd_graph(base: PreBase) -> PdGraph:
    system = base.system
    vertices = frozenset((var, ctx) for var in system.variables for ctx in base.domain)
    arcs: dict[tuple[Vertex, Vertex], bool] = {}
    for ctx in base.domain:
        for rule in system.rules:
            body = rule.body
            for i, mid in enumerate(body):
                gamma2 = body[i + 1:]
                target_ctx = red_of(base, ctx, gamma2)
                blue = pd(base, ctx, gamma2) != ()
                key = ((rule.head, ctx), (mid, target_ctx))
                arcs[key] = arcs.get(key, False) or blue
    return PdGraph(vertices, arcs)


def _tarjan_sccs(vertices, succ) -> list[list]:
    """Iterative strongly-connected components (stable order)."""
    index: dict = {}
    low: dict = {}
    on_stack: set = set()
    stack: list = []
    sccs: list[list] = []
    counter = [0]
    for root in vertices:
        if root in index:
            continue
        work = [(root, iter(succ(root)))]
        index[root] = low[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            node, it = work[-1]
            advanced = False
            for nxt in it:
                if nxt not in index:
                    index[nxt] = low[nxt] = counter[0]
                    counter[0] += 1
                    stack.append(nxt)
                    on_stack.add(nxt)
                    work.append((nxt, iter(succ(nxt))))
                    advanced = True
                    break
                if nxt in on_stack:
                    low[node] = min(low[node], index[nxt])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == node:
                        break
                sccs.append(comp)
    return sccs


def pd_loops(graph: PdGraph) -> frozenset[Vertex]:
    """Vertices on some cycle through a blue arc.

    A component qualifies when one of its internal arcs is blue; a
    one-vertex component needs a blue self-arc.
    """
    succ_map: dict[Vertex, list[Vertex]] = {}
    for (src, dst) in graph.arcs:
        succ_map.setdefault(src, []).append(dst)
    sccs = _tarjan_sccs(sorted(graph.vertices, key=_vertex_key), lambda v: succ_map.get(v, ()))
    loops: set[Vertex] = set()
    for comp in sccs:
        members = set(comp)
        internal_blue = any(
            blue and src in members and dst in members
            for (src, dst), blue in graph.arcs.items()
        )
        if internal_blue and (len(comp) > 1 or ((comp[0], comp[0]) in graph.arcs)):
            loops.update(comp)
    return frozenset(loops)


def _vertex_key(v: Vertex):
    return (v[0], tuple(sorted(v[1])))


def pd_infinite(graph: PdGraph) -> frozenset[Vertex]:
    """Vertices from which some path reaches a pump cycle."""
    preds: dict[Vertex, list[Vertex]] = {}
    for (src, dst) in graph.arcs:
        preds.setdefault(dst, []).append(src)
    reached = set(pd_loops(graph))
    queue = deque(reached)
    while queue:
        v = queue.popleft()
        for p in preds.get(v, ()):
            if p not in reached:
                reached.add(p)
                queue.append(p)
    return frozenset(reached)


def reaches_pd_loop(base: PreBase, config: Config) -> bool:
    """Whether some position of the configuration is image-pumping.

    Scans right to left, tracking the context each suffix presents.
    """
    infinite = pd_infinite(build_pd_graph(base))
    ctx = EMPTY
    for i in range(len(config) - 1, -1, -1):
        sym = config[i]
        if (sym, ctx) in infinite:
            return True
        ctx = red_of(base, ctx, (sym,))
    return False


def _loop_witness(base: PreBase, config: Config):
    """The pump pair justifying an irregularity verdict, if any."""
    graph = build_pd_graph(base)
    loops = pd_loops(graph)
    infinite = pd_infinite(graph)
    ctx = EMPTY
    for i in range(len(config) - 1, -1, -1):
        sym = config[i]
        vertex = (sym, ctx)
        if vertex in infinite:
            # walk forward to an actual pump vertex
            seen = {vertex}
            queue = deque([vertex])
            while queue:
                v = queue.popleft()
                if v in loops:
                    return {"variable": v[0], "context": sorted(v[1])}
                for nxt, _blue in graph.successors(v):
                    if nxt not in seen:
                        seen.add(nxt)
                        queue.append(nxt)
        ctx = red_of(base, ctx, (sym,))
    return None


def pdreach_bfs(
    base: PreBase, config: Config, max_configs: int = 10_000, max_images: int = 10_000
) -> tuple[bool | None, int, bool]:
    """Direct walk over reachable decomposition images.

    Returns (finite, image count, truncated); finite is None when the walk
    was cut before closing, since a cut walk cannot certify either way.
    """
    system = base.system
    seen: set[Config] = {tuple(config)}
    images: set[Config] = {pd(base, EMPTY, config)}
    queue: deque[Config] = deque([tuple(config)])
    truncated = False
    while queue:
        current = queue.popleft()
        for tr in transitions(system, current):
            if tr.target in seen:
                continue
            if len(seen) >= max_configs:
                truncated = True
                continue
            seen.add(tr.target)
            images.add(pd(base, EMPTY, tr.target))
            if len(images) > max_images:
                truncated = True
                queue.clear()
                break
            queue.append(tr.target)
    if truncated:
        return None, len(images), True
    return True, len(images), False


@dataclass
class RegularityVerdict:
    status: str
    certificate: PreBase | None = None
    witness: dict | None = None
    budgets: dict = field(default_factory=dict)
    cross_check: str | None = None

    def exit_code(self) -> int:
        return {REGULAR: 0, IRREGULAR: 1}.get(self.status, 2)


def decide_regularity(
    system: BpaSystem,
    config: Config,
    strategy: str = AUTO,
    bounds: SearchBounds | None = None,
) -> RegularityVerdict:
    """Decide whether a configuration is bisimilar to a finite-state process.

    Regular when some consistent base shows no reachable pump (the guided
    base usually does); irregular only from a complete, truncation-free drain
    in which every consistent candidate pumps.
    """
    bounds = bounds or SearchBounds()
    if strategy not in (GUIDED, EXHAUSTIVE, AUTO):
        raise ValueError(f"unknown strategy {strategy!r}")
    if detect_silent_variables(system):
        raise ValueError("decide_regularity requires a silent-free system")
    for sym in config:
        if sym not in system.var_index:
            raise ValueError(f"undeclared variable {sym!r} in configuration")

    budgets: dict = {"strategy": strategy}

    def regular_verdict(base: PreBase) -> RegularityVerdict | None:
        # end-to-end re-verification backs every positive verdict
        report, problems = certify(system, base, bounds.caps)
        if problems or report is None or report.status != CONSISTENT:
            return None
        if reaches_pd_loop(base, config):
            return None
        finite, n_images, truncated = pdreach_bfs(base, config)
        cross = "agrees" if finite else "inconclusive"
        budgets["pdreach_images"] = n_images
        return RegularityVerdict(REGULAR, certificate=base, budgets=budgets, cross_check=cross)

    proposal = propose_base(system, ProposeParams(oracle=bounds.oracle))
    guided_base = None
    report, problems = certify(system, proposal.prebase, bounds.caps)
    if not problems and report is not None and report.status == CONSISTENT:
        guided_base = proposal.prebase
        if not reaches_pd_loop(guided_base, config):
            verdict = regular_verdict(guided_base)
            if verdict is not None:
                return verdict

    if strategy == GUIDED:
        return RegularityVerdict(UNKNOWN, budgets=budgets)

    norms = compute_norms(system)
    enum = enumerate_bases(system, norms, bounds)
    indeterminate = 0
    pumping_base = guided_base
    for candidate, eager_report in enum.with_reports():
        rep = eager_report or check_consistency(candidate, bounds.caps)
        if rep.status == CONSISTENT:
            if not reaches_pd_loop(candidate, config):
                verdict = regular_verdict(candidate)
                if verdict is not None:
                    return verdict
            pumping_base = pumping_base or candidate
        elif rep.status == INDETERMINATE:
            indeterminate += 1
    budgets.update(
        nodes=enum.nodes,
        candidates=enum.candidates,
        indeterminate_candidates=indeterminate,
        enumeration_complete=enum.complete,
    )
    if enum.complete and indeterminate == 0:
        witness = _loop_witness(pumping_base, config) if pumping_base is not None else None
        return RegularityVerdict(IRREGULAR, witness=witness, budgets=budgets)
    return RegularityVerdict(UNKNOWN, budgets=budgets)
