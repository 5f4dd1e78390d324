"""The transition system induced by a BPA grammar over configurations.

A configuration is a finite sequence of variables; a rule for the leftmost
variable rewrites it in place, so ``A B`` steps to ``body(A) + (B,)``.
Everything here is a pure function of immutable data.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .grammar import BpaSystem, GrammarError

Config = tuple[str, ...]

EPSILON: Config = ()


@dataclass(frozen=True)
class Transition:
    source: Config
    label: str
    target: Config


def parse_config(text: str, system: BpaSystem | None = None) -> Config:
    """Parse a whitespace-separated variable sequence; ``.`` is the empty one."""
    text = text.strip()
    if text in (".", ""):
        return EPSILON
    config = tuple(text.split())
    if system is not None:
        for sym in config:
            if sym not in system.var_index:
                raise GrammarError(f"undeclared variable {sym!r} in configuration")
    return config


def render_config(config: Config) -> str:
    return " ".join(config) if config else "."


def transitions(system: BpaSystem, config: Config) -> list[Transition]:
    """All single-step successors: one per rule of the leftmost variable."""
    if not config:
        return []
    head, tail = config[0], config[1:]
    return [
        Transition(config, rule.label, rule.body + tail)
        for rule in system.rules_by_head[head]
    ]


def bounded_reach(
    system: BpaSystem, config: Config, max_len: int, max_states: int
) -> tuple[frozenset[Config], bool]:
    """Breadth-first reachable set, capped by configuration length and state count.

    Successors longer than ``max_len`` are discarded; exploration stops at
    ``max_states`` visited configurations.  The flag reports whether anything
    was discarded, i.e. whether the returned set may be incomplete.
    """
    if max_len < len(config):
        raise ValueError("max_len must be at least the length of the start configuration")
    if max_states < 1:
        raise ValueError("max_states must be positive")
    seen: set[Config] = {config}
    queue: deque[Config] = deque([config])
    truncated = False
    while queue:
        current = queue.popleft()
        for tr in transitions(system, current):
            if len(tr.target) > max_len:
                truncated = True
                continue
            if tr.target in seen:
                continue
            if len(seen) >= max_states:
                truncated = True
                continue
            seen.add(tr.target)
            queue.append(tr.target)
    return frozenset(seen), truncated
