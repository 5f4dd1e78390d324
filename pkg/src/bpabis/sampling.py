"""Seeded random generation of small normed, silent-free systems.

Used by the property suites and the experiment scripts; generation is a pure
function of the passed generator, so a fixed seed reproduces the family.
"""

from __future__ import annotations

import random

from .base_model import EMPTY, Context, PreBase, pd, red_of
from .grammar import TAU, Action, BpaSystem, Rule, check_normed, detect_silent_variables
from .semantics import Config

_NAMES = ("X", "Y", "Z", "W", "U", "V")


def random_normed_system(
    rng: random.Random,
    max_vars: int = 4,
    max_rules: int = 6,
    max_body: int = 2,
    visible: tuple[str, ...] = ("a", "b", "c"),
    tau_weight: float = 0.35,
) -> BpaSystem:
    """One normed, silent-free system; rejection-sampled, deterministic in rng."""
    while True:
        n_vars = rng.randint(1, max_vars)
        names = _NAMES[:n_vars]
        n_rules = rng.randint(n_vars, max_rules)

        def body() -> tuple[str, ...]:
            r = rng.random()
            if r < 0.45:
                return ()
            length = 1 if r < 0.8 else min(2, max_body)
            return tuple(rng.choice(names) for _ in range(length))

        def label() -> str:
            if rng.random() < tau_weight:
                return TAU
            return rng.choice(visible)

        rules = [Rule(head, label(), body()) for head in names]
        for _ in range(n_rules - n_vars):
            rules.append(Rule(rng.choice(names), label(), body()))
        labels: list[str] = []
        for r in rules:
            if r.label not in labels:
                labels.append(r.label)
        system = BpaSystem(tuple(names), tuple(Action(a) for a in labels), tuple(rules))
        ok, _ = check_normed(system)
        if ok and not detect_silent_variables(system):
            return system


def restrict_system(system: BpaSystem, keep) -> BpaSystem:
    """Closed sub-system on the given variables; their rules must stay inside."""
    keep = set(keep)
    rules = tuple(r for r in system.rules if r.head in keep)
    for r in rules:
        if not set(r.body) <= keep:
            raise ValueError(f"restriction not closed: rule of {r.head} leaves the set")
    labels: list[str] = []
    for r in rules:
        if r.label not in labels:
            labels.append(r.label)
    return BpaSystem(
        tuple(v for v in system.variables if v in keep),
        tuple(Action(a) for a in labels),
        rules,
    )


def random_config(rng: random.Random, system: BpaSystem, max_len: int = 4) -> Config:
    length = rng.randint(0, max_len)
    return tuple(rng.choice(system.variables) for _ in range(length))


def random_context(rng: random.Random, base: PreBase) -> Context:
    domain = sorted(base.domain, key=lambda c: tuple(sorted(c)))
    return domain[rng.randrange(len(domain))]


def inflate(rng: random.Random, base: PreBase, context: Context, image: Config, steps: int = 3) -> Config:
    """A configuration with the given decomposition image, grown by random
    image-preserving edits: inserting absorbed variables, swapping a symbol
    for one with the same image, or splicing in a decomposition body."""
    out = list(image)
    system = base.system
    for _ in range(steps):
        fold: list[Context] = [EMPTY] * (len(out) + 1)
        fold[len(out)] = context
        for i in range(len(out) - 1, -1, -1):
            fold[i] = red_of(base, fold[i + 1], (out[i],))
        move = rng.random()
        pos = rng.randint(0, len(out))
        if move < 0.4:
            absorbed = sorted(fold[pos])
            if absorbed:
                out.insert(pos, rng.choice(absorbed))
        elif move < 0.75 and out:
            i = rng.randrange(len(out))
            target = pd(base, fold[i + 1], (out[i],))
            swaps = [
                v for v in system.variables
                if v != out[i] and pd(base, fold[i + 1], (v,)) == target
            ]
            if swaps:
                out[i] = rng.choice(swaps)
        elif out:
            i = rng.randrange(len(out))
            key = (out[i], fold[i + 1])
            body = base.dec_map.get(key)
            if body is not None:
                out[i : i + 1] = list(body)
    result = tuple(out)
    assert pd(base, context, result) == pd(base, context, image)
    return result
