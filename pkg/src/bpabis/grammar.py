"""Normed BPA systems: the grammar model, its text format, norms, silent variables.

A system is a rewrite grammar over a finite set of variables.  A rule
``A -a-> B C`` rewrites the leftmost variable ``A`` of a configuration into
``B C`` while emitting the action ``a``; the reserved action name ``tau`` is
the only silent action.  A variable is *normed* when some rewrite sequence
erases it completely; everything downstream assumes a normed system with no
silent variables, and this module supplies the checks and the silent-variable
elimination that establish those assumptions.

Text format (UTF-8, line oriented):

* ``#`` starts a comment running to end of line,
* ``vars X Y Z`` declares variables (repeatable; order is significant),
* ``HEAD -LABEL-> BODY`` declares a rule; BODY is a whitespace-separated
  variable sequence, or the single token ``.`` for the empty sequence,
* when no ``vars`` line is present, rule heads auto-declare in order of
  first appearance; body variables must be declared somewhere.

Declaration order matters: it is the canonical total order used for
tie-breaking whenever a representative variable has to be chosen.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property

TAU = "tau"

_NAME = r"[A-Za-z][A-Za-z0-9_']*"
_NAME_RE = re.compile(rf"{_NAME}\Z")
_ARROW_RE = re.compile(rf"-({_NAME})->\Z")


class GrammarError(ValueError):
    """A system definition is malformed (syntax, declarations, or shape)."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


class UnnormedError(ValueError):
    """Raised when an operation that requires a normed system meets one that is not."""

    def __init__(self, unnormed: frozenset[str]):
        self.unnormed = unnormed
        names = " ".join(sorted(unnormed))
        super().__init__(f"system is not normed; unnormed variables: {names}")


@dataclass(frozen=True)
class Action:
    """An action label; ``tau`` is the single silent action."""

    name: str

    @property
    def silent(self) -> bool:
        return self.name == TAU


@dataclass(frozen=True)
class Rule:
    head: str
    label: str
    body: tuple[str, ...]

    @property
    def silent(self) -> bool:
        return self.label == TAU


@dataclass(frozen=True)
class BpaSystem:
    """An immutable BPA system: ordered variables, ordered actions, rule list."""

    variables: tuple[str, ...]
    actions: tuple[Action, ...]
    rules: tuple[Rule, ...]

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for name in self.variables:
            if not _NAME_RE.match(name):
                raise GrammarError(f"bad variable name {name!r}")
            if name in seen:
                raise GrammarError(f"duplicate variable declaration {name!r}")
            seen.add(name)
        for rule in self.rules:
            if rule.head not in seen:
                raise GrammarError(f"undeclared rule head {rule.head!r}")
            for sym in rule.body:
                if sym not in seen:
                    raise GrammarError(f"undeclared variable {sym!r} in body of {rule.head!r}")

    @cached_property
    def var_index(self) -> dict[str, int]:
        """Declaration position of each variable; the canonical total order."""
        return {name: i for i, name in enumerate(self.variables)}

    @cached_property
    def rules_by_head(self) -> dict[str, tuple[Rule, ...]]:
        table: dict[str, list[Rule]] = {name: [] for name in self.variables}
        for rule in self.rules:
            table[rule.head].append(rule)
        return {head: tuple(rs) for head, rs in table.items()}

    @cached_property
    def visible_labels(self) -> dict[str, frozenset[str]]:
        """Per variable, the set of visible labels reachable from it (normed reading)."""
        reach: dict[str, set[str]] = {name: set() for name in self.variables}
        changed = True
        while changed:
            changed = False
            for rule in self.rules:
                acc = reach[rule.head]
                before = len(acc)
                if not rule.silent:
                    acc.add(rule.label)
                for sym in rule.body:
                    acc |= reach[sym]
                if len(acc) != before:
                    changed = True
        return {name: frozenset(labels) for name, labels in reach.items()}

    def sort_vars(self, names) -> tuple[str, ...]:
        return tuple(sorted(names, key=self.var_index.__getitem__))

    def max_body_len(self) -> int:
        return max((len(r.body) for r in self.rules), default=0)


def parse_system(text: str) -> BpaSystem:
    """Parse the line-oriented system format; see the module docstring.

    Raises GrammarError with line/column positions on syntax problems,
    undeclared symbols, and duplicate declarations.
    """
    declared: list[str] = []
    declared_set: set[str] = set()
    has_vars_line = False
    raw_rules: list[tuple[int, str, str, tuple[str, ...]]] = []
    actions: list[str] = []
    action_set: set[str] = set()

    lines = text.splitlines()
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if tokens[0] == "vars":
            has_vars_line = True
            if len(tokens) == 1:
                raise GrammarError("empty vars declaration", lineno)
            for name in tokens[1:]:
                if not _NAME_RE.match(name):
                    raise GrammarError(f"bad variable name {name!r}", lineno, raw.find(name) + 1)
                if name in declared_set:
                    raise GrammarError(f"duplicate variable declaration {name!r}", lineno)
                declared.append(name)
                declared_set.add(name)
            continue
        if len(tokens) < 3:
            raise GrammarError("expected 'HEAD -LABEL-> BODY'", lineno, 1)
        head, arrow, body_tokens = tokens[0], tokens[1], tokens[2:]
        if not _NAME_RE.match(head):
            raise GrammarError(f"bad variable name {head!r}", lineno, 1)
        m = _ARROW_RE.match(arrow)
        if not m:
            raise GrammarError(f"bad arrow token {arrow!r}", lineno, raw.find(arrow) + 1)
        label = m.group(1)
        if body_tokens == ["."]:
            body: tuple[str, ...] = ()
        else:
            for sym in body_tokens:
                if not _NAME_RE.match(sym):
                    raise GrammarError(f"bad variable name {sym!r}", lineno, raw.find(sym) + 1)
            body = tuple(body_tokens)
        raw_rules.append((lineno, head, label, body))
        if label not in action_set:
            actions.append(label)
            action_set.add(label)

    if not has_vars_line:
        for _, head, _, _ in raw_rules:
            if head not in declared_set:
                declared.append(head)
                declared_set.add(head)

    rules: list[Rule] = []
    for lineno, head, label, body in raw_rules:
        if head not in declared_set:
            raise GrammarError(f"undeclared rule head {head!r}", lineno)
        for sym in body:
            if sym not in declared_set:
                raise GrammarError(f"undeclared variable {sym!r}", lineno)
        rules.append(Rule(head, label, body))

    return BpaSystem(tuple(declared), tuple(Action(a) for a in actions), tuple(rules))


def render_system(system: BpaSystem) -> str:
    """Serialize a system to its text format; parsing the result round-trips."""
    out = []
    if system.variables:
        out.append("vars " + " ".join(system.variables))
    for rule in system.rules:
        body = " ".join(rule.body) if rule.body else "."
        out.append(f"{rule.head} -{rule.label}-> {body}")
    return "\n".join(out) + "\n"


def check_normed(system: BpaSystem) -> tuple[bool, frozenset[str]]:
    """Whether every variable can be rewritten to the empty configuration.

    Returns (True, empty set) or (False, set of unnormed variables); the
    normed set is the least fixpoint of "some rule whose whole body is normed".
    """
    normed: set[str] = set()
    changed = True
    while changed:
        changed = False
        for rule in system.rules:
            if rule.head not in normed and all(sym in normed for sym in rule.body):
                normed.add(rule.head)
                changed = True
    unnormed = frozenset(set(system.variables) - normed)
    return (not unnormed, unnormed)


def compute_norms(system: BpaSystem) -> dict[str, int]:
    """Shortest rewrite distance to the empty configuration, per variable.

    Solves norm(A) = 1 + min over rules A -a-> B1..Bk of norm(B1)+..+norm(Bk)
    by iterating to the fixpoint.  Values are exact arbitrary-precision ints.
    Raises UnnormedError when some variable never reaches the empty word.
    """
    ok, unnormed = check_normed(system)
    if not ok:
        raise UnnormedError(unnormed)
    inf = float("inf")
    norm: dict[str, float] = {name: inf for name in system.variables}
    for _ in range(len(system.variables)):
        changed = False
        for rule in system.rules:
            total = 1
            for sym in rule.body:
                if norm[sym] == inf:
                    total = inf
                    break
                total += norm[sym]
            if total < norm[rule.head]:
                norm[rule.head] = total
                changed = True
        if not changed:
            break
    return {name: int(value) for name, value in norm.items()}


def norm_of(norms: dict[str, int], config: tuple[str, ...]) -> int:
    """Norm of a configuration: the sum over its symbols."""
    return sum(norms[sym] for sym in config)


def detect_silent_variables(system: BpaSystem) -> frozenset[str]:
    """Variables from which no visible action is ever reachable.

    Computed as the complement of the least fixpoint of "has a visible rule,
    or a tau-rule whose body contains a visible-capable variable".
    """
    capable: set[str] = set()
    changed = True
    while changed:
        changed = False
        for rule in system.rules:
            if rule.head in capable:
                continue
            if not rule.silent or any(sym in capable for sym in rule.body):
                capable.add(rule.head)
                changed = True
    return frozenset(set(system.variables) - capable)


def eliminate_silent_variables(system: BpaSystem) -> BpaSystem:
    """Delete silent variables: drop their rules and erase them from rule bodies.

    Erasing a silent variable never changes the equivalence class of a
    configuration, so the result is behaviourally interchangeable and has no
    silent variables.  Requires a normed system.
    """
    ok, unnormed = check_normed(system)
    if not ok:
        raise UnnormedError(unnormed)
    silent = detect_silent_variables(system)
    if not silent:
        return system
    variables = tuple(v for v in system.variables if v not in silent)
    rules = tuple(
        Rule(r.head, r.label, tuple(s for s in r.body if s not in silent))
        for r in system.rules
        if r.head not in silent
    )
    labels: list[str] = []
    for r in rules:
        if r.label not in labels:
            labels.append(r.label)
    return BpaSystem(variables, tuple(Action(a) for a in labels), rules)


def erase_silent(system: BpaSystem, config: tuple[str, ...]) -> tuple[str, ...]:
    """Rewrite a configuration of the original system for the silent-free one."""
    silent = detect_silent_variables(system)
    return tuple(sym for sym in config if sym not in silent)
