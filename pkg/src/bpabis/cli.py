"""Command-line front end.

Subcommands: validate, norms, decide, check-base, pd, ccnorm, regular, oracle.
Exit codes: 0 positive verdict (equivalent / regular / valid / yes),
1 negative verdict, 2 unknown or indeterminate, 3 usage or input error.
Systems are loaded with silent variables eliminated up front; configurations
given on the command line are rewritten accordingly.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import base_model, consistency, grammar, oracle, regularity, search
from .semantics import parse_config, render_config

EXIT_POSITIVE = 0
EXIT_NEGATIVE = 1
EXIT_UNKNOWN = 2
EXIT_ERROR = 3


class CliError(Exception):
    pass


def _load_system(path: str):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from exc
    original = grammar.parse_system(text)
    ok, unnormed = grammar.check_normed(original)
    if not ok:
        raise CliError(
            "system is not normed; offending variables: " + " ".join(sorted(unnormed))
        )
    return original, grammar.eliminate_silent_variables(original)


def _load_config(text: str, original):
    config = parse_config(text, original)
    return grammar.erase_silent(original, config)


def _load_base(path: str, system):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            payload = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read base file {path}: {exc}") from exc
    try:
        return base_model.base_from_payload(system, payload)
    except ValueError as exc:
        raise CliError(str(exc)) from exc


def _context_arg(text: str | None, system):
    if not text:
        return base_model.EMPTY
    names = [n for n in text.split(",") if n]
    for name in names:
        if name not in system.var_index:
            raise CliError(f"undeclared variable {name!r} in context")
    return frozenset(names)


def _bounds(args) -> search.SearchBounds:
    kwargs = {}
    if getattr(args, "max_nodes", None):
        kwargs["max_nodes"] = args.max_nodes
    if getattr(args, "jobs", None):
        kwargs["jobs"] = args.jobs
    return search.SearchBounds(**kwargs)


def _emit(args, payload: dict, text: str) -> None:
    if getattr(args, "format", "text") == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(text)


def _maybe_write_base(args, system, base) -> None:
    path = getattr(args, "emit_base", None)
    if not path or base is None:
        return
    # never write an unchecked certificate
    report, problems = search.certify(system, base, consistency.ClosureCaps())
    if problems or report is None or report.status != consistency.CONSISTENT:
        raise CliError("refusing to write an unverified base certificate")
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(base_model.base_to_payload(base), handle, indent=2, sort_keys=True)
        handle.write("\n")


def cmd_validate(args) -> int:
    try:
        with open(args.file, "r", encoding="utf-8") as handle:
            original = grammar.parse_system(handle.read())
    except OSError as exc:
        raise CliError(f"cannot read {args.file}: {exc}") from exc
    ok, unnormed = grammar.check_normed(original)
    silent = grammar.detect_silent_variables(original)
    payload = {
        "variables": len(original.variables),
        "actions": [a.name for a in original.actions],
        "rules": len(original.rules),
        "silent_variables": sorted(silent),
        "normed": ok,
        "unnormed_variables": sorted(unnormed),
    }
    lines = [
        f"variables: {len(original.variables)}",
        f"actions:   {' '.join(a.name for a in original.actions)}",
        f"rules:     {len(original.rules)}",
        "silent:    " + (" ".join(sorted(silent)) if silent else "(none)"),
        "normed:    " + ("yes" if ok else "NO: " + " ".join(sorted(unnormed))),
    ]
    _emit(args, payload, "\n".join(lines))
    return EXIT_POSITIVE if ok else EXIT_NEGATIVE


def cmd_norms(args) -> int:
    original, reduced = _load_system(args.file)
    norms = grammar.compute_norms(reduced)
    payload = {"norms": norms}
    width = max((len(v) for v in reduced.variables), default=1)
    lines = [f"{name:<{width}}  {norms[name]}" for name in reduced.variables]
    _emit(args, payload, "\n".join(lines))
    return EXIT_POSITIVE


def cmd_decide(args) -> int:
    original, reduced = _load_system(args.file)
    left = _load_config(args.left, original)
    right = _load_config(args.right, original)
    verdict = search.decide_equivalence(reduced, left, right, args.strategy, _bounds(args))
    payload = {
        "status": verdict.status,
        "evidence": verdict.evidence,
        "budgets": verdict.budgets,
    }
    if verdict.certificate is not None:
        payload["certificate"] = base_model.base_to_payload(verdict.certificate)
    _maybe_write_base(args, reduced, verdict.certificate)
    text = f"{verdict.status}: {render_config(left)} vs {render_config(right)}"
    if verdict.evidence:
        text += f"\n  {verdict.evidence}"
    _emit(args, payload, text)
    return verdict.exit_code()


def cmd_check_base(args) -> int:
    original, reduced = _load_system(args.file)
    candidate = _load_base(args.base, reduced)
    problems = base_model.check_pre_base(reduced, candidate)
    if not problems:
        problems = base_model.check_base(reduced, candidate)
    if problems:
        _emit(args, {"status": "invalid", "problems": problems}, "\n".join(problems))
        return EXIT_NEGATIVE
    report = consistency.check_consistency(candidate)
    text = report.status
    if report.witness is not None:
        text += "\n" + report.witness.render()
    _emit(args, report.to_payload(), text)
    if report.status == consistency.CONSISTENT:
        return EXIT_POSITIVE
    if report.status == consistency.INCONSISTENT:
        return EXIT_NEGATIVE
    return EXIT_UNKNOWN


def cmd_pd(args) -> int:
    original, reduced = _load_system(args.file)
    base = _load_base(args.base, reduced)
    config = _load_config(args.config, original)
    context = _context_arg(args.context, reduced)
    try:
        image = base_model.pd(base, context, config)
    except base_model.BaseEvalError as exc:
        raise CliError(str(exc)) from exc
    _emit(args, {"image": list(image)}, render_config(image))
    return EXIT_POSITIVE


def cmd_ccnorm(args) -> int:
    original, reduced = _load_system(args.file)
    base = _load_base(args.base, reduced)
    config = _load_config(args.config, original)
    context = _context_arg(args.context, reduced)
    try:
        table = base_model.cc_norm_table(base)
        value = base_model.cc_norm(base, table, context, config)
    except base_model.BaseEvalError as exc:
        raise CliError(str(exc)) from exc
    _emit(args, {"cc_norm": value}, str(value))
    return EXIT_POSITIVE


def cmd_regular(args) -> int:
    original, reduced = _load_system(args.file)
    config = _load_config(args.config, original)
    verdict = regularity.decide_regularity(reduced, config, args.strategy, _bounds(args))
    payload = {"status": verdict.status, "budgets": verdict.budgets}
    if verdict.witness is not None:
        payload["witness"] = verdict.witness
    if verdict.certificate is not None:
        payload["certificate"] = base_model.base_to_payload(verdict.certificate)
    if verdict.cross_check is not None:
        payload["cross_check"] = verdict.cross_check
    _maybe_write_base(args, reduced, verdict.certificate)
    text = f"{verdict.status}: {render_config(config)}"
    if verdict.witness:
        text += f"\n  pump at {verdict.witness['variable']} over {{{', '.join(verdict.witness['context'])}}}"
    _emit(args, payload, text)
    return verdict.exit_code()


def cmd_oracle(args) -> int:
    original, reduced = _load_system(args.file)
    left = _load_config(args.left, original)
    right = _load_config(args.right, original)
    result = oracle.approximant_check(
        reduced, left, right, depth=args.depth, len_cap=args.len_cap, tau_cap=args.tau_cap
    )
    payload = {"answer": result.value, "complete": result.complete}
    text = result.value
    if result.trace:
        payload["trace"] = [
            {k: (list(v) if isinstance(v, tuple) else v) for k, v in step.items()}
            for step in result.trace
        ]
        text += "\n" + search.render_trace(result.trace)
    _emit(args, payload, text)
    if result.value == oracle.YES:
        return EXIT_POSITIVE
    if result.value == oracle.NO:
        return EXIT_NEGATIVE
    return EXIT_UNKNOWN


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bpabis",
        description="Branching-bisimilarity and regularity checking for normed BPA systems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, base_file=False, config=False, pair=False, strategy=False):
        p.add_argument("file", help="system file")
        if base_file:
            p.add_argument("--base", required=True, help="base certificate (JSON)")
        if config:
            p.add_argument("--config", required=True, help="configuration ('.' for empty)")
        if pair:
            p.add_argument("--left", required=True)
            p.add_argument("--right", required=True)
        if strategy:
            p.add_argument(
                "--strategy", choices=["guided", "exhaustive", "auto"], default="auto"
            )
            p.add_argument("--jobs", type=int, default=1)
            p.add_argument("--max-nodes", type=int, default=None)
            p.add_argument("--emit-base", default=None, help="write the certificate here")
        p.add_argument("--format", choices=["text", "json"], default="text")

    common(sub.add_parser("validate", help="parse, check normedness, report silent variables"))
    common(sub.add_parser("norms", help="print the norm of every variable"))
    common(sub.add_parser("decide", help="decide branching bisimilarity"), pair=True, strategy=True)
    common(sub.add_parser("check-base", help="verify a base certificate"), base_file=True)
    p = sub.add_parser("pd", help="decomposition image of a configuration")
    common(p, base_file=True, config=True)
    p.add_argument("--context", default="", help="comma-separated variables; empty for {}")
    p = sub.add_parser("ccnorm", help="class-change norm of a configuration")
    common(p, base_file=True, config=True)
    p.add_argument("--context", default="", help="comma-separated variables; empty for {}")
    common(sub.add_parser("regular", help="decide finiteness up to bisimilarity"),
           config=True, strategy=True)
    p = sub.add_parser("oracle", help="three-valued bounded check")
    common(p, pair=True)
    p.add_argument("--depth", type=int, default=8)
    p.add_argument("--len-cap", type=int, default=8)
    p.add_argument("--tau-cap", type=int, default=8)
    return parser


_COMMANDS = {
    "validate": cmd_validate,
    "norms": cmd_norms,
    "decide": cmd_decide,
    "check-base": cmd_check_base,
    "pd": cmd_pd,
    "ccnorm": cmd_ccnorm,
    "regular": cmd_regular,
    "oracle": cmd_oracle,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code not in (0, None) else 0
    try:
        return _COMMANDS[args.command](args)
    except (CliError, grammar.GrammarError, grammar.UnnormedError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
