"""Command-line entry point: ``kbmc check|construct|infer|oracle|translate``.

Exit status is 0 on success, 1 for bad input or a failed check, 2 for an
internal error.  Set ``KBMC_COLOR=never`` to disable colored diagnostics.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .bayes_net import BN_HEADER, NetworkError, from_text, to_dot, to_text
from .construct import ConstructionError, build_network
from .evaluator import EvaluationError, ModelFormatError, check_sentence, parse_model
from .inference import DEFAULT_JOINT_CAP, InferenceError, brute_force_posterior, eliminate
from .knowledge_base import AmbiguousContext, KnowledgeBase, literal_value
from .logic import Not, ValueAtom
from .parser import KB_HEADER, KBSyntaxError, parse_kb, parse_request
from .request import node_name
from .translate import (
    Renaming, TranslationError, bn_to_sentences, sentences_to_bn, translation_text,
)

USER_ERRORS = (KBSyntaxError, ConstructionError, AmbiguousContext, NetworkError, InferenceError,
               TranslationError, ModelFormatError, EvaluationError, OSError, UnicodeDecodeError)


class _Out:
    def __init__(self):
        mode = os.environ.get("KBMC_COLOR", "auto")
        self.color = mode != "never" and sys.stderr.isatty()

    def _paint(self, code, text):
        return f"\033[{code}m{text}\033[0m" if self.color else text

    def error(self, msg):
        print(self._paint("31", "error:") + f" {msg}", file=sys.stderr)

    def warning(self, msg):
        print(self._paint("33", "warning:") + f" {msg}", file=sys.stderr)


def _read(path) -> str:
    return Path(path).read_text(encoding="utf-8")


def _write(path, text: str):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _decimal(q: Fraction, places: int = 6) -> str:
    return f"{float(q):.{places}f}"


# -- subcommands -------------------------------------------------------------


def cmd_check(args, out: _Out) -> int:
    text = _read(args.kb)
    if not text.strip():
        print(f"{args.kb}: empty knowledge base")
        return 0
    try:
        src = parse_kb(text)
    except KBSyntaxError as exc:
        for d in exc.diagnostics:
            where = f"{d.line}:{d.column}: " if d.line else ""
            print(f"{args.kb}:{where}{d.message}", file=sys.stderr)
        return 1
    kb = KnowledgeBase.from_source(src)
    counts = {}
    for c in kb.classified:
        counts[c.kind] = counts.get(c.kind, 0) + 1
    summary = ", ".join(f"{n} {k}" for k, n in sorted(counts.items()))
    print(f"{args.kb}: ok ({len(src.declarations)} declarations, {len(src.statements)} statements"
          + (f": {summary}" if summary else "") + ")")
    return 0


def cmd_construct(args, out: _Out) -> int:
    kb = KnowledgeBase.from_text(_read(args.kb))
    req = parse_request(_read(args.request), kb.signature)
    net, report = build_network(kb, req)
    for w in report.warnings:
        out.warning(w)
    if args.strict and report.warnings:
        out.error(f"{len(report.warnings)} warning(s) with --strict")
        return 1
    _write(args.output, to_dot(net) if args.format == "dot" else to_text(net))
    if args.report:
        _write(args.report, report.to_text())
    return 0


def _node_evidence(lit):
    atom = lit.arg if isinstance(lit, Not) else lit
    name = node_name(atom)
    if isinstance(lit, ValueAtom):
        return name, literal_value(lit)
    return name, "false" if isinstance(lit, Not) else "true"


def cmd_infer(args, out: _Out) -> int:
    net = from_text(_read(args.bn))
    req = parse_request(_read(args.request))
    evidence = {}
    for lit in req.evidence:
        name, value = _node_evidence(lit)
        if name not in net:
            out.warning(f"evidence {name} is not a network node; ignored")
            continue
        evidence[name] = value
    targets = list(req.queries) or list(req.interest)
    query = [node_name(a) for a in targets]
    query = [q for q in query if q not in evidence]
    if not query:
        raise InferenceError("nothing to query: every query node is observed")
    if args.method == "brute":
        post = brute_force_posterior(net, query, evidence, cap=args.joint_cap)
    else:
        post = eliminate(net, query, evidence)
    given = ", ".join(f"{k}={v}" for k, v in evidence.items())
    for asg, p in sorted(post.table.items(), key=lambda kv: [net[q].states.index(s)
                                                             for q, s in zip(post.vars, kv[0])]):
        lhs = ", ".join(f"{q}={s}" for q, s in zip(post.vars, asg))
        frac = f"{p.numerator}/{p.denominator}" if p.denominator != 1 else str(p.numerator)
        print(f"P({lhs}" + (f" | {given}" if given else "") + f") = {frac} ~ {_decimal(p)}")
    return 0


def cmd_oracle(args, out: _Out) -> int:
    text = _read(args.kb)
    src = parse_kb(text) if text.strip() else None
    if src is None:
        print("no sentences")
        return 0
    model = parse_model(_read(args.model), src.signature)
    failures = 0
    for i, st in enumerate(src.statements, 1):
        label = st.label or f"s{i}"
        try:
            verdict = "true" if check_sentence(model, st.formula) else "false"
        except EvaluationError as exc:
            verdict = f"error ({exc})"
        if verdict != "true":
            failures += 1
        print(f"@{label}\t{verdict}")
    print(f"{len(src.statements) - failures}/{len(src.statements)} sentences true")
    return 1 if failures else 0


def cmd_translate(args, out: _Out) -> int:
    text = _read(args.input)
    first = next((l.strip() for l in text.splitlines() if l.strip()), "")
    to = args.to or ("kb" if first == BN_HEADER else "bn" if first == KB_HEADER else None)
    if to is None:
        raise TranslationError("cannot tell the input format; pass --to kb or --to bn")
    if to == "kb":
        _write(args.output, translation_text(bn_to_sentences(from_text(text))))
    else:
        net = sentences_to_bn(parse_kb(text), Renaming.from_comments(text))
        _write(args.output, to_dot(net) if args.format == "dot" else to_text(net))
    return 0


# -- argument parsing --------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kbmc", description="Build event-specific Bayesian networks "
                                "from a statistical first-order knowledge base.")
    p.add_argument("--version", action="version", version=f"kbmc {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="parse and check a knowledge base")
    c.add_argument("kb")
    c.set_defaults(func=cmd_check)

    c = sub.add_parser("construct", help="build the network for a request")
    c.add_argument("kb")
    c.add_argument("request")
    c.add_argument("-o", "--output", help="network file (default: standard output)")
    c.add_argument("--report", metavar="PATH", help="write the construction report here")
    c.add_argument("--strict", action="store_true", help="treat warnings as failures")
    c.add_argument("--format", choices=("text", "dot"), default="text")
    c.set_defaults(func=cmd_construct)

    c = sub.add_parser("infer", help="posterior of the request's queries in a network")
    c.add_argument("bn")
    c.add_argument("request")
    c.add_argument("--method", choices=("ve", "brute"), default="ve")
    c.add_argument("--joint-cap", type=int, default=DEFAULT_JOINT_CAP,
                   help="largest joint table the brute-force method may build")
    c.set_defaults(func=cmd_infer)

    c = sub.add_parser("oracle", help="evaluate every sentence in a finite model")
    c.add_argument("kb")
    c.add_argument("model")
    c.set_defaults(func=cmd_oracle)

    c = sub.add_parser("translate", help="network to sentences or back")
    c.add_argument("input")
    c.add_argument("-o", "--output")
    c.add_argument("--to", choices=("kb", "bn"))
    c.add_argument("--format", choices=("text", "dot"), default="text")
    c.set_defaults(func=cmd_translate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = _Out()
    try:
        return args.func(args, out)
    except USER_ERRORS as exc:
        out.error(str(exc))
        return 1
    except Exception as exc:  # noqa: BLE001 - last-resort guard
        out.error(f"internal error: {type(exc).__name__}: {exc}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
