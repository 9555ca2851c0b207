"""Truth and proportions over explicit finite models.

This is the reference semantics: a proportion ``[a | b]_{x,y}`` is the
number of sort-respecting tuples satisfying ``a & b`` divided by the number
satisfying ``b``, computed by enumeration in exact arithmetic.

``.model`` files are line oriented::

    kbmc-model 1
    sort Event: T1 T2 T3
    sort Obj: C1
    const c = C1            // optional; a constant otherwise names itself
    pred CoinToss: T1; T2; T3
    pred Object: T1 C1; T2 C1; T3 C1
    func Color: C1 -> red
    func Color: C2 -> blue

One ``pred`` line lists the tuples of an extension separated by ``;``, and
may repeat (lines accumulate).  A ``pred`` with nothing after the colon has
an empty extension.  Without ``sort`` declarations in the signature use
``sort Thing: ...``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional

from .logic import (
    And, Const, Exists, ForAll, FunApp, Iff, Implies, InInterval, Literal,
    Not, NumCompare, Or, PredAtom, Product, Proportion, Signature,
    Sum, ValueAtom, Var, free_vars, value_sort, variable_sort, UNIVERSAL_SORT,
)

MODEL_HEADER = "kbmc-model 1"


class EvaluationError(Exception):
    pass


class EmptyConditioningClass(EvaluationError):
    """No tuple satisfies the condition of a proportion term."""


class ModelFormatError(Exception):
    pass


@dataclass
class FiniteModel:
    """Individuals per sort, predicate extensions and function tables."""

    signature: Signature
    domains: dict  # sort -> tuple of individual names (sorted)
    predicates: dict = field(default_factory=dict)  # name -> frozenset of tuples
    functions: dict = field(default_factory=dict)  # name -> {args tuple: value}
    constants: dict = field(default_factory=dict)  # constant -> individual

    def __post_init__(self):
        self.domains = {s: tuple(sorted(v)) for s, v in self.domains.items()}
        self.predicates = {p: frozenset(tuple(t) for t in ext) for p, ext in self.predicates.items()}
        for name in self.signature.constants:
            self.constants.setdefault(name, name)

    def domain(self, sort: str) -> tuple:
        if sort.startswith("@"):
            decl = self.signature.functions[sort[1:]]
            return tuple(decl.values)
        if sort == UNIVERSAL_SORT and sort not in self.domains:
            return tuple(sorted(set().union(*self.domains.values()))) if self.domains else ()
        try:
            return self.domains[sort]
        except KeyError:
            raise EvaluationError(f"model has no individuals for sort {sort}") from None

    def problems(self) -> list:
        """Violations of the model invariants against its signature."""
        sig = self.signature
        out = []
        sorts = sig.sort_names()
        for s in sorts:
            if not self.domains.get(s):
                out.append(f"sort {s} has no individuals")
        owner = {}
        for s, inds in self.domains.items():
            if s not in sorts:
                out.append(f"model lists undeclared sort {s}")
            for i in inds:
                if i in owner:
                    out.append(f"individual {i} belongs to both {owner[i]} and {s}")
                owner[i] = s
        for c, s in sig.constants.items():
            ind = self.constants.get(c)
            if owner.get(ind) != s:
                out.append(f"constant {c} denotes {ind}, which is not an individual of sort {s}")
        for p, ext in self.predicates.items():
            if p not in sig.predicates:
                out.append(f"model interprets undeclared predicate {p}")
                continue
            sorts_p = sig.predicates[p]
            for tup in ext:
                if len(tup) != len(sorts_p) or any(owner.get(i) != s for i, s in zip(tup, sorts_p)):
                    out.append(f"tuple {tup} is ill-sorted for predicate {p}")
        for fn, decl in sig.functions.items():
            table = self.functions.get(fn, {})
            for args in itertools.product(*(self.domain(s) for s in decl.arg_sorts)):
                if args not in table:
                    out.append(f"function {fn} is undefined at {args}")
                    break
            for args, val in table.items():
                if decl.finite and val not in decl.values:
                    out.append(f"function {fn} maps {args} to {val}, outside its range")
                elif not decl.finite and owner.get(val) != decl.result:
                    out.append(f"function {fn} maps {args} to {val}, not of sort {decl.result}")
        return out


# -- evaluation --------------------------------------------------------------


def _term(m: FiniteModel, t, b: Mapping):
    if isinstance(t, Var):
        try:
            return b[t.name]
        except KeyError:
            raise EvaluationError(f"unbound variable {t.name}") from None
    if isinstance(t, Const):
        return m.constants.get(t.name, t.name)
    args = tuple(_term(m, a, b) for a in t.args)
    try:
        return m.functions[t.fn][args]
    except KeyError:
        raise EvaluationError(f"function {t.fn} undefined at {args}") from None


def _var_sort(m: FiniteModel, name, scope):
    key = (name, scope)
    cache = m.__dict__.setdefault("_sort_cache", {})
    if key not in cache:
        cache[key] = variable_sort(name, scope, m.signature)
    if cache[key] is None:
        raise EvaluationError(f"cannot determine the sort of variable {name}")
    return cache[key]


def _tuples(m, vars_, scope):
    domains = [m.domain(_var_sort(m, v, scope)) for v in vars_]
    return itertools.product(*domains)


def eval_formula(m: FiniteModel, f, b: Optional[Mapping] = None) -> bool:
    """Tarskian truth of ``f`` in ``m`` under binding ``b``."""
    b = b or {}
    missing = free_vars(f) - set(b)
    if missing:
        raise EvaluationError(f"unbound free variable(s): {', '.join(sorted(missing))}")
    return _eval(m, f, b)


def _eval(m, f, b) -> bool:
    if isinstance(f, PredAtom):
        args = tuple(_term(m, a, b) for a in f.args)
        return args in m.predicates.get(f.pred, frozenset())
    if isinstance(f, ValueAtom):
        return _term(m, f.term, b) == _value(m, f.value, b)
    if isinstance(f, Not):
        return not _eval(m, f.arg, b)
    if isinstance(f, And):
        return _eval(m, f.left, b) and _eval(m, f.right, b)
    if isinstance(f, Or):
        return _eval(m, f.left, b) or _eval(m, f.right, b)
    if isinstance(f, Implies):
        return (not _eval(m, f.left, b)) or _eval(m, f.right, b)
    if isinstance(f, Iff):
        return _eval(m, f.left, b) == _eval(m, f.right, b)
    if isinstance(f, ForAll):
        return all(_eval(m, f.body, {**b, **dict(zip(f.vars, tup))})
                   for tup in _tuples(m, f.vars, f.body))
    if isinstance(f, Exists):
        return any(_eval(m, f.body, {**b, **dict(zip(f.vars, tup))})
                   for tup in _tuples(m, f.vars, f.body))
    if isinstance(f, NumCompare):
        lhs, rhs = _num(m, f.left, b), _num(m, f.right, b)
        return {"=": lhs == rhs, "<=": lhs <= rhs, ">=": lhs >= rhs,
                "<": lhs < rhs, ">": lhs > rhs}[f.op]
    if isinstance(f, InInterval):
        return f.contains(_num(m, f.expr, b))
    raise TypeError(f"not a formula: {f!r}")


def _value(m, v, b):
    if isinstance(v, Var):
        return b[v.name]
    return v.name


def eval_proportion(m: FiniteModel, p: Proportion, b: Optional[Mapping] = None) -> Fraction:
    """Exact value of a proportion term.

    Raises :class:`EmptyConditioningClass` when nothing satisfies the condition.
    """
    b = b or {}
    missing = free_vars(p) - set(b)
    if missing:
        raise EvaluationError(f"unbound free variable(s): {', '.join(sorted(missing))}")
    return _proportion(m, p, b)


def _proportion(m, p, b):
    scope = And(p.body, p.condition) if p.condition is not None else p.body
    hits = total = 0
    for tup in _tuples(m, p.vars, scope):
        inner = {**b, **dict(zip(p.vars, tup))}
        if p.condition is None or _eval(m, p.condition, inner):
            total += 1
            if _eval(m, p.body, inner):
                hits += 1
    if total == 0:
        raise EmptyConditioningClass(
            f"no tuple of ({', '.join(p.vars)}) satisfies the condition")
    return Fraction(hits, total)


def eval_num(m: FiniteModel, e, b: Optional[Mapping] = None) -> Fraction:
    return _num(m, e, b or {})


def _num(m, e, b) -> Fraction:
    if isinstance(e, Literal):
        return Fraction(e.value)
    if isinstance(e, Proportion):
        return _proportion(m, e, b)
    if isinstance(e, Sum):
        return sum((_num(m, t, b) for t in e.terms), Fraction(0))
    if isinstance(e, Product):
        out = Fraction(1)
        for t in e.terms:
            out *= _num(m, t, b)
        return out
    raise TypeError(f"not a numeric expression: {e!r}")


def check_sentence(m: FiniteModel, s) -> bool:
    f = getattr(s, "formula", s)
    return eval_formula(m, f, {})


# -- .model files ------------------------------------------------------------


def parse_model(text: str, sig: Signature) -> FiniteModel:
    domains, preds, funcs, consts = {}, {}, {}, {}
    seen_header = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("//")[0].strip()
        if not line:
            continue
        if not seen_header and line.startswith("kbmc-model"):
            if line != MODEL_HEADER:
                raise ModelFormatError(f"{lineno}: unsupported header {line!r}")
            seen_header = True
            continue
        seen_header = True
        kw, _, rest = line.partition(" ")
        try:
            if kw == "sort":
                name, _, inds = rest.partition(":")
                domains.setdefault(name.strip(), []).extend(inds.split())
            elif kw == "const":
                name, _, ind = rest.partition("=")
                consts[name.strip()] = ind.strip()
            elif kw == "pred":
                name, _, tuples = rest.partition(":")
                ext = preds.setdefault(name.strip(), set())
                for chunk in tuples.split(";"):
                    if chunk.strip():
                        ext.add(tuple(chunk.split()))
            elif kw == "func":
                name, _, body = rest.partition(":")
                args, arrow, val = body.partition("->")
                if not arrow:
                    raise ValueError("missing '->'")
                funcs.setdefault(name.strip(), {})[tuple(args.split())] = val.strip()
            else:
                raise ValueError(f"unknown keyword {kw!r}")
        except ValueError as exc:
            raise ModelFormatError(f"{lineno}: {exc}") from None
    model = FiniteModel(sig, domains, preds, funcs, consts)
    problems = model.problems()
    if problems:
        raise ModelFormatError("; ".join(problems))
    return model


def format_model(m: FiniteModel) -> str:
    lines = [MODEL_HEADER]
    for s in sorted(m.domains):
        lines.append(f"sort {s}: {' '.join(m.domains[s])}")
    for c in sorted(m.constants):
        if m.constants[c] != c:
            lines.append(f"const {c} = {m.constants[c]}")
    for p in sorted(m.predicates):
        tuples = sorted(m.predicates[p])
        lines.append(f"pred {p}: " + "; ".join(" ".join(t) for t in tuples))
    for fn in sorted(m.functions):
        for args in sorted(m.functions[fn]):
            lines.append(f"func {fn}: {' '.join(args)} -> {m.functions[fn][args]}")
    return "\n".join(lines) + "\n"
