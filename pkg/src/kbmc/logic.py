"""Abstract syntax for the statistical first-order logic.

Terms, formulas and numeric expressions are frozen dataclasses, so they
hash, compare structurally and can be shared freely.  Binary connectives
stay binary and nothing is simplified on construction: ``Not(Not(p))`` is
kept as written, which is what lets the printer and parser round trip.

A proportion term ``[body | condition]_{x,y}`` binds its variable list inside
both the body and the condition.  A missing condition means TRUE.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Optional, Union

UNIVERSAL_SORT = "Thing"
RELATIONS = ("=", "<=", ">=", "<", ">")


class LogicError(Exception):
    """Raised for ill-sorted substitutions and similar misuse of the AST."""


# -- terms -------------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class FunApp:
    fn: str
    args: tuple = ()


Term = Union[Var, Const, FunApp]


# -- formulas ----------------------------------------------------------------


@dataclass(frozen=True)
class PredAtom:
    pred: str
    args: tuple = ()


@dataclass(frozen=True)
class ValueAtom:
    """``F(t1,...,tn) = v`` for a function with a finite value set."""

    term: FunApp
    value: Term


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class ForAll:
    vars: tuple
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    vars: tuple
    body: "Formula"


@dataclass(frozen=True)
class NumCompare:
    left: "NumExpr"
    op: str
    right: "NumExpr"


@dataclass(frozen=True)
class InInterval:
    expr: "NumExpr"
    lo: Fraction
    hi: Fraction
    lo_open: bool = True
    hi_open: bool = True

    def contains(self, value: Fraction) -> bool:
        above = value > self.lo if self.lo_open else value >= self.lo
        below = value < self.hi if self.hi_open else value <= self.hi
        return above and below


# -- numeric expressions -----------------------------------------------------


@dataclass(frozen=True)
class Literal:
    value: Fraction


@dataclass(frozen=True)
class Proportion:
    body: "Formula"
    condition: Optional["Formula"]
    vars: tuple


@dataclass(frozen=True)
class Sum:
    terms: tuple


@dataclass(frozen=True)
class Product:
    terms: tuple


Formula = Union[PredAtom, ValueAtom, Not, And, Or, Implies, Iff, ForAll, Exists,
                NumCompare, InInterval]
NumExpr = Union[Literal, Proportion, Sum, Product]
Binary = (And, Or, Implies, Iff)
Quantifier = (ForAll, Exists)


@dataclass(frozen=True)
class Sentence:
    formula: Formula


# -- signature ---------------------------------------------------------------


@dataclass(frozen=True)
class FuncDecl:
    arg_sorts: tuple
    values: Optional[tuple] = None
    result: Optional[str] = None

    @property
    def finite(self) -> bool:
        return self.values is not None


@dataclass
class Signature:
    sorts: tuple = ()
    predicates: dict = field(default_factory=dict)
    functions: dict = field(default_factory=dict)
    constants: dict = field(default_factory=dict)

    def sort_names(self) -> tuple:
        return self.sorts if self.sorts else (UNIVERSAL_SORT,)

    def kind_of(self, name: str) -> Optional[str]:
        if name in self.sorts:
            return "sort"
        if name in self.predicates:
            return "pred"
        if name in self.functions:
            return "func"
        if name in self.constants:
            return "const"
        return None

    def check(self) -> list:
        """Diagnostics for the declarations themselves."""
        problems = []
        seen = {}
        for kind, names in (("sort", self.sorts), ("pred", self.predicates),
                            ("func", self.functions), ("const", self.constants)):
            for name in names:
                if name in seen:
                    problems.append(f"name {name!r} declared as both {seen[name]} and {kind}")
                seen.setdefault(name, kind)
        known = set(self.sort_names())
        for name, sorts in self.predicates.items():
            for s in sorts:
                if s not in known:
                    problems.append(f"predicate {name} uses undeclared sort {s!r}")
        for name, decl in self.functions.items():
            for s in decl.arg_sorts:
                if s not in known:
                    problems.append(f"function {name} uses undeclared sort {s!r}")
            if decl.finite:
                if len(decl.values) < 2:
                    problems.append(f"function {name} must have at least 2 values")
                if len(set(decl.values)) != len(decl.values):
                    problems.append(f"function {name} repeats a value")
            elif decl.result not in known:
                problems.append(f"function {name} has undeclared result sort {decl.result!r}")
        for name, s in self.constants.items():
            if s not in known:
                problems.append(f"constant {name} has undeclared sort {s!r}")
        return problems

    def merged(self, other: "Signature") -> "Signature":
        return Signature(
            sorts=tuple(dict.fromkeys(self.sorts + other.sorts)),
            predicates={**self.predicates, **other.predicates},
            functions={**self.functions, **other.functions},
            constants={**self.constants, **other.constants},
        )


def value_sort(fn: str) -> str:
    """Pseudo-sort of the values of a finite-valued function."""
    return "@" + fn


# -- traversal helpers -------------------------------------------------------


def term_vars(t: Term) -> set:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, FunApp):
        out = set()
        for a in t.args:
            out |= term_vars(a)
        return out
    return set()


def free_vars(f) -> set:
    """Names of variables with a free occurrence in a formula or numeric expression."""
    if f is None:
        return set()
    if isinstance(f, PredAtom):
        out = set()
        for a in f.args:
            out |= term_vars(a)
        return out
    if isinstance(f, ValueAtom):
        return term_vars(f.term) | term_vars(f.value)
    if isinstance(f, Not):
        return free_vars(f.arg)
    if isinstance(f, Binary):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, Quantifier):
        return free_vars(f.body) - set(f.vars)
    if isinstance(f, NumCompare):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, InInterval):
        return free_vars(f.expr)
    if isinstance(f, Literal):
        return set()
    if isinstance(f, Proportion):
        return (free_vars(f.body) | free_vars(f.condition)) - set(f.vars)
    if isinstance(f, (Sum, Product)):
        out = set()
        for t in f.terms:
            out |= free_vars(t)
        return out
    raise TypeError(f"not a formula: {f!r}")


def all_names(f) -> set:
    """Every variable name occurring anywhere, bound or free."""
    if f is None:
        return set()
    if isinstance(f, PredAtom):
        return set().union(*(term_vars(a) for a in f.args)) if f.args else set()
    if isinstance(f, ValueAtom):
        return term_vars(f.term) | term_vars(f.value)
    if isinstance(f, Not):
        return all_names(f.arg)
    if isinstance(f, Binary):
        return all_names(f.left) | all_names(f.right)
    if isinstance(f, Quantifier):
        return all_names(f.body) | set(f.vars)
    if isinstance(f, NumCompare):
        return all_names(f.left) | all_names(f.right)
    if isinstance(f, InInterval):
        return all_names(f.expr)
    if isinstance(f, Literal):
        return set()
    if isinstance(f, Proportion):
        return all_names(f.body) | all_names(f.condition) | set(f.vars)
    if isinstance(f, (Sum, Product)):
        return set().union(*(all_names(t) for t in f.terms))
    raise TypeError(f"not a formula: {f!r}")


def is_ground(f) -> bool:
    return not all_names(f)


def subterms(f) -> Iterator:
    """Pre-order walk over formulas, numeric expressions and terms."""
    if f is None:
        return
    yield f
    if isinstance(f, PredAtom):
        for a in f.args:
            yield from subterms(a)
    elif isinstance(f, FunApp):
        for a in f.args:
            yield from subterms(a)
    elif isinstance(f, ValueAtom):
        yield from subterms(f.term)
        yield from subterms(f.value)
    elif isinstance(f, Not):
        yield from subterms(f.arg)
    elif isinstance(f, Binary):
        yield from subterms(f.left)
        yield from subterms(f.right)
    elif isinstance(f, Quantifier):
        yield from subterms(f.body)
    elif isinstance(f, NumCompare):
        yield from subterms(f.left)
        yield from subterms(f.right)
    elif isinstance(f, InInterval):
        yield from subterms(f.expr)
    elif isinstance(f, Proportion):
        yield from subterms(f.body)
        yield from subterms(f.condition)
    elif isinstance(f, (Sum, Product)):
        for t in f.terms:
            yield from subterms(t)


def conjuncts(f) -> list:
    """Flatten nested ``And`` nodes into a list; ``None`` (TRUE) gives []."""
    if f is None:
        return []
    if isinstance(f, And):
        return conjuncts(f.left) + conjuncts(f.right)
    return [f]


def conjoin(parts: Iterable) -> Optional[Formula]:
    """Left-associated conjunction, the inverse of :func:`conjuncts`."""
    out = None
    for p in parts:
        out = p if out is None else And(out, p)
    return out


# -- substitution ------------------------------------------------------------


def fresh_name(base: str, avoid: set) -> str:
    name = base + "'"
    while name in avoid:
        name += "'"
    return name


def substitute_term(t: Term, binding: Mapping) -> Term:
    if isinstance(t, Var):
        return binding.get(t.name, t)
    if isinstance(t, FunApp):
        return FunApp(t.fn, tuple(substitute_term(a, binding) for a in t.args))
    return t


def _binder(vars_, inner_parts, binding):
    """Rename bound variables that would capture a substituted term.

    Returns the new variable tuple and the binding to use inside the scope.
    """
    inner = {k: v for k, v in binding.items() if k not in vars_}
    if not inner:
        return vars_, inner
    scope_free = set()
    for part in inner_parts:
        scope_free |= free_vars(part)
    relevant = {k: v for k, v in inner.items() if k in scope_free}
    incoming = set()
    for v in relevant.values():
        incoming |= term_vars(v)
    avoid = incoming | scope_free | set(vars_)
    for v in relevant.values():
        avoid |= term_vars(v)
    new_vars = []
    for v in vars_:
        if v in incoming:
            nv = fresh_name(v, avoid)
            avoid.add(nv)
            inner[v] = Var(nv)
            new_vars.append(nv)
        else:
            new_vars.append(v)
    return tuple(new_vars), inner


def substitute(f, binding: Mapping, sig: Optional[Signature] = None):
    """Capture-avoiding substitution of terms for free variables.

    With a signature, each substituted term is checked against the sort of
    every position the variable fills; a mismatch raises :class:`LogicError`.
    """
    if sig is not None:
        _check_binding_sorts(f, binding, sig)
    return _subst(f, dict(binding))


def _subst(f, binding):
    if f is None or not binding:
        return f
    if isinstance(f, PredAtom):
        return PredAtom(f.pred, tuple(substitute_term(a, binding) for a in f.args))
    if isinstance(f, ValueAtom):
        return ValueAtom(substitute_term(f.term, binding), substitute_term(f.value, binding))
    if isinstance(f, Not):
        return Not(_subst(f.arg, binding))
    if isinstance(f, Binary):
        return type(f)(_subst(f.left, binding), _subst(f.right, binding))
    if isinstance(f, Quantifier):
        new_vars, inner = _binder(f.vars, [f.body], binding)
        return type(f)(new_vars, _subst(f.body, inner))
    if isinstance(f, NumCompare):
        return NumCompare(_subst(f.left, binding), f.op, _subst(f.right, binding))
    if isinstance(f, InInterval):
        return InInterval(_subst(f.expr, binding), f.lo, f.hi, f.lo_open, f.hi_open)
    if isinstance(f, Literal):
        return f
    if isinstance(f, Proportion):
        new_vars, inner = _binder(f.vars, [f.body, f.condition], binding)
        return Proportion(_subst(f.body, inner), _subst(f.condition, inner), new_vars)
    if isinstance(f, (Sum, Product)):
        return type(f)(tuple(_subst(t, binding) for t in f.terms))
    raise TypeError(f"not a formula: {f!r}")


def term_sort(t: Term, sig: Signature) -> Optional[str]:
    if isinstance(t, Const):
        return sig.constants.get(t.name)
    if isinstance(t, FunApp):
        decl = sig.functions.get(t.fn)
        if decl is None or decl.finite:
            return None
        return decl.result
    return None


def _check_binding_sorts(f, binding, sig):
    for name, term in binding.items():
        have = term_sort(term, sig)
        if have is None:
            continue
        for where, want in positions_of(name, f, sig):
            if want is not None and want != have:
                raise LogicError(
                    f"cannot substitute {render_term(term)} (sort {have}) for "
                    f"{name} at {where}: position expects sort {want}")


def positions_of(name: str, f, sig: Signature) -> list:
    """(description, expected sort) for every free occurrence of a variable."""
    found = []

    def in_term(t, owner, i, want):
        if isinstance(t, Var):
            if t.name == name:
                found.append((f"argument {i + 1} of {owner}", want))
        elif isinstance(t, FunApp):
            decl = sig.functions.get(t.fn)
            for j, a in enumerate(t.args):
                w = decl.arg_sorts[j] if decl and j < len(decl.arg_sorts) else None
                in_term(a, t.fn, j, w)

    def walk(g, bound):
        if g is None:
            return
        if isinstance(g, PredAtom):
            if name in bound:
                return
            sorts = sig.predicates.get(g.pred)
            for i, a in enumerate(g.args):
                in_term(a, g.pred, i, sorts[i] if sorts and i < len(sorts) else None)
        elif isinstance(g, ValueAtom):
            if name in bound:
                return
            in_term(g.term, "", 0, None)
            decl = sig.functions.get(g.term.fn)
            if isinstance(g.value, Var) and g.value.name == name:
                found.append((f"value of {g.term.fn}", value_sort(g.term.fn) if decl else None))
        elif isinstance(g, Not):
            walk(g.arg, bound)
        elif isinstance(g, Binary):
            walk(g.left, bound)
            walk(g.right, bound)
        elif isinstance(g, Quantifier):
            walk(g.body, bound | set(g.vars))
        elif isinstance(g, NumCompare):
            walk(g.left, bound)
            walk(g.right, bound)
        elif isinstance(g, InInterval):
            walk(g.expr, bound)
        elif isinstance(g, Proportion):
            walk(g.body, bound | set(g.vars))
            walk(g.condition, bound | set(g.vars))
        elif isinstance(g, (Sum, Product)):
            for t in g.terms:
                walk(t, bound)

    walk(f, set())
    return found


def variable_sort(name: str, scope, sig: Signature) -> Optional[str]:
    """Sort of a variable, read off the first position it fills in ``scope``.

    Finite-valued function positions yield the pseudo-sort ``@F``.  Returns
    None when the variable never appears in a sorted position.
    """
    for _, want in positions_of(name, scope, sig):
        if want is not None:
            return want
    if not sig.sorts:
        return UNIVERSAL_SORT
    return None


# -- well-formedness ---------------------------------------------------------


@dataclass(frozen=True)
class Diagnostic:
    message: str
    line: Optional[int] = None
    column: Optional[int] = None

    def __str__(self) -> str:
        if self.line is not None:
            return f"{self.line}:{self.column}: {self.message}"
        return self.message


def well_formed(s, sig: Signature) -> list:
    """Diagnostics for a sentence (or bare formula) against a signature.

    An empty list means the sentence is closed, uses only declared symbols
    with the right arities and sorts, and keeps every value in range.
    """
    f = s.formula if isinstance(s, Sentence) else s
    diags = []
    free = free_vars(f)
    if free:
        diags.append(Diagnostic(f"sentence is not closed: free variable(s) {', '.join(sorted(free))}"))
    _check(f, sig, diags, {})
    return diags


def _check_term(t, sig, diags, want, env, where):
    if isinstance(t, Var):
        if want is not None and t.name in env:
            have = env[t.name]
            if have is not None and have != want:
                diags.append(Diagnostic(
                    f"variable {t.name} used as {want} in {where} but as {have} elsewhere"))
        return
    if isinstance(t, Const):
        if t.name not in sig.constants:
            diags.append(Diagnostic(f"undeclared constant {t.name} in {where}"))
        elif want is not None and sig.constants[t.name] != want:
            diags.append(Diagnostic(
                f"constant {t.name} has sort {sig.constants[t.name]}, {where} expects {want}"))
        return
    decl = sig.functions.get(t.fn)
    if decl is None:
        diags.append(Diagnostic(f"undeclared function {t.fn} in {where}"))
        for a in t.args:
            _check_term(a, sig, diags, None, env, t.fn)
        return
    if len(decl.arg_sorts) != len(t.args):
        diags.append(Diagnostic(
            f"function {t.fn} expects {len(decl.arg_sorts)} argument(s), got {len(t.args)}"))
    for i, a in enumerate(t.args):
        w = decl.arg_sorts[i] if i < len(decl.arg_sorts) else None
        _check_term(a, sig, diags, w, env, f"argument {i + 1} of {t.fn}")
    if want is not None and not decl.finite and decl.result != want:
        diags.append(Diagnostic(f"function {t.fn} returns {decl.result}, {where} expects {want}"))
    if decl.finite and where != "value atom":
        diags.append(Diagnostic(
            f"finite-valued function {t.fn} may only appear as {t.fn}(...) = value"))


def _bind(vars_, scope, sig, diags, env, what):
    if not vars_:
        diags.append(Diagnostic(f"{what} binds no variables"))
    if len(set(vars_)) != len(vars_):
        diags.append(Diagnostic(f"{what} binds a variable twice: {', '.join(vars_)}"))
    inner = dict(env)
    for v in vars_:
        s = variable_sort(v, scope, sig)
        if s is None:
            diags.append(Diagnostic(f"cannot infer the sort of variable {v} bound by {what}"))
        inner[v] = s
    return inner


def _check(f, sig, diags, env):
    if f is None:
        return
    if isinstance(f, PredAtom):
        sorts = sig.predicates.get(f.pred)
        if sorts is None:
            kind = sig.kind_of(f.pred)
            msg = f"undeclared predicate {f.pred}" if kind is None else f"{f.pred} is a {kind}, not a predicate"
            diags.append(Diagnostic(msg))
            for a in f.args:
                _check_term(a, sig, diags, None, env, f.pred)
            return
        if len(sorts) != len(f.args):
            diags.append(Diagnostic(
                f"predicate {f.pred} expects {len(sorts)} argument(s), got {len(f.args)}"))
        for i, a in enumerate(f.args):
            w = sorts[i] if i < len(sorts) else None
            _check_term(a, sig, diags, w, env, f"argument {i + 1} of {f.pred}")
    elif isinstance(f, ValueAtom):
        decl = sig.functions.get(f.term.fn)
        if decl is None:
            diags.append(Diagnostic(f"undeclared function {f.term.fn}"))
            return
        if not decl.finite:
            diags.append(Diagnostic(f"function {f.term.fn} has no finite value set"))
            return
        _check_term(f.term, sig, diags, None, env, "value atom")
        if isinstance(f.value, Const):
            if f.value.name not in decl.values:
                diags.append(Diagnostic(
                    f"value {f.value.name} is not in the range of {f.term.fn} "
                    f"{{{', '.join(decl.values)}}}"))
        elif isinstance(f.value, Var):
            _check_term(f.value, sig, diags, value_sort(f.term.fn), env, f"value of {f.term.fn}")
        else:
            diags.append(Diagnostic(f"value of {f.term.fn} must be a value name or variable"))
    elif isinstance(f, Not):
        _check(f.arg, sig, diags, env)
    elif isinstance(f, Binary):
        _check(f.left, sig, diags, env)
        _check(f.right, sig, diags, env)
    elif isinstance(f, Quantifier):
        what = "quantifier" if isinstance(f, ForAll) else "existential"
        _check(f.body, sig, diags, _bind(f.vars, f.body, sig, diags, env, what))
    elif isinstance(f, NumCompare):
        if f.op not in RELATIONS:
            diags.append(Diagnostic(f"unknown relation {f.op}"))
        _check(f.left, sig, diags, env)
        _check(f.right, sig, diags, env)
    elif isinstance(f, InInterval):
        if f.lo > f.hi:
            diags.append(Diagnostic(f"empty interval: {f.lo} > {f.hi}"))
        _check(f.expr, sig, diags, env)
    elif isinstance(f, Literal):
        pass
    elif isinstance(f, Proportion):
        scope = And(f.body, f.condition) if f.condition is not None else f.body
        inner = _bind(f.vars, scope, sig, diags, env, "proportion")
        _check(f.body, sig, diags, inner)
        _check(f.condition, sig, diags, inner)
    elif isinstance(f, (Sum, Product)):
        if len(f.terms) < 2:
            diags.append(Diagnostic(f"{type(f).__name__} needs at least two terms"))
        for t in f.terms:
            _check(t, sig, diags, env)
    else:
        diags.append(Diagnostic(f"not a formula: {f!r}"))


# -- compact rendering (for messages; the parser module owns the full printer)


def render_term(t: Term) -> str:
    if isinstance(t, (Var, Const)):
        return t.name
    return f"{t.fn}({','.join(render_term(a) for a in t.args)})"


def render_literal(f) -> str:
    if isinstance(f, Not):
        return "~" + render_literal(f.arg)
    if isinstance(f, PredAtom):
        return f"{f.pred}({','.join(render_term(a) for a in f.args)})"
    if isinstance(f, ValueAtom):
        return f"{render_term(f.term)}={render_term(f.value)}"
    raise TypeError(f"not a literal: {f!r}")
