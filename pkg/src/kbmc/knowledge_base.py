"""Sentence classification, ground entailment and statistic applicability.

Each KB sentence lands in exactly one bucket:

* ``GroundFact`` - a conjunction of ground literals;
* ``HornUniversal`` - ``all xs. A1 & ... & Ak -> A`` over function-free atoms;
* ``LocalStat`` - ``[target | c1 & ... & cn]_{e,...} = p`` (or ``in (lo,hi)``),
  optionally under ``all`` over value placeholders;
* ``TemplateDecomp`` - a universally quantified product decomposition of a
  joint proportion over function values;
* ``Inert`` - anything else.  Kept for model checking only.

The first bound variable of a statistic is its event variable.  Conditions
mentioning it are parent conditions, the rest are context conditions.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from .logic import (
    Const, ForAll, FunApp, Implies, InInterval, Literal, Not, NumCompare,
    PredAtom, Product, Proportion, Signature, ValueAtom, Var, conjoin, conjuncts,
    free_vars, is_ground, render_literal, substitute, term_vars,
)
from .request import node_name

GROUND_FACT = "GroundFact"
HORN = "HornUniversal"
LOCAL_STAT = "LocalStat"
TEMPLATE = "TemplateDecomp"
INERT = "Inert"
TRUE, FALSE = "true", "false"


class AmbiguousContext(Exception):
    """A statistic's context can be satisfied in ways that disagree."""


# -- classified sentences ----------------------------------------------------


@dataclass(frozen=True)
class HornRule:
    vars: tuple
    body: tuple
    head: PredAtom
    label: Optional[str] = None


@dataclass(frozen=True)
class LocalStat:
    label: str
    index: int
    formula: object
    vars: tuple
    target: object  # PredAtom, Not(PredAtom) or ValueAtom
    condition: tuple  # literal conjuncts in source order
    value: Optional[Fraction] = None
    interval: Optional[InInterval] = None
    placeholders: tuple = ()

    @property
    def event_var(self) -> str:
        return self.vars[0]

    @property
    def parent_conditions(self) -> tuple:
        return tuple(c for c in self.condition if self.event_var in free_vars(c))

    @property
    def context_conditions(self) -> tuple:
        return tuple(c for c in self.condition if self.event_var not in free_vars(c))

    @property
    def symbol(self) -> str:
        return literal_symbol(self.target)

    @property
    def point_value(self) -> Fraction:
        if self.value is not None:
            return self.value
        return (self.interval.lo + self.interval.hi) / 2

    def reconstruct(self):
        """Rebuild the sentence from the classified parts."""
        prop = Proportion(self.target, conjoin(self.condition), self.vars)
        if self.value is not None:
            f = NumCompare(prop, "=", Literal(self.value))
        else:
            iv = self.interval
            f = InInterval(prop, iv.lo, iv.hi, iv.lo_open, iv.hi_open)
        if self.placeholders:
            f = ForAll(self.placeholders, f)
        return f


@dataclass(frozen=True)
class TemplateDecomp:
    label: str
    index: int
    formula: object
    event_var: str
    condition: tuple  # event-type literals
    nodes: tuple  # function symbols in factor order
    parents: dict = field(hash=False)  # symbol -> tuple of parent symbols
    node_args: dict = field(hash=False)  # symbol -> argument terms


# -- literal helpers ---------------------------------------------------------


def literal_atom(lit):
    return lit.arg if isinstance(lit, Not) else lit


def literal_symbol(lit) -> str:
    a = literal_atom(lit)
    return a.pred if isinstance(a, PredAtom) else a.term.fn


def is_literal(f) -> bool:
    a = literal_atom(f)
    return isinstance(a, (PredAtom, ValueAtom)) and not isinstance(a, Not)


def _function_free(atom) -> bool:
    return all(isinstance(a, (Var, Const)) for a in atom.args)


def node_atom(lit):
    """The network node a literal talks about: a PredAtom or a FunApp."""
    a = literal_atom(lit)
    return a.term if isinstance(a, ValueAtom) else a


def literal_value(lit, sig: Optional[Signature] = None) -> Optional[str]:
    """Node value asserted by a ground literal, or None if not a single value."""
    if isinstance(lit, PredAtom):
        return TRUE
    if isinstance(lit, Not) and isinstance(lit.arg, PredAtom):
        return FALSE
    if isinstance(lit, ValueAtom):
        return lit.value.name if isinstance(lit.value, Const) else None
    if isinstance(lit, Not) and isinstance(lit.arg, ValueAtom) and sig is not None:
        decl = sig.functions.get(lit.arg.term.fn)
        if decl and decl.finite and len(decl.values) == 2 and isinstance(lit.arg.value, Const):
            other = [v for v in decl.values if v != lit.arg.value.name]
            return other[0] if other else None
    return None


# -- classification ----------------------------------------------------------


def classify_sentence(f, sig: Signature, label: Optional[str] = None, index: int = 0):
    """Return ``(kind, payload)``; payload is a fact list, HornRule,
    list of LocalStat, TemplateDecomp or None."""
    if hasattr(f, "formula"):
        f = f.formula
    label = label or f"s{index + 1}"
    if is_ground(f):
        lits = conjuncts(f)
        if lits and all(is_literal(c) for c in lits):
            return GROUND_FACT, lits
        return INERT, None
    horn = _as_horn(f, label)
    if horn is not None:
        return HORN, horn
    template = _as_template(f, sig, label, index)
    if template is not None:
        return TEMPLATE, template
    stats = _as_local_stat(f, sig, label, index)
    if stats is not None:
        return LOCAL_STAT, stats
    return INERT, None


def _strip_forall(f):
    vars_ = []
    while isinstance(f, ForAll):
        vars_.extend(f.vars)
        f = f.body
    return tuple(vars_), f


def _as_horn(f, label):
    vars_, body = _strip_forall(f)
    if not vars_ or free_vars(f):
        return None
    if isinstance(body, Implies):
        prem, head = conjuncts(body.left), body.right
    else:
        prem, head = [], body
    atoms = prem + [head]
    if not all(isinstance(a, PredAtom) and _function_free(a) for a in atoms):
        return None
    return HornRule(vars_, tuple(prem), head, label)


def _stat_parts(f):
    """(proportion, value, interval) for ``[..] = p``, ``p = [..]`` or ``[..] in I``."""
    if isinstance(f, NumCompare) and f.op == "=":
        if isinstance(f.left, Proportion) and isinstance(f.right, Literal):
            return f.left, f.right.value, None
        if isinstance(f.right, Proportion) and isinstance(f.left, Literal):
            return f.right, f.left.value, None
    if isinstance(f, InInterval) and isinstance(f.expr, Proportion):
        return f.expr, None, f
    return None


def _as_local_stat(f, sig, label, index):
    placeholders, body = _strip_forall(f)
    parts = _stat_parts(body)
    if parts is None:
        return None
    prop, value, interval = parts
    if value is not None and not (0 <= value <= 1):
        return None
    if interval is not None and not (0 <= interval.lo and interval.hi <= 1):
        return None
    if not prop.vars:
        return None
    event = prop.vars[0]
    target = prop.body
    if not is_literal(target) or event not in free_vars(target):
        return None
    if isinstance(target, Not) and isinstance(target.arg, ValueAtom):
        return None
    cond = tuple(conjuncts(prop.condition))
    if not all(is_literal(c) for c in cond):
        return None
    for c in cond:
        if isinstance(c, Not) and isinstance(c.arg, ValueAtom):
            decl = sig.functions.get(c.arg.term.fn)
            if not (decl and decl.finite and len(decl.values) == 2):
                return None  # a negated value is a single value only for binary functions
    # placeholders may only stand for function values
    for z in placeholders:
        for lit in (target,) + cond:
            a = literal_atom(lit)
            if isinstance(a, PredAtom) and z in free_vars(a):
                return None
            if isinstance(a, ValueAtom) and z in term_vars(a.term):
                return None
    stat = LocalStat(label, index, f, prop.vars, target, cond, value, interval, placeholders)
    return expand_placeholders(stat, sig)


def expand_placeholders(stat: LocalStat, sig: Signature) -> list:
    """One concrete statistic per assignment of the value placeholders."""
    if not stat.placeholders:
        return [stat]
    domains = []
    for z in stat.placeholders:
        fns = [literal_atom(l).term.fn for l in (stat.target,) + stat.condition
               if isinstance(literal_atom(l), ValueAtom)
               and isinstance(literal_atom(l).value, Var) and literal_atom(l).value.name == z]
        if not fns or fns[0] not in sig.functions:
            return []
        domains.append(sig.functions[fns[0]].values)
    out = []
    for combo in itertools.product(*domains):
        binding = {z: Const(v) for z, v in zip(stat.placeholders, combo)}
        target = substitute(stat.target, binding)
        cond = tuple(substitute(c, binding) for c in stat.condition)
        out.append(LocalStat(stat.label, stat.index, stat.formula, stat.vars, target, cond,
                             stat.value, stat.interval, ()))
    return out


def _value_atom_parts(lit, event, zvars):
    """(fn, z) if lit is ``F(e) = z`` over the event variable, else None."""
    if not isinstance(lit, ValueAtom) or not isinstance(lit.value, Var):
        return None
    if lit.value.name not in zvars or event not in term_vars(lit.term):
        return None
    return lit.term.fn, lit.value.name


def _as_template(f, sig, label, index):
    zvars, body = _strip_forall(f)
    if not zvars or not isinstance(body, NumCompare) or body.op != "=":
        return None
    lhs, rhs = body.left, body.right
    if not isinstance(lhs, Proportion) or len(lhs.vars) != 1:
        return None
    event = lhs.vars[0]
    factors = rhs.terms if isinstance(rhs, Product) else (rhs,)
    if not all(isinstance(p, Proportion) and p.vars == lhs.vars for p in factors):
        return None
    joint = [_value_atom_parts(l, event, zvars) for l in conjuncts(lhs.body)]
    if None in joint:
        return None
    fns = [fn for fn, _ in joint]
    zs = [z for _, z in joint]
    if len(set(fns)) != len(fns) or len(set(zs)) != len(zs) or set(zs) != set(zvars):
        return None
    z_of = dict(joint)
    type_cond = tuple(conjuncts(lhs.condition))
    if any(free_vars(c) & set(zvars) for c in type_cond) or not all(is_literal(c) for c in type_cond):
        return None
    args_of = {}
    for l in conjuncts(lhs.body):
        args_of[l.term.fn] = l.term.args
    order, parents = [], {}
    for p in factors:
        head = _value_atom_parts(p.body, event, zvars)
        if head is None or z_of.get(head[0]) != head[1] or head[0] in parents:
            return None
        pars, rest = [], []
        for c in conjuncts(p.condition):
            part = _value_atom_parts(c, event, zvars)
            if part is not None:
                if z_of.get(part[0]) != part[1]:
                    return None
                pars.append(part[0])
            else:
                rest.append(c)
        if set(rest) != set(type_cond) or len(rest) != len(type_cond):
            return None
        if any(q not in parents for q in pars):
            return None  # parents must precede their children
        parents[head[0]] = tuple(pars)
        order.append(head[0])
    if set(order) != set(fns):
        return None
    return TemplateDecomp(label, index, f, event, type_cond, tuple(order), parents, args_of)


# -- fact base ---------------------------------------------------------------


class FactBase:
    """Ground literals closed under Horn rules.

    ``holds`` is three-valued.  With ``closed_world`` a literal that is not
    derivable counts as false (negation as failure); otherwise it is
    unknown unless its negation was stated explicitly.
    """

    def __init__(self, sig: Signature, rules: Iterable[HornRule], literals: Iterable):
        self.sig = sig
        self.rules = tuple(rules)
        pos, neg = set(), set()
        for lit in literals:
            if isinstance(lit, Not):
                neg.add(lit.arg)
            else:
                pos.add(lit)
        self.negatives = frozenset(neg)
        self.positives = frozenset(forward_chain(pos, self.rules, sig))
        self.by_symbol = defaultdict(list)
        for a in sorted(self.positives, key=render_literal):
            self.by_symbol[literal_symbol(a)].append(a)
        self.values = {}
        for a in self.positives:
            if isinstance(a, ValueAtom):
                self.values.setdefault(a.term, set()).add(a.value.name)

    def holds(self, lit, closed_world: bool = True) -> Optional[bool]:
        if isinstance(lit, Not):
            inner = self.holds(lit.arg, closed_world)
            return None if inner is None else not inner
        if lit in self.positives:
            return True
        if lit in self.negatives:
            return False
        if isinstance(lit, ValueAtom) and lit.term in self.values:
            return False  # functions take one value
        return False if closed_world else None

    def inconsistencies(self) -> list:
        return sorted(render_literal(a) for a in self.positives & self.negatives)


def _match_atom(pattern, ground, binding):
    """Extend ``binding`` so that pattern instantiates to ground, or None."""
    if isinstance(pattern, ValueAtom):
        if not isinstance(ground, ValueAtom):
            return None
        b = _match_term(pattern.term, ground.term, binding)
        return None if b is None else _match_term(pattern.value, ground.value, b)
    if isinstance(ground, FunApp) and isinstance(pattern, FunApp):
        return _match_term(pattern, ground, binding)
    if not isinstance(ground, PredAtom) or pattern.pred != ground.pred or len(pattern.args) != len(ground.args):
        return None
    b = binding
    for p, g in zip(pattern.args, ground.args):
        b = _match_term(p, g, b)
        if b is None:
            return None
    return b


def _match_term(p, g, binding):
    if isinstance(p, Var):
        bound = binding.get(p.name)
        if bound is None:
            out = dict(binding)
            out[p.name] = g
            return out
        return binding if bound == g else None
    if isinstance(p, Const):
        return binding if p == g else None
    if isinstance(p, FunApp):
        if not isinstance(g, FunApp) or g.fn != p.fn or len(g.args) != len(p.args):
            return None
        b = binding
        for pa, ga in zip(p.args, g.args):
            b = _match_term(pa, ga, b)
            if b is None:
                return None
        return b
    return None


def _constants_of_sort(sig: Signature, sort: Optional[str]):
    return sorted(c for c, s in sig.constants.items() if sort is None or s == sort)


def forward_chain(facts: set, rules, sig: Signature) -> set:
    """Least fixpoint of the facts under the Horn rules."""
    known = set(facts)
    index = defaultdict(set)
    for a in known:
        index[literal_symbol(a)].add(a)
    changed = True
    while changed:
        changed = False
        for rule in rules:
            for b in _solve_positive(rule.body, {}, index):
                unbound = [v for v in term_vars_of(rule.head) if v not in b]
                if unbound:
                    sorts = _head_var_sorts(rule.head, sig)
                    pools = [[Const(c) for c in _constants_of_sort(sig, sorts.get(v))] for v in unbound]
                    extra = [dict(zip(unbound, combo)) for combo in itertools.product(*pools)]
                else:
                    extra = [{}]
                for e in extra:
                    head = substitute(rule.head, {**b, **e})
                    if head not in known:
                        known.add(head)
                        index[head.pred].add(head)
                        changed = True
    return known


def term_vars_of(atom) -> list:
    out = []
    for a in atom.args:
        for v in sorted(term_vars(a)):
            if v not in out:
                out.append(v)
    return out


def _head_var_sorts(head, sig):
    sorts = sig.predicates.get(head.pred, ())
    out = {}
    for a, s in zip(head.args, sorts):
        if isinstance(a, Var):
            out[a.name] = s if sig.sorts else None
    return out


def _solve_positive(atoms, binding, index):
    if not atoms:
        yield binding
        return
    first, rest = atoms[0], atoms[1:]
    pattern = substitute(first, binding) if binding else first
    for ground in sorted(index.get(literal_symbol(pattern), ()), key=render_literal):
        b = _match_atom(pattern, ground, binding)
        if b is not None:
            yield from _solve_positive(rest, b, index)


# -- the knowledge base ------------------------------------------------------


@dataclass(frozen=True)
class Classified:
    label: str
    kind: str
    formula: object


class KnowledgeBase:
    def __init__(self, sig: Signature, statements: Iterable):
        self.signature = sig
        self.facts = []
        self.rules = []
        self.stats = []
        self.templates = []
        self.inert = []
        self.classified = []
        for i, st in enumerate(statements):
            formula = st.formula
            label = getattr(st, "label", None) or f"s{i + 1}"
            kind, payload = classify_sentence(formula, sig, label, i)
            self.classified.append(Classified(label, kind, formula))
            if kind == GROUND_FACT:
                self.facts.extend(payload)
            elif kind == HORN:
                self.rules.append(payload)
            elif kind == LOCAL_STAT:
                self.stats.extend(payload)
            elif kind == TEMPLATE:
                self.templates.append(payload)
            else:
                self.inert.append(formula)
        self.stats_by_symbol = defaultdict(list)
        for s in self.stats:
            self.stats_by_symbol[s.symbol].append(s)
        self._base = None

    @classmethod
    def from_source(cls, src) -> "KnowledgeBase":
        return cls(src.signature, src.statements)

    @classmethod
    def from_text(cls, text: str) -> "KnowledgeBase":
        from .parser import parse_kb
        return cls.from_source(parse_kb(text))

    def fact_base(self, extra: Iterable = ()) -> FactBase:
        extra = tuple(extra)
        if not extra:
            if self._base is None:
                self._base = FactBase(self.signature, self.rules, self.facts)
            return self._base
        return FactBase(self.signature, self.rules, list(self.facts) + list(extra))

    def label_of(self, index: int) -> str:
        return self.classified[index].label

    def without(self, labels) -> "KnowledgeBase":
        """A copy with the statements carrying these labels removed."""
        keep = [c for c in self.classified if c.label not in set(labels)]
        return KnowledgeBase(self.signature, keep)


def entails_ground(kb: KnowledgeBase, lit, extra: Iterable = ()) -> bool:
    """Does a ground literal follow from the facts closed under the Horn
    rules?  Negative literals use negation as failure."""
    return kb.fact_base(extra).holds(lit, closed_world=True) is True


# -- applicability -----------------------------------------------------------


@dataclass(frozen=True)
class InstantiatedStat:
    stat: LocalStat
    binding: tuple  # sorted (var, term) pairs
    node: str
    target_value: str
    parents: tuple  # sorted (node name, value) pairs
    parent_atoms: tuple  # (node name, atom) pairs
    discharged: tuple  # ground literals entailed for the event
    context: tuple  # ground context literals

    @property
    def label(self) -> str:
        return self.stat.label

    @property
    def value(self) -> Fraction:
        return self.stat.point_value

    @property
    def parent_dict(self) -> dict:
        return dict(self.parents)

    def condition_literals(self) -> frozenset:
        """Every instantiated condition conjunct, parents included."""
        b = dict(self.binding)
        return frozenset(substitute(c, b) for c in self.stat.condition)


def applicable_statistics(kb: KnowledgeBase, node, event: str, *, facts: Optional[FactBase] = None,
                          variables: Optional[set] = None) -> list:
    """Statistics about ``node`` that apply to ``event``.

    ``variables`` names the symbols that may become network parents; an
    event condition on any other symbol must be entailed.  ``None`` lets
    every symbol be a parent.
    """
    facts = facts or kb.fact_base()
    symbol = node.pred if isinstance(node, PredAtom) else node.fn
    out = []
    for stat in kb.stats_by_symbol.get(symbol, ()):
        inst = _instantiate(kb, stat, node, event, facts, variables)
        if inst is not None:
            out.append(inst)
    return out


def _instantiate(kb, stat, node, event, facts, variables):
    tgt = node_atom(stat.target)
    binding = _match_atom(tgt, node, {})
    if binding is None:
        return None
    ev = binding.get(stat.event_var)
    if ev != Const(event):
        return None
    ctx = list(stat.context_conditions)
    positives = [c for c in ctx if not isinstance(c, Not)]
    negatives = [c for c in ctx if isinstance(c, Not)]
    index = facts.by_symbol
    found = {}
    for b in _solve_positive(positives, binding, index):
        if any(free_vars(substitute(n, b)) for n in negatives):
            continue
        if not all(facts.holds(substitute(n, b), closed_world=True) for n in negatives):
            continue
        result = _classify_parents(kb, stat, b, facts, variables)
        if result is None:
            continue
        parents, parent_atoms, discharged = result
        key = parents
        if key not in found:
            found[key] = (b, parent_atoms, discharged)
    if not found:
        return None
    if len(found) > 1:
        options = "; ".join(", ".join(f"{n}={v}" for n, v in k) or "(no parents)" for k in found)
        raise AmbiguousContext(
            f"statistic @{stat.label} applies to {node_name(node)} in more than one way: {options}")
    parents, (b, parent_atoms, discharged) = next(iter(found.items()))
    ctx_ground = tuple(substitute(c, b) for c in stat.context_conditions)
    return InstantiatedStat(
        stat=stat,
        binding=tuple(sorted((k, v) for k, v in b.items())),
        node=node_name(node),
        target_value=literal_value(stat.target, kb.signature),
        parents=parents,
        parent_atoms=parent_atoms,
        discharged=discharged,
        context=ctx_ground,
    )


def _classify_parents(kb, stat, b, facts, variables):
    parents, atoms, discharged = {}, {}, []
    for cond in stat.parent_conditions:
        g = substitute(cond, b)
        if free_vars(g):
            return None
        truth = facts.holds(g, closed_world=False)
        if truth is True:
            discharged.append(g)
            continue
        if truth is False:
            return None
        if variables is not None and literal_symbol(g) not in variables:
            return None
        value = literal_value(g, kb.signature)
        if value is None:
            return None
        atom = node_atom(g)
        name = node_name(atom)
        if parents.get(name, value) != value:
            return None  # contradictory parent literals
        parents[name] = value
        atoms[name] = atom
    return tuple(sorted(parents.items())), tuple(sorted(atoms.items())), tuple(discharged)
