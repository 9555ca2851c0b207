"""Networks as sentences and back.

A network over nodes X1..Xn becomes

* one structure sentence
  ``all z1,...,zn. [X1(e)=z1 & ... & Xn(e)=zn]_{e} = [X1(e)=z1 | ...]_{e} * ...``
  with one factor per node conditioned on its parents' values, and
* one parameter sentence ``[Xi(e) = v | Xp(e) = u & ...]_{e} = p`` per CPT
  entry,

over a single sort ``Event``.  Node names that are not usable as function
symbols (and values not usable as value names) are replaced by fresh ones;
the :class:`Renaming` records the originals so the inverse translation can
restore them.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .bayes_net import BayesNet, Node
from .knowledge_base import LOCAL_STAT, TEMPLATE, KnowledgeBase
from .logic import (
    Const, ForAll, FunApp, Literal, NumCompare, Product, Proportion,
    ValueAtom, Var, conjoin, substitute,
)
from .parser import KEYWORDS, Declaration, SourceKB, Statement, signature_from

EVENT_SORT = "Event"
EVENT_VAR = "e"
_IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")
_RESERVED = KEYWORDS | {"fact", "axiom", "stat", "sort", "pred", "func", "const",
                        "event", "evidence", "query", "interest", EVENT_SORT, EVENT_VAR}


class TranslationError(Exception):
    pass


@dataclass
class Renaming:
    """Function symbol -> original node name, and per symbol value -> original value."""

    nodes: dict = field(default_factory=dict)
    values: dict = field(default_factory=dict)

    def to_comments(self) -> list:
        out = []
        for sym, orig in self.nodes.items():
            vals = " ".join(f"{v}={o}" for v, o in self.values.get(sym, {}).items())
            out.append(f"// rename {sym} {orig}" + (f" {vals}" if vals else ""))
        return out

    @classmethod
    def from_comments(cls, text: str) -> Optional["Renaming"]:
        r = cls()
        for line in text.splitlines():
            parts = line.strip().split()
            if len(parts) >= 4 and parts[:2] == ["//", "rename"]:
                sym, orig = parts[2], parts[3]
                r.nodes[sym] = orig
                r.values[sym] = dict(p.split("=", 1) for p in parts[4:])
        return r if r.nodes else None


@dataclass
class Translation:
    source: SourceKB
    renaming: Renaming

    @property
    def sentences(self) -> list:
        return [s.sentence for s in self.source.statements]


def _usable(name: str, taken: set) -> bool:
    return bool(_IDENT.match(name)) and name not in _RESERVED and name not in taken


def bn_to_sentences(net: BayesNet) -> Translation:
    order = net.topological_order()
    renaming = Renaming()
    sym = {}
    taken = set(net.names)
    for i, name in enumerate(net.names, 1):
        if _usable(name, set(sym.values())) and not re.fullmatch(r"X\d+", name):
            sym[name] = name
        else:
            k = i
            while f"X{k}" in taken or f"X{k}" in sym.values():
                k += 1
            sym[name] = f"X{k}"
    n = len(order)
    zs = [f"z{i}" for i in range(1, n + 1)]
    values = {}
    for name in net.names:
        node = net[name]
        if len(node.states) < 2:
            raise TranslationError(f"node {name} has fewer than two states")
        mapped, used = {}, set()
        for j, s in enumerate(node.states):
            if _usable(s, used) and s not in zs and not re.fullmatch(r"v\d+", s):
                mapped[s] = s
            else:
                mapped[s] = f"v{j}"
            used.add(mapped[s])
        values[name] = mapped
        renaming.nodes[sym[name]] = name
        renaming.values[sym[name]] = {new: old for old, new in mapped.items()}

    items = [Declaration("sort", (EVENT_SORT,))]
    for name in net.names:
        items.append(Declaration("func", (sym[name],), (EVENT_SORT,),
                                 tuple(values[name][s] for s in net[name].states)))
    e = Var(EVENT_VAR)

    def atom(name, value):
        return ValueAtom(FunApp(sym[name], (e,)), value)

    if n:
        z_of = dict(zip(order, zs))
        joint = conjoin(atom(m, Var(z_of[m])) for m in order)
        factors = tuple(
            Proportion(atom(m, Var(z_of[m])), conjoin(atom(p, Var(z_of[p])) for p in net[m].parents), (EVENT_VAR,))
            for m in order)
        rhs = factors[0] if n == 1 else Product(factors)
        structure = ForAll(tuple(zs), NumCompare(Proportion(joint, None, (EVENT_VAR,)), "=", rhs))
        items.append(Statement("axiom", structure, "structure"))
    for name in net.names:
        node = net[name]
        for cfg in net.configs(name):
            cond = conjoin(atom(p, Const(values[p][v])) for p, v in zip(node.parents, cfg))
            for s, prob in zip(node.states, node.cpt[cfg]):
                prop = Proportion(atom(name, Const(values[name][s])), cond, (EVENT_VAR,))
                items.append(Statement("stat", NumCompare(prop, "=", Literal(Fraction(prob)))))
    src = SourceKB(items, signature_from([d for d in items if isinstance(d, Declaration)]))
    return Translation(src, renaming)


def sentences_to_bn(source, renaming: Optional[Renaming] = None) -> BayesNet:
    """Inverse of :func:`bn_to_sentences`.

    ``source`` is a SourceKB or a Translation.  Exactly one structure
    sentence is required; event-type conditions it carries must recur in
    every parameter sentence and are dropped.  A row may omit one value,
    which is completed to sum to 1.
    """
    if isinstance(source, Translation):
        renaming = renaming or source.renaming
        source = source.source
    kb = KnowledgeBase(source.signature, source.statements)
    sig = kb.signature
    odd = [c.label for c in kb.classified if c.kind not in (TEMPLATE, LOCAL_STAT)]
    if odd:
        raise TranslationError("not a structure or parameter sentence: " + ", ".join("@" + l for l in odd))
    if not kb.templates:
        if kb.stats:
            raise TranslationError("parameter sentences without a structure sentence")
        return BayesNet()
    if len(kb.templates) > 1:
        raise TranslationError("more than one structure sentence")
    t = kb.templates[0]
    nodes = t.nodes
    parents = t.parents
    states = {fn: tuple(sig.functions[fn].values) for fn in nodes}
    table = {fn: {} for fn in nodes}
    for st in kb.stats:
        if len(st.vars) != 1:
            raise TranslationError(f"@{st.label}: parameter sentences bind only the event variable")
        b = {st.event_var: Var(t.event_var)}
        target = substitute(st.target, b)
        if not isinstance(target, ValueAtom) or target.term.fn not in table:
            raise TranslationError(f"@{st.label}: target is not a structure node")
        fn = target.term.fn
        cfg, rest = {}, []
        for c in st.condition:
            c = substitute(c, b)
            if isinstance(c, ValueAtom) and c.term.fn in parents[fn] and isinstance(c.value, Const):
                cfg[c.term.fn] = c.value.name
            else:
                rest.append(c)
        if set(cfg) != set(parents[fn]) or set(rest) != set(t.condition):
            raise TranslationError(f"@{st.label}: condition does not match the parents of {fn}")
        key = tuple(cfg[p] for p in parents[fn])
        row = table[fn].setdefault(key, {})
        value = target.value.name
        if row.get(value, st.point_value) != st.point_value:
            raise TranslationError(f"@{st.label}: conflicting value for {fn}={value}")
        row[value] = st.point_value
    out = []
    for fn in nodes:
        cpt = {}
        for key in itertools.product(*(states[p] for p in parents[fn])):
            row = table[fn].get(key, {})
            missing = [s for s in states[fn] if s not in row]
            where = f"P({fn}=... | {', '.join(f'{p}={v}' for p, v in zip(parents[fn], key))})"
            if len(missing) > 1:
                raise TranslationError(f"incomplete parameters: {where} lacks {', '.join(missing)}")
            total = sum(row.values(), Fraction(0))
            if missing:
                row = {**row, missing[0]: 1 - total}
            elif total != 1:
                raise TranslationError(f"{where} sums to {total}")
            cpt[key] = tuple(row[s] for s in states[fn])
        out.append(Node(fn, states[fn], parents[fn], cpt))
    if renaming is not None:
        out = [_restore(n, renaming) for n in out]
        order = [renaming.nodes.get(fn, fn) for fn in renaming.nodes]
        by_name = {n.name: n for n in out}
        out = [by_name[o] for o in order if o in by_name] + [n for n in out if n.name not in order]
    return BayesNet(out)


def _restore(node: Node, r: Renaming) -> Node:
    def val(sym, v):
        return r.values.get(sym, {}).get(v, v)

    parents = node.parents
    cpt = {tuple(val(p, v) for p, v in zip(parents, key)): row for key, row in node.cpt.items()}
    return Node(r.nodes.get(node.name, node.name), tuple(val(node.name, s) for s in node.states),
                tuple(r.nodes.get(p, p) for p in parents), cpt)


def translation_text(tr: Translation) -> str:
    """KB text with the renaming recorded as leading comments."""
    from .parser import pretty_print
    body = pretty_print(tr.source)
    header, rest = body.split("\n", 1)
    return "\n".join([header] + tr.renaming.to_comments()) + "\n" + rest
