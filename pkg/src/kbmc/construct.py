"""Event-specific network construction from a knowledge base.

The pipeline for one request:

1. Split the evidence.  Literals about *variable symbols* (statistic
   targets, template nodes, query and interest symbols) become observed
   nodes; the rest join the KB facts and can discharge conditions.
2. If exactly one template's event-type condition is entailed, its nodes
   are instantiated directly.
3. Seeds (queries, observed nodes, interest nodes) are expanded backwards:
   each applicable statistic about a node proposes its undischarged event
   conditions as parents.
4. Each CPT row takes the most specific statistic consistent with it.
   Missing rows of a binary node with binary causes are completed by a
   noisy-OR; a root without a prior gets a uniform one.  Parents no chosen
   statistic cites are dropped, then nodes that no longer lead to a seed.
5. The result is checked for cycles and validated.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .bayes_net import BayesNet, Node, find_cycle, format_fraction, validate
from .knowledge_base import (
    FALSE, TRUE, InstantiatedStat, KnowledgeBase, TemplateDecomp,
    applicable_statistics, forward_chain, literal_symbol, literal_value,
    node_atom, _match_atom,
)
from .logic import Const, FunApp, Not, PredAtom, Var, render_literal, substitute
from .noisy_or import NoisyOrError, complete_cpt_noisy_or
from .request import ConstructionRequest, node_name

MORE, LESS, EQUAL, INCOMPARABLE = "MoreSpecific", "LessSpecific", "Equal", "Incomparable"
PRODUCT_NOTE = "joint composed as the product of the chosen local conditionals"


class ConstructionError(Exception):
    pass


class UnresolvedConflict(ConstructionError):
    def __init__(self, message, labels=()):
        super().__init__(message)
        self.labels = tuple(labels)


class MissingStatistic(ConstructionError):
    pass


class CycleError(ConstructionError):
    def __init__(self, message, labels=()):
        super().__init__(message)
        self.labels = tuple(labels)


class TemplateError(ConstructionError):
    pass


# -- report ------------------------------------------------------------------


@dataclass(frozen=True)
class NodeSpec:
    name: str
    atom: object  # PredAtom or FunApp
    states: tuple
    provenance: tuple = ()

    def __post_init__(self):
        if len(self.states) < 2:
            raise ValueError(f"node {self.name} needs at least two states")


@dataclass(frozen=True)
class CptEntry:
    node: str
    config: tuple  # (parent, state) pairs in parent order
    state: str
    prob: Fraction
    labels: tuple  # statistics the value comes from
    how: str


@dataclass
class ConstructionReport:
    event: str
    route: str = "general"
    nodes: list = field(default_factory=list)  # NodeSpec in network order
    edges: list = field(default_factory=list)  # (parent, child, label)
    entries: list = field(default_factory=list)  # CptEntry
    discharged: list = field(default_factory=list)  # (label, literal text)
    observed: dict = field(default_factory=dict)  # node -> state
    context: list = field(default_factory=list)  # evidence used as facts
    pruned: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def warn(self, msg: str):
        if msg not in self.warnings:
            self.warnings.append(msg)

    def labels_for(self, node: str) -> list:
        """Statistic labels cited by a node's CPT entries, in first-use order."""
        out = []
        for e in self.entries:
            if e.node == node:
                for lab in e.labels:
                    if lab not in out:
                        out.append(lab)
        return out

    def to_text(self) -> str:
        lines = ["kbmc-report 1", f"event {self.event}", f"route {self.route}"]
        for n in self.notes:
            lines.append(f"note {n}")
        for n in self.nodes:
            prov = ", ".join(n.provenance)
            lines.append(f"node {n.name} states {' '.join(n.states)}" + (f" from {prov}" if prov else ""))
        for p, c, lab in self.edges:
            lines.append(f"edge {p} -> {c} by @{lab}")
        for n, s in self.observed.items():
            lines.append(f"observed {n} = {s}")
        for lit in self.context:
            lines.append(f"context {lit}")
        for lab, lit in self.discharged:
            lines.append(f"discharged @{lab} {lit}")
        for e in self.entries:
            cfg = ", ".join(f"{p}={v}" for p, v in e.config)
            lines.append(f"cpt P({e.node}={e.state}" + (f" | {cfg}" if cfg else "")
                         + f") = {format_fraction(e.prob)} ; {e.how}")
        for p in self.pruned:
            lines.append(f"pruned {p}")
        for w in self.warnings:
            lines.append(f"warning {w}")
        return "\n".join(lines) + "\n"


# -- context of one request --------------------------------------------------


class _Context:
    def __init__(self, kb: KnowledgeBase, req: ConstructionRequest):
        self.kb = kb
        self.req = req
        sig = kb.signature
        variables = {s.symbol for s in kb.stats}
        for t in kb.templates:
            variables.update(t.nodes)
        for atom in tuple(req.queries) + tuple(req.interest):
            variables.add(atom.pred if isinstance(atom, PredAtom) else atom.fn)
        self.variables = variables
        self.observed = {}
        self.observed_atoms = {}
        self.context = []
        for lit in req.evidence:
            if literal_symbol(lit) in variables:
                value = literal_value(lit, sig)
                if value is None:
                    raise ConstructionError(f"evidence {render_literal(lit)} does not fix a node value")
                atom = node_atom(lit)
                name = node_name(atom)
                if self.observed.get(name, value) != value:
                    raise ConstructionError(f"contradictory evidence about {name}")
                self.observed[name] = value
                self.observed_atoms[name] = atom
            else:
                self.context.append(lit)
        self.facts = kb.fact_base(self.context)

    def states(self, atom) -> tuple:
        if isinstance(atom, PredAtom):
            return (TRUE, FALSE)
        decl = self.kb.signature.functions.get(atom.fn)
        if decl is None or not decl.finite:
            raise ConstructionError(f"{node_name(atom)} is not a finite-valued node")
        return tuple(decl.values)

    def applicable(self, atom) -> list:
        return applicable_statistics(self.kb, atom, self.req.event, facts=self.facts,
                                     variables=self.variables)

    def seeds(self) -> list:
        out = []
        for atom in tuple(self.req.queries):
            out.append((atom, "query"))
        for atom in self.observed_atoms.values():
            out.append((atom, "evidence"))
        for atom in tuple(self.req.interest):
            out.append((atom, "interest"))
        return out


# -- specificity -------------------------------------------------------------


def _freeze(f, vars_):
    return substitute(f, {v: Const(f"?{v}") for v in vars_})


def _included(inner, outer, kb: KnowledgeBase) -> bool:
    """Is every literal of ``inner`` in the Horn closure of ``outer``?"""
    pos = {l for l in outer if not isinstance(l, Not)}
    closed = forward_chain(pos, kb.rules, kb.signature)
    return all((l in outer) if isinstance(l, Not) else (l in closed) for l in inner)


def _subsumes(general, specific, kb: KnowledgeBase) -> bool:
    """Does some substitution map ``general``'s target onto ``specific``'s and
    its conditions into the closure of ``specific``'s frozen conditions?"""
    s_target = node_atom(_freeze(specific.target, specific.vars))
    s_cond = [_freeze(c, specific.vars) for c in specific.condition]
    pos = {l for l in s_cond if not isinstance(l, Not)}
    closed = forward_chain(pos, kb.rules, kb.signature)
    negs = [l.arg for l in s_cond if isinstance(l, Not)]
    start = _match_atom(node_atom(general.target), s_target, {})
    if start is None:
        return False

    def search(conds, binding):
        if not conds:
            return True
        lit, rest = conds[0], conds[1:]
        neg = isinstance(lit, Not)
        pattern = lit.arg if neg else lit
        for cand in (negs if neg else closed):
            b = _match_atom(pattern, cand, binding)
            if b is not None and search(rest, b):
                return True
        return False

    return search(list(general.condition), start)


def specificity_compare(a: InstantiatedStat, b: InstantiatedStat, kb: KnowledgeBase) -> str:
    """How ``a``'s reference class relates to ``b``'s for the same node row.

    Instantiated conditions are compared by inclusion modulo the Horn rules.
    When they coincide, the general forms break the tie: a statistic whose
    form is an instance of its rival's (a constant where the rival has a
    variable) is the more specific one.
    """
    ai, bi = a.condition_literals(), b.condition_literals()
    a_ge, b_ge = _included(bi, ai, kb), _included(ai, bi, kb)
    if a_ge and not b_ge:
        return MORE
    if b_ge and not a_ge:
        return LESS
    if not a_ge:
        return INCOMPARABLE
    ga, gb = _subsumes(b.stat, a.stat, kb), _subsumes(a.stat, b.stat, kb)
    if ga and not gb:
        return MORE
    if gb and not ga:
        return LESS
    return EQUAL


# -- CPT rows ----------------------------------------------------------------


@dataclass
class _Choice:
    prob: Fraction  # probability of the keyed state
    inst: InstantiatedStat
    how: str


class _RowConflict(Exception):
    def __init__(self, insts):
        self.insts = insts


def _stat_prob(inst: InstantiatedStat, state: str, states: tuple) -> Optional[Fraction]:
    """What ``inst`` says about P(state), or None."""
    if inst.target_value == state:
        return inst.value
    if len(states) == 2 and inst.target_value in states:
        return 1 - inst.value
    return None


def _consistent(inst: InstantiatedStat, cfg: dict) -> bool:
    return all(cfg.get(p) == v for p, v in inst.parents)


def _most_specific(cands, kb, cache):
    """Winner among (statistic, probability) candidates, or a _RowConflict."""
    def beats(x, y):
        key = (id(x), id(y))
        if key not in cache:
            cache[key] = specificity_compare(x, y, kb)
        return cache[key] == MORE

    maximal = [(m, p) for m, p in cands if not any(c is not m and beats(c, m) for c, _ in cands)]
    if len({p for _, p in maximal}) > 1:
        raise _RowConflict([m for m, _ in maximal])
    maximal.sort(key=lambda mp: mp[0].stat.index)
    winner, prob = maximal[0]
    others = [c.label for c, _ in cands if c is not winner]
    if len(cands) == 1:
        how = f"@{winner.label}, the only applicable statistic"
    elif len(maximal) > 1:
        how = f"@{winner.label}, first of equally specific {', '.join('@' + m.label for m, _ in maximal)}"
    else:
        how = f"@{winner.label}, more specific than {', '.join('@' + o for o in others)}"
    return winner, prob, how


def _fill_rows(node: NodeSpec, parents: list, parent_states: list, insts: list, kb):
    """Exact rows from the statistics.

    Returns (rows, conflicts): rows maps a config tuple to {state: _Choice}
    for the states the statistics determine; conflicts maps a config to the
    conflicting maximal statistics.
    """
    states = node.states
    keyed = states[:1] if len(states) == 2 else states
    rows, conflicts, cache = {}, {}, {}
    for cfg in itertools.product(*parent_states):
        env = dict(zip(parents, cfg))
        chosen = {}
        for state in keyed:
            cands = [(i, _stat_prob(i, state, states)) for i in insts if _consistent(i, env)]
            cands = [(i, p) for i, p in cands if p is not None]
            if not cands:
                continue
            try:
                inst, prob, how = _most_specific(cands, kb, cache)
            except _RowConflict as exc:
                conflicts[cfg] = exc.insts
                continue
            chosen[state] = _Choice(prob, inst, how)
        rows[cfg] = chosen
    return rows, conflicts


def _complete_row(node: NodeSpec, chosen: dict, where: str):
    """Full distribution from the chosen entries, or None if underdetermined."""
    states = node.states
    if len(states) == 2:
        if states[0] not in chosen:
            return None
        c = chosen[states[0]]
        return ((c.prob, c), (1 - c.prob, None))
    if len(chosen) < len(states) - 1:
        return None
    total = sum((c.prob for c in chosen.values()), Fraction(0))
    if len(chosen) == len(states):
        if total != 1:
            raise ConstructionError(f"statistics for {where} sum to {total}, not 1")
        return tuple((chosen[s].prob, chosen[s]) for s in states)
    if total > 1:
        raise ConstructionError(f"statistics for {where} already sum to {total}")
    return tuple((chosen[s].prob, chosen[s]) if s in chosen else (1 - total, None) for s in states)


def _conflict_error(node, cfg_text, insts):
    labels = sorted({i.label for i in insts}, key=lambda l: min(i.stat.index for i in insts if i.label == l))
    vals = ", ".join(f"@{i.label} = {format_fraction(i.value)}" for i in insts)
    return UnresolvedConflict(
        f"unresolved conflict for P({node.name}{cfg_text}): {vals}; neither is more specific",
        labels)


def _cfg_text(parents, cfg):
    return (" | " + ", ".join(f"{p}={v}" for p, v in zip(parents, cfg))) if parents else ""


@dataclass
class _BuiltNode:
    spec: NodeSpec
    parents: list
    cpt: dict
    entries: list
    edge_labels: dict  # parent -> label
    used: set  # parents cited by a chosen statistic
    discharged: list


def _build_cpt(ctx: _Context, node: NodeSpec, parents: list, parent_states: dict, insts: list,
               report: ConstructionReport, *, allow_completion: bool = True) -> _BuiltNode:
    kb = ctx.kb
    insts = [i for i in insts if all(p in parents for p, _ in i.parents)]
    pstates = [parent_states[p] for p in parents]
    rows, conflicts = _fill_rows(node, parents, pstates, insts, kb)
    states = node.states
    cpt, entries, used, chosen_insts = {}, [], set(), []
    incomplete = []
    full = len(parents)
    for cfg, chosen in rows.items():
        where = f"{node.name}{_cfg_text(parents, cfg)}"
        if cfg in conflicts:
            bad = conflicts[cfg]
            if not allow_completion or all(len(i.parents) == full for i in bad) or not _noisy_or_ok(node, parents, parent_states):
                raise _conflict_error(node, _cfg_text(parents, cfg), bad)
            incomplete.append(cfg)
            continue
        row = _complete_row(node, chosen, where)
        if row is None:
            incomplete.append(cfg)
            continue
        cpt[cfg] = tuple(p for p, _ in row)
        first = next(c for _, c in row if c is not None)
        for s, (p, c) in zip(states, row):
            if c is not None:
                entries.append(CptEntry(node.name, tuple(zip(parents, cfg)), s, p, (c.inst.label,), c.how))
            else:
                entries.append(CptEntry(node.name, tuple(zip(parents, cfg)), s, p, (first.inst.label,),
                                        f"complement of @{first.inst.label}"))
        for _, c in row:
            if c is not None:
                used.update(dict(c.inst.parents))
                chosen_insts.append(c.inst)

    if incomplete:
        if not parents:
            n = len(states)
            cpt[()] = tuple(Fraction(1, n) for _ in states)
            for s in states:
                entries.append(CptEntry(node.name, (), s, Fraction(1, n), (), "uniform prior, no statistic"))
            report.warn(f"{node.name} has no prior statistic; using a uniform prior")
        elif allow_completion and _noisy_or_ok(node, parents, parent_states):
            cpt, entries, used, chosen_insts = _noisy_or_cpt(
                ctx, node, parents, insts, rows, conflicts, report)
        else:
            cfg = incomplete[0]
            want = f"P({node.name}{_cfg_text(parents, cfg)})"
            raise MissingStatistic(f"no statistic determines {want} and no completion rule applies")

    edge_labels = {}
    for inst in sorted(chosen_insts, key=lambda i: i.stat.index):
        for p, _ in inst.parents:
            edge_labels.setdefault(p, inst.label)
    discharged = []
    for inst in sorted(set(chosen_insts), key=lambda i: i.stat.index):
        for lit in inst.discharged + inst.context:
            item = (inst.label, render_literal(lit))
            if item not in discharged:
                discharged.append(item)
    return _BuiltNode(node, list(parents), cpt, entries, edge_labels, used, discharged)


def _noisy_or_ok(node, parents, parent_states) -> bool:
    return node.states == (TRUE, FALSE) and all(parent_states[p] == (TRUE, FALSE) for p in parents)


def _noisy_or_cpt(ctx, node, parents, insts, rows, conflicts, report):
    kb = ctx.kb
    states = node.states
    cache = {}
    per_cause, cause_insts = [], []
    for p in parents:
        cands = [(i, _stat_prob(i, TRUE, states)) for i in insts if i.parents == ((p, TRUE),)]
        if not cands:
            raise MissingStatistic(
                f"noisy-OR completion of {node.name} needs P({node.name}=true | {p}=true) alone")
        try:
            inst, prob, _ = _most_specific(cands, kb, cache)
        except _RowConflict as exc:
            raise _conflict_error(node, f" | {p}=true", exc.insts) from None
        per_cause.append(prob)
        cause_insts.append(inst)
    all_false = tuple(FALSE for _ in parents)
    leak_choice = rows.get(all_false, {}).get(TRUE) if all_false not in conflicts else None
    if leak_choice is not None and len(leak_choice.inst.parents) == len(parents):
        leak, leak_src = leak_choice.prob, f"@{leak_choice.inst.label}"
        leak_labels = (leak_choice.inst.label,)
    else:
        leak, leak_src, leak_labels = Fraction(0), "default leak 0", ()
        report.warn(f"{node.name}: no statistic for the all-causes-absent row; noisy-OR leak set to 0")
    try:
        table = complete_cpt_noisy_or(per_cause, leak)
    except NoisyOrError as exc:
        raise ConstructionError(f"noisy-OR completion of {node.name}: {exc}") from None
    cause_labels = tuple(i.label for i in cause_insts)
    how_no = f"noisy-OR of {', '.join('@' + l for l in cause_labels)} with {leak_src}"
    cpt, entries, used, chosen = {}, [], set(parents), list(cause_insts)
    for cfg in itertools.product(*([(TRUE, FALSE)] * len(parents))):
        chosen_row = rows.get(cfg, {})
        c = chosen_row.get(TRUE)
        pairs = tuple(zip(parents, cfg))
        if c is not None and cfg not in conflicts and len(c.inst.parents) == len(parents):
            p_true, labels, how = c.prob, (c.inst.label,), c.how
            chosen.append(c.inst)
        else:
            active = tuple(v == TRUE for v in cfg)
            p_true = table[active]
            labels = tuple(l for l, on in zip(cause_labels, active) if on) + leak_labels
            how = how_no
        cpt[cfg] = (p_true, 1 - p_true)
        entries.append(CptEntry(node.name, pairs, TRUE, p_true, labels, how))
        entries.append(CptEntry(node.name, pairs, FALSE, 1 - p_true, labels, "complement"))
    report.warn(f"{node.name}: CPT completed by noisy-OR")
    return cpt, entries, used, chosen


# -- variable identification ------------------------------------------------


def _expand(ctx: _Context, preset: dict):
    """Seeds plus every node an applicable statistic proposes as a parent.

    Returns (specs, candidates) in discovery order; candidates maps a node
    to (parent names, parent atoms, statistics).
    """
    specs, cands = {}, {}
    queue = []
    for atom, why in ctx.seeds():
        name = node_name(atom)
        if name not in specs:
            specs[name] = NodeSpec(name, atom, ctx.states(atom), (why,))
            queue.append(name)
    while queue:
        name = queue.pop(0)
        if name in preset:
            continue
        atom = specs[name].atom
        insts = ctx.applicable(atom)
        parents = []
        for inst in insts:
            for p, patom in inst.parent_atoms:
                if p == name:
                    continue
                if p not in parents:
                    parents.append(p)
                if p not in specs:
                    specs[p] = NodeSpec(p, patom, ctx.states(patom), (f"@{inst.label}",))
                    queue.append(p)
        cands[name] = (parents, insts)
    return specs, cands


def identify_variables(kb: KnowledgeBase, req: ConstructionRequest) -> list:
    """Nodes the construction may use: the seeds and everything that
    statistics applicable to them chain back to."""
    ctx = _Context(kb, req)
    specs, _ = _expand(ctx, {})
    return list(specs.values())


# -- selection ---------------------------------------------------------------


@dataclass(frozen=True)
class RowSelection:
    config: tuple  # (parent, state) pairs
    state: str
    prob: Fraction
    label: Optional[str]
    how: str


def select_statistics(kb: KnowledgeBase, node, event: str, *, req: Optional[ConstructionRequest] = None) -> list:
    """Chosen statistic per CPT entry of one node, exact rows only.

    ``node`` is a ground atom (PredAtom or FunApp) or a NodeSpec.  Parents
    are the undischarged conditions of the applicable statistics.  Without
    ``req`` any unknown event condition may become a parent.
    """
    atom = node.atom if isinstance(node, NodeSpec) else node
    ctx = _Context(kb, req or ConstructionRequest(event, (), (atom,)))
    if req is None:
        ctx.variables = None
    spec = NodeSpec(node_name(atom), atom, ctx.states(atom))
    insts = ctx.applicable(atom)
    parents, pstates = [], {}
    for inst in insts:
        for p, patom in inst.parent_atoms:
            if p not in parents:
                parents.append(p)
                pstates[p] = ctx.states(patom)
    report = ConstructionReport(event)
    built = _build_cpt(ctx, spec, parents, pstates, insts, report)
    return [RowSelection(e.config, e.state, e.prob, e.labels[0] if e.labels else None, e.how)
            for e in built.entries]


# -- templates ---------------------------------------------------------------


def _template_applies(ctx: _Context, t: TemplateDecomp) -> bool:
    b = {t.event_var: Const(ctx.req.event)}
    return all(ctx.facts.holds(substitute(c, b), closed_world=True) for c in t.condition)


def _template_nodes(ctx: _Context, t: TemplateDecomp, report: ConstructionReport) -> dict:
    b = {t.event_var: Const(ctx.req.event)}
    atoms = {fn: FunApp(fn, tuple(substitute_arg(a, b) for a in t.node_args[fn])) for fn in t.nodes}
    names = {fn: node_name(a) for fn, a in atoms.items()}
    for c in t.condition:
        report.discharged.append((t.label, render_literal(substitute(c, b))))
    built = {}
    for fn in t.nodes:
        spec = NodeSpec(names[fn], atoms[fn], ctx.states(atoms[fn]), (f"@{t.label}",))
        parents = [names[p] for p in t.parents[fn]]
        pstates = {names[p]: ctx.states(atoms[p]) for p in t.parents[fn]}
        insts = [i for i in ctx.applicable(atoms[fn]) if all(p in parents for p, _ in i.parents)]
        try:
            node = _build_cpt(ctx, spec, parents, pstates, insts, report, allow_completion=False)
        except MissingStatistic as exc:
            raise TemplateError(f"template @{t.label}: {exc}") from None
        node.used = set(parents)
        node.edge_labels = {p: t.label for p in parents}
        built[spec.name] = node
    return built


def substitute_arg(term, binding):
    if isinstance(term, Var):
        return binding.get(term.name, term)
    if isinstance(term, FunApp):
        return FunApp(term.fn, tuple(substitute_arg(a, binding) for a in term.args))
    return term


def instantiate_template(kb: KnowledgeBase, t: TemplateDecomp, event: str, evidence=()) -> BayesNet:
    """The template's network for one event whose type it covers."""
    req = ConstructionRequest(event, tuple(evidence), ())
    ctx = _Context(kb, req)
    if not _template_applies(ctx, t):
        raise TemplateError(f"the condition of template @{t.label} is not entailed for {event}")
    report = ConstructionReport(event, route=f"template @{t.label}")
    built = _template_nodes(ctx, t, report)
    return BayesNet(Node(n.spec.name, n.spec.states, tuple(n.parents), n.cpt) for n in built.values())


# -- the whole pipeline ------------------------------------------------------


def build_network(kb: KnowledgeBase, req: ConstructionRequest, *, route: str = "auto"):
    """(BayesNet, ConstructionReport) for the request.

    ``route`` is ``auto``, ``template`` or ``general``.
    """
    problems = req.problems()
    if problems:
        raise ConstructionError("; ".join(problems))
    ctx = _Context(kb, req)
    report = ConstructionReport(req.event)
    report.notes.append(PRODUCT_NOTE)
    report.observed = dict(ctx.observed)
    report.context = [render_literal(l) for l in ctx.context]

    preset = {}
    if route != "general":
        entailed = [t for t in kb.templates if _template_applies(ctx, t)]
        if len(entailed) == 1:
            t = entailed[0]
            report.route = f"template @{t.label}"
            preset = _template_nodes(ctx, t, report)
        elif len(entailed) > 1:
            report.warn("several templates apply (" + ", ".join("@" + t.label for t in entailed)
                        + "); using the general route")
        if route == "template" and not preset:
            raise TemplateError(f"no single template applies to {req.event}")

    specs, cands = _expand(ctx, preset)
    for name, bn in preset.items():
        specs.setdefault(name, bn.spec)
    states = {n: s.states for n, s in specs.items()}

    built = dict(preset)
    for name in specs:
        if name in built:
            continue
        parents, insts = cands[name]
        node = None
        while True:
            node = _build_cpt(ctx, specs[name], parents, states, insts, report)
            keep = [p for p in parents if p in node.used]
            if keep == parents:
                break
            parents = keep
        built[name] = node

    seeds = [node_name(a) for a, _ in ctx.seeds()] + list(preset)
    keep, stack = set(), list(seeds)
    while stack:
        n = stack.pop()
        if n in keep:
            continue
        keep.add(n)
        stack.extend(built[n].parents)
    order = [n for n in specs if n in keep]
    report.pruned = [n for n in specs if n not in keep]

    draft = BayesNet(Node(n, states[n], tuple(built[n].parents), built[n].cpt) for n in order)
    cycle = find_cycle(draft)
    if cycle:
        labels = []
        for parent, child in zip(cycle, cycle[1:]):
            lab = built[child].edge_labels.get(parent)
            if lab and lab not in labels:
                labels.append(lab)
        raise CycleError("statistics orient a cycle " + " -> ".join(cycle) + " via "
                         + ", ".join("@" + l for l in labels), labels)
    net = BayesNet(draft[n] for n in draft.topological_order())
    for name in net.names:
        node = built[name]
        spec = specs[name]
        report.nodes.append(spec)
        for p in node.parents:
            report.edges.append((p, name, node.edge_labels.get(p, "?")))
        report.entries.extend(node.entries)
        for item in node.discharged:
            if item not in report.discharged:
                report.discharged.append(item)
    problems = validate(net)
    if problems:
        raise AssertionError("constructed network is invalid: " + "; ".join(problems))
    return net, report
