"""Exact inference: variable elimination and a brute-force joint oracle."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .bayes_net import BayesNet, NetworkError, validate

DEFAULT_JOINT_CAP = 2 ** 20


class InferenceError(Exception):
    pass


class ZeroProbabilityEvidence(InferenceError):
    """The evidence has probability zero under the network."""


@dataclass(frozen=True)
class Factor:
    vars: tuple
    table: dict  # assignment tuple (aligned with vars) -> Fraction

    def __hash__(self):
        return hash(self.vars)

    def multiply(self, other: "Factor", states: Mapping) -> "Factor":
        vars_ = self.vars + tuple(v for v in other.vars if v not in self.vars)
        table = {}
        for asg in itertools.product(*(states[v] for v in vars_)):
            env = dict(zip(vars_, asg))
            a = self.table.get(tuple(env[v] for v in self.vars), Fraction(0))
            if not a:
                table[asg] = Fraction(0)
                continue
            table[asg] = a * other.table.get(tuple(env[v] for v in other.vars), Fraction(0))
        return Factor(vars_, table)

    def sum_out(self, var: str) -> "Factor":
        i = self.vars.index(var)
        vars_ = self.vars[:i] + self.vars[i + 1:]
        table = {}
        for asg, p in self.table.items():
            key = asg[:i] + asg[i + 1:]
            table[key] = table.get(key, Fraction(0)) + p
        return Factor(vars_, table)

    def reduce(self, evidence: Mapping) -> "Factor":
        keep = [i for i, v in enumerate(self.vars) if v not in evidence]
        vars_ = tuple(self.vars[i] for i in keep)
        table = {}
        for asg, p in self.table.items():
            if all(asg[i] == evidence[v] for i, v in enumerate(self.vars) if v in evidence):
                table[tuple(asg[i] for i in keep)] = p
        return Factor(vars_, table)


def node_factor(net: BayesNet, name: str) -> Factor:
    node = net[name]
    vars_ = node.parents + (name,)
    table = {}
    for cfg, row in node.cpt.items():
        for s, p in zip(node.states, row):
            table[cfg + (s,)] = p
    return Factor(vars_, table)


@dataclass(frozen=True)
class Posterior:
    """Normalized distribution over joint assignments of the query variables."""

    vars: tuple
    table: dict
    order: tuple = ()  # elimination order used, empty for brute force

    def marginal(self, var: str) -> dict:
        i = self.vars.index(var)
        out = {}
        for asg, p in self.table.items():
            out[asg[i]] = out.get(asg[i], Fraction(0)) + p
        return out

    def prob(self, **assignment) -> Fraction:
        return sum((p for asg, p in self.table.items()
                    if all(asg[self.vars.index(k)] == v for k, v in assignment.items())), Fraction(0))


def _check(net: BayesNet, query: Sequence, evidence: Mapping):
    problems = validate(net)
    if problems:
        raise NetworkError("invalid network: " + "; ".join(problems))
    for v in list(query) + list(evidence):
        if v not in net:
            raise InferenceError(f"unknown variable {v}")
    for v, s in evidence.items():
        if s not in net[v].states:
            raise InferenceError(f"{v} has no state {s}")
    overlap = set(query) & set(evidence)
    if overlap:
        raise InferenceError(f"variables both queried and observed: {', '.join(sorted(overlap))}")
    if not query:
        raise InferenceError("no query variables")


def min_degree_order(factors, hidden) -> list:
    """Greedy elimination order: fewest neighbours first, ties by name."""
    adj = {v: set() for v in hidden}
    for f in factors:
        for v in f.vars:
            adj.setdefault(v, set()).update(w for w in f.vars if w != v)
    order = []
    remaining = set(hidden)
    while remaining:
        v = min(remaining, key=lambda x: (len(adj[x]), x))
        order.append(v)
        for a in adj[v]:
            adj[a] |= adj[v] - {a}
            adj[a].discard(v)
        remaining.discard(v)
        del adj[v]
    return order


def eliminate(net: BayesNet, query: Sequence, evidence: Optional[Mapping] = None,
              order: Optional[Sequence] = None) -> Posterior:
    """P(query | evidence) by variable elimination."""
    evidence = dict(evidence or {})
    query = tuple(query)
    _check(net, query, evidence)
    states = {n.name: n.states for n in net}
    factors = [node_factor(net, n).reduce(evidence) for n in net.names]
    hidden = [n for n in net.names if n not in query and n not in evidence]
    if order is None:
        order = min_degree_order(factors, hidden)
    else:
        order = list(order)
        if sorted(order) != sorted(hidden):
            raise InferenceError("elimination order must list exactly the hidden variables")
    for v in order:
        touching = [f for f in factors if v in f.vars]
        factors = [f for f in factors if v not in f.vars]
        if not touching:
            continue
        prod = touching[0]
        for f in touching[1:]:
            prod = prod.multiply(f, states)
        factors.append(prod.sum_out(v))
    result = Factor((), {(): Fraction(1)})
    for f in factors:
        result = result.multiply(f, states)
    total = sum(result.table.values(), Fraction(0))
    if total == 0:
        raise ZeroProbabilityEvidence("evidence has probability zero")
    idx = [result.vars.index(q) for q in query]
    table = {}
    for asg in itertools.product(*(states[q] for q in query)):
        table[asg] = Fraction(0)
    for asg, p in result.table.items():
        table[tuple(asg[i] for i in idx)] += p / total
    return Posterior(query, table, tuple(order))


def joint_brute_force(net: BayesNet, cap: int = DEFAULT_JOINT_CAP) -> dict:
    """The full joint distribution, keyed by assignments in node order."""
    problems = validate(net)
    if problems:
        raise NetworkError("invalid network: " + "; ".join(problems))
    size = 1
    for n in net:
        size *= len(n.states)
    if size > cap:
        raise InferenceError(f"joint has {size} entries, over the cap of {cap}")
    names = net.names
    pos = {n: i for i, n in enumerate(names)}
    joint = {}
    for asg in itertools.product(*(net[n].states for n in names)):
        p = Fraction(1)
        for n in names:
            node = net[n]
            cfg = tuple(asg[pos[q]] for q in node.parents)
            p *= node.cpt[cfg][node.states.index(asg[pos[n]])]
            if not p:
                break
        joint[asg] = p
    return joint


def brute_force_posterior(net: BayesNet, query: Sequence, evidence: Optional[Mapping] = None,
                          cap: int = DEFAULT_JOINT_CAP) -> Posterior:
    """P(query | evidence) by summing the full joint; the oracle for :func:`eliminate`."""
    evidence = dict(evidence or {})
    query = tuple(query)
    _check(net, query, evidence)
    joint = joint_brute_force(net, cap)
    names = net.names
    pos = {n: i for i, n in enumerate(names)}
    table = {asg: Fraction(0) for asg in itertools.product(*(net[q].states for q in query))}
    total = Fraction(0)
    for asg, p in joint.items():
        if all(asg[pos[v]] == s for v, s in evidence.items()):
            total += p
            table[tuple(asg[pos[q]] for q in query)] += p
    if total == 0:
        raise ZeroProbabilityEvidence("evidence has probability zero")
    return Posterior(query, {k: v / total for k, v in table.items()})
