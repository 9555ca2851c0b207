"""Discrete Bayesian networks with exact rational CPTs.

A CPT maps each parent configuration (a tuple of parent states, in parent
order) to a row of probabilities aligned with the node's states.

``.bn`` files::

    kbmc-bn 1
    node Burglary(E002,MyHouse)
      states true false
      parents
      row : 1/2 1/2
    node AlarmSound(E002,MyHouse)
      states true false
      parents Burglary(E002,MyHouse)
      row true : 3/4 1/4
      row false : 0 1

Rows are written in lexicographic order of parent configurations, where
each parent's states are ordered as declared.  Names may not contain
whitespace.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional

BN_HEADER = "kbmc-bn 1"


class NetworkError(Exception):
    """Malformed network text or an invalid network structure."""


@dataclass
class Node:
    name: str
    states: tuple
    parents: tuple = ()
    cpt: dict = field(default_factory=dict)

    def prob(self, value, config: tuple) -> Fraction:
        return self.cpt[tuple(config)][self.states.index(value)]


class BayesNet:
    def __init__(self, nodes: Iterable[Node] = ()):
        self.nodes: dict = {}
        for n in nodes:
            self.add(n)

    def add(self, node: Node) -> Node:
        if node.name in self.nodes:
            raise NetworkError(f"duplicate node {node.name}")
        node.states = tuple(node.states)
        node.parents = tuple(node.parents)
        node.cpt = {tuple(k): tuple(Fraction(x) for x in v) for k, v in node.cpt.items()}
        self.nodes[node.name] = node
        return node

    def add_node(self, name: str, states, parents=(), cpt: Optional[Mapping] = None) -> Node:
        return self.add(Node(name, tuple(states), tuple(parents), dict(cpt or {})))

    def __getitem__(self, name) -> Node:
        return self.nodes[name]

    def __contains__(self, name) -> bool:
        return name in self.nodes

    def __len__(self) -> int:
        return len(self.nodes)

    def __iter__(self):
        return iter(self.nodes.values())

    @property
    def names(self) -> list:
        return list(self.nodes)

    def configs(self, name: str) -> list:
        """Parent configurations of a node in lexicographic order."""
        node = self.nodes[name]
        return list(itertools.product(*(self.nodes[p].states for p in node.parents)))

    def children(self, name: str) -> list:
        return [n.name for n in self if name in n.parents]

    def topological_order(self) -> list:
        """Nodes ordered parents first; ties keep insertion order."""
        cycle = find_cycle(self)
        if cycle:
            raise NetworkError("network has a cycle: " + " -> ".join(cycle))
        done, out = set(), []
        pending = list(self.nodes)
        while pending:
            for name in pending:
                if all(p in done for p in self.nodes[name].parents):
                    out.append(name)
                    done.add(name)
                    pending.remove(name)
                    break
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, BayesNet):
            return NotImplemented
        return list(self.nodes) == list(other.nodes) and all(
            self.nodes[k] == other.nodes[k] for k in self.nodes)

    def same_network(self, other: "BayesNet") -> bool:
        """Equality up to node insertion order."""
        return set(self.nodes) == set(other.nodes) and all(
            self.nodes[k] == other.nodes[k] for k in self.nodes)

    def __repr__(self) -> str:
        return f"BayesNet({', '.join(self.nodes)})"


def find_cycle(net: BayesNet) -> list:
    """A directed cycle as a node list (first node repeated at the end), or []."""
    color = {}
    stack = []

    def visit(n):
        color[n] = 1
        stack.append(n)
        for p in net.nodes[n].parents:
            if p not in net.nodes:
                continue
            if color.get(p) == 1:
                cyc = stack[stack.index(p):] + [p]
                return list(reversed(cyc))
            if p not in color:
                found = visit(p)
                if found:
                    return found
        stack.pop()
        color[n] = 2
        return None

    for n in net.nodes:
        if n not in color:
            found = visit(n)
            if found:
                return found
    return []


def validate(net: BayesNet) -> list:
    """Every violated structural or numeric invariant, as messages."""
    out = []
    for node in net:
        if not node.states:
            out.append(f"{node.name}: empty state list")
        if len(set(node.states)) != len(node.states):
            out.append(f"{node.name}: repeated states")
        if node.name in node.parents:
            out.append(f"{node.name}: is its own parent")
        if len(set(node.parents)) != len(node.parents):
            out.append(f"{node.name}: repeated parents")
        missing = [p for p in node.parents if p not in net.nodes]
        for p in missing:
            out.append(f"{node.name}: unknown parent {p}")
        if missing:
            continue
        expected = set(net.configs(node.name))
        for cfg in sorted(expected - set(node.cpt)):
            out.append(f"{node.name}: no CPT row for {_cfg_text(node, cfg)}")
        for cfg in sorted(set(node.cpt) - expected, key=str):
            out.append(f"{node.name}: CPT row for impossible configuration {cfg}")
        for cfg in sorted(set(node.cpt) & expected):
            row = node.cpt[cfg]
            where = _cfg_text(node, cfg)
            if len(row) != len(node.states):
                out.append(f"{node.name}: row {where} has {len(row)} entries for {len(node.states)} states")
                continue
            if any(x < 0 for x in row):
                out.append(f"{node.name}: negative entry in row {where}")
            total = sum(row, Fraction(0))
            if total != 1:
                out.append(f"{node.name}: row {where} sums to {total}, not 1")
    cycle = find_cycle(net)
    if cycle:
        out.append("cycle: " + " -> ".join(cycle))
    return out


def _cfg_text(node, cfg) -> str:
    if not node.parents:
        return "(root)"
    return ", ".join(f"{p}={v}" for p, v in zip(node.parents, cfg))


# -- text format -------------------------------------------------------------


def format_fraction(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def to_text(net: BayesNet) -> str:
    lines = [BN_HEADER]
    for node in net:
        lines.append(f"node {node.name}")
        lines.append("  states " + " ".join(node.states))
        lines.append("  parents" + "".join(" " + p for p in node.parents))
        for cfg in net.configs(node.name):
            row = node.cpt.get(cfg)
            if row is None:
                continue
            lhs = " ".join(cfg)
            lines.append(f"  row {lhs}{' ' if lhs else ''}: " + " ".join(format_fraction(x) for x in row))
    return "\n".join(lines) + "\n"


def from_text(text: str) -> BayesNet:
    net = BayesNet()
    nodes = []
    current = None
    seen_header = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("//")[0].strip()
        if not line:
            continue
        if not seen_header:
            if line != BN_HEADER:
                raise NetworkError(f"{lineno}: expected header {BN_HEADER!r}")
            seen_header = True
            continue
        kw, _, rest = line.partition(" ")
        if kw == "node":
            if not rest.strip() or len(rest.split()) != 1:
                raise NetworkError(f"{lineno}: node needs exactly one name")
            current = Node(rest.strip(), ())
            nodes.append(current)
            continue
        if current is None:
            raise NetworkError(f"{lineno}: {kw!r} outside a node block")
        if kw == "states":
            current.states = tuple(rest.split())
        elif kw == "parents":
            current.parents = tuple(rest.split())
        elif kw == "row":
            cfg, colon, probs = rest.partition(":")
            if not colon:
                raise NetworkError(f"{lineno}: row needs ':'")
            key = tuple(cfg.split())
            if key in current.cpt:
                raise NetworkError(f"{lineno}: duplicate row for {current.name}")
            try:
                current.cpt[key] = tuple(Fraction(x) for x in probs.split())
            except (ValueError, ZeroDivisionError):
                raise NetworkError(f"{lineno}: bad probability in {probs.strip()!r}") from None
        else:
            raise NetworkError(f"{lineno}: unknown keyword {kw!r}")
    if not seen_header:
        raise NetworkError(f"missing header {BN_HEADER!r}")
    for n in nodes:
        net.add(n)
    return net


def to_dot(net: BayesNet) -> str:
    lines = ["digraph kbmc {"]
    for node in net:
        lines.append(f'  "{node.name}";')
    for node in net:
        for p in node.parents:
            lines.append(f'  "{p}" -> "{node.name}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
