"""The construction request: which event, what is known about it, what to ask."""

from __future__ import annotations

from dataclasses import dataclass

from .logic import Const, FunApp, Not, PredAtom, ValueAtom, render_term


@dataclass(frozen=True)
class ConstructionRequest:
    """Event constant, evidence literals, query atoms and interest atoms.

    Evidence literals are ``PredAtom``, ``Not(PredAtom)`` or ``ValueAtom``.
    Queries and interest items are ``PredAtom`` or ``FunApp`` node atoms.
    """

    event: str
    evidence: tuple = ()
    queries: tuple = ()
    interest: tuple = ()

    def problems(self) -> list:
        out = []
        if not self.queries and not self.interest:
            out.append("request needs at least one query or interest atom")
        for lit in self.evidence:
            atom = lit.arg if isinstance(lit, Not) else lit
            if not _mentions(atom, self.event):
                out.append(f"evidence {node_name(atom)} does not mention event {self.event}")
        for atom in self.queries:
            if not _mentions(atom, self.event):
                out.append(f"query {node_name(atom)} does not mention event {self.event}")
        return out


def _mentions(atom, const: str) -> bool:
    if isinstance(atom, ValueAtom):
        atom = atom.term
    return any(_term_has(a, const) for a in atom.args)


def _term_has(t, const):
    if isinstance(t, Const):
        return t.name == const
    if isinstance(t, FunApp):
        return any(_term_has(a, const) for a in t.args)
    return False


def node_name(atom) -> str:
    """Canonical node identity: ``Sym(arg1,arg2,...)`` with no spaces."""
    if isinstance(atom, ValueAtom):
        atom = atom.term
    if isinstance(atom, PredAtom):
        return f"{atom.pred}({','.join(render_term(a) for a in atom.args)})"
    if isinstance(atom, FunApp):
        return render_term(atom)
    raise TypeError(f"not a node atom: {atom!r}")
