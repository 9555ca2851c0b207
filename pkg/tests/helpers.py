"""Shared test utilities: bundled data, random networks, random formulas."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from importlib import resources

from hypothesis import strategies as st

from kbmc.bayes_net import BayesNet, Node
from kbmc.knowledge_base import KnowledgeBase
from kbmc.logic import (
    Const, Exists, ForAll, FuncDecl, FunApp, Iff, Implies, InInterval, Literal, Not, NumCompare,
    Or, And, PredAtom, Product, Proportion, Signature, Sum, ValueAtom, Var,
)
from kbmc.parser import parse_kb, parse_request


def data_text(name: str) -> str:
    return resources.files("kbmc").joinpath("data", name).read_text(encoding="utf-8")


def load_kb(name: str) -> KnowledgeBase:
    return KnowledgeBase.from_text(data_text(name))


def load_source(name: str):
    return parse_kb(data_text(name))


def load_request(name: str, kb: KnowledgeBase):
    return parse_request(data_text(name), kb.signature)


# -- random networks ---------------------------------------------------------

_ODD_NAMES = ["Rain(E1)", "alarm", "X1", "v0", "in", "e", "Node_7", "z1", "Event", "all"]


def random_distribution(rng: random.Random, k: int) -> tuple:
    weights = [rng.randint(0, 6) for _ in range(k)]
    if not any(weights):
        weights[rng.randrange(k)] = 1
    total = sum(weights)
    return tuple(Fraction(w, total) for w in weights)


def random_net(rng: random.Random, max_nodes: int = 6, max_states: int = 4, max_parents: int = 3,
               binary: bool = False, odd_names: bool = False, shuffle: bool = False) -> BayesNet:
    n = rng.randint(1, max_nodes)
    names = []
    for i in range(n):
        if odd_names and rng.random() < 0.4:
            cand = rng.choice(_ODD_NAMES)
            names.append(cand if cand not in names else f"N{i}")
        else:
            names.append(f"N{i}")
    states = {}
    for name in names:
        k = 2 if binary else rng.randint(2, max_states)
        if odd_names and rng.random() < 0.3:
            states[name] = tuple(rng.sample(["0", "1", "z1", "v1", "true", "lo", "hi", "e"], k))
        else:
            states[name] = tuple(f"s{j}" for j in range(k))
    nodes = []
    for i, name in enumerate(names):
        parents = tuple(rng.sample(names[:i], min(i, rng.randint(0, max_parents))))
        net_states = [states[p] for p in parents]
        cpt = {}
        for cfg in itertools.product(*net_states):
            cpt[cfg] = random_distribution(rng, len(states[name]))
        nodes.append(Node(name, states[name], parents, cpt))
    if shuffle:
        rng.shuffle(nodes)
    return BayesNet(nodes)


# -- random formulas ---------------------------------------------------------

SIG = Signature(
    sorts=("Event", "Obj"),
    predicates={"Toss": ("Event",), "Heads": ("Event",), "Coin": ("Obj",),
                "Owns": ("Obj", "Event"), "Lit": ()},
    functions={"Color": FuncDecl(("Obj",), ("Red", "Blue")),
               "Owner": FuncDecl(("Event",), None, "Obj")},
    constants={"E1": "Event", "C1": "Obj", "C2": "Obj"},
)
_VAR_POOL = ["x", "y", "e", "u"]
_CONSTS = {"Event": ["E1"], "Obj": ["C1", "C2"]}


@st.composite
def terms(draw, sort, env, depth=1):
    options = [Var(v) for v, s in env if s == sort] + [Const(c) for c in _CONSTS[sort]]
    if sort == "Obj" and depth > 0 and draw(st.booleans()):
        return FunApp("Owner", (draw(terms("Event", env, depth - 1)),))
    return draw(st.sampled_from(options))


@st.composite
def atoms(draw, env):
    kind = draw(st.sampled_from(["Toss", "Heads", "Coin", "Owns", "Lit", "Color"]))
    if kind == "Color":
        return ValueAtom(FunApp("Color", (draw(terms("Obj", env)),)),
                         Const(draw(st.sampled_from(["Red", "Blue"]))))
    sorts = SIG.predicates[kind]
    return PredAtom(kind, tuple(draw(terms(s, env)) for s in sorts))


fractions = st.builds(lambda n, d: Fraction(n, d), st.integers(0, 40), st.sampled_from([1, 2, 3, 4, 5, 7, 8, 10, 20]))


@st.composite
def binders(draw, env, max_vars=2):
    names = draw(st.lists(st.sampled_from(_VAR_POOL), min_size=1, max_size=max_vars, unique=True))
    bound = tuple((v, draw(st.sampled_from(["Event", "Obj"]))) for v in names)
    inner = tuple((v, s) for v, s in env if v not in names) + bound
    return tuple(names), inner


@st.composite
def numexprs(draw, env, depth):
    kind = draw(st.sampled_from(["lit", "prop", "prop"] + (["sum", "prod"] if depth > 0 else [])))
    if kind == "lit":
        return Literal(draw(fractions))
    if kind == "prop":
        names, inner = draw(binders(env))
        body = draw(formulas(inner, max(depth - 1, 0)))
        cond = draw(st.none() | formulas(inner, max(depth - 1, 0)))
        return Proportion(body, cond, names)
    parts = tuple(draw(numexprs(env, depth - 1)) for _ in range(draw(st.integers(2, 3))))
    return Sum(parts) if kind == "sum" else Product(parts)


@st.composite
def formulas(draw, env=(), depth=3):
    kinds = ["atom"]
    if depth > 0:
        kinds += ["not", "and", "or", "implies", "iff", "all", "ex", "cmp", "interval"]
    kind = draw(st.sampled_from(kinds))
    if kind == "atom":
        return draw(atoms(env))
    if kind == "not":
        return Not(draw(formulas(env, depth - 1)))
    if kind in ("and", "or", "implies", "iff"):
        cls = {"and": And, "or": Or, "implies": Implies, "iff": Iff}[kind]
        return cls(draw(formulas(env, depth - 1)), draw(formulas(env, depth - 1)))
    if kind in ("all", "ex"):
        names, inner = draw(binders(env))
        return (ForAll if kind == "all" else Exists)(names, draw(formulas(inner, depth - 1)))
    if kind == "cmp":
        op = draw(st.sampled_from(["=", "<=", ">=", "<", ">"]))
        return NumCompare(draw(numexprs(env, depth - 1)), op, draw(numexprs(env, depth - 1)))
    lo, hi = sorted([draw(fractions) / 40, draw(fractions) / 40])
    return InInterval(draw(numexprs(env, depth - 1)), lo, hi, draw(st.booleans()), draw(st.booleans()))


sentences = formulas((), 3)
