import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from helpers import load_kb, load_source
from kbmc.evaluator import FiniteModel, check_sentence
from kbmc.knowledge_base import (
    GROUND_FACT, HORN, INERT, LOCAL_STAT, TEMPLATE, AmbiguousContext, KnowledgeBase,
    applicable_statistics, classify_sentence, entails_ground,
)
from kbmc.logic import Const, Not, PredAtom, Signature
from kbmc.parser import Statement, parse_formula, parse_kb, pretty_print

CORPUS = ["holmes.kb", "example2.kb", "example3.kb", "abdominal.kb", "coins.kb"]


def atom(pred, *names):
    return PredAtom(pred, tuple(Const(n) for n in names))


def kinds(kb):
    return {c.label: c.kind for c in kb.classified}


def test_neighbour_kb_classification():
    assert kinds(load_kb("example2.kb")) == {
        "item1": LOCAL_STAT, "item2": LOCAL_STAT, "item3": LOCAL_STAT,
        "item4": GROUND_FACT, "item5": GROUND_FACT}


def test_coin_kb_classification():
    assert kinds(load_kb("coins.kb")) == {"ex1": HORN, "ex2": INERT, "ex3": INERT}


def test_template_classification():
    kb = load_kb("abdominal.kb")
    k = kinds(kb)
    assert k["eq1"] == k["eq2"] == TEMPLATE
    assert sum(v == LOCAL_STAT for v in k.values()) == 12
    eq1, eq2 = kb.templates
    assert eq1.nodes == ("X1", "X2", "X3")
    assert eq1.parents == {"X1": (), "X2": ("X1",), "X3": ("X1", "X2")}
    assert eq2.parents == {"Y1": (), "Y2": ("Y1",), "Y3": ("Y1",)}
    assert eq2.condition == (parse_formula("AbdominalPain(e)"), parse_formula("Pregnancy(e)"))
    assert eq1.condition[1] == parse_formula("~Pregnancy(e)")


@pytest.mark.parametrize("text, kind", [
    ("[Heads(e) | CoinToss(e)]_{e} = 0.5", LOCAL_STAT),
    ("[Heads(e) | CoinToss(e)]_{e} in [0.4, 0.6]", LOCAL_STAT),
    ("0.5 = [Heads(e)]_{e}", LOCAL_STAT),
    ("[Heads(e) | CoinToss(e)]_{e} = 1.5", INERT),
    ("[Heads(e) | CoinToss(e) | Heads(e)]_{e} = 0.5", INERT),
    ("[Heads(e) & CoinToss(e)]_{e} = 0.5", INERT),
    ("[Coin(x) | Object(e, x)]_{e, x} = 0.5", INERT),
    ("[Heads(e)]_{e} <= 0.5", INERT),
    ("all x. Coin(x)", HORN),
    ("all e, x. CoinToss(e) & Object(e, x) -> Coin(x)", HORN),
    ("all e. CoinToss(e) -> Heads(e) | ~Heads(e)", INERT),
    ("Coin(C) & ~Heads(E)", GROUND_FACT),
    ("Coin(C) | Heads(E)", INERT),
    ("ex x. Coin(x)", INERT),
])
def test_classification_vectors(text, kind):
    sig = Signature(("Event", "Obj"), {"CoinToss": ("Event",), "Heads": ("Event",),
                                       "Coin": ("Obj",), "Object": ("Event", "Obj")},
                    constants={"C": "Obj", "E": "Event"})
    assert classify_sentence(parse_formula(text, sig), sig)[0] == kind


def test_interval_statistic_uses_midpoint():
    kb = KnowledgeBase.from_text(
        "sort Event;\npred H(Event);\n@h: stat [H(e)]_{e} in (0.4, 0.5).\n")
    assert kb.stats[0].point_value == Fraction(9, 20)


def test_placeholders_expand_per_value():
    kb = KnowledgeBase.from_text(
        "sort Event;\nfunc F(Event) -> {a, b, c};\npred G(Event);\n"
        "@p: stat all z. [G(e) | F(e) = z]_{e} = 0.5.\n")
    assert len(kb.stats) == 3
    assert {s.condition[0].value.name for s in kb.stats} == {"a", "b", "c"}


def test_negated_value_only_for_binary_functions():
    head = "sort Event;\nfunc F(Event) -> {a, b};\nfunc K(Event) -> {a, b, c};\npred G(Event);\n"
    kb = KnowledgeBase.from_text(head + "@p: stat [G(e) | ~F(e) = a]_{e} = 0.5.\n"
                                 + "@q: stat [G(e) | ~K(e) = a]_{e} = 0.5.\n")
    assert kinds(kb) == {"p": LOCAL_STAT, "q": INERT}


@pytest.mark.parametrize("name", CORPUS)
def test_classification_is_a_partition_and_stable(name):
    src = load_source(name)
    kb = KnowledgeBase.from_source(src)
    assert len(kb.classified) == len(src.statements)
    again = KnowledgeBase.from_source(parse_kb(pretty_print(src)))
    assert kinds(again) == kinds(kb)


def test_statistics_reconstruct_their_sentence():
    for name in CORPUS:
        for s in load_kb(name).stats:
            assert s.reconstruct() == s.formula


def test_coin_rule_entails_coin():
    kb = load_kb("coins.kb")
    extra = [atom("CoinToss", "E1"), atom("Object", "E1", "C7")]
    assert entails_ground(kb, atom("Coin", "C7"), extra)
    assert not entails_ground(kb, atom("Coin", "C7"), extra[:1])
    assert entails_ground(kb, Not(atom("Coin", "C7")), extra[:1])


def test_facts_entailed():
    kb = load_kb("example2.kb")
    assert entails_ground(kb, atom("LivesNear", "MyHouse", "Gibbons"))
    assert entails_ground(kb, atom("HouseWithAlarm", "MyHouse"))
    assert not entails_ground(kb, atom("LivesNear", "MyHouse", "Sherlock"))


# -- entailment against every model -----------------------------------------

SMALL = Signature(("S",), {"P": ("S",), "Q": ("S",), "T": ("S", "S")},
                  constants={"A": "S", "B": "S"})
GROUND = ([("P", (c,)) for c in "AB"] + [("Q", (c,)) for c in "AB"]
          + [("T", (a, b)) for a in "AB" for b in "AB"])
RULES = ["all x. P(x) -> Q(x)", "all x, y. T(x, y) & P(x) -> P(y)", "all x, y. T(x, y) -> T(y, x)",
         "all x. Q(x) & P(x) -> T(x, x)", "all x, y. Q(x) & Q(y) -> T(x, y)", "all x. T(x, x) -> Q(x)"]


def _every_model():
    for bits in itertools.product([False, True], repeat=len(GROUND)):
        preds = {"P": [], "Q": [], "T": []}
        for (p, args), on in zip(GROUND, bits):
            if on:
                preds[p].append(args)
        yield FiniteModel(SMALL, {"S": ["A", "B"]}, preds)


MODELS = list(_every_model())


@settings(max_examples=40, deadline=None)
@given(st.lists(st.sampled_from(RULES), unique=True, max_size=3),
       st.lists(st.sampled_from(GROUND), unique=True, min_size=1, max_size=3))
def test_entailment_agrees_with_model_enumeration(rules, facts):
    sentences = [parse_formula(r, SMALL) for r in rules]
    sentences += [PredAtom(p, tuple(Const(a) for a in args)) for p, args in facts]
    kb = KnowledgeBase(SMALL, [Statement("axiom", f) for f in sentences])
    models = [m for m in MODELS if all(check_sentence(m, f) for f in sentences)]
    for p, args in GROUND:
        a = PredAtom(p, tuple(Const(x) for x in args))
        classical = all(check_sentence(m, a) for m in models)
        assert entails_ground(kb, a) == classical


# -- applicability -----------------------------------------------------------

VARS = {"ReportsAlarm", "AlarmSound", "Burglary"}


def test_watson_report_statistics():
    kb = load_kb("example2.kb")
    node = atom("ReportsAlarm", "E002", "Watson", "MyHouse")
    found = applicable_statistics(kb, node, "E002", variables=VARS)
    assert [i.label for i in found] == ["item1", "item2", "item3"]
    parents = [i.parent_dict for i in found]
    assert parents == [{"AlarmSound(E002,MyHouse)": "true"},
                       {"AlarmSound(E002,MyHouse)": "false"},
                       {"AlarmSound(E002,MyHouse)": "false"}]
    assert [i.value for i in found] == [Fraction(9, 20), Fraction(1, 20), Fraction(3, 20)]


def test_gibbons_report_statistics():
    kb = load_kb("example2.kb")
    node = atom("ReportsAlarm", "E004", "Gibbons", "MyHouse")
    found = applicable_statistics(kb, node, "E004", variables=VARS)
    assert [i.label for i in found] == ["item1", "item2"]


def test_event_must_match():
    kb = load_kb("example2.kb")
    node = atom("ReportsAlarm", "E004", "Gibbons", "MyHouse")
    assert applicable_statistics(kb, node, "E005", variables=VARS) == []


def test_unknown_condition_on_fixed_symbol_blocks_statistic():
    kb = load_kb("example2.kb")
    node = atom("ReportsAlarm", "E002", "Watson", "MyHouse")
    assert applicable_statistics(kb, node, "E002", variables={"ReportsAlarm"}) == []


def test_entailed_parent_condition_is_discharged():
    kb = load_kb("example2.kb")
    node = atom("ReportsAlarm", "E002", "Watson", "MyHouse")
    facts = kb.fact_base([atom("AlarmSound", "E002", "MyHouse")])
    found = applicable_statistics(kb, node, "E002", facts=facts, variables=VARS)
    assert [i.label for i in found] == ["item1"]
    assert found[0].parents == ()
    assert found[0].discharged == (atom("AlarmSound", "E002", "MyHouse"),)


def test_ambiguous_context():
    kb = KnowledgeBase.from_text(
        "sort Event; sort H; sort P;\npred R(Event, P);\npred A(Event, H);\npred L(H, P);\n"
        "const H1, H2 : H;\nconst W : P;\n"
        "@r: stat [R(e, y) | A(e, x) & L(x, y)]_{e, x, y} = 0.4.\n"
        "fact L(H1, W) & L(H2, W).\n")
    with pytest.raises(AmbiguousContext, match="@r"):
        applicable_statistics(kb, atom("R", "E1", "W"), "E1")


@pytest.mark.parametrize("name, req_node, event", [
    ("example2.kb", ("ReportsAlarm", "E002", "Watson", "MyHouse"), "E002"),
    ("example3.kb", ("ReportsAlarm", "E003", "AlarmMonitorCompany", "MyHouse"), "E003"),
    ("holmes.kb", ("AlarmSound", "E002", "MyHouse"), "E002"),
])
def test_applicability_audit(name, req_node, event):
    kb = load_kb(name)
    facts = kb.fact_base()
    for inst in applicable_statistics(kb, atom(*req_node), event, variables=VARS):
        for lit in inst.context + inst.discharged:
            assert facts.holds(lit) is True
        for name_, value in inst.parents:
            assert value in ("true", "false")
