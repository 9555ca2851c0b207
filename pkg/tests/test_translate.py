import math
import random
from fractions import Fraction

import pytest

from helpers import load_kb, load_source, random_net
from kbmc.bayes_net import BayesNet, Node
from kbmc.knowledge_base import LOCAL_STAT, TEMPLATE, KnowledgeBase
from kbmc.parser import SourceKB, parse_kb
from kbmc.translate import (
    Renaming, TranslationError, bn_to_sentences, sentences_to_bn, translation_text,
)

H = Fraction(1, 2)


def expected_count(net):
    return 1 + sum(len(net[n].states) * math.prod(len(net[p].states) for p in net[n].parents)
                   for n in net.names)


def test_single_node_gives_three_sentences():
    net = BayesNet([Node("Rain", ("t", "f"), (), {(): (Fraction(1, 5), Fraction(4, 5))})])
    tr = bn_to_sentences(net)
    assert len(tr.sentences) == 3
    assert tr.source.statements[0].label == "structure"


def test_sentence_count_formula():
    rng = random.Random(21)
    for _ in range(50):
        net = random_net(rng)
        assert len(bn_to_sentences(net).sentences) == expected_count(net)


def test_translation_classifies_as_template_plus_statistics():
    rng = random.Random(22)
    for _ in range(20):
        net = random_net(rng)
        kb = KnowledgeBase.from_source(bn_to_sentences(net).source)
        kinds = [c.kind for c in kb.classified]
        assert kinds[0] == TEMPLATE and set(kinds[1:]) == {LOCAL_STAT}
        t = kb.templates[0]
        assert len(t.nodes) == len(net)


def test_round_trip_plain():
    rng = random.Random(23)
    for _ in range(100):
        net = random_net(rng)
        assert sentences_to_bn(bn_to_sentences(net)) == net


def test_round_trip_with_awkward_names_and_order():
    rng = random.Random(24)
    for _ in range(100):
        net = random_net(rng, odd_names=True, shuffle=True)
        tr = bn_to_sentences(net)
        assert sentences_to_bn(tr) == net
        text = translation_text(tr)
        again = sentences_to_bn(parse_kb(text), Renaming.from_comments(text))
        assert again == net


def test_renamed_symbols_are_recorded():
    net = BayesNet([Node("Rain(E1)", ("0", "1"), (), {(): (H, H)})])
    tr = bn_to_sentences(net)
    assert tr.renaming.nodes == {"X1": "Rain(E1)"}
    assert tr.renaming.values == {"X1": {"v0": "0", "v1": "1"}}
    assert "// rename X1 Rain(E1) v0=0 v1=1" in translation_text(tr)


def test_template_with_event_type_condition():
    src = load_source("abdominal.kb")
    keep = [s for s in src.statements if s.label == "eq2" or s.label.startswith("y")]
    net = sentences_to_bn(SourceKB(src.declarations + keep, src.signature))
    assert net.names == ["Y1", "Y2", "Y3"]
    assert net["Y2"].parents == ("Y1",) and net["Y3"].parents == ("Y1",)
    assert net["Y1"].cpt[()] == (Fraction(1, 5), Fraction(4, 5))
    assert net["Y3"].cpt[("no",)] == (Fraction(1, 20), Fraction(19, 20))


def test_abdominal_structure_shape_matches_translation():
    kb = load_kb("abdominal.kb")
    eq2 = kb.templates[1]
    src = load_source("abdominal.kb")
    keep = [s for s in src.statements if s.label == "eq2" or s.label.startswith("y")]
    net = sentences_to_bn(SourceKB(src.declarations + keep, src.signature))
    back = KnowledgeBase.from_source(bn_to_sentences(net).source).templates[0]
    assert back.nodes == eq2.nodes and back.parents == eq2.parents
    assert back.condition == ()


def _kb(body):
    return parse_kb("sort Event;\nfunc A(Event) -> {t, f};\nfunc B(Event) -> {t, f};\n" + body)


STRUCT = "axiom all z1, z2. [A(e) = z1 & B(e) = z2]_{e} = [A(e) = z1]_{e} * [B(e) = z2 | A(e) = z1]_{e}.\n"


def test_missing_value_is_completed():
    net = sentences_to_bn(_kb(STRUCT + "stat [A(e) = t]_{e} = 0.3.\n"
                              "stat [B(e) = t | A(e) = t]_{e} = 0.5.\nstat [B(e) = f | A(e) = f]_{e} = 1.\n"))
    assert net["A"].cpt[()] == (Fraction(3, 10), Fraction(7, 10))
    assert net["B"].cpt[("f",)] == (0, 1)


@pytest.mark.parametrize("body, msg", [
    ("stat [A(e) = t]_{e} = 0.3.\n", "without a structure"),
    (STRUCT + "stat [A(e) = t]_{e} = 0.3.\n", "incomplete"),
    (STRUCT + "stat [A(e) = t]_{e} = 0.3.\nstat [A(e) = t]_{e} = 0.4.\n", "conflicting"),
    (STRUCT + "stat [A(e) = t]_{e} = 0.3.\nstat [A(e) = f]_{e} = 0.3.\n", "sums to"),
    (STRUCT + "stat [B(e) = t]_{e} = 0.3.\n", "parents"),
    (STRUCT + "const E1 : Event;\nfact A(E1) = t.\n", "not a structure or parameter"),
    (STRUCT + STRUCT.replace("axiom", "@again: axiom"), "more than one"),
])
def test_translation_errors(body, msg):
    with pytest.raises(TranslationError, match=msg):
        sentences_to_bn(_kb(body))


def test_empty_network_translates_to_no_sentences():
    tr = bn_to_sentences(BayesNet())
    assert tr.sentences == []
    assert sentences_to_bn(tr) == BayesNet()
