"""Acceptance suite: one test per criterion, each reported as a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py`` or ``python3 tests/test_acceptance.py``.
"""

import random
import sys
from fractions import Fraction
from pathlib import Path

import pytest

if __name__ == "__main__":
    # hand over to pytest before the test dependencies are imported
    _here = Path(__file__).resolve()
    sys.exit(pytest.main([str(_here), "-q", "--rootdir", str(_here.parent.parent)]))

from helpers import data_text, load_kb, load_request, load_source, random_net
from kbmc.bayes_net import validate
from kbmc.cli import main
from kbmc.construct import UnresolvedConflict, build_network
from kbmc.evaluator import eval_proportion, parse_model
from kbmc.inference import ZeroProbabilityEvidence, brute_force_posterior, eliminate
from kbmc.knowledge_base import KnowledgeBase
from kbmc.logic import well_formed
from kbmc.noisy_or import complete_cpt_noisy_or
from kbmc.parser import parse_kb, parse_request, pretty_print
from kbmc.translate import bn_to_sentences, sentences_to_bn

criterion = pytest.mark.criterion
q = Fraction


def edges(net):
    return {(p, n) for n in net.names for p in net[n].parents}


CORPUS = {
    "coins.kb": ["ex1", "ex2", "ex3"],
    "abdominal.kb": ["eq1", "eq2"],
    "holmes.kb": ["a", "b", "c"],
    "example2.kb": ["item1", "item2", "item3", "item4", "item5"],
    "example3.kb": ["item1", "item2", "item3", "item4", "item5", "item6", "item7"],
}


@criterion(1, "corpus parses, is well formed and round-trips")
def test_corpus_round_trip():
    for name, labels in CORPUS.items():
        src = load_source(name)
        got = [s.label for s in src.statements]
        assert all(lab in got for lab in labels), (name, got)
        for st in src.statements:
            assert well_formed(st.formula, src.signature) == [], (name, st.label)
        again = parse_kb(pretty_print(src))
        assert again == src, name
        for a, b in zip(src.statements, again.statements):
            assert a.formula == b.formula


@criterion(2, "template instantiation for E001 gives Y1->Y2, Y1->Y3")
def test_template_instantiation():
    kb = load_kb("abdominal.kb")
    net, report = build_network(kb, load_request("pregnant_e001.req", kb))
    assert report.route == "template @eq2"
    assert set(net.names) == {"Y1(E001)", "Y2(E001)", "Y3(E001)"}
    assert edges(net) == {("Y1(E001)", "Y2(E001)"), ("Y1(E001)", "Y3(E001)")}


@criterion(3, "Holmes chain with entries 3/4 and 9/20")
def test_holmes_chain():
    kb = load_kb("holmes.kb")
    net, _ = build_network(kb, load_request("holmes_e002.req", kb))
    b, a, r = "Burglary(E002,MyHouse)", "AlarmSound(E002,MyHouse)", "ReportsAlarm(E002,Watson,MyHouse)"
    assert set(net.names) == {b, a, r}
    assert edges(net) == {(b, a), (a, r)}
    assert net[a].cpt[("true",)][0] == q(3, 4)
    assert net[r].cpt[("true",)][0] == q(9, 20)
    assert validate(net) == []


@criterion(4, "specificity: Watson (9/20, 3/20), Gibbons (9/20, 1/20)")
def test_specificity():
    kb = load_kb("example2.kb")
    for req_name, node, expected, labels in [
        ("watson_e002.req", "ReportsAlarm(E002,Watson,MyHouse)", (q(9, 20), q(3, 20)), {"item1", "item3"}),
        ("gibbons_e004.req", "ReportsAlarm(E004,Gibbons,MyHouse)", (q(9, 20), q(1, 20)), {"item1", "item2"}),
    ]:
        net, report = build_network(kb, load_request(req_name, kb))
        cpt = net[node].cpt
        assert (cpt[("true",)][0], cpt[("false",)][0]) == expected
        assert set(report.labels_for(node)) == labels


@criterion(5, "monitored alarm: Report->Burglary with 9/10 and 1/20, no alarm node")
def test_structure_change():
    kb = load_kb("example3.kb")
    net, _ = build_network(kb, load_request("monitor_e003.req", kb))
    b, r = "Burglary(E003,MyHouse)", "ReportsAlarm(E003,AlarmMonitorCompany,MyHouse)"
    assert set(net.names) == {b, r}
    assert edges(net) == {(r, b)}
    assert net[b].cpt[("true",)][0] == q(9, 10)
    assert net[b].cpt[("false",)][0] == q(1, 20)


@criterion(6, "network -> sentences -> network on 100 random nets")
def test_translation_round_trip():
    rng = random.Random(6)
    for _ in range(100):
        net = random_net(rng, max_nodes=6, max_states=4, odd_names=True, shuffle=True)
        assert sentences_to_bn(bn_to_sentences(net)) == net


@criterion(7, "variable elimination equals brute force on 100 random nets")
def test_inference_oracle():
    rng = random.Random(7)
    compared = 0
    for _ in range(100):
        net = random_net(rng, max_nodes=8, binary=True)
        names = net.names
        observed = rng.sample(names, rng.randint(0, len(names) - 1))
        evidence = {n: rng.choice(net[n].states) for n in observed}
        query = [rng.choice([n for n in names if n not in evidence])]
        try:
            brute = brute_force_posterior(net, query, evidence)
        except ZeroProbabilityEvidence:
            with pytest.raises(ZeroProbabilityEvidence):
                eliminate(net, query, evidence)
            continue
        assert eliminate(net, query, evidence).table == brute.table
        compared += 1
    assert compared >= 50


@criterion(8, "coin model satisfies every coin sentence; nested proportion is 19/20")
def test_semantics_oracle(tmp_path, capsys):
    kb, model = tmp_path / "coins.kb", tmp_path / "coins.model"
    kb.write_text(data_text("coins.kb"))
    model.write_text(data_text("coins.model"))
    assert main(["oracle", str(kb), str(model)]) == 0
    out = capsys.readouterr().out
    assert "3/3 sentences true" in out
    src = load_source("coins.kb")
    m = parse_model(data_text("coins.model"), src.signature)
    nested = {s.label: s for s in src.statements}["ex3"].formula.left
    assert eval_proportion(m, nested) == q(19, 20)


@criterion(9, "noisy-OR: single cause, leak-only row, monotone in each cause")
def test_noisy_or_properties():
    rng = random.Random(9)
    for _ in range(1000):
        k = rng.randint(1, 4)
        leak = q(rng.randint(0, 10), 20)
        per_cause = [q(rng.randint(0, 20), 20) for _ in range(k)]
        per_cause = [max(p, leak) for p in per_cause]
        cpt = complete_cpt_noisy_or(per_cause, leak)
        for i, p in enumerate(per_cause):
            assert cpt[tuple(j == i for j in range(k))] == p
        assert cpt[(False,) * k] == leak
        i = rng.randrange(k)
        if per_cause[i] < 1:
            raised = list(per_cause)
            raised[i] = per_cause[i] + (1 - per_cause[i]) * q(rng.randint(1, 10), 10)
            higher = complete_cpt_noisy_or(raised, leak)
            assert all(higher[a] >= cpt[a] for a in cpt)


@criterion(10, "incomparable statistics with different values raise UnresolvedConflict")
def test_conflict_surfacing():
    kb = KnowledgeBase.from_text(data_text("example2.kb") + """
pred Raining(Event); pred Nighttime(Event);
@rain: stat [ReportsAlarm(e, y, x) | AlarmSound(e, x) & HouseWithAlarm(x) & LivesNear(x, y) & Raining(e)]_{e, x, y} = 0.3.
@night: stat [ReportsAlarm(e, y, x) | AlarmSound(e, x) & HouseWithAlarm(x) & LivesNear(x, y) & Nighttime(e)]_{e, x, y} = 0.6.
""")
    req = parse_request("event E005; evidence ReportsAlarm(E005, Gibbons, MyHouse), Raining(E005), "
                        "Nighttime(E005); query AlarmSound(E005, MyHouse);", kb.signature)
    with pytest.raises(UnresolvedConflict) as exc:
        build_network(kb, req)
    assert set(exc.value.labels) == {"rain", "night"}
    assert "@rain" in str(exc.value) and "@night" in str(exc.value)
