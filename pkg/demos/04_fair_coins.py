"""
Checking sentences against a finite model
=========================================

Twenty coins, each tossed twenty times.  Nineteen come up heads ten
times; one comes up heads fifteen times.  The coin sentences are
evaluated by counting.
"""

from importlib import resources

from kbmc import check_sentence, eval_proportion, parse_formula, parse_kb
from kbmc.evaluator import parse_model


def data(name):
    return resources.files("kbmc").joinpath("data", name).read_text()


src = parse_kb(data("coins.kb"))
model = parse_model(data("coins.model"), src.signature)

print("events:", len(model.domain("Event")), " coins:", len(model.domain("Obj")))
for st in src.statements:
    print(f"@{st.label}: {check_sentence(model, st.formula)}")

# Heads frequency per coin
inner = parse_formula("[Heads(e) | CoinToss(e) & Object(e, x)]_{e} = 0", src.signature).left
for coin in ("C01", "C20"):
    print(f"{coin}: heads in {eval_proportion(model, inner, {'x': coin})} of its tosses")

# The nested proportion: how many coins are near-fair
nested = {s.label: s for s in src.statements}["ex3"].formula.left
print("share of near-fair coins:", eval_proportion(model, nested))
