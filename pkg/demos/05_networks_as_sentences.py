"""
Writing a network as sentences, and reading it back
===================================================

Any discrete network can be stated as one structure sentence plus one
parameter sentence per CPT entry.  The inverse translation recovers the
network; names that are not valid symbols are renamed and restored.
"""

from fractions import Fraction

from kbmc import BayesNet, Node, bn_to_sentences, sentences_to_bn
from kbmc.translate import translation_text

h = Fraction(1, 2)
net = BayesNet([
    Node("Rain(E1)", ("yes", "no"), (), {(): (Fraction(1, 5), Fraction(4, 5))}),
    Node("Sprinkler", ("on", "off"), ("Rain(E1)",),
         {("yes",): (Fraction(1, 100), Fraction(99, 100)), ("no",): (Fraction(2, 5), Fraction(3, 5))}),
    Node("Grass", ("0", "1"), ("Rain(E1)", "Sprinkler"),
         {("yes", "on"): (Fraction(1, 100), Fraction(99, 100)), ("yes", "off"): (Fraction(1, 5), Fraction(4, 5)),
          ("no", "on"): (Fraction(1, 10), Fraction(9, 10)), ("no", "off"): (h, h)}),
])

tr = bn_to_sentences(net)
print(translation_text(tr))
# one structure sentence plus one per CPT entry: 1 + 2 + 4 + 8
print("sentences:", len(tr.sentences))
print("restored exactly:", sentences_to_bn(tr) == net)

print("renamings:", tr.renaming.nodes)
