"""Noisy-OR completion of a binary CPT from per-cause statistics.

``per_cause[i]`` is P(effect | cause i present, every other cause absent)
and ``leak`` is P(effect | all causes absent).  With the leak factored out
each cause fires independently with probability
``c_i = 1 - (1 - p_i) / (1 - leak)``, so

    P(effect | active set A) = 1 - (1 - leak) * prod_{i in A} (1 - c_i)

which reproduces ``p_i`` on single-cause rows and ``leak`` on the empty row.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Sequence


class NoisyOrError(ValueError):
    pass


def cause_strengths(per_cause: Sequence[Fraction], leak: Fraction = Fraction(0)) -> list:
    leak = Fraction(leak)
    if not 0 <= leak < 1:
        raise NoisyOrError(f"leak {leak} must lie in [0, 1)")
    out = []
    for i, p in enumerate(per_cause):
        p = Fraction(p)
        if not 0 <= p <= 1:
            raise NoisyOrError(f"cause {i} probability {p} is not in [0, 1]")
        if p < leak:
            raise NoisyOrError(f"cause {i} probability {p} is below the leak {leak}")
        out.append(1 - (1 - p) / (1 - leak))
    return out


def noisy_or_prob(active: Sequence[bool], per_cause: Sequence[Fraction],
                  leak: Fraction = Fraction(0)) -> Fraction:
    """P(effect) when exactly the causes flagged in ``active`` are present."""
    c = cause_strengths(per_cause, leak)
    miss = 1 - Fraction(leak)
    for on, ci in zip(active, c):
        if on:
            miss *= 1 - ci
    return 1 - miss


def complete_cpt_noisy_or(per_cause: Sequence[Fraction], leak: Fraction = Fraction(0)) -> dict:
    """P(effect = true) for every cause configuration.

    Keys are tuples of booleans in cause order, True meaning present.
    """
    c = cause_strengths(per_cause, leak)
    out = {}
    for active in itertools.product((True, False), repeat=len(c)):
        miss = 1 - Fraction(leak)
        for on, ci in zip(active, c):
            if on:
                miss *= 1 - ci
        out[active] = 1 - miss
    return out
