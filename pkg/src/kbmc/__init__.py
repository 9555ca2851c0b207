"""Knowledge-based construction of event-specific Bayesian networks.

A knowledge base of first-order sentences with proportion terms is parsed,
classified and queried for the statistics that bear on one event; the
most specific of them parameterize a small network built for that event.
"""

__version__ = "0.1.0"

from .bayes_net import BayesNet, Node, from_text, to_dot, to_text, validate
from .construct import (
    ConstructionReport, NodeSpec, UnresolvedConflict, build_network, identify_variables,
    instantiate_template, select_statistics, specificity_compare,
)
from .evaluator import FiniteModel, check_sentence, eval_formula, eval_proportion
from .inference import Factor, eliminate, joint_brute_force
from .knowledge_base import KnowledgeBase, applicable_statistics, classify_sentence, entails_ground
from .noisy_or import complete_cpt_noisy_or
from .parser import parse_formula, parse_kb, parse_request, pretty_print
from .request import ConstructionRequest
from .translate import bn_to_sentences, sentences_to_bn

__all__ = [
    "BayesNet", "Node", "from_text", "to_dot", "to_text", "validate",
    "ConstructionReport", "NodeSpec", "UnresolvedConflict", "build_network", "identify_variables",
    "instantiate_template", "select_statistics", "specificity_compare",
    "FiniteModel", "check_sentence", "eval_formula", "eval_proportion",
    "Factor", "eliminate", "joint_brute_force",
    "KnowledgeBase", "applicable_statistics", "classify_sentence", "entails_ground",
    "complete_cpt_noisy_or",
    "parse_formula", "parse_kb", "parse_request", "pretty_print",
    "ConstructionRequest",
    "bn_to_sentences", "sentences_to_bn",
]
