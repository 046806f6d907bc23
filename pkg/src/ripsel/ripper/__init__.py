"""RIPPER decision-list learner."""
from .irep import foil_gain, grow_rule, prune_rule, prune_value
from .learner import RipperConfig, induce
from .mdl import description_length
from .rules import Condition, Rule, RuleSet, classify

__all__ = [
    "Condition", "Rule", "RuleSet", "RipperConfig", "classify", "description_length",
    "foil_gain", "grow_rule", "induce", "prune_rule", "prune_value",
]
