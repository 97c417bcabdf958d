"""Cellular automata on the k-regular tree that commute with all tree automorphisms."""

from .errors import (
    AddressError,
    CapacityError,
    FormatError,
    NonQuiescentRuleError,
    PreconditionError,
    TreeCAError,
)
from .quotient import (
    OneDimConfig,
    OneDimRule,
    oned_nilpotent_horizon,
    oned_step,
    quotient_rule,
    tree_nilpotent_at,
    tree_nilpotent_horizon,
)
from .rules import (
    Alphabet,
    Rule,
    canonicalize,
    compose,
    enumerate_canonical_balls,
    enumerate_rules,
    minimal_neighborhood,
    rule_from_function,
    rule_from_index,
)
from .simulation import FiniteConfig, oracle_step, run, step
from .topology import ROOT, TreeParams, ball, distance, format_vertex, hull_decomposition, parse_vertex

__version__ = "0.1.0"

__all__ = [
    "ROOT", "TreeParams", "Alphabet", "Rule", "FiniteConfig", "OneDimConfig", "OneDimRule",
    "ball", "distance", "parse_vertex", "format_vertex", "hull_decomposition",
    "canonicalize", "enumerate_canonical_balls", "enumerate_rules", "rule_from_index", "rule_from_function",
    "compose", "minimal_neighborhood", "step", "run", "oracle_step",
    "quotient_rule", "oned_step", "oned_nilpotent_horizon", "tree_nilpotent_at", "tree_nilpotent_horizon",
    "TreeCAError", "AddressError", "PreconditionError", "CapacityError", "NonQuiescentRuleError", "FormatError",
]
