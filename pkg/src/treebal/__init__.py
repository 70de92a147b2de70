"""treebal: balance expressions into logarithmic-depth circuits.

A term of size n becomes a normal-form tree straight-line program (TSLP)
of depth O(log n) and size O(n / log n).  The TSLP specializes to semiring
+/x circuits, regular-expression circuits of logarithmic star height, and
evaluation over arbitrary algebras via linear term functions.
"""

from .algebra import (Algebra, balanced_fa_term, derived_algebra, eval_context,
                      eval_term, eval_tslp, free, get_algebra, matmodp,
                      minplus, modp)
from .contraction import (contraction_patterns, internal_leaves, round_count,
                          tree_at_round)
from .decomposition import (choose_m, critical_nodes, hierarchical_definition,
                            is_normal_form, normalize, pattern_classes)
from .patterns import (HierarchicalDefinition, Pattern, PatternTree, context,
                       coverage_size, covers, pattern_leq, patterns_disjoint,
                       subtree)
from .regex import (Regex, RegexCircuit, balance_regex, parse_regex,
                    regex_equiv, render_regex, star_height)
from .semiring import (AffineForm, SemiringCircuit, balance_semiring,
                       eval_semiring_circuit)
from .terms import (Context, OrderedTree, ParseError, RankedAlphabet, Term,
                    TermError, parse_context, parse_term, render_term)
from .tslp import (CapacityError, TslpCircuit, balance, build_tslp,
                   eliminate_copies, minimal_dag, productions, unfold)

__version__ = "1.0.0"

__all__ = [
    "Algebra", "AffineForm", "CapacityError", "Context",
    "HierarchicalDefinition", "OrderedTree", "ParseError", "Pattern",
    "PatternTree", "RankedAlphabet", "Regex", "RegexCircuit",
    "SemiringCircuit", "Term", "TermError", "TslpCircuit", "balance",
    "balance_regex", "balance_semiring", "balanced_fa_term", "build_tslp",
    "choose_m", "context", "contraction_patterns", "coverage_size", "covers",
    "critical_nodes", "derived_algebra", "eliminate_copies", "eval_context",
    "eval_semiring_circuit", "eval_term", "eval_tslp", "free", "get_algebra",
    "hierarchical_definition", "internal_leaves", "is_normal_form", "matmodp",
    "minimal_dag", "minplus", "modp", "normalize", "parse_context",
    "parse_regex", "parse_term", "pattern_classes", "pattern_leq",
    "patterns_disjoint", "productions", "regex_equiv", "render_regex",
    "render_term", "round_count", "star_height", "subtree", "tree_at_round",
    "unfold",
]
