"""Toolkit for prefix expansions of finite inverse semigroups.

Submodules:
  core         Cayley tables, validation, natural order, stock examples
  expansion    normal-form pairs, product/inverse/degree, counting, adjunction
  rewriter     word reduction with relation-level traces
  actions      partial homomorphisms/actions, filters, globalization
  matrix_fell  matrix-subspace Fell bundles and twisted partial actions
  cli          deterministic command-line front door
"""

from . import actions, cli, core, expansion, matrix_fell, rewriter
from .core import (
    InverseSemigroup,
    cyclic_group,
    dump_cayley,
    five_element_example,
    from_table,
    klein_four_group,
    load_cayley,
    restrict_to_idempotents,
    symmetric_inverse_monoid,
)
from .expansion import (
    ExpElem,
    ExpansionTable,
    build_expansion,
    canonical_gen,
    degree,
    exp_inverse,
    exp_product,
    predicted_count,
)
from .rewriter import Word, parse_word, reduce_to_normal_form, rewrite_steps, words_equal
from .actions import (
    PartialActionOnSet,
    PartialBijection,
    canonical_partial_action,
    enumerate_filters,
    filter_closure,
    is_partial_action,
    is_partial_homomorphism,
    lift_action,
    separation_check,
)
from .matrix_fell import (
    ConcreteFellBundle,
    MatrixSubspace,
    RegularityData,
    TwistedPartialActionFD,
    check_concrete_fell_bundle,
    check_regularity,
    check_span_refinement,
    check_twisted_partial_action,
    expand_bundle,
    subspace_from_matrices,
    twisted_from_regular,
    twisted_global_from_partial,
)

__all__ = [
    "InverseSemigroup",
    "ExpElem",
    "ExpansionTable",
    "Word",
    "PartialActionOnSet",
    "PartialBijection",
    "ConcreteFellBundle",
    "MatrixSubspace",
    "RegularityData",
    "TwistedPartialActionFD",
    "actions",
    "build_expansion",
    "canonical_gen",
    "canonical_partial_action",
    "check_concrete_fell_bundle",
    "check_regularity",
    "check_span_refinement",
    "check_twisted_partial_action",
    "cli",
    "core",
    "cyclic_group",
    "degree",
    "dump_cayley",
    "enumerate_filters",
    "exp_inverse",
    "exp_product",
    "expand_bundle",
    "expansion",
    "filter_closure",
    "five_element_example",
    "from_table",
    "is_partial_action",
    "is_partial_homomorphism",
    "klein_four_group",
    "lift_action",
    "load_cayley",
    "matrix_fell",
    "parse_word",
    "predicted_count",
    "reduce_to_normal_form",
    "restrict_to_idempotents",
    "rewrite_steps",
    "rewriter",
    "separation_check",
    "subspace_from_matrices",
    "symmetric_inverse_monoid",
    "twisted_from_regular",
    "twisted_global_from_partial",
    "words_equal",
]
