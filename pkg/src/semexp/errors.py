"""Exception types shared across the toolkit.

Every error message carries the witnessing data (element names, pairs,
triples) so that a failing check can be reproduced by hand.
"""


class SemexpError(Exception):
    """Base class for all toolkit errors."""


class ParseError(SemexpError):
    """A document (Cayley table, word, action, bundle) is malformed."""


class UnknownElement(SemexpError):
    """A word or document refers to an element name that does not exist."""


class NotAssociative(SemexpError):
    """Cayley table fails associativity; message names the triple."""


class NotInverse(SemexpError):
    """Some element lacks a unique generalized inverse."""


class IdempotentsDontCommute(SemexpError):
    """Two idempotents with ef != fe; message names the pair."""


class NotIdempotent(SemexpError):
    """An operation required an idempotent element."""


class InternalInconsistency(SemexpError):
    """Two supposedly equivalent characterizations disagreed (invalid input)."""


class TooLarge(SemexpError):
    """An enumeration would exceed its configured cap."""


class NotNormalForm(SemexpError):
    """A pair (A, t) violates the normal-form invariants."""


class NotPartialHom(SemexpError):
    """A map fails the partial-homomorphism axioms."""


class NotPartialAction(SemexpError):
    """A family of partial bijections fails the partial-action criteria."""


class LiftNotHomomorphism(SemexpError):
    """A lifted map failed multiplicativity; indicates a bug, never valid input."""


class PropertyViolation(SemexpError):
    """A theorem-backed check came out false; indicates a bug."""


class EquivalenceViolation(SemexpError):
    """Two provably equivalent criteria returned different verdicts."""


class CriteriaDisagree(SemexpError):
    """The two partial-action criteria returned different verdicts."""


class NotFilterBase(SemexpError):
    """A subset is not closed under (s, t) -> s s* t; message names the pair."""


class StepLimitExceeded(SemexpError):
    """The rewrite engine hit its step limit; carries the partial trace."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class OracleMismatch(SemexpError):
    """Rewriting and the pair formula disagreed; indicates a rule-engine bug."""


class SaturationFailure(SemexpError):
    """An expanded bundle failed saturation; indicates a bug."""


class GlobalityFailure(SemexpError):
    """A globalized twisted action failed D_x = D_{xx*}; indicates a bug."""


class RegularityFailure(SemexpError):
    """Regularity data failed its defining equations."""


class NotAnAlgebra(SemexpError):
    """A subspace handed to ideal_unit is not *-closed and product-closed."""


class NoUnit(SemexpError):
    """A nonzero algebra unexpectedly has no unit."""
