"""Exception hierarchy.

Every error raised for a violated precondition derives from
:class:`AttentionError`, itself a ``ValueError``, so callers that only care
about "bad input" can catch one type.
"""


class AttentionError(ValueError):
    """Base class for all package errors."""


# simplex
class OutOfSimplex(AttentionError):
    pass


class WrongStateSpace(AttentionError):
    pass


class DegenerateVertices(AttentionError):
    pass


# policy
class NotBayesPlausible(AttentionError):
    pass


class NonPositiveWeight(AttentionError):
    pass


class DuplicateBelief(AttentionError):
    pass


class AmbiguousDirection(AttentionError):
    pass


class RedundantPolicy(AttentionError):
    """Support of a policy is not affinely independent."""


class NotInterior(AttentionError):
    pass


class EpsilonTooLarge(AttentionError):
    pass


# model / solver
class InvalidModel(AttentionError):
    pass


class BoundaryPrior(InvalidModel):
    """Prior puts zero mass on some state."""


class NonPositiveKappa(InvalidModel):
    pass


class OutOfRegime(AttentionError):
    pass


class WeightOutOfRange(AttentionError):
    pass


class InfeasibleSlope(AttentionError):
    pass


class OutOfRange(AttentionError):
    pass


class KappaOutOfRange(AttentionError):
    pass


class InfeasibleLP(AttentionError):
    pass


class PolicyFileError(AttentionError):
    pass
