"""Exception hierarchy.

Every error carries the exit code the command line front end reports for it.
"""


class OrbispaceError(Exception):
    exit_code = 3


class InvalidInput(OrbispaceError):
    """Input data that violates a documented precondition."""

    exit_code = 1


class CapExceeded(OrbispaceError):
    """An enumeration grew past its configured cap."""

    exit_code = 2


class InternalContradiction(OrbispaceError):
    """A runtime cross-check failed; indicates a bug or a broken precondition."""

    exit_code = 3


class NotSaturated(InvalidInput):
    pass


class Not1Stable(InvalidInput):
    pass


class NotAClass(InvalidInput):
    pass


class InconsistentAd(InvalidInput):
    pass


class NotOrthogonal(InvalidInput):
    pass


class WeightsDontSpan(InvalidInput):
    pass


class NoReducibleClass(InvalidInput):
    pass


class MixedConjugationOnClass(InvalidInput):
    pass
