"""Exception types raised by the engine."""


class ShapeError(ValueError):
    """Matrix or module dimensions do not fit together."""


class NotWellDefined(ValueError):
    """A generator matrix does not descend to the quotient modules."""


class NotAComplex(ValueError):
    """Consecutive differentials do not compose to zero."""


class NotAResolution(ValueError):
    pass


class InvalidDiagram(ValueError):
    pass


class InfiniteNode(ValueError):
    """Brute-force enumeration was asked for a group with a free summand."""


class IncompatibleComponents(ValueError):
    pass


class CocycleViolation(AssertionError):
    """Canonical comparison isomorphisms failed an identity or cocycle law.

    Always an internal bug (or a deliberately injected fault), never bad
    user input.
    """
