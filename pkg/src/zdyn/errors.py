"""Exception types shared across the toolkit."""


class ZdynError(Exception):
    """Base class for all toolkit errors."""


class DomainMismatch(ZdynError):
    """Two covers were composed whose graphs do not line up."""


class HomomorphismViolation(ZdynError):
    """A cover's vertex/edge maps do not form a graph homomorphism."""


class CoverViolation(ZdynError):
    """A cover lacks a required property (directionality, surjectivity)."""


class DepthOutOfRange(ZdynError):
    """A level or depth beyond what the presentation can materialize."""


class InvalidSequence(ZdynError):
    """A height sequence that is not strictly increasing and positive."""


class HorizonExceeded(ZdynError):
    """A set computation needed path information beyond the given horizon.

    Callers should retry with a larger horizon.
    """


class NestingViolation(ZdynError):
    """A diagram-to-covering conversion was attempted without nesting."""


class UndefinedVershik(ZdynError):
    """Successor resolution is impossible at the probed prefixes."""


class NotStraight(ZdynError):
    """An operation required a straight mono-graph or self-cover."""


class EmptyGrowingSet(ZdynError):
    """A substitution with no letter of unbounded growth."""


class IllegalSeed(ZdynError):
    """An array seed row that is not a legal walk."""


class UnsupportedKind(ZdynError):
    """A document kind the requested operation cannot handle."""


class DocumentSyntaxError(ZdynError):
    """Malformed document text."""


class DocumentSemanticError(ZdynError):
    """Well-formed document violating a structural invariant."""
