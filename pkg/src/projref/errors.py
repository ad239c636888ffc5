"""Exception hierarchy shared by all projref modules."""


class ProjRefError(Exception):
    """Base class for all errors raised by this package."""


class DivisibilityError(ProjRefError):
    """Parameters (r,p,q,n) violate p|r, q|r or pq|rn."""


class ParamMismatch(ProjRefError):
    """Operands belong to groups with different parameters."""


class CapExceeded(ProjRefError):
    """A computation was requested beyond its configured size cap."""


class InvalidParameters(ProjRefError):
    """Construction parameters fail a validity condition (e.g. a gcd test)."""


class PreconditionFailed(ProjRefError):
    """A named precondition of an operation does not hold."""


class NoSolution(ProjRefError):
    """A congruence system has no solution under the given hypotheses."""


class NotASubgroup(ProjRefError):
    """An element set is not closed under the group operation."""


class NumericalFailure(ProjRefError):
    """The numeric character-table engine could not separate eigenspaces."""


class NotAnAbsoluteInvolution(ProjRefError):
    """Element is not a twisted involution for the inverse-transpose map."""


class NotDecomposable(ProjRefError):
    """An automorphism admits no decomposition of the expected shape."""


class BadModelShape(ProjRefError):
    """Model data does not supply exactly one character per twisted class."""
