"""
Exceptions raised by the computational modules

Every domain failure is a PacklabError; the command line maps these to
exit code 1.
"""


class PacklabError(ValueError):
    """Base class for domain errors"""


class DimensionMismatchError(PacklabError):
    """A class or functional does not match the lattice rank"""


class DegeneratePairingError(PacklabError):
    """The intersection pairing is singular over the rationals"""


class InvalidModelError(PacklabError):
    """A manifold model fails validation"""


class PreconditionError(PacklabError):
    """An operation was called outside its domain"""


class HypothesisNotAssertedError(PreconditionError):
    """A theorem's geometric hypotheses are not asserted in the model flags"""


class InfiniteExceptionalSetError(PreconditionError):
    """The exceptional set is infinite and cannot be enumerated"""


class UncertifiedInvariantError(PreconditionError):
    """A certified value of d_Omega is required but only a search bound exists"""
