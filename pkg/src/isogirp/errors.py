"""Exception hierarchy for isotonic recursive partitioning."""


class IsoGirpError(Exception):
    """Base class for every error raised by this package."""


class CycleError(IsoGirpError):
    """The edge relation is not acyclic, so it cannot encode a partial order.

    Carries one offending cycle as a list of node ids.
    """

    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__("order relation contains a cycle: %s" % (self.cycle,))


class EmptySubsetError(IsoGirpError):
    """An operation that requires a nonempty node subset received an empty one."""


class DomainError(IsoGirpError):
    """A loss was constructed or evaluated outside its valid domain."""


class NoMinimizerError(IsoGirpError):
    """The constant-fit problem has no minimizer on the given subset.

    This happens for the logistic loss when all responses in the subset share
    one sign; the summed loss is then strictly monotone and its infimum is not
    attained.  ``subset`` holds the offending node ids when known.
    """

    def __init__(self, subset=None, message=None):
        self.subset = None if subset is None else sorted(subset)
        if message is None:
            if self.subset is None:
                message = "constant fit does not exist"
            else:
                message = "constant fit does not exist on subset %s" % (self.subset,)
        super().__init__(message)


class NotAChainError(IsoGirpError):
    """The pool-adjacent-violators solver requires a total order."""


class TooLargeError(IsoGirpError):
    """The brute-force oracle refuses instances beyond its size guard."""


class DuplicatePointError(IsoGirpError):
    """Identical covariate vectors would break antisymmetry of the dominance order."""

    def __init__(self, i, j, message=None):
        self.pair = (i, j)
        super().__init__(message or "points %d and %d are identical" % (i, j))
