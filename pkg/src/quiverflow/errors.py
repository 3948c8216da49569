"""Exception hierarchy shared by every quiverflow module."""


class QuiverflowError(Exception):
    """Base class for all errors raised by quiverflow."""


class ZeroVector(QuiverflowError, ValueError):
    pass


class ZeroLattice(QuiverflowError, ValueError):
    pass


class DimensionMismatch(QuiverflowError, ValueError):
    pass


class ZeroContraction(QuiverflowError, ValueError):
    """A class gamma has iota_gamma(omega) == 0 where a nonzero contraction is required."""


class NotSmallEnough(QuiverflowError):
    """A perturbed flow had no valid limit: the perturbation was too large."""


class RetriesExhausted(QuiverflowError):
    pass


class NonGenericStability(QuiverflowError, ValueError):
    """The stability parameter lies on a wall (a limit flow edge from the root has length 0)."""


class InfiniteCokernel(QuiverflowError):
    pass


class RankViolation(QuiverflowError):
    pass


class NonIntegerResult(QuiverflowError, ValueError):
    pass


class Overflow(QuiverflowError):
    """Brute-force enumeration exceeded its bound."""
