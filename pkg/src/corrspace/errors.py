"""Exception hierarchy shared by every module of the package."""


class CorrspaceError(Exception):
    """Base class for all errors raised by corrspace."""


class InvalidDimensionError(CorrspaceError, ValueError):
    """A dimension or residue argument is out of range."""


class NotCoprimeError(CorrspaceError, ValueError):
    """A Fourier index shares a factor with the qudit dimension."""


class NotPowerOfTwoError(CorrspaceError, ValueError):
    """An Sp(2n) construction was requested for n that is not a power of two."""


class NonUnitaryError(CorrspaceError, ValueError):
    """A matrix that must be unitary is not."""


class NonOrthogonalBasisError(CorrspaceError, ValueError):
    """An operator basis is not Hilbert-Schmidt orthogonal with equal norms."""


class MismatchedCountError(CorrspaceError, ValueError):
    """Two operator bases have different sizes or dimensions."""


class DimensionMismatchError(CorrspaceError, ValueError):
    """Operands have incompatible dimensions."""


class ChannelInvalidError(CorrspaceError, ValueError):
    """A Kraus set does not satisfy the trace-preserving condition."""


class BudgetExceededError(CorrspaceError, MemoryError):
    """A dense state or operator would exceed the amplitude budget."""


class LeakageError(CorrspaceError, ValueError):
    """Conjugation by a virtual gate leaves the span of the family's Kraus set."""


class NothingToFactorError(CorrspaceError, ValueError):
    """Factorization requested for a coprime cluster state."""


class PlanError(CorrspaceError, ValueError):
    """A measurement plan is malformed or inconsistent with its family."""
