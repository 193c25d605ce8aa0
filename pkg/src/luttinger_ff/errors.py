"""Exception hierarchy shared by all modules."""


class LuttingerError(Exception):
    """Base class for errors raised by this package."""


class DomainError(LuttingerError, ValueError):
    """An argument lies outside the domain where a formula is valid."""


class ResourceCapError(LuttingerError):
    """A requested computation exceeds a configured size cap."""


class InvalidStateError(LuttingerError, ValueError):
    """A particle-hole configuration violates Pauli exclusion or ordering."""


class SingularityError(DomainError):
    """Evaluation at a pole of the closed-form expression."""


class DegeneracyError(LuttingerError):
    """The free-fermion ground state is not unique.

    Attributes
    ----------
    minimizers : list of tuple
        Every momentum set that attains the minimal energy.
    """

    def __init__(self, message, minimizers=()):
        super().__init__(message)
        self.minimizers = list(minimizers)


class FitError(LuttingerError):
    """Least-squares design is rank deficient or undersampled."""


class InconsistencyError(LuttingerError):
    """A scaling relation implies a negative squared formfactor."""
