"""Exception types shared across the package."""


class DphcError(ValueError):
    """Base class for all contract violations raised by this package."""


# --- graph construction / queries ---

class SelfLoopError(DphcError):
    pass


class DuplicateEdgeError(DphcError):
    pass


class NegativeWeightError(DphcError):
    pass


class EndpointOutOfRangeError(DphcError):
    pass


class EmptyOrFullSideError(DphcError):
    pass


class EmptySetError(DphcError):
    pass


class ParseError(DphcError):
    """Malformed file or tree text; carries position information in the message."""


class InvalidHeaderError(ParseError):
    pass


# --- mechanisms ---

class NonPositiveScaleError(DphcError):
    pass


class NonPositiveEpsilonError(DphcError):
    pass


class NonPositiveSensitivityError(DphcError):
    pass


class NonPositiveDeltaPrimeError(DphcError):
    pass


class EmptyCandidateListError(DphcError):
    pass


class LeafMismatchError(DphcError):
    pass


# --- cuts / oracles ---

class TooLargeForOracleError(DphcError):
    pass


class SingletonGraphError(DphcError):
    pass


# --- trees ---

class TooLargeForEnumerationError(DphcError):
    pass


class NegativeResultingWeightError(DphcError):
    pass


# --- algorithms / reduction / generators ---

class UnknownMethodError(DphcError):
    pass


class UnknownAlgorithmError(DphcError):
    pass


class NonBalancedCutError(DphcError):
    """A cut subroutine returned a side below the required balance floor."""


class InvalidProbabilityError(DphcError):
    pass


class NotDivisibleBy5Error(DphcError):
    pass


class NonPositiveSigmaError(DphcError):
    pass
