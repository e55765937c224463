"""Exceptions and warnings raised by tlsheat."""


class TlsHeatError(Exception):
    """Base class for all tlsheat errors."""


class InvalidNetwork(TlsHeatError, ValueError):
    """A network or device config violates its invariants.

    ``field`` names the offending entry (``"coupling[0][1]"``, ``"baths[2].temperature"``).
    """

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class SingularSystem(TlsHeatError):
    """The steady state is not unique.

    Raised when the transition graph has more than one closed communicating
    class at the given temperatures.  ``components`` lists those classes as
    tuples of 1-based state indices.
    """

    def __init__(self, components):
        self.components = tuple(tuple(c) for c in components)
        desc = "; ".join("{" + ",".join(map(str, c)) + "}" for c in self.components)
        super().__init__(
            f"steady state is not unique: {len(self.components)} closed classes {desc}"
        )


class DegenerateInput(TlsHeatError, ValueError):
    """An observable is undefined for the requested inputs."""


class NoBracket(TlsHeatError):
    """Root search interval does not straddle a sign change."""


class NoInteriorMinimum(TlsHeatError):
    """Minimum search converged onto an end of the bracket."""


class NonConvergenceWarning(RuntimeWarning):
    """Time integration stopped before populations stabilised."""


class RegimeWarning(UserWarning):
    """A closed-form approximation was evaluated outside its validity regime."""
