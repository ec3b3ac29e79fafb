"""Exception types shared across the package."""


class InvalidDiagramError(ValueError):
    """Row data does not define a valid Young diagram."""


class ConjugatePointError(ArithmeticError):
    """A conjugate point was met inside the requested interval."""


class PoleError(ConjugatePointError):
    """A closed-form coefficient was evaluated at (or too close to) a pole."""


class AmbiguousRootError(RuntimeError):
    """det N(t) dips to zero without a sign change; the root cannot be certified."""


class HypothesisViolatedError(RuntimeError):
    """A comparison task's curvature/volume hypothesis fails on the grid.

    Raised before any verdict is computed, so a failing hypothesis is never
    reported as a counterexample to a theorem.
    """

    def __init__(self, message: str, details: dict | None = None):
        super().__init__(message)
        self.details = details or {}
