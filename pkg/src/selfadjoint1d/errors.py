"""Exception hierarchy.

Every error carries the numeric quantity that triggered it so callers can
log or threshold on it.
"""


class BoundaryError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(BoundaryError, ValueError):
    pass


class NonUnitary(BoundaryError, ValueError):
    def __init__(self, deviation, message=None):
        self.deviation = float(deviation)
        super().__init__(message or f"non-unitary boundary matrix (max |U*U - I| = {self.deviation:.3e})")


class NotSelfAdjoint(BoundaryError, ValueError):
    def __init__(self, deviation):
        self.deviation = float(deviation)
        super().__init__(f"boundary operator is not self-adjoint (max |A - A*| = {self.deviation:.3e})")


class OnCayleySurface(BoundaryError, ValueError):
    """U has an eigenvalue at -1, so the condition is not of the form phi_dot = A phi."""

    def __init__(self, distance):
        self.distance = float(distance)
        super().__init__(f"unitary lies on the Cayley surface (min |mu + 1| = {self.distance:.3e})")


class InvalidMatching(BoundaryError, ValueError):
    pass


class IntegratorFailure(BoundaryError, RuntimeError):
    pass


class NotSingleInterval(BoundaryError, ValueError):
    pass


class NotNormalized(BoundaryError, ValueError):
    def __init__(self, norm):
        self.norm = float(norm)
        super().__init__(f"|alpha|^2 + |beta|^2 = {self.norm!r}, expected 1")


class NotAnEigenvalue(BoundaryError, ValueError):
    def __init__(self, sigma_min):
        self.sigma_min = float(sigma_min)
        super().__init__(f"not an eigenvalue: relative sigma_min = {self.sigma_min:.3e}")


class AtBackgroundPole(BoundaryError, ValueError):
    def __init__(self, z, condition):
        self.z = complex(z)
        self.condition = float(condition)
        super().__init__(f"z = {self.z} is a pole of the Neumann background (cond = {self.condition:.3e})")


class SingularDenominator(BoundaryError, ValueError):
    def __init__(self, z, condition):
        self.z = complex(z)
        self.condition = float(condition)
        super().__init__(f"Krein denominator singular at z = {self.z} (cond = {self.condition:.3e})")


class NonUnitaryK(BoundaryError, ValueError):
    pass


class RankDeficientTraceMap(BoundaryError, ValueError):
    pass


class TraceNotInDomain(BoundaryError, ValueError):
    pass


class UnresolvedCrossing(BoundaryError, RuntimeError):
    pass


class OpenCurve(BoundaryError, ValueError):
    pass


class SchemaError(BoundaryError, ValueError):
    """Configuration document failed validation; ``errors`` lists every problem found."""

    def __init__(self, errors):
        if isinstance(errors, str):
            errors = [errors]
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))
