"""Exception types shared across the package."""


class ThetakitError(Exception):
    """Base class for all package errors."""


class DomainError(ThetakitError, ValueError):
    """Input violates a mathematical precondition (e.g. Im(Omega) not positive definite)."""


class TruncationError(ThetakitError):
    """Requested tolerance unreachable within the configured lattice-radius cap.

    Carries the best certified bound that was achieved.
    """

    def __init__(self, message, achieved_bound):
        super().__init__(message)
        self.achieved_bound = achieved_bound


class UnsupportedOrderError(DomainError):
    """Derivative order beyond what the series code supports."""


class SingularityError(ThetakitError):
    """Evaluation requested on a declared singular locus (e.g. coincident points)."""


class DegenerateCurveError(DomainError):
    """Branch points coincide or are too close to define a curve."""


class HomologyError(ThetakitError):
    """Computed period matrix fails symmetry / positivity validation.

    The offending matrices are attached for diagnosis.
    """

    def __init__(self, message, omega=None, asym=None):
        super().__init__(message)
        self.omega = omega
        self.asym = asym


class PathError(ThetakitError):
    """Integration path violates clearance constraints around singular points."""


class StiffnessError(ThetakitError):
    """Adaptive ODE integration exceeded its step budget."""


class DeformationSingularityError(ThetakitError):
    """Poles of a Fuchsian system collided along a deformation path."""


class MalgrangeProximityError(ThetakitError):
    """Residue matrices blew up: the deformation path approached the tau-function zero divisor."""


class QuadratureError(ThetakitError):
    """Cycle quadrature could not find a pole-free path."""


class ConsistencyError(ThetakitError):
    """Two independent computation routes disagreed beyond tolerance."""

    def __init__(self, message, value_a=None, value_b=None):
        super().__init__(message)
        self.value_a = value_a
        self.value_b = value_b


class RealityError(DomainError):
    """Parameters violate the reality condition required for a real metric."""
