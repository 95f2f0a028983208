"""Self-adjoint boundary conditions for 1D Schrodinger operators on unions of intervals."""

from .boundary import (
    BoundaryOperator,
    BoundaryTrace,
    BoundaryUnitary,
    asorey_residual,
    boundary_form,
    cayley_from_operator,
    cayley_surface_distance,
    cayley_to_operator,
    named_bc,
    wire_bc,
)
from .intervals import Interval, IntervalSystem, PotentialSpec, boundary_labels, validate
from .spectral import (
    Eigenpair,
    Spectrum,
    assemble_M,
    eigenfunction,
    find_eigenvalues,
    spectral_function,
)

__version__ = "0.1.0"
