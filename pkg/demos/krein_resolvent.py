"""Boundary Green matrices and the Krein correction.

Poles of the correction term reproduce the spectrum computed directly.
"""
import numpy as np

from selfadjoint1d import IntervalSystem, PotentialSpec, find_eigenvalues, named_bc
from selfadjoint1d.krein import krein_correction, neumann_boundary_green, neumann_eigenvalues, pole_scan

box = IntervalSystem.single(0.0, np.pi)

# %% the Neumann boundary Green matrix is real symmetric for real z off the spectrum
C0 = neumann_boundary_green(box, 0.7).entries
print("C0(0.7) =\n", np.round(C0, 6))

# %% Robin poles versus the direct solver
U = named_bc("robin", [0.4, -1.1])
poles = pole_scan(U, box, (0, 10))
direct = find_eigenvalues(U, box, (0, 10)).values
print("poles :", np.round(poles, 8))
print("direct:", np.round(direct, 8))

# %% the correction is a finite-rank matrix; it blows up next to a pole
for eps in (1e-1, 1e-3, 1e-5):
    corr = krein_correction(U, box, -(direct[0] + eps))
    print(f"eps={eps:.0e}  |C^U - C^0| = {np.linalg.norm(corr.corrected - corr.background):.3e}")

# %% with V = 0 every Dirichlet level n^2/2 coincides with a Neumann level,
# so it is masked as a background pole. A linear potential separates them.
print("neumann background on [0, pi]:", np.round(neumann_eigenvalues(box, (0, 5)), 8))
tilted = IntervalSystem.single(0.0, np.pi, potential=PotentialSpec.polynomial([0, 1]))
print("dirichlet poles with V = x  :", np.round(pole_scan(named_bc("dirichlet"), tilted, (0, 8)), 8))
print("direct                      :", np.round(find_eigenvalues(named_bc("dirichlet"), tilted, (0, 8)).values, 8))
