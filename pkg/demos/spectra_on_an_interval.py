"""Spectra of -(1/2) d^2/dx^2 on [0, pi] under a few boundary conditions.

Run with ``python3 demos/spectra_on_an_interval.py``.
"""
import numpy as np

from selfadjoint1d import IntervalSystem, PotentialSpec, find_eigenvalues, named_bc
from selfadjoint1d.spectral import spectral_function

box = IntervalSystem.single(0.0, np.pi)

# %% Dirichlet and Neumann: n^2 / 2, with Neumann also picking up lam = 0
for name in ("dirichlet", "neumann"):
    spec = find_eigenvalues(named_bc(name), box, (-1, 13))
    print(f"{name:>10}: {np.round(spec.values, 10)}")

# %% periodic: every nonzero level is doubly degenerate
spec = find_eigenvalues(named_bc("periodic"), IntervalSystem.single(0, 2 * np.pi), (-1, 10))
print("  periodic:", [(round(p.lam, 10), p.multiplicity) for p in spec])

# %% Robin with a negative phase binds a state below zero
U = named_bc("robin", [-2.5, -2.5])
spec = find_eigenvalues(U, box, (-20, 5))
print("     robin:", np.round(spec.values, 8))

# %% the spectral function is real analytic on the real axis up to a phase,
# and vanishes exactly on the spectrum
lam = spec.values[0]
print("  |Lambda| at first level:", abs(spectral_function(U, box, lam)))
print("  |Lambda| half way up   :", abs(spectral_function(U, box, lam + 0.5)))

# %% a harmonic well, x^2 / 2 on a long box, approaches the oscillator ladder
well = IntervalSystem.single(-8, 8, potential=PotentialSpec.polynomial([0, 0, 0.5]))
spec = find_eigenvalues(named_bc("dirichlet"), well, (0, 5))
print("oscillator:", np.round(spec.values, 8))
