"""Parity-invariant boundary conditions and the symmetry of their eigenfunctions."""
import numpy as np

from selfadjoint1d import IntervalSystem, find_eigenvalues, named_bc
from selfadjoint1d.symmetry import eigenfunction_symmetry_residual, is_invariant, parity_rep, swap_matrix

box = IntervalSystem.single(-1.0, 1.0)
rep = parity_rep(1)

# %% equal Robin phases at both ends commute with the swap; unequal ones do not
for phases in ([0.7, 0.7], [0.7, -0.3]):
    U = named_bc("robin", phases)
    ok, worst = is_invariant(U, rep)
    spec = find_eigenvalues(U, box, (-5, 15))
    res = [eigenfunction_symmetry_residual(U, box, swap_matrix(1), p) for p in spec]
    print(f"phases {phases}: invariant={ok} (|[v,U]| = {worst:.2e})")
    print("   symmetry residuals:", np.array2string(np.array(res), precision=2))
