"""Deficiency indices, von Neumann parametrization, and the mirror trick."""
import numpy as np

from selfadjoint1d import IntervalSystem, find_eigenvalues, named_bc
from selfadjoint1d.boundary import unitarity_deviation
from selfadjoint1d.deficiency import K_to_U, U_to_K, deficiency_indices, has_self_adjoint_extension
from selfadjoint1d.dissipative import mirror_extend

box = IntervalSystem.single(0.0, 1.0)

# %% indices
print("interval       :", deficiency_indices(box))
print("half-line lap. :", deficiency_indices("half_line_laplace"), has_self_adjoint_extension("half_line_laplace"))
print("half-line dirac:", deficiency_indices("half_line_dirac"), has_self_adjoint_extension("half_line_dirac"))

# %% the map U <-> K is a bijection between unitaries
U = named_bc("robin", [0.3, 2.0]).matrix
K = U_to_K(U, box)
print("K unitary to", f"{unitarity_deviation(K):.1e}", " round trip", f"{np.max(np.abs(K_to_U(K, box).matrix - U)):.1e}")

# %% a dissipative condition psi_dot = A psi, made self-adjoint on a doubled system
A = np.array([[0.5 + 0.5j, 0], [0, -0.2j]])
ms, Ud = mirror_extend(A, box)
print("doubled system has", ms.doubled.n, "intervals, U unitary to", f"{unitarity_deviation(Ud.matrix):.1e}")
print("spectrum:", np.round(find_eigenvalues(Ud, ms.doubled, (-3, 30)).values, 8))
