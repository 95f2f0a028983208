"""Eigenphases of a loop of unitaries crossing -1, and the determinant winding."""
import numpy as np

from selfadjoint1d.flow import crossing_count, det_winding, hermitian_loop, index_agreement, lifted_phases

rng = np.random.default_rng(7)
X = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
X = X + X.conj().T


def H(t):
    return np.cos(t) * X / 4


# %% integer multipliers fix the winding; the crossing count follows it
for mult in ([1, 0, 0], [1, 1, -1], [2, 1, 0]):
    loop = hermitian_loop(H, mult, samples=300)
    print(mult, index_agreement(loop).line())

# %% the lifted phases themselves
loop = hermitian_loop(H, [1, 0, 0], samples=9)
print(np.round(lifted_phases(loop) / np.pi, 3))
print("crossings", crossing_count(loop), "winding", det_winding(loop))
