"""Gluing intervals into rings and star graphs."""
import numpy as np

from selfadjoint1d import IntervalSystem, Interval, find_eigenvalues, wire_bc

# %% two unit intervals glued end to end into a ring of length 2
ring = IntervalSystem([Interval(0, 1), Interval(0, 1)])
U = wire_bc([((0, "right"), (1, "left"), 0.0), ((1, "right"), (0, "left"), 0.0)], n=2)
spec = find_eigenvalues(U, ring, (-0.5, 25))
print("ring, no flux :", [(round(p.lam, 8), p.multiplicity) for p in spec])
print("expected      :", [round((np.pi * k) ** 2 / 2, 8) for k in range(3)])

# %% a flux phase through the ring splits the doublets
U = wire_bc([((0, "right"), (1, "left"), 0.0), ((1, "right"), (0, "left"), 0.6)], n=2)
spec = find_eigenvalues(U, ring, (-0.5, 25))
print("ring, flux 0.6:", np.round(spec.values, 8))
print("expected      :", np.round(sorted(e for k in range(-3, 3) if (e := ((2 * np.pi * k + 0.6) / 2) ** 2 / 2) < 25), 8))

# %% a three-edge star with Kirchhoff matching at the centre and Dirichlet leaves
star = IntervalSystem([Interval(0, 1)] * 3)
U = wire_bc(junctions=[[(0, "left"), (1, "left"), (2, "left")]], n=3, free="dirichlet")
spec = find_eigenvalues(U, star, (0, 30))
print("star          :", [(round(p.lam, 8), p.multiplicity) for p in spec])
