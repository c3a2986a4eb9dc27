"""
Double-phase modulars and Luxemburg norms
=========================================

The modular of a function w is the integral of |w|^p + mu |w|^q.  Its
Luxemburg norm is the smallest scaling zeta with modular(w / zeta) <= 1.
"""
import math

import numpy as np

from dpcg.mesh import interval_mesh
from dpcg.modular import ModularFunction, luxemburg_norm, lp_norm, modular_integral

###############################################################################
# A constant function on the unit interval
# ----------------------------------------
# For w = 1, p = 2, q = 4 and mu = 1 the norm solves zeta^-2 + zeta^-4 = 1,
# so zeta is the square root of the golden ratio.

m = interval_mesh(8)
one = np.ones((m.num_cells, m.qp_weights.shape[1]))
g = ModularFunction(2, 4, 1.0)
zeta = luxemburg_norm(one, g, m)
print(f"norm = {zeta:.15f}, sqrt(golden ratio) = {math.sqrt((1 + math.sqrt(5)) / 2):.15f}")
print(f"modular at the norm = {modular_integral(one / zeta, g, m):.15f}")

###############################################################################
# Without the second phase the norm is the plain L^p norm

rng = np.random.default_rng(0)
w = rng.standard_normal(one.shape)
for p in (1.5, 2.0, 3.0):
    print(f"p = {p}: Luxemburg {luxemburg_norm(w, ModularFunction(p, p + 1, 0.0), m):.12f}"
          f"  L^p {lp_norm(w, p, m):.12f}")
