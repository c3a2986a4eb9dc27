"""
Embedding constants on a Galerkin hierarchy
===========================================

lambda1 bounds the L^p norm by the gradient norm and lambda2 does the same
for the trace on the contact boundary.  For p = 2 on (0, 1), clamped at 0,
the exact values are 2/pi and 1.
"""
import math

from dpcg.mesh import build_hierarchy, interval_mesh
from dpcg.modular import ExponentConfig, estimate_embedding_constants

H = build_hierarchy(interval_mesh(4), 5)
cfg = ExponentConfig((2, 1.5, 2, 1.5), (3, 2.5, 3, 2.5))
c = estimate_embedding_constants(H, cfg)

###############################################################################
# Estimates are warm-started level to level, so they never decrease

for name, exact in (("lambda1", 2 / math.pi), ("lambda2", 1.0)):
    print(name)
    for row in c.provenance[name]["levels"]:
        print(f"  level {row['level']}  dofs {row['dofs']:3d}  value {row['value']:.10f}")
    print(f"  exact {exact:.10f}")
