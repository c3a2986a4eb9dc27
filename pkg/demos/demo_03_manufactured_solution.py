"""
Convergence on a manufactured mixed problem
===========================================

-u'' = (pi/2)^2 sin(pi z / 2) with u(0) = 0 and u'(1) = 0 has the exact
solution sin(pi z / 2).  P1 elements converge at second order in L^2.
"""
import numpy as np

from dpcg.mesh import build_hierarchy, interval_mesh, l2_error
from dpcg.modular import ExponentConfig
from dpcg.multifunctions import IntervalMultifunction as IM
from dpcg.solver import InclusionProblem, run_hierarchy

force = "(pi/2)^2*sin(pi*z1/2)"
problem = InclusionProblem(
    ExponentConfig((2, 1.5, 2, 1.5), (3, 2.5, 3, 2.5)),
    IM.from_expressions(force, force), IM.zero(), IM.zero("boundary"), IM.zero("boundary"),
    build_hierarchy(interval_mesh(4), 5),
    certificates_waived=True,
)
trace = run_hierarchy(problem)

errs = np.array([l2_error(problem.space(k), s.u, "sin(pi*z1/2)") for k, s in enumerate(trace.solutions)])
for k, e in enumerate(errs):
    ratio = "" if k == 0 else f"  ratio {errs[k - 1] / e:.3f}"
    print(f"level {k}  dofs {trace.rows[k].dofs:3d}  L2 error {e:.3e}{ratio}")
