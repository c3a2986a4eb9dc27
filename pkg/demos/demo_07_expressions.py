"""
The expression language of problem files
========================================

Coefficients, interval bounds and certificate bounds are written as
arithmetic expressions in z1, z2, r1, r2, n1, n2.
"""
import numpy as np

from dpcg import expression as ex

tree = ex.parse("0.7 + 0.1*sin(r2) - 0.1*n1/(1 + n1)")
print(ex.to_string(tree))
print(sorted(ex.free_variables(tree)))
print(ex.evaluate(tree, {"r2": np.array([0.0, np.pi / 2]), "n1": np.array([0.0, 1.0])}))

for bad in ("2 +", "sin(r1", "foo(z1)"):
    try:
        ex.parse(bad)
    except ex.ExpressionError as err:
        print(f"{bad!r}: {type(err).__name__}: {err}")
