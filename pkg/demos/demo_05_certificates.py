"""
Validating certificates before a solve
======================================

Growth and sign certificates are checked on 10,000 log-uniform samples,
and the coercivity smallness condition is checked against the estimated
embedding constants.  A rejected certificate names the first violating
sample.
"""
from importlib import resources
from pathlib import Path

from dpcg.cli import run_validators
from dpcg.problem import load_problem

fixtures = Path(str(resources.files("dpcg") / "fixtures"))

for name in ("competing", "bad_coercivity", "growth_violation"):
    spec = load_problem(fixtures / f"{name}.json")
    v = run_validators(spec)
    growth, sign, check, bound, _ = v["_objects"]
    print(f"{name}: accepted={v['passed']}")
    print(f"  growth {growth.passed}  sign {sign.passed}  coercivity lhs {[round(x, 6) for x in check.lhs]}")
    print(f"  A={bound.A:.4f}  B={bound.B:.4f}  C2={bound.C2:.4g}")
    if growth.first_violation:
        fv = growth.first_violation
        print(f"  first growth violation: {fv['map']} at sample {fv['sample']}, {fv['lhs']:.4g} > {fv['rhs']:.4g}")
