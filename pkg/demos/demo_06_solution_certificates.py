"""
Generalized, strong and weak solution certificates
==================================================

A competing system is solved on four nested levels with continuation in
the competing coefficients.  The trace records the surrogates that back
the generalized and strongly generalized flags; the weak flag is only
available when both competing coefficients are negative.
"""
from importlib import resources
from pathlib import Path

from dpcg.problem import load_problem
from dpcg.solver import TRACE_COLUMNS, certify, run_hierarchy

fixtures = Path(str(resources.files("dpcg") / "fixtures"))

for name in ("competing", "weak", "weak_alpha_positive"):
    spec = load_problem(fixtures / f"{name}.json")
    trace = run_hierarchy(spec.inclusion(validated=True, waived=False), spec.solver)
    cert = certify(trace, spec.alpha, spec.beta, spec.verify_tol)
    print(f"{name} (alpha={spec.alpha}, beta={spec.beta})")
    print("  " + "  ".join(f"{c:>12}" for c in TRACE_COLUMNS[:5]))
    for row in trace.rows:
        print("  " + "  ".join(f"{getattr(row, c):12.4g}" for c in TRACE_COLUMNS[:5]))
    reason = f" ({cert.weak_reason})" if cert.weak_reason else ""
    print(f"  generalized={cert.generalized} strong={cert.strongly_generalized} weak={cert.weak}{reason}")
