"""Command line entry point: ``dpcg {validate,constants,solve,verify} problem.json --out DIR``.

Exit codes: 0 generalized certificate achieved (or validation passed),
1 input error, 2 solved but certificate failed, 3 certificates rejected,
4 solver failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from .modular import estimate_embedding_constants
from .multifunctions import (
    CoercivityCertificate,
    coercivity_bound,
    delta_norms,
    validate_coercivity_condition,
    validate_growth,
    validate_sign,
)
from .problem import ProblemError, ProblemSpec, load_problem
from .solver import certify, run_hierarchy, trace_from_csv, trace_to_csv

__all__ = ["main", "run_validators", "EXIT_OK", "EXIT_INPUT", "EXIT_CERTIFICATE", "EXIT_REJECTED", "EXIT_SOLVER"]

EXIT_OK, EXIT_INPUT, EXIT_CERTIFICATE, EXIT_REJECTED, EXIT_SOLVER = 0, 1, 2, 3, 4

log = logging.getLogger("dpcg")


def jsonable(x):
    """Plain JSON data; NaN and infinities become null."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x) if math.isfinite(x) else None
    return x


def _dump(path: Path, data) -> None:
    path.write_text(json.dumps(jsonable(data), indent=2) + "\n")


def estimate_constants(spec: ProblemSpec):
    return estimate_embedding_constants(spec.hierarchy, spec.cfg, spec.embedding_iters, spec.seed)


def run_validators(spec: ProblemSpec, constants=None) -> dict:
    """Growth, sign and coercivity checks; ``passed`` gates the solve."""
    h1, h2, g1, g2 = spec.maps
    growth = validate_growth(h1, h2, g1, g2, spec.growth, spec.cfg, spec.mesh, spec.samples, spec.seed)
    sign = validate_sign(h1, h2, g1, g2, spec.sign, spec.cfg, spec.mesh, spec.samples, spec.seed)
    constants = constants or estimate_constants(spec)
    cc = CoercivityCertificate(
        constants.as_tuple(), spec.sign, spec.alpha, spec.beta, spec.epsilon, spec.safety_factor, spec.cfg,
        spec.mesh.measure, spec.mu_l1(),
    )
    check = validate_coercivity_condition(cc)
    bound = coercivity_bound(cc, delta_norms(spec.sign, spec.mesh))
    return {
        "passed": bool(growth.passed and sign.passed and check.passed),
        "growth": growth.to_dict(),
        "sign": sign.to_dict(),
        "embedding_constants": _constants_dict(constants),
        "coercivity_condition": check.to_dict(),
        "coercivity_bound": bound.to_dict(),
        "_objects": (growth, sign, check, bound, cc),
    }


def _constants_dict(c) -> dict:
    return {
        "lambda1": c.lambda1,
        "lambda2": c.lambda2,
        "lambda3": c.lambda3,
        "lambda4": c.lambda4,
        "lambda4_p3": c.lambda4_p3,
        "provenance": c.provenance,
    }


def _public(v: dict) -> dict:
    return {k: val for k, val in v.items() if not k.startswith("_")}


def _violation_text(report: dict) -> str:
    fv = report.get("first_violation")
    if fv:
        return f"{report['kind']} violation: map {fv['map']} sample {fv['sample']} point {fv.get('point')}"
    failed = [c["name"] for c in report.get("checks", []) if c["gating"] and not c["passed"]]
    if failed:
        return f"{report['kind']} exponent checks failed: {', '.join(failed)}"
    return f"{report['kind']}: " + "; ".join(report["notes"]) if report.get("notes") else ""


def _rejection_lines(v: dict) -> list:
    lines = [_violation_text(v[k]) or f"{k} certificate rejected" for k in ("growth", "sign") if not v[k]["passed"]]
    cc = v["coercivity_condition"]
    if not cc["passed"]:
        lines.append(f"coercivity condition fails: left sides {cc['lhs']} (need < 1)")
    return lines


def _report(spec: ProblemSpec, v: dict | None, trace=None, cert=None, status="") -> str:
    out = [f"problem: {spec.name or '<unnamed>'}", f"status: {status}", ""]
    out.append("certificate inputs (verbatim):")
    out.append(json.dumps(spec.raw["certificates"], indent=2))
    out.append(f"coefficients: alpha={spec.alpha!r} beta={spec.beta!r}")
    if v is not None:
        ec = v["embedding_constants"]
        cc = v["coercivity_condition"]
        s = spec.sign
        out += [
            "",
            f"growth certificate: {'pass' if v['growth']['passed'] else 'FAIL'}",
            f"sign certificate: {'pass' if v['sign']['passed'] else 'FAIL'}",
            f"embedding constants (finest level estimates): "
            + ", ".join(f"lambda{i}={ec[f'lambda{i}']:.6g}" for i in range(1, 5)),
            f"coercivity condition with safety factor {cc['safety_factor']}:",
        ]
        lam = [cc["safety_factor"] * ec[f"lambda{i}"] for i in range(1, 5)]
        for j in (0, 1):
            out.append(
                f"  j={j + 1}: {s.m4!r} + {s.m6!r} + ({s.m3!r} + {s.m5!r})*{lam[2 * j]:.6g}"
                f" + ({s.m9!r} + {s.m10!r})*{lam[2 * j + 1]:.6g} = {cc['lhs'][j]:.12g}"
                f" -> margin {cc['margins'][j]:.12g}"
            )
        b = v["coercivity_bound"]
        out.append(f"coercivity bound (eps={b['c_eps']}): A={b['A']:.6g} B={b['B']:.6g} C2={b['C2']:.6g}")
        out += _rejection_lines(v)
    if trace is not None:
        out += ["", "level  dofs  rho_n  pi_n  pi_prime_n  newton  outer"]
        for r in trace.rows:
            out.append(
                f"{r.level:5d} {r.dofs:5d}  {r.rho_n:.3e}  {r.pi_n:.3e}  {r.pi_prime_n:.3e}  {r.newton_iters}  {r.outer_iters}"
            )
        for f in trace.failures:
            out.append(f"level {f['level']} failed ({f['status']}): {f['message']}")
    if cert is not None:
        out += [
            "",
            f"generalized: {cert.generalized}",
            f"strongly generalized: {cert.strongly_generalized}",
            f"weak: {cert.weak}" + (f" ({cert.weak_reason})" if cert.weak_reason else ""),
        ]
        out += [f"  - {d}" for d in cert.diagnostics]
    return "\n".join(out) + "\n"


def _write_solution(path: Path, sol, space) -> None:
    pts = space.mesh.vertices
    lines = [f"# level {sol.level} free_dofs {sol.dofs}", "# " + " ".join(["x", "y"][: pts.shape[1]] + ["u", "v"])]
    for p, a, b in zip(pts, sol.u, sol.v):
        lines.append(" ".join("%.17g" % c for c in (*p, a, b)))
    path.write_text("\n".join(lines) + "\n")


def cmd_validate(spec, out: Path, args) -> int:
    v = run_validators(spec)
    _dump(out / "validation.json", {"certificates": spec.raw["certificates"], **_public(v)})
    for line in _rejection_lines(v):
        print(line)
    print("certificates " + ("accepted" if v["passed"] else "rejected"))
    return EXIT_OK if v["passed"] else EXIT_REJECTED


def cmd_constants(spec, out: Path, args) -> int:
    c = estimate_constants(spec)
    _dump(out / "constants.json", _constants_dict(c))
    for name in ("lambda1", "lambda2", "lambda3", "lambda4", "lambda4_p3"):
        levels = c.provenance[name]["levels"]
        sizes = ",".join(str(x["dofs"]) for x in levels)
        print(f"{name} = {getattr(c, name):.10g}  (dofs per level: {sizes})")
    return EXIT_OK


def cmd_solve(spec, out: Path, args) -> int:
    v = run_validators(spec)
    doc = {
        "problem": spec.name,
        "certificates": spec.raw["certificates"],
        "coefficients": {"alpha": spec.alpha, "beta": spec.beta},
        "levels": spec.levels,
        "seed": spec.seed,
        "certificates_waived": bool(args.waive_certificates),
        "validators": _public(v),
    }
    if not v["passed"] and not args.waive_certificates:
        doc["status"] = "certificates rejected"
        _dump(out / "certificate.json", doc)
        (out / "report.txt").write_text(_report(spec, v, status=doc["status"]))
        for line in _rejection_lines(v):
            print(line, file=sys.stderr)
        return EXIT_REJECTED
    problem = spec.inclusion(validated=v["passed"], waived=bool(args.waive_certificates))
    trace = run_hierarchy(problem, spec.solver)
    (out / "trace.csv").write_text(trace_to_csv(trace))
    for sol in trace.solutions:
        _write_solution(out / f"solution_{sol.level}.txt", sol, problem.space(sol.level))
    doc["failures"] = trace.failures
    if trace.failures or len(trace.rows) < 3:
        doc["status"] = "solver failure"
        _dump(out / "certificate.json", doc)
        (out / "report.txt").write_text(_report(spec, v, trace, status=doc["status"]))
        return EXIT_SOLVER
    cert = certify(trace, spec.alpha, spec.beta, spec.verify_tol)
    doc["solution_certificate"] = cert.to_dict()
    doc["status"] = "generalized" if cert.generalized else "certificate failed"
    _dump(out / "certificate.json", doc)
    (out / "report.txt").write_text(_report(spec, v, trace, cert, doc["status"]))
    print(f"generalized={cert.generalized} strongly_generalized={cert.strongly_generalized} weak={cert.weak}")
    return EXIT_OK if cert.generalized else EXIT_CERTIFICATE


def cmd_verify(spec, out: Path, args) -> int:
    path = Path(args.trace) if args.trace else out / "trace.csv"
    try:
        trace = trace_from_csv(path.read_text())
        cert = certify(trace, spec.alpha, spec.beta, spec.verify_tol)
    except OSError as err:
        print(f"error: cannot read trace {path}: {err.strerror}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT
    _dump(out / "verification.json", {"trace": str(path.name), "solution_certificate": cert.to_dict()})
    print(f"generalized={cert.generalized} strongly_generalized={cert.strongly_generalized} weak={cert.weak}")
    return EXIT_OK if cert.generalized else EXIT_CERTIFICATE


COMMANDS = {"validate": cmd_validate, "constants": cmd_constants, "solve": cmd_solve, "verify": cmd_verify}


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors, which is reserved for certificate failures here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="dpcg", description="Galerkin solver and certificates for double-phase inclusion systems.")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("problem", help="problem description (JSON)")
    ap.add_argument("--out", default=".", help="output directory (created if missing)")
    ap.add_argument("--waive-certificates", action="store_true", help="solve even if validators reject the certificates")
    ap.add_argument("--levels", type=int, help="number of hierarchy levels (>= 3)")
    ap.add_argument("--seed", type=int, help="seed for sampling validators and constant estimation")
    ap.add_argument("--trace", help="trace file for verify (default: OUT/trace.csv)")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        spec = load_problem(args.problem)
        if args.levels is not None:
            if args.levels < 3:
                raise ProblemError("--levels must be at least 3")
            spec.levels = args.levels
        if args.seed is not None:
            if args.seed < 0:
                raise ProblemError("--seed must be nonnegative")
            spec.seed = args.seed
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
    except (ProblemError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT
    return COMMANDS[args.command](spec, out, args)


if __name__ == "__main__":
    sys.exit(main())
