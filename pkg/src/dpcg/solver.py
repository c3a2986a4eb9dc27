"""Galerkin solution of the discrete inclusion and the solution-certificate surrogates.

At each level the discrete problem is: find (u, v) in U_h x V_h and
selections eta, xi of the interval maps such that

    D(u, v) + (xi1, xi2) - (eta1, eta2) = 0   tested on U_h x V_h.

Anchor selections are frozen in an outer fixed-point loop.  Inside it,
damped semismooth Newton solves the equation whose selections are the
projections of the anchor onto the intervals at the current state.  The
competing coefficients are switched on by continuation.
"""
from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .mesh import FESpace, GalerkinHierarchy, sample_field
from .modular import ExponentConfig
from .multifunctions import (
    MIDPOINT,
    NEAREST,
    GrowthCertificate,
    IntervalMultifunction,
    Selections,
    SignCertificate,
    _env,
    state_at_quadrature,
    superpose,
)
from .operators import CompetingPair, DoublePhaseFlux, assemble_jacobian_D, assemble_residual_D, operator_vector

__all__ = [
    "InclusionProblem",
    "SolverConfig",
    "LevelSolution",
    "TraceRow",
    "GalerkinTrace",
    "SolutionCertificate",
    "solve_level",
    "run_hierarchy",
    "verify_generalized",
    "verify_strong",
    "verify_weak_solution",
    "certify",
    "trace_to_csv",
    "trace_from_csv",
    "TRACE_COLUMNS",
    "WEAK_GATE_REASON",
]

log = logging.getLogger(__name__)

WEAK_GATE_REASON = "competing coefficients not both negative"


@dataclass
class InclusionProblem:
    """Exponents, competing coefficients, interval maps and certificates on a hierarchy."""

    cfg: ExponentConfig
    h1: IntervalMultifunction
    h2: IntervalMultifunction
    g1: IntervalMultifunction
    g2: IntervalMultifunction
    hierarchy: GalerkinHierarchy
    alpha: float = 0.0
    beta: float = 0.0
    growth: GrowthCertificate | None = None
    sign: SignCertificate | None = None
    certificates_validated: bool = False
    certificates_waived: bool = False
    _fluxes: dict = field(default_factory=dict, repr=False)

    @property
    def certificate_status(self) -> str:
        if self.certificates_validated:
            return "validated"
        return "waived" if self.certificates_waived else "unchecked"

    def space(self, level: int) -> FESpace:
        return self.hierarchy.spaces[level]

    def fluxes(self, level: int, epsilon_reg: float = 0.0):
        key = (level, epsilon_reg)
        if key not in self._fluxes:
            mesh = self.space(level).mesh
            mus = [sample_field(m, mesh.qp_points) for m in self.cfg.mu]
            self._fluxes[key] = [
                DoublePhaseFlux(self.cfg.p[i], self.cfg.q[i], mus[i], epsilon_reg) for i in range(4)
            ]
        return self._fluxes[key]

    def pairs(self, level: int, t: float = 1.0, epsilon_reg: float = 0.0):
        """Competing pairs for u and v with coefficients t * alpha and t * beta."""
        f = self.fluxes(level, epsilon_reg)
        return CompetingPair(f[0], f[1], t * self.alpha), CompetingPair(f[2], f[3], t * self.beta)

    def select(self, level, u, v, prev: Selections | None = None) -> Selections:
        strategy = MIDPOINT if prev is None else NEAREST
        return superpose(self.h1, self.h2, self.g1, self.g2, u, v, self.space(level), strategy, prev)


@dataclass
class SolverConfig:
    newton_tol: float = 1e-10
    max_newton: int = 60
    max_outer: int = 50
    damping: float = 0.5
    homotopy_steps: int = 4
    epsilon_reg: float = 0.0
    trust_radius: float | None = None
    max_backtracks: int = 40

    def __post_init__(self):
        if not (0 < self.damping < 1):
            raise ValueError("damping must lie in (0, 1)")
        if self.newton_tol <= 0 or self.max_newton < 1 or self.max_outer < 1 or self.homotopy_steps < 1:
            raise ValueError("tolerances and iteration caps must be positive")
        if self.epsilon_reg < 0:
            raise ValueError("epsilon_reg must be nonnegative")
        if self.trust_radius is not None and self.trust_radius <= 0:
            raise ValueError("trust_radius must be positive")


@dataclass
class LevelSolution:
    level: int
    dofs: int
    u: np.ndarray
    v: np.ndarray
    selections: Selections | None
    residual: float
    newton_iters: int
    outer_iters: int
    status: str = "converged"
    message: str = ""

    @property
    def converged(self) -> bool:
        return self.status == "converged"


# -- residuals --------------------------------------------------------------------
def full_residuals(problem: InclusionProblem, level: int, u, v, sel: Selections, t=1.0, epsilon_reg=0.0,
                   with_selections=True):
    """Full nodal residual vectors (u and v components) of the level equation."""
    s = problem.space(level)
    u, v = s.expand(u), s.expand(v)
    pu, pv = problem.pairs(level, t, epsilon_reg)
    ru = operator_vector(u, pu, s)
    rv = operator_vector(v, pv, s)
    if with_selections:
        ru = ru + s.boundary_load(sel.xi1) - s.load(sel.eta1)
        rv = rv + s.boundary_load(sel.xi2) - s.load(sel.eta2)
    return ru, rv


def _block_dual(space: FESpace, r: np.ndarray) -> float:
    n = space.dof_count
    return math.hypot(space.dual_norm(r[:n]), space.dual_norm(r[n:]))


def _residual(problem, level, x, anchor, t, eps):
    """Residual with the selections re-projected from ``anchor`` at state ``x``."""
    s = problem.space(level)
    n = s.dof_count
    sel = problem.select(level, x[:n], x[n:], anchor)
    pu, pv = problem.pairs(level, t, eps)
    return assemble_residual_D(x[:n], x[n:], pu, pv, s) + sel.boundary_load - sel.domain_load, sel


def _raw_bounds(h: IntervalMultifunction, z, *args):
    env = _env(z, *args) if len(args) == 4 else _env(z, args[0], args[1], 0.0, 0.0)
    shape = env["r1"].shape
    lo = np.broadcast_to(np.asarray(h.lower(env), dtype=float), shape)
    hi = np.broadcast_to(np.asarray(h.upper(env), dtype=float), shape)
    return lo, hi


def _selection_partials(h, z, args, anchor, lo, hi):
    """Central-difference partials of the projected selection clip(anchor, lo, hi)."""
    on_hi = anchor >= hi
    on_lo = (anchor <= lo) & ~on_hi
    if not (on_hi.any() or on_lo.any()):
        return [np.zeros_like(lo)] * len(args)
    out = []
    for i, a in enumerate(args):
        step = 1e-7 * np.maximum(1.0, np.abs(a))
        up, down = list(args), list(args)
        up[i] = a + step
        # gradient magnitudes stay nonnegative
        down[i] = np.maximum(a - step, 0.0) if i >= 2 else a - step
        lp, hp = _raw_bounds(h, z, *up)
        lm, hm = _raw_bounds(h, z, *down)
        d = up[i] - down[i]
        out.append(np.where(on_hi, (hp - hm) / d, np.where(on_lo, (lp - lm) / d, 0.0)))
    return out


def _assemble(space: FESpace, conn, local) -> sp.csr_matrix:
    nloc = conn.shape[1]
    rows = np.repeat(conn, nloc, axis=1).ravel()
    cols = np.tile(conn, (1, nloc)).ravel()
    N = space.num_nodes
    full = sp.csr_matrix((local.ravel(), (rows, cols)), shape=(N, N))
    return full[space.free_dofs][:, space.free_dofs]


def _selection_jacobian(problem, level, x, anchor: Selections) -> sp.csr_matrix:
    """Derivative of (boundary load - domain load) of the projected selections."""
    s = problem.space(level)
    m = s.mesh
    n = s.dof_count
    u, v = s.expand(x[:n]), s.expand(x[n:])
    r1, r2, n1, n2 = state_at_quadrature(u, v, s)
    # unit gradient directions per cell, zero where the gradient vanishes
    dirs = []
    for w in (u, v):
        g = s.cell_gradients(w)
        nrm = np.linalg.norm(g, axis=1)
        unit = np.divide(g, nrm[:, None], out=np.zeros_like(g), where=nrm[:, None] > 0)
        dirs.append(np.einsum("cd,cjd->cj", unit, m.grad_phi))
    mass = np.einsum("cq,qk,qj->cqkj", m.qp_weights, m.phi, m.phi)
    blocks = [[None, None], [None, None]]
    for row, (h, key) in enumerate(((problem.h1, "eta1"), (problem.h2, "eta2"))):
        lo, hi = _raw_bounds(h, m.qp_points, r1, r2, n1, n2)
        d = _selection_partials(h, m.qp_points, [r1, r2, n1, n2], anchor.values[key], lo, hi)
        for col in (0, 1):
            local = np.einsum("cq,cqkj->ckj", d[col], mass)
            local += np.einsum("cq,cq,qk,cj->ckj", d[col + 2], m.qp_weights, m.phi, dirs[col])
            blocks[row][col] = -_assemble(s, m.cells, local)
    if len(m.contact_facets):
        b1, b2 = s.boundary_values(u), s.boundary_values(v)
        bmass = np.einsum("cq,qk,qj->cqkj", m.bq_weights, m.bphi, m.bphi)
        for row, (g, key) in enumerate(((problem.g1, "xi1"), (problem.g2, "xi2"))):
            lo, hi = _raw_bounds(g, m.bq_points, b1, b2)
            d = _selection_partials(g, m.bq_points, [b1, b2], anchor.values[key], lo, hi)
            for col in (0, 1):
                blocks[row][col] = blocks[row][col] + _assemble(
                    s, m.contact_facets, np.einsum("cq,cqkj->ckj", d[col], bmass)
                )
    return sp.bmat(blocks, format="csr")


def _newton(problem, level, x, anchor, t, cfg: SolverConfig):
    """Damped semismooth Newton; returns (x, selections, iterations, status).

    The selections are the projection of the frozen ``anchor`` selections
    onto the intervals at the current state, differentiated where the
    projection sits on a bound.
    """
    s = problem.space(level)
    n = s.dof_count
    eps = cfg.epsilon_reg
    K = sp.block_diag([s.stiffness, s.stiffness], format="csc")
    target = 0.1 * cfg.newton_tol
    r, sel = _residual(problem, level, x, anchor, t, eps)
    nr = np.linalg.norm(r)
    for it in range(1, cfg.max_newton + 1):
        if _block_dual(s, r) <= target:
            return x, sel, it - 1, "converged"
        pu, pv = problem.pairs(level, t, eps)
        J = (assemble_jacobian_D(x[:n], x[n:], pu, pv, s) + _selection_jacobian(problem, level, x, anchor)).tocsc()
        scale = float(abs(J).max()) or 1.0
        accepted = False
        # plain Newton first, then increasingly regularized (Levenberg-Marquardt) steps
        for tau in (0.0, 1e-10, 1e-8, 1e-6, 1e-4, 1e-2, 1.0):
            A = J if tau == 0.0 else (J + tau * scale * K).tocsc()
            try:
                d = spla.splu(A).solve(-r)
            except RuntimeError:
                continue
            if not np.all(np.isfinite(d)):
                continue
            if cfg.trust_radius is not None:
                en = math.sqrt(max(d[:n] @ (s.stiffness @ d[:n]) + d[n:] @ (s.stiffness @ d[n:]), 0.0))
                if en > cfg.trust_radius:
                    d *= cfg.trust_radius / en
            step = 1.0
            for _ in range(cfg.max_backtracks):
                trial = x + step * d
                rt, st = _residual(problem, level, trial, anchor, t, eps)
                nt = np.linalg.norm(rt)
                if np.isfinite(nt) and nt < nr:
                    accepted = True
                    break
                step *= cfg.damping
            if accepted:
                break
        if not accepted:
            status = "converged" if _block_dual(s, r) <= cfg.newton_tol else "newton_stagnation"
            return x, sel, it - 1, status
        x, r, nr, sel = trial, rt, nt, st
    status = "converged" if _block_dual(s, r) <= cfg.newton_tol else "newton_stagnation"
    return x, sel, cfg.max_newton, status


def _initial_state(problem: InclusionProblem, level: int) -> np.ndarray:
    """Solution of the linear (p = 2, mu = 0) problem with midpoint selections at zero."""
    s = problem.space(level)
    n = s.dof_count
    zero = np.zeros(n)
    sel = problem.select(level, zero, zero)
    rhs = sel.domain_load - sel.boundary_load
    lu = s.stiffness_lu
    return np.concatenate([lu.solve(rhs[:n]), lu.solve(rhs[n:])])


def solve_level(problem: InclusionProblem, level: int, warm_start=None, cfg: SolverConfig | None = None
                ) -> LevelSolution:
    """Solve the inclusion on one level.

    Outer loop: anchor selections are frozen (midpoint on the first pass,
    then the previous selections).  Inner loop: damped semismooth Newton
    on the equation whose selections are the projections of the anchor
    onto the intervals at the current state.  The outer loop stops when the
    residual dual norm plus the selection drift is below ``newton_tol``.
    The competing coefficients are scaled by k / homotopy_steps,
    k = 1..steps, each stage warm-starting the next.  ``warm_start`` is a
    pair of full or free vectors (u, v).
    """
    cfg = cfg or SolverConfig()
    if not 0 <= level < len(problem.hierarchy):
        raise ValueError(f"level {level} outside the hierarchy")
    if not (problem.certificates_validated or problem.certificates_waived):
        raise ValueError("certificates must be validated or explicitly waived before solving")
    s = problem.space(level)
    n = s.dof_count
    if warm_start is None:
        x = _initial_state(problem, level)
    else:
        x = np.concatenate([s.restrict(s.expand(warm_start[0])), s.restrict(s.expand(warm_start[1]))])
    steps = 1 if (problem.alpha == 0 and problem.beta == 0) else cfg.homotopy_steps
    anchor = None
    newton_total = outer_total = 0
    residual = math.inf
    for k in range(1, steps + 1):
        t = k / steps
        anchor = problem.select(level, x[:n], x[n:], anchor)
        done = False
        for _ in range(cfg.max_outer):
            outer_total += 1
            x, sel, its, status = _newton(problem, level, x, anchor, t, cfg)
            newton_total += its
            if status != "converged":
                r, _ = _residual(problem, level, x, anchor, t, cfg.epsilon_reg)
                return LevelSolution(level, n, s.expand(x[:n]), s.expand(x[n:]), sel, _block_dual(s, r),
                                     newton_total, outer_total, status,
                                     f"Newton did not converge at homotopy stage {k}/{steps}")
            drift = sel.drift(anchor)
            anchor = sel
            r, _ = _residual(problem, level, x, anchor, t, cfg.epsilon_reg)
            residual = _block_dual(s, r)
            if residual + drift < cfg.newton_tol:
                done = True
                break
        if not done:
            return LevelSolution(level, n, s.expand(x[:n]), s.expand(x[n:]), anchor, residual, newton_total,
                                 outer_total, "selection_cycling",
                                 f"selections did not settle within {cfg.max_outer} outer iterations")
    if not anchor.all_members:
        raise AssertionError("a selection left its interval")
    return LevelSolution(level, n, s.expand(x[:n]), s.expand(x[n:]), anchor, residual, newton_total, outer_total)


# -- trace -----------------------------------------------------------------------
TRACE_COLUMNS = (
    "level",
    "dofs",
    "rho_n",
    "pi_n",
    "pi_prime_n",
    "newton_iters",
    "outer_iters",
    "nodal_diff",
    "fine_residual",
    "membership",
)


@dataclass
class TraceRow:
    level: int
    dofs: int
    rho_n: float
    pi_n: float
    pi_prime_n: float
    newton_iters: int
    outer_iters: int
    nodal_diff: float = math.nan
    fine_residual: float = math.nan
    membership: float = 1.0


@dataclass
class GalerkinTrace:
    rows: list
    solutions: list = field(default_factory=list, repr=False)
    failures: list = field(default_factory=list)

    @property
    def levels(self) -> int:
        return len(self.rows)

    def column(self, name) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows], dtype=float)


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return "%.17g" % float(x)


def trace_to_csv(trace: GalerkinTrace) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRACE_COLUMNS)
    for r in trace.rows:
        w.writerow([_fmt(getattr(r, c)) for c in TRACE_COLUMNS])
    return buf.getvalue()


def trace_from_csv(text: str) -> GalerkinTrace:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != TRACE_COLUMNS:
        raise ValueError(f"trace header must be {','.join(TRACE_COLUMNS)}")
    out = []
    for raw in rows[1:]:
        if not raw:
            continue
        if len(raw) != len(TRACE_COLUMNS):
            raise ValueError(f"trace row has {len(raw)} fields, expected {len(TRACE_COLUMNS)}")
        vals = dict(zip(TRACE_COLUMNS, raw))
        out.append(
            TraceRow(
                int(vals["level"]), int(vals["dofs"]), float(vals["rho_n"]), float(vals["pi_n"]),
                float(vals["pi_prime_n"]), int(vals["newton_iters"]), int(vals["outer_iters"]),
                float(vals["nodal_diff"]), float(vals["fine_residual"]), float(vals["membership"]),
            )
        )
    return GalerkinTrace(out)


def _coarse_test_residual(problem, level, sol: LevelSolution) -> float:
    """Dual norm of the level residual against the level-0 test functions."""
    ru, rv = full_residuals(problem, level, sol.u, sol.v, sol.selections)
    P = problem.hierarchy.transfer_matrix(0, level)
    s0 = problem.space(0)
    return math.hypot(s0.dual_norm(s0.restrict(P.T @ ru)), s0.dual_norm(s0.restrict(P.T @ rv)))


def _fine_pairings(problem, level, sol: LevelSolution, ref: LevelSolution):
    """pi and pi' of the prolonged level state against the finest reference state."""
    H = problem.hierarchy
    L = ref.level
    s = problem.space(L)
    U = H.prolongate(sol.u, level, L)
    V = H.prolongate(sol.v, level, L)
    sel = problem.select(L, U, V, ref.selections)
    ru, rv = full_residuals(problem, L, U, V, sel)
    du, dv = s.restrict(U - ref.u), s.restrict(V - ref.v)
    pi_full = float(s.restrict(ru) @ du + s.restrict(rv) @ dv)
    ou, ov = full_residuals(problem, L, U, V, sel, with_selections=False)
    pi_strong = float(s.restrict(ou) @ du + s.restrict(ov) @ dv)
    return pi_full, pi_strong


def run_hierarchy(problem: InclusionProblem, cfg: SolverConfig | None = None) -> GalerkinTrace:
    """Solve every level with prolonged warm starts and collect the certificate evidence.

    rho_n tests the level residual against the coarsest space; pi_n and
    pi'_n pair the residual (with and without selections) of the prolonged
    level state on the finest mesh with its difference from the finest
    solution.  A failed level ends the run; completed levels are kept.
    """
    cfg = cfg or SolverConfig()
    H = problem.hierarchy
    if len(H) < 3:
        raise ValueError("run_hierarchy needs at least 3 levels")
    sols, failures = [], []
    warm = None
    for level in range(len(H)):
        sol = solve_level(problem, level, warm, cfg)
        if not sol.converged:
            failures.append({"level": level, "status": sol.status, "message": sol.message})
            log.warning("level %d failed: %s", level, sol.message)
            break
        sols.append(sol)
        if level + 1 < len(H):
            warm = (H.prolongate(sol.u, level, level + 1), H.prolongate(sol.v, level, level + 1))
    rows = []
    ref = sols[-1] if sols else None
    for k, sol in enumerate(sols):
        pi, pi_s = _fine_pairings(problem, k, sol, ref)
        if k == 0:
            nd = math.nan
        else:
            prev = sols[k - 1]
            nd = max(
                float(np.max(np.abs(H.prolongate(prev.u, k - 1, k) - sol.u))),
                float(np.max(np.abs(H.prolongate(prev.v, k - 1, k) - sol.v))),
            )
        rows.append(
            TraceRow(k, sol.dofs, _coarse_test_residual(problem, k, sol), pi, pi_s, sol.newton_iters,
                     sol.outer_iters, nd, sol.residual, min(sol.selections.membership().values()))
        )
    return GalerkinTrace(rows, sols, failures)


# -- certificates ----------------------------------------------------------------
@dataclass
class SolutionCertificate:
    generalized: bool = False
    strongly_generalized: bool = False
    weak: bool = False
    tol: float = 1e-6
    evidence: dict = field(default_factory=dict)
    diagnostics: list = field(default_factory=list)
    weak_reason: str = ""

    def to_dict(self):
        return asdict(self)

    @property
    def monotone(self) -> bool:
        return (not self.weak or self.strongly_generalized) and (not self.strongly_generalized or self.generalized)


def _nonincreasing(x, floor):
    return all(b <= a + floor for a, b in zip(x[:-1], x[1:]))


def _rows(trace):
    return trace.rows if isinstance(trace, GalerkinTrace) else list(trace)


def verify_generalized(trace, tol: float) -> SolutionCertificate:
    """Generalized-solution surrogates on a trace of at least 3 levels.

    (i) nodal differences of consecutive prolonged solutions nonincreasing;
    (ii) rho at the final level <= tol and nonincreasing over the last 3
    levels; (iii) |pi| <= tol at the final level.  Monotonicity is judged
    up to a noise floor of 0.01 tol.
    """
    rows = _rows(trace)
    if len(rows) < 3:
        raise ValueError("verification needs at least 3 completed levels")
    floor = 0.01 * tol
    rho = [r.rho_n for r in rows]
    pi = [r.pi_n for r in rows]
    nd = [r.nodal_diff for r in rows[1:]]
    s1 = all(math.isfinite(x) for x in nd) and _nonincreasing(nd, floor)
    s2 = rho[-1] <= tol and _nonincreasing(rho[-3:], floor)
    s3 = abs(pi[-1]) <= tol
    cert = SolutionCertificate(tol=tol)
    cert.evidence = {
        "rho": rho,
        "pi": pi,
        "pi_prime": [r.pi_prime_n for r in rows],
        "nodal_diff": [r.nodal_diff for r in rows],
        "fine_residual": [r.fine_residual for r in rows],
        "membership": [r.membership for r in rows],
        "surrogate_i": s1,
        "surrogate_ii": s2,
        "surrogate_iii": s3,
    }
    for ok, msg in ((s1, "nodal differences are not decreasing"), (s2, "coarse-test residual not below tol or not decreasing"),
                    (s3, "final residual pairing above tol")):
        if not ok:
            cert.diagnostics.append(msg)
    cert.generalized = bool(s1 and s2 and s3)
    return cert


def verify_strong(trace, tol: float, cert: SolutionCertificate | None = None) -> SolutionCertificate:
    cert = cert or verify_generalized(trace, tol)
    rows = _rows(trace)
    ok = abs(rows[-1].pi_prime_n) <= tol
    cert.evidence["surrogate_iii_prime"] = ok
    if not ok:
        cert.diagnostics.append("final driving-operator pairing above tol")
    cert.strongly_generalized = bool(cert.generalized and ok)
    return cert


def verify_weak_solution(coefficients, trace, tol: float, cert: SolutionCertificate | None = None
                         ) -> SolutionCertificate:
    """Weak flag: gated on max(alpha, beta) < 0, then finest residual and membership.

    ``coefficients`` is an ``InclusionProblem`` or an (alpha, beta) pair.
    The flag also requires the strong certificate so flags stay nested.
    """
    if isinstance(coefficients, InclusionProblem):
        alpha, beta = coefficients.alpha, coefficients.beta
    else:
        alpha, beta = coefficients
    cert = cert or verify_strong(trace, tol)
    rows = _rows(trace)
    last = rows[-1]
    cert.evidence["finest_residual"] = last.fine_residual
    cert.evidence["finest_membership"] = last.membership
    if not max(alpha, beta) < 0:
        cert.weak, cert.weak_reason = False, WEAK_GATE_REASON
    elif not last.fine_residual <= tol:
        cert.weak, cert.weak_reason = False, f"finest residual {last.fine_residual!r} above tol"
    elif last.membership != 1.0:
        cert.weak, cert.weak_reason = False, "selections outside their intervals"
    elif not cert.strongly_generalized:
        cert.weak, cert.weak_reason = False, "strongly generalized certificate not achieved"
    else:
        cert.weak, cert.weak_reason = True, ""
    return cert


def certify(trace, alpha: float, beta: float, tol: float) -> SolutionCertificate:
    """All three flags from a trace; used by both solving and re-verification."""
    cert = verify_generalized(trace, tol)
    verify_strong(trace, tol, cert)
    verify_weak_solution((alpha, beta), trace, tol, cert)
    return cert
