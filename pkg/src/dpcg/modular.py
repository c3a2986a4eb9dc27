"""Double-phase modulars, Luxemburg norms and embedding-constant estimates."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .mesh import FESpace, GalerkinHierarchy, Mesh, integrate_boundary2, integrate_domain, sample_field

__all__ = [
    "ExponentConfig",
    "ModularFunction",
    "EmbeddingEstimate",
    "EmbeddingConstants",
    "modular_integral",
    "luxemburg_norm",
    "lp_norm",
    "gradient_norm",
    "critical_exponents",
    "conjugate",
    "estimate_embedding_constant",
    "estimate_embedding_constants",
    "NORM_PAIRS",
]

log = logging.getLogger(__name__)

NORM_PAIRS = ("domain_U", "trace_U", "domain_V", "trace_V")


@dataclass(frozen=True)
class ExponentConfig:
    """Exponents ``p[i], q[i]`` and weights ``mu[i]`` of the four modulars.

    Index 0, 1 belong to the ``u`` equation (driving and competing parts),
    index 2, 3 to the ``v`` equation.  Weights are numbers, expression
    strings over ``z1, z2`` or callables of the point array.
    """

    p: tuple
    q: tuple
    mu: tuple = (0.0, 0.0, 0.0, 0.0)
    N: int = 1

    def __post_init__(self):
        if len(self.p) != 4 or len(self.q) != 4 or len(self.mu) != 4:
            raise ValueError("need exactly four p's, q's and mu's")
        object.__setattr__(self, "p", tuple(float(x) for x in self.p))
        object.__setattr__(self, "q", tuple(float(x) for x in self.q))
        object.__setattr__(self, "mu", tuple(self.mu))
        if any(x <= 1 for x in self.p + self.q):
            raise ValueError("all exponents must exceed 1")
        for j in (0, 2):
            if not self.p[j] > self.p[j + 1]:
                raise ValueError(f"need p{j + 1} > p{j + 2}")
            if not self.q[j] > self.q[j + 1]:
                raise ValueError(f"need q{j + 1} > q{j + 2}")

    @property
    def exponents_below_dimension(self) -> bool:
        """Whether all exponents lie in (1, N), so critical exponents exist."""
        return all(x < self.N for x in self.p + self.q)

    def check_weights(self, points: np.ndarray) -> None:
        """Check mu_i >= 0, finiteness and mu_{2j-1} >= mu_{2j} at ``points``."""
        mus = [sample_field(m, points) for m in self.mu]
        for i, m in enumerate(mus):
            if not np.all(np.isfinite(m)):
                raise ValueError(f"mu{i + 1} is not finite at every sample point")
            if np.any(m < 0):
                raise ValueError(f"mu{i + 1} is negative somewhere")
        for j in (0, 2):
            if np.any(mus[j] < mus[j + 1]):
                raise ValueError(f"need mu{j + 1} >= mu{j + 2} pointwise")

    def modular(self, i: int, mesh: Mesh) -> "ModularFunction":
        """Modular number ``i`` (1-based) with its weight sampled at the mesh quadrature points."""
        return ModularFunction(self.p[i - 1], self.q[i - 1], sample_field(self.mu[i - 1], mesh.qp_points))


@dataclass(frozen=True, eq=False)
class ModularFunction:
    """s -> |s|^p + mu(z) |s|^q with mu given as quadrature samples (or a constant)."""

    p: float
    q: float
    mu: np.ndarray | float = 0.0

    def __call__(self, s):
        s = np.abs(s)
        return s**self.p + self.mu * s**self.q


def _check_finite(w):
    w = np.asarray(w, dtype=float)
    if not np.all(np.isfinite(w)):
        raise ValueError("field has non-finite samples")
    return w


def modular_integral(w, g: ModularFunction, mesh: Mesh) -> float:
    """Quadrature value of int |w|^p + mu |w|^q over the mesh."""
    w = _check_finite(w)
    return integrate_domain(g(w), mesh)


def _modular_parts(w, g, mesh):
    a = np.abs(w)
    return integrate_domain(a**g.p, mesh), integrate_domain(g.mu * a**g.q, mesh)


def _luxemburg_from_parts(sp_, sq, p, q, tol, max_iter=400):
    if sp_ + sq == 0.0:
        return 0.0

    def m(z):
        return sp_ * z ** (-p) + sq * z ** (-q)

    lo = np.finfo(float).eps
    while m(lo) < 1.0:
        lo *= 0.5
    hi = 2.0 * (1.0 + sp_ + sq)
    while m(hi) >= 1.0:
        hi *= 2.0
    mid = 0.5 * (lo + hi)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        val = m(mid)
        if abs(val - 1.0) <= tol:
            return mid
        if val > 1.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 4 * np.spacing(hi):
            break
    return mid


def luxemburg_norm(w, g: ModularFunction, mesh: Mesh, tol: float = 1e-12) -> float:
    """Luxemburg norm by monotone bisection on zeta -> modular(w / zeta).

    The modular of ``w / zeta`` is ``zeta^-p * Sp + zeta^-q * Sq`` with the
    two integrals computed once, so the bisection itself is scalar.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    w = _check_finite(w)
    sp_, sq = _modular_parts(w, g, mesh)
    return _luxemburg_from_parts(sp_, sq, g.p, g.q, tol)


def lp_norm(w, p: float, mesh: Mesh, boundary: bool = False) -> float:
    w = _check_finite(w)
    integ = integrate_boundary2 if boundary else integrate_domain
    return integ(np.abs(w) ** p, mesh) ** (1.0 / p)


def gradient_norm(w, space: FESpace, g: ModularFunction, tol: float = 1e-12) -> float:
    """||w||_U: Luxemburg norm of |grad w| (g carries mu at quadrature points)."""
    grad = np.linalg.norm(space.cell_gradients(w), axis=1)
    vals = np.repeat(grad[:, None], space.mesh.qp_weights.shape[1], axis=1)
    return luxemburg_norm(vals, g, space.mesh, tol)


def conjugate(p: float) -> float:
    return math.inf if p == 1 else p / (p - 1.0)


def critical_exponents(p: float, N: int) -> tuple:
    """(Np/(N-p), (N-1)p/(N-p)) for 1 <= p < N."""
    if not (1 <= p < N):
        raise ValueError(f"critical exponents need 1 <= p < N, got p={p}, N={N}")
    return N * p / (N - p), (N - 1) * p / (N - p)


# -- embedding constants -------------------------------------------------------
@dataclass
class EmbeddingEstimate:
    value: float
    norm_pair: str
    exponent: float
    level: int
    dofs: int
    improved: bool = True
    state: np.ndarray | None = field(default=None, repr=False)


@dataclass
class EmbeddingConstants:
    lambda1: float
    lambda2: float
    lambda3: float
    lambda4: float
    provenance: dict = field(default_factory=dict)
    lambda4_p3: float | None = None

    def as_tuple(self):
        return (self.lambda1, self.lambda2, self.lambda3, self.lambda4)


class _Ratio:
    """||u||_{L^r(domain or trace)} / ||grad u||_G and its gradient on the free dofs."""

    def __init__(self, space: FESpace, r: float, g: ModularFunction, trace: bool):
        self.space, self.r, self.g, self.trace = space, r, g, trace
        m = space.mesh
        self.nq = m.qp_weights.shape[1]
        self.mu = np.broadcast_to(g.mu, m.qp_weights.shape)

    def __call__(self, x, want_grad=True):
        s = self.space
        m = s.mesh
        w = s.expand(x)
        r = self.r
        if self.trace:
            vals = s.boundary_values(w)
            S = integrate_boundary2(np.abs(vals) ** r, m)
        else:
            vals = s.values(w)
            S = integrate_domain(np.abs(vals) ** r, m)
        num = S ** (1.0 / r) if S > 0 else 0.0
        cg = s.cell_gradients(w)
        gm = np.linalg.norm(cg, axis=1)
        gq = np.repeat(gm[:, None], self.nq, axis=1)
        g = self.g
        sp_ = integrate_domain(gq**g.p, m)
        sq = integrate_domain(self.mu * gq**g.q, m)
        zeta = _luxemburg_from_parts(sp_, sq, g.p, g.q, 1e-14)
        if zeta == 0.0:
            return 0.0, None
        ratio = num / zeta
        if not want_grad:
            return ratio, None
        # d num / d u_k = S^(1/r - 1) int sign(u)|u|^(r-1) phi_k
        pw = np.sign(vals) * np.abs(vals) ** (r - 1)
        dS = s.boundary_load(pw) if self.trace else s.load(pw)
        dnum = (S ** (1.0 / r - 1.0) if S > 0 else 0.0) * dS
        # implicit differentiation of the modular equation for zeta
        t = gq / zeta
        with np.errstate(divide="ignore", invalid="ignore"):
            w1 = np.where(t > 0, g.p * t ** (g.p - 2) + g.q * self.mu * t ** (g.q - 2), 0.0)
        denom = integrate_domain(g.p * t**g.p + g.q * self.mu * t**g.q, m)
        cw = np.einsum("cq->c", m.qp_weights * w1) / zeta  # per-cell weight
        local = np.einsum("c,cd,cld->cl", cw, cg, m.grad_phi)
        dzeta = np.bincount(m.cells.ravel(), local.ravel(), minlength=m.num_vertices) / denom
        grad = s.restrict((dnum * zeta - num * dzeta) / zeta**2)
        return ratio, grad


def _ascent(fun: _Ratio, x0, iters, rel_tol=1e-13):
    space = fun.space
    lu = space.stiffness_lu
    x = np.asarray(x0, dtype=float)
    val, grad = fun(x)
    if grad is None:
        return val, x, False
    start = val
    step = None
    stall = 0
    for _ in range(iters):
        d = lu.solve(grad)
        dn = np.sqrt(max(d @ space.stiffness @ d, 1e-300))
        xn = np.sqrt(max(x @ space.stiffness @ x, 1e-300))
        if step is None:
            step = 0.5 * xn / dn
        accepted = False
        for _ in range(40):
            trial = x + step * d
            tv, _ = fun(trial, want_grad=False)
            if tv > val:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
        gain = (tv - val) / max(abs(val), 1e-300)
        x = trial / np.sqrt(max(trial @ space.stiffness @ trial, 1e-300))
        val, grad = fun(x)
        step = 2.0 * step * xn / np.sqrt(max(x @ space.stiffness @ x, 1e-300))
        stall = stall + 1 if gain < rel_tol else 0
        if stall >= 3 or grad is None:
            break
    return val, x, val > start


def _norm_pair_setup(norm_pair, cfg: ExponentConfig, mesh, exponent):
    if norm_pair not in NORM_PAIRS:
        raise ValueError(f"norm_pair must be one of {NORM_PAIRS}")
    on_u = norm_pair.endswith("_U")
    trace = norm_pair.startswith("trace")
    g = cfg.modular(1 if on_u else 3, mesh)
    if exponent is None:
        # lambda_4 is stated with the p4 trace norm
        exponent = {"domain_U": cfg.p[0], "trace_U": cfg.p[0], "domain_V": cfg.p[2], "trace_V": cfg.p[3]}[norm_pair]
    return g, trace, exponent


def estimate_embedding_constant(
    space: FESpace,
    norm_pair: str,
    cfg: ExponentConfig,
    iters: int = 200,
    seed: int = 0,
    exponent: float | None = None,
    extra_starts=(),
) -> EmbeddingEstimate:
    """Lower estimate of an embedding constant by maximizing the norm ratio over ``space``.

    The ascent is a stiffness-preconditioned gradient method with the iterate
    renormalized after every step, restarted from the constant-one
    interpolant, three random fields and any ``extra_starts`` (free-dof
    vectors, e.g. a prolonged coarse optimum).  The result is a supremum
    over a subspace and hence never exceeds the true constant.
    """
    mesh = space.mesh
    g, trace, r = _norm_pair_setup(norm_pair, cfg, mesh, exponent)
    if trace and len(mesh.contact_facets) == 0:
        raise ValueError("trace constants need a nonempty contact boundary")
    fun = _Ratio(space, r, g, trace)
    rng = np.random.default_rng(seed)
    starts = [np.ones(space.dof_count)] + [rng.standard_normal(space.dof_count) for _ in range(3)]
    starts += [np.asarray(s, dtype=float) for s in extra_starts]
    best, best_x, any_improved = -np.inf, None, False
    for x0 in starts:
        val, x, improved = _ascent(fun, x0, iters)
        any_improved |= improved
        if val > best:
            best, best_x = val, x
    if not any_improved:
        log.warning("embedding ascent made no progress for %s on level %d", norm_pair, mesh.level)
    return EmbeddingEstimate(float(best), norm_pair, r, mesh.level, space.dof_count, bool(any_improved), best_x)


def estimate_embedding_constants(
    hierarchy: GalerkinHierarchy, cfg: ExponentConfig, iters: int = 200, seed: int = 0
) -> EmbeddingConstants:
    """Estimate lambda_1..lambda_4 on every level, warm-starting from the coarser optimum.

    The finest-level values are returned; ``provenance`` records the
    estimate and space size per level.  The p3-scaled variant of the
    lambda_4 trace constant is reported alongside.
    """
    jobs = [(k, None) for k in NORM_PAIRS] + [("trace_V", cfg.p[2])]
    names = ["lambda1", "lambda2", "lambda3", "lambda4", "lambda4_p3"]
    results, provenance = {}, {}
    for name, (pair, expo) in zip(names, jobs):
        prev = None
        history = []
        for level, space in enumerate(hierarchy.spaces):
            extra = []
            if prev is not None:
                full = hierarchy.prolongate(prev.state, level - 1, level)
                extra.append(space.restrict(full))
            est = estimate_embedding_constant(space, pair, cfg, iters, seed + level, expo, extra)
            history.append({"level": level, "dofs": space.dof_count, "value": est.value, "improved": est.improved})
            prev = est
        results[name] = prev.value
        provenance[name] = {"norm_pair": pair, "exponent": prev.exponent, "levels": history}
    return EmbeddingConstants(
        results["lambda1"], results["lambda2"], results["lambda3"], results["lambda4"], provenance, results["lambda4_p3"]
    )
