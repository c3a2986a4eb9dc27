"""Interval-valued reactions and boundary maps, selections, and hypothesis validators.

Convex compact subsets of the real line are closed bounded intervals, so a
multifunction is stored as a pair of bound functions.  Domain maps see
``(z, r1, r2, n1, n2)`` with ``n1 = |grad u|``, ``n2 = |grad v|``; boundary
maps see ``(z, r1, r2)``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

from . import expression as ex
from .mesh import FESpace, Mesh, integrate_boundary2, integrate_domain, sample_field
from .modular import ExponentConfig, conjugate, critical_exponents, gradient_norm

__all__ = [
    "CertificateViolation",
    "IntervalMultifunction",
    "Selections",
    "GrowthCertificate",
    "SignCertificate",
    "CoercivityCertificate",
    "ValidationReport",
    "CoercivityCheck",
    "CoercivityBound",
    "evaluate_interval",
    "select",
    "superpose",
    "validate_growth",
    "validate_sign",
    "validate_coercivity_condition",
    "coercivity_bound",
    "young_constant",
    "delta_norms",
    "pairing_lower_bound",
]

MIDPOINT = "midpoint"
NEAREST = "nearest"


class CertificateViolation(ValueError):
    """A bound function pair with lower > upper, or a non-finite bound."""


def _env(z, r1, r2, n1, n2):
    z = np.asarray(z, dtype=float)
    shape = np.broadcast_shapes(z.shape[:-1], np.shape(r1), np.shape(r2), np.shape(n1), np.shape(n2))
    z2 = z[..., 1] if z.shape[-1] > 1 else np.zeros(z.shape[:-1])
    vals = dict(z1=z[..., 0], z2=z2, r1=r1, r2=r2, n1=n1, n2=n2)
    return {k: np.broadcast_to(np.asarray(v, dtype=float), shape) for k, v in vals.items()}


@dataclass(frozen=True, eq=False)
class IntervalMultifunction:
    """(z, r1, r2[, n1, n2]) -> [lower, upper].

    ``lower`` and ``upper`` are callables taking a dict of equally shaped
    arrays keyed ``z1, z2, r1, r2, n1, n2``.  Upper semicontinuity is a
    declared property only.
    """

    lower: Callable
    upper: Callable
    kind: str = "domain"
    continuity: str = "upper semicontinuous (declared)"
    text: tuple | None = None

    @classmethod
    def from_expressions(cls, lower: str, upper: str, kind: str = "domain") -> "IntervalMultifunction":
        lo, hi = ex.parse(lower), ex.parse(upper)
        if kind == "boundary":
            bad = (ex.free_variables(lo) | ex.free_variables(hi)) & {"n1", "n2"}
            if bad:
                raise ValueError(f"boundary maps cannot depend on gradients: {sorted(bad)}")
        return cls(lambda env: ex.evaluate(lo, env), lambda env: ex.evaluate(hi, env), kind, text=(lower, upper))

    @classmethod
    def constant(cls, lo: float, hi: float, kind: str = "domain") -> "IntervalMultifunction":
        return cls.from_expressions(repr(float(lo)), repr(float(hi)), kind)

    @classmethod
    def zero(cls, kind: str = "domain") -> "IntervalMultifunction":
        return cls.from_expressions("0", "0", kind)

    def __call__(self, z, r1, r2, n1=0.0, n2=0.0):
        return evaluate_interval(self, z, r1, r2, n1, n2)


def evaluate_interval(h: IntervalMultifunction, z, r1, r2, n1=0.0, n2=0.0):
    """[lower, upper] at the given points (arrays broadcast together)."""
    env = _env(z, r1, r2, n1, n2)
    shape = env["r1"].shape
    lo = np.broadcast_to(np.asarray(h.lower(env), dtype=float), shape)
    hi = np.broadcast_to(np.asarray(h.upper(env), dtype=float), shape)
    if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
        raise CertificateViolation("interval bound is not finite")
    bad = lo > hi
    if np.any(bad):
        k = int(np.flatnonzero(bad.ravel())[0])
        raise CertificateViolation(
            f"lower bound exceeds upper bound ({lo.ravel()[k]!r} > {hi.ravel()[k]!r}) at sample {k}"
        )
    return lo, hi


def select(interval, strategy: str = MIDPOINT, prev=None):
    """Midpoint of the interval, or the projection of ``prev`` onto it."""
    lo, hi = interval
    if strategy == MIDPOINT:
        return 0.5 * (np.asarray(lo) + np.asarray(hi))
    if strategy == NEAREST:
        if prev is None:
            raise ValueError("nearest selection needs a previous value")
        return np.minimum(np.maximum(prev, lo), hi)
    raise ValueError(f"unknown selection strategy {strategy!r}")


@dataclass
class Selections:
    """Selections at quadrature points and their assembled loads (reduced layout)."""

    eta1: np.ndarray
    eta2: np.ndarray
    xi1: np.ndarray
    xi2: np.ndarray
    intervals: dict
    domain_load: np.ndarray
    boundary_load: np.ndarray

    @property
    def values(self):
        return {"eta1": self.eta1, "eta2": self.eta2, "xi1": self.xi1, "xi2": self.xi2}

    def membership(self) -> dict:
        """Fraction of selected values inside their interval, per selection."""
        out = {}
        for k, val in self.values.items():
            lo, hi = self.intervals[k]
            inside = (lo <= val) & (val <= hi)
            out[k] = float(inside.mean()) if inside.size else 1.0
        return out

    @property
    def all_members(self) -> bool:
        return all(v == 1.0 for v in self.membership().values())

    def drift(self, other: "Selections") -> float:
        return max(
            (float(np.max(np.abs(a - b))) if a.size else 0.0)
            for a, b in zip(self.values.values(), other.values.values())
        )


def state_at_quadrature(u, v, space: FESpace):
    m = space.mesh
    nq = m.qp_weights.shape[1]
    n1 = np.repeat(np.linalg.norm(space.cell_gradients(u), axis=1)[:, None], nq, axis=1)
    n2 = np.repeat(np.linalg.norm(space.cell_gradients(v), axis=1)[:, None], nq, axis=1)
    return space.values(u), space.values(v), n1, n2


def superpose(h1, h2, g1, g2, u, v, space: FESpace, strategy: str = MIDPOINT, prev: Selections | None = None):
    """Pointwise selections of h_i(z, u, v, |grad u|, |grad v|) and g_i(z, u, v).

    ``strategy`` is ``"midpoint"`` or ``"nearest"``; the latter projects the
    selections held in ``prev`` onto the current intervals.
    """
    m = space.mesh
    u = space.expand(u)
    v = space.expand(v)
    r1, r2, n1, n2 = state_at_quadrature(u, v, space)
    b1, b2 = space.boundary_values(u), space.boundary_values(v)
    intervals = {
        "eta1": evaluate_interval(h1, m.qp_points, r1, r2, n1, n2),
        "eta2": evaluate_interval(h2, m.qp_points, r1, r2, n1, n2),
        "xi1": evaluate_interval(g1, m.bq_points, b1, b2),
        "xi2": evaluate_interval(g2, m.bq_points, b1, b2),
    }
    chosen = {}
    for k, iv in intervals.items():
        p = None if prev is None else prev.values[k]
        chosen[k] = select(iv, strategy if prev is not None else MIDPOINT, p)
    dl = np.concatenate([space.restrict(space.load(chosen["eta1"])), space.restrict(space.load(chosen["eta2"]))])
    bl = np.concatenate(
        [space.restrict(space.boundary_load(chosen["xi1"])), space.restrict(space.boundary_load(chosen["xi2"]))]
    )
    return Selections(chosen["eta1"], chosen["eta2"], chosen["xi1"], chosen["xi2"], intervals, dl, bl)


# -- certificates ----------------------------------------------------------------
@dataclass
class GrowthCertificate:
    """Growth constants and exponents for the reactions and boundary maps.

    In ``standard`` mode ``constants`` are (m1, m2, m7, m8) and ``bounds`` the
    functions (delta1, delta2, delta5, delta6); in ``strong`` mode they are
    (d1, d2, d3, d4) and (pi1, pi2, pi3, pi4) and ``kappa`` is required.
    ``critical`` optionally supplies p1*, p3*, p1_*, p3_* directly, which is
    how one-dimensional problems are certified.
    """

    mode: str = "standard"
    constants: tuple = (1.0, 1.0, 1.0, 1.0)
    sigma: tuple = (1.0,) * 8
    theta: tuple = (1.0,) * 4
    bounds: tuple = (0.0, 0.0, 0.0, 0.0)
    kappa: tuple | None = None
    critical: dict | None = None


@dataclass
class SignCertificate:
    m3: float = 0.0
    m4: float = 0.0
    m5: float = 0.0
    m6: float = 0.0
    m9: float = 0.0
    m10: float = 0.0
    delta3: object = 0.0
    delta4: object = 0.0
    delta7: object = 0.0
    delta8: object = 0.0

    @property
    def constants(self):
        return (self.m3, self.m4, self.m5, self.m6, self.m9, self.m10)


@dataclass
class ValidationReport:
    kind: str
    passed: bool
    checks: list
    first_violation: dict | None
    samples: int
    seed: int
    notes: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def sampled_passed(self) -> bool:
        """Verdict of the pointwise sampling alone, ignoring exponent checks."""
        return self.first_violation is None and bool(self.samples)

    def to_dict(self):
        return asdict(self)


def _criticals(cfg: ExponentConfig, cert: GrowthCertificate):
    if cert.critical:
        c = cert.critical
        return float(c["p1_star"]), float(c["p3_star"]), float(c["p1_sub"]), float(c["p3_sub"])
    if cfg.N >= 2 and cfg.p[0] < cfg.N and cfg.p[2] < cfg.N:
        s1, l1 = critical_exponents(cfg.p[0], cfg.N)
        s3, l3 = critical_exponents(cfg.p[2], cfg.N)
        return s1, s3, l1, l3
    return None


def _check(name, lhs, rhs, strict=False, gating=True):
    ok = lhs < rhs if strict else lhs <= rhs + 1e-14 * max(1.0, abs(rhs))
    return {"name": name, "lhs": float(lhs), "rhs": float(rhs), "passed": bool(ok), "gating": gating}


def _balance_checks(cert: GrowthCertificate, cfg: ExponentConfig, crit):
    s1, s3, l1, l3 = crit
    p1, p2, p3 = cfg.p[0], cfg.p[1], cfg.p[2]
    sg, th = cert.sigma, cert.theta
    inv = lambda x: 1.0 / conjugate(x)  # noqa: E731
    checks = []
    if cert.mode == "standard":
        a1, a2, a3, a4 = s1, s3, l1, l3
        c1, c2, c3, c4 = inv(s1), inv(s3), inv(l1), inv(l3)
    else:
        k = cert.kappa
        a1, a2, a3, a4 = k
        c1, c2, c3, c4 = inv(k[0]), inv(k[1]), inv(k[2]), inv(k[3])
        checks += [
            _check("1 < kappa1 < p1*", k[0], s1, strict=True),
            _check("1 < kappa2 < p3*", k[1], s3, strict=True),
            _check("1 < kappa3 < p1_*", k[2], l1, strict=True),
            _check("1 < kappa4 < p3_*", k[3], l3, strict=True),
        ]
        checks += [_check(f"kappa{i + 1} > 1", -k[i], -1.0, strict=True) for i in range(4)]
    checks += [
        _check("h1 sigma balance", sg[0] / a1 + sg[1] / a2, c1),
        _check("h2 sigma balance", sg[2] / a1 + sg[3] / a2, c2),
        _check("h1 theta balance (p1, p2)", th[0] / p1 + th[1] / p2, c1),
        _check("h2 theta balance (p1, p2)", th[2] / p1 + th[3] / p2, c2),
        _check("h1 theta balance (p1, p3) variant", th[0] / p1 + th[1] / p3, c1, gating=False),
        _check("h2 theta balance (p1, p3) variant", th[2] / p1 + th[3] / p3, c2, gating=False),
        _check("g1 sigma balance", sg[4] / a3 + sg[5] / a4, c3),
        _check("g2 sigma balance", sg[6] / a3 + sg[7] / a4, c4),
    ]
    pos = list(cert.constants) + list(cert.sigma) + list(cert.theta)
    checks.append(_check("constants and exponents positive", -min(pos), 0.0, strict=True))
    return checks


def _growth_rhs(which, cert, cfg, crit, r1, r2, n1, n2, bound):
    s1, s3, l1, l3 = crit
    p1, p3 = cfg.p[0], cfg.p[2]
    a1, a2 = np.abs(r1), np.abs(r2)
    b1, b2 = np.abs(n1), np.abs(n2)
    sg, th = cert.sigma, cert.theta
    c = cert.constants
    with np.errstate(over="ignore"):
        if cert.mode == "standard":
            if which == "h1":
                e = conjugate(s1)
                t = a1 ** (s1 - 1) + a2 ** (s3 / e) + a1 ** sg[0] * a2 ** sg[1] + b1 ** (p1 / e) + b2 ** (p3 / e)
                return c[0] * (t + b1 ** th[0] * b2 ** th[1]) + bound
            if which == "h2":
                e = conjugate(s3)
                t = a1 ** (s1 / e) + a2 ** (s3 - 1) + a1 ** sg[2] * a2 ** sg[3] + b1 ** (p1 / e) + b2 ** (p3 / e)
                return c[1] * (t + b1 ** th[2] * b2 ** th[3]) + bound
            if which == "g1":
                e = conjugate(l1)
                return c[2] * (a1 ** (l1 - 1) + a2 ** (l3 / e) + a1 ** sg[4] * a2 ** sg[5]) + bound
            e = conjugate(l3)
            return c[3] * (a1 ** (l1 / e) + a2 ** (l3 - 1) + a1 ** sg[6] * a2 ** sg[7]) + bound
        k = cert.kappa
        if which in ("h1", "h2"):
            j = 0 if which == "h1" else 1
            e = conjugate(k[j])
            t = a1 ** (s1 / e) + a2 ** (s3 / e) + a1 ** sg[2 * j] * a2 ** sg[2 * j + 1]
            t = t + b1 ** (p1 / e) + b2 ** (p3 / e) + b1 ** th[2 * j] * b2 ** th[2 * j + 1]
            return c[j] * t + bound
        j = 2 if which == "g1" else 3
        e = conjugate(k[j])
        si = 4 if which == "g1" else 6
        return c[j] * (a1 ** (l1 / e) + a2 ** (l3 / e) + a1 ** sg[si] * a2 ** sg[si + 1]) + bound


def _samples(mesh: Mesh, n: int, seed: int):
    rng = np.random.default_rng(seed)

    def signed():
        return rng.choice([-1.0, 1.0], n) * 10.0 ** rng.uniform(-3, 3, n)

    r1, r2 = signed(), signed()
    n1, n2 = 10.0 ** rng.uniform(-3, 3, n), 10.0 ** rng.uniform(-3, 3, n)
    zd = mesh.qp_points.reshape(-1, mesh.dim)
    zb = mesh.bq_points.reshape(-1, mesh.dim)
    zd = zd[rng.integers(0, len(zd), n)]
    zb = zb[rng.integers(0, len(zb), n)]
    return dict(r1=r1, r2=r2, n1=n1, n2=n2, zd=zd, zb=zb)


def _first_violation(name, ok, s, lhs, rhs, domain=True):
    bad = np.flatnonzero(~ok)
    if len(bad) == 0:
        return None
    k = int(bad[0])
    z = (s["zd"] if domain else s["zb"])[k]
    point = {"z": [float(c) for c in z], "r1": float(s["r1"][k]), "r2": float(s["r2"][k])}
    if domain:
        point.update(n1=float(s["n1"][k]), n2=float(s["n2"][k]))
    return {"map": name, "sample": k, "point": point, "lhs": float(lhs[k]), "rhs": float(rhs[k])}


def _interval_samples(name, h, s, domain):
    z = s["zd"] if domain else s["zb"]
    if domain:
        return evaluate_interval(h, z, s["r1"], s["r2"], s["n1"], s["n2"])
    return evaluate_interval(h, z, s["r1"], s["r2"])


def _pick_first(violations):
    found = [v for v in violations if v is not None]
    return min(found, key=lambda v: v["sample"]) if found else None


def validate_growth(h1, h2, g1, g2, cert: GrowthCertificate, cfg: ExponentConfig, mesh: Mesh,
                    samples: int = 10_000, seed: int = 0) -> ValidationReport:
    """Check the exponent balance exactly, then the growth bounds on random samples.

    Sample magnitudes are log-uniform in [1e-3, 1e3] with random signs; the
    coordinates are drawn from the mesh quadrature points.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    notes = []
    crit = _criticals(cfg, cert)
    if crit is None:
        notes.append("critical exponents unavailable: supply 'critical' for N = 1 or exponents >= N")
        return ValidationReport("growth", False, [], None, samples, seed, notes)
    if cert.mode not in ("standard", "strong"):
        raise ValueError(f"unknown growth mode {cert.mode!r}")
    if cert.mode == "strong" and cert.kappa is None:
        notes.append("strong mode needs kappa exponents")
        return ValidationReport("growth", False, [], None, samples, seed, notes)
    checks = _balance_checks(cert, cfg, crit)
    s = _samples(mesh, samples, seed)
    violations = []
    for name, h, bound, domain in (
        ("h1", h1, cert.bounds[0], True),
        ("h2", h2, cert.bounds[1], True),
        ("g1", g1, cert.bounds[2], False),
        ("g2", g2, cert.bounds[3], False),
    ):
        z = s["zd"] if domain else s["zb"]
        bvals = sample_field(bound, z)
        try:
            lo, hi = _interval_samples(name, h, s, domain)
        except (CertificateViolation, ex.ExpressionError) as err:
            violations.append({"map": name, "sample": -1, "point": None, "error": str(err)})
            continue
        if np.any(bvals < 0):
            notes.append(f"bound function for {name} is negative somewhere")
        lhs = np.maximum(np.abs(lo), np.abs(hi))
        if not domain:
            zeros = np.zeros(samples)
            rhs = _growth_rhs(name, cert, cfg, crit, s["r1"], s["r2"], zeros, zeros, bvals)
        else:
            rhs = _growth_rhs(name, cert, cfg, crit, s["r1"], s["r2"], s["n1"], s["n2"], bvals)
        ok = lhs <= rhs * (1 + 1e-12)
        violations.append(_first_violation(name, ok, s, lhs, rhs, domain))
    first = _pick_first(violations)
    passed = first is None and all(c["passed"] for c in checks if c["gating"]) and not any(
        "negative" in n for n in notes
    )
    return ValidationReport("growth", passed, checks, first, samples, seed, notes)


def validate_sign(h1, h2, g1, g2, cert: SignCertificate, cfg: ExponentConfig, mesh: Mesh,
                  samples: int = 10_000, seed: int = 0) -> ValidationReport:
    """Check eta * r <= m(|r1|^p1 + |r2|^p3) + m'(|n1|^p1 + |n2|^p3) + delta on samples.

    eta ranges over the lower end, upper end and midpoint of each interval;
    the product is linear in eta so the endpoints are the worst case.  The
    mirrored boundary inequality (-xi * r bounded by the same right-hand
    side) is reported in ``extra`` without affecting the verdict.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    p1, p3 = cfg.p[0], cfg.p[2]
    s = _samples(mesh, samples, seed)
    a1, a2 = np.abs(s["r1"]), np.abs(s["r2"])
    state = a1**p1 + a2**p3
    grads = s["n1"] ** p1 + s["n2"] ** p3
    checks = [_check("sign constants nonnegative", -min(cert.constants), 0.0)]
    notes = []
    violations, mirrored = [], []
    spec = (
        ("h1", h1, cert.m3, cert.m4, cert.delta3, "r1", True),
        ("h2", h2, cert.m5, cert.m6, cert.delta4, "r2", True),
        ("g1", g1, cert.m9, 0.0, cert.delta7, "r1", False),
        ("g2", g2, cert.m10, 0.0, cert.delta8, "r2", False),
    )
    for name, h, ms, mg, delta, rname, domain in spec:
        z = s["zd"] if domain else s["zb"]
        dvals = sample_field(delta, z)
        if np.any(dvals < 0):
            checks.append(_check(f"{name} bound function nonnegative", -float(dvals.min()), 0.0))
        try:
            lo, hi = _interval_samples(name, h, s, domain)
        except (CertificateViolation, ex.ExpressionError) as err:
            violations.append({"map": name, "sample": -1, "point": None, "error": str(err)})
            continue
        r = s[rname]
        rhs = ms * state + (mg * grads if domain else 0.0) + dvals
        prods = np.stack([lo * r, hi * r, 0.5 * (lo + hi) * r])
        lhs = prods.max(axis=0)
        slack = 1e-12 * np.abs(rhs)
        violations.append(_first_violation(name, lhs <= rhs + slack, s, lhs, rhs, domain))
        if not domain:
            mlhs = (-prods).max(axis=0)
            mirrored.append(_first_violation(name, mlhs <= rhs + slack, s, mlhs, rhs, domain))
    first = _pick_first(violations)
    passed = first is None and all(c["passed"] for c in checks)
    mfirst = _pick_first(mirrored)
    extra = {"mirrored_boundary_passed": mfirst is None, "mirrored_first_violation": mfirst}
    return ValidationReport("sign", passed, checks, first, samples, seed, notes, extra)


@dataclass
class CoercivityCertificate:
    """Inputs of the smallness condition and of the coercivity lower bound.

    ``lambdas`` are estimated embedding constants; they are multiplied by
    ``safety_factor`` because the estimates are lower bounds, which makes
    the check heuristic.  ``exponents``, ``domain_measure`` and ``mu_l1``
    (L1 norms of mu2 and mu4) feed the additive Young constants.
    """

    lambdas: tuple
    sign: SignCertificate
    alpha: float = 0.0
    beta: float = 0.0
    epsilon: float = 0.01
    safety_factor: float = 1.1
    exponents: ExponentConfig | None = None
    domain_measure: float = 1.0
    mu_l1: tuple = (0.0, 0.0)

    @property
    def scaled_lambdas(self):
        return tuple(self.safety_factor * float(x) for x in self.lambdas)


@dataclass
class CoercivityCheck:
    passed: bool
    lhs: tuple
    margins: tuple
    safety_factor: float
    heuristic: bool = True

    def to_dict(self):
        return asdict(self)


@dataclass
class CoercivityBound:
    A: float
    B: float
    C1: float
    C2: float
    c_eps: float
    young: dict

    def to_dict(self):
        return asdict(self)


def validate_coercivity_condition(cert: CoercivityCertificate) -> CoercivityCheck:
    """m4 + m6 + (m3 + m5) lam_{2j-1} + (m9 + m10) lam_{2j} < 1 for j = 1, 2."""
    lam = cert.scaled_lambdas
    if any(x <= 0 for x in lam):
        raise ValueError("embedding constants must be positive")
    s = cert.sign
    base = s.m4 + s.m6
    lhs = tuple(base + (s.m3 + s.m5) * lam[2 * j] + (s.m9 + s.m10) * lam[2 * j + 1] for j in (0, 1))
    margins = tuple(1.0 - x for x in lhs)
    return CoercivityCheck(all(x < 1.0 for x in lhs), lhs, margins, cert.safety_factor)


def young_constant(r: float, s: float, eps: float) -> float:
    """max over t >= 0 of t^r - eps t^s (r < s), by bounded 1D maximization in log t."""
    if not (0 < r < s):
        raise ValueError("need 0 < r < s")
    if eps <= 0:
        raise ValueError("eps must be positive")

    def neg(x):
        return -(math.exp(r * x) - eps * math.exp(s * x))

    # the maximizer of t^r - eps t^s sits where log t ~ log(1/eps)/(s - r)
    span = abs(math.log(eps)) / (s - r) + 50.0
    res = minimize_scalar(neg, bounds=(-span, span), method="bounded", options={"xatol": 1e-12})
    return max(-res.fun, 0.0)


def coercivity_bound(cert: CoercivityCertificate, delta_norms: tuple) -> CoercivityBound:
    """A(eps), B(eps) and C2(eps) of the coercivity lower bound.

    c(eps) = eps.  C1(eps) collects the additive Young constants of the
    competing terms, entering with a minus sign, so C1 <= 0; C2 subtracts
    the four delta norms from it.
    """
    eps = cert.epsilon
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    s = cert.sign
    lam = cert.scaled_lambdas
    a, b = abs(cert.alpha), abs(cert.beta)
    A = 1.0 - s.m4 - s.m6 - (s.m3 + s.m5) * lam[0] - (s.m9 + s.m10) * lam[1] - a * eps
    B = 1.0 - s.m4 - s.m6 - (s.m3 + s.m5) * lam[2] - (s.m9 + s.m10) * lam[3] - b * eps
    young = {}
    C1 = 0.0
    if a or b:
        cfg = cert.exponents
        if cfg is None:
            raise ValueError("nonzero competing coefficients need the exponent configuration")
        p, q = cfg.p, cfg.q
        for name, coef, (r_, s_), weight in (
            ("u_p", a, (p[1], p[0]), cert.domain_measure),
            ("u_q", a, (q[1], q[0]), cert.mu_l1[0]),
            ("v_p", b, (p[3], p[2]), cert.domain_measure),
            ("v_q", b, (q[3], q[2]), cert.mu_l1[1]),
        ):
            y = young_constant(r_, s_, eps) if coef else 0.0
            young[name] = y
            C1 -= coef * y * weight
    C2 = C1 - float(sum(delta_norms))
    return CoercivityBound(A, B, C1, C2, eps, young)


def delta_norms(cert: SignCertificate, mesh: Mesh) -> tuple:
    """L1 norms of delta3, delta4 over the domain and delta7, delta8 over the contact part."""
    d3 = integrate_domain(np.abs(sample_field(cert.delta3, mesh.qp_points)), mesh)
    d4 = integrate_domain(np.abs(sample_field(cert.delta4, mesh.qp_points)), mesh)
    d7 = integrate_boundary2(np.abs(sample_field(cert.delta7, mesh.bq_points)), mesh)
    d8 = integrate_boundary2(np.abs(sample_field(cert.delta8, mesh.bq_points)), mesh)
    return (d3, d4, d7, d8)


def pairing_lower_bound(bound: CoercivityBound, u, v, space: FESpace, cfg: ExponentConfig) -> float:
    """A min(|u|_U^p1, |u|_U^q1) + B min(|v|_V^p3, |v|_V^q3) + C2."""
    nu = gradient_norm(u, space, cfg.modular(1, space.mesh))
    nv = gradient_norm(v, space, cfg.modular(3, space.mesh))
    return (
        bound.A * min(nu ** cfg.p[0], nu ** cfg.q[0])
        + bound.B * min(nv ** cfg.p[2], nv ** cfg.q[2])
        + bound.C2
    )
