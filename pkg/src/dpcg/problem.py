"""Problem-description files: schema, loading and assembly of solver inputs."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema

from . import expression as ex
from .mesh import GalerkinHierarchy, Mesh, MeshError, build_hierarchy, integrate_domain, mesh_from_spec, sample_field
from .modular import ExponentConfig
from .multifunctions import GrowthCertificate, IntervalMultifunction, SignCertificate
from .solver import InclusionProblem, SolverConfig

__all__ = ["ProblemError", "ProblemSpec", "SCHEMA", "load_problem", "parse_problem"]


class ProblemError(ValueError):
    """Malformed or inconsistent problem file."""


_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}
_field = {"type": ["number", "string"]}


def _obj(props: dict, required=None) -> dict:
    return {
        "type": "object",
        "properties": props,
        "required": list(props) if required is None else required,
        "additionalProperties": False,
    }


def _names(*names, schema=_num, required=True):
    return _obj({n: schema for n in names}, None if required else [])


_interval = _obj({"lower": {"type": "string"}, "upper": {"type": "string"}})
_seq = lambda n: {"type": "array", "items": _num, "minItems": n, "maxItems": n}  # noqa: E731

SCHEMA = _obj(
    {
        "name": {"type": "string"},
        "description": {"type": "string"},
        "domain": _obj(
            {
                "dim": {"enum": [1, 2]},
                "mesh": {"type": "object"},
                "boundary": _obj(
                    {
                        "dirichlet": {"type": "array", "items": {"type": "string"}, "minItems": 1},
                        "contact": {"type": "array", "items": {"type": "string"}, "minItems": 1},
                    },
                    [],
                ),
            },
            ["dim", "mesh"],
        ),
        "exponents": _names("p1", "p2", "p3", "p4", "q1", "q2", "q3", "q4", schema=_pos),
        "weights": _names("mu1", "mu2", "mu3", "mu4", schema=_field),
        "coefficients": _names("alpha", "beta"),
        "reactions": _obj({"h1": _interval, "h2": _interval}),
        "boundary_maps": _obj({"g1": _interval, "g2": _interval}),
        "certificates": _obj(
            {
                "growth": _obj(
                    {
                        "mode": {"enum": ["standard", "strong"]},
                        "constants": {"type": "object", "additionalProperties": _pos},
                        "sigma": _seq(8),
                        "theta": _seq(4),
                        "kappa": _seq(4),
                        "bounds": {"type": "object", "additionalProperties": _field},
                        "critical": _names("p1_star", "p3_star", "p1_sub", "p3_sub", schema=_pos),
                    },
                    ["mode", "constants", "sigma", "theta", "bounds"],
                ),
                "sign": _obj(
                    {
                        "constants": _names("m3", "m4", "m5", "m6", "m9", "m10"),
                        "bounds": _names("delta3", "delta4", "delta7", "delta8", schema=_field),
                    }
                ),
                "coercivity": _obj({"epsilon": _pos, "safety_factor": {"type": "number", "minimum": 1}}, []),
            },
            ["growth", "sign"],
        ),
        "solver": _obj(
            {
                "newton_tol": _pos,
                "max_newton": {"type": "integer", "minimum": 1},
                "max_outer": {"type": "integer", "minimum": 1},
                "damping": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "homotopy_steps": {"type": "integer", "minimum": 1},
                "epsilon_reg": {"type": "number", "minimum": 0},
                "trust_radius": _pos,
                "levels": {"type": "integer", "minimum": 3},
                "seed": {"type": "integer", "minimum": 0},
                "verify_tol": _pos,
                "samples": {"type": "integer", "minimum": 1},
                "embedding_iters": {"type": "integer", "minimum": 1},
            },
            [],
        ),
    },
    ["domain", "exponents", "weights", "coefficients", "reactions", "boundary_maps", "certificates"],
)

_GROWTH_NAMES = {
    "standard": (("m1", "m2", "m7", "m8"), ("delta1", "delta2", "delta5", "delta6")),
    "strong": (("d1", "d2", "d3", "d4"), ("pi1", "pi2", "pi3", "pi4")),
}
_SOLVER_KEYS = ("newton_tol", "max_newton", "max_outer", "damping", "homotopy_steps", "epsilon_reg", "trust_radius")


@dataclass
class ProblemSpec:
    """A validated problem file and the objects built from it."""

    raw: dict
    base_dir: Path
    mesh: Mesh
    cfg: ExponentConfig
    maps: tuple
    alpha: float
    beta: float
    growth: GrowthCertificate
    sign: SignCertificate
    solver: SolverConfig
    levels: int = 4
    seed: int = 0
    verify_tol: float = 1e-6
    samples: int = 10_000
    embedding_iters: int = 200
    epsilon: float = 0.05
    safety_factor: float = 1.1
    name: str = ""
    _hierarchy: GalerkinHierarchy | None = field(default=None, repr=False)

    @property
    def hierarchy(self) -> GalerkinHierarchy:
        if self._hierarchy is None or len(self._hierarchy) != self.levels:
            self._hierarchy = build_hierarchy(self.mesh, self.levels)
        return self._hierarchy

    def inclusion(self, validated: bool, waived: bool) -> InclusionProblem:
        h1, h2, g1, g2 = self.maps
        return InclusionProblem(
            self.cfg, h1, h2, g1, g2, self.hierarchy, self.alpha, self.beta, self.growth, self.sign,
            certificates_validated=validated, certificates_waived=waived,
        )

    def mu_l1(self) -> tuple:
        """L1 norms of mu2 and mu4 on the base mesh."""
        m = self.mesh
        return tuple(integrate_domain(abs(sample_field(self.cfg.mu[i], m.qp_points)), m) for i in (1, 3))


def _parse_expr(text, where):
    if isinstance(text, (int, float)):
        return float(text)
    try:
        ex.parse(text)
    except ex.ExpressionError as err:
        raise ProblemError(f"{where}: {err}") from None
    return text


def _interval(block, where, kind):
    for side in ("lower", "upper"):
        _parse_expr(block[side], f"{where}.{side}")
    try:
        return IntervalMultifunction.from_expressions(block["lower"], block["upper"], kind)
    except ValueError as err:
        raise ProblemError(f"{where}: {err}") from None


def _coordinate_only(text, where):
    if isinstance(text, str):
        extra = ex.free_variables(ex.parse(text)) - {"z1", "z2"}
        if extra:
            raise ProblemError(f"{where} may only depend on z1, z2, found {sorted(extra)}")
    return text


def parse_problem(raw: dict, base_dir: Path | str = ".") -> ProblemSpec:
    """Validate ``raw`` against the schema and build the solver inputs."""
    try:
        jsonschema.validate(raw, SCHEMA)
    except jsonschema.ValidationError as err:
        loc = "/".join(str(p) for p in err.absolute_path) or "<root>"
        raise ProblemError(f"schema violation at {loc}: {err.message}") from None
    base_dir = Path(base_dir)
    dom = raw["domain"]
    mesh_spec = dict(dom["mesh"])
    if "boundary" in dom:
        mesh_spec["boundary"] = dom["boundary"]
    try:
        mesh = mesh_from_spec(mesh_spec, base_dir)
    except (MeshError, KeyError, OSError, ValueError) as err:
        raise ProblemError(f"domain: {err}") from None
    if mesh.dim != dom["dim"]:
        raise ProblemError(f"domain.dim is {dom['dim']} but the mesh is {mesh.dim}-dimensional")
    e = raw["exponents"]
    w = raw["weights"]
    mus = tuple(_coordinate_only(_parse_expr(w[f"mu{i}"], f"weights.mu{i}"), f"weights.mu{i}") for i in range(1, 5))
    try:
        cfg = ExponentConfig(
            tuple(e[f"p{i}"] for i in range(1, 5)), tuple(e[f"q{i}"] for i in range(1, 5)), mus, mesh.dim
        )
        cfg.check_weights(mesh.qp_points)
    except (ValueError, ex.ExpressionError) as err:
        raise ProblemError(f"exponents/weights: {err}") from None
    r, b = raw["reactions"], raw["boundary_maps"]
    maps = (
        _interval(r["h1"], "reactions.h1", "domain"),
        _interval(r["h2"], "reactions.h2", "domain"),
        _interval(b["g1"], "boundary_maps.g1", "boundary"),
        _interval(b["g2"], "boundary_maps.g2", "boundary"),
    )
    certs = raw["certificates"]
    gr = certs["growth"]
    cnames, bnames = _GROWTH_NAMES[gr["mode"]]
    if set(gr["constants"]) != set(cnames):
        raise ProblemError(f"certificates.growth.constants must be exactly {list(cnames)} in {gr['mode']} mode")
    if set(gr["bounds"]) != set(bnames):
        raise ProblemError(f"certificates.growth.bounds must be exactly {list(bnames)} in {gr['mode']} mode")
    if gr["mode"] == "strong" and "kappa" not in gr:
        raise ProblemError("certificates.growth.kappa is required in strong mode")
    growth = GrowthCertificate(
        gr["mode"],
        tuple(float(gr["constants"][n]) for n in cnames),
        tuple(gr["sigma"]),
        tuple(gr["theta"]),
        tuple(_coordinate_only(_parse_expr(gr["bounds"][n], f"growth.{n}"), f"growth.{n}") for n in bnames),
        tuple(gr["kappa"]) if "kappa" in gr else None,
        dict(gr["critical"]) if "critical" in gr else None,
    )
    sg = certs["sign"]
    sb = {k: _coordinate_only(_parse_expr(v, f"sign.{k}"), f"sign.{k}") for k, v in sg["bounds"].items()}
    sign = SignCertificate(**{k: float(v) for k, v in sg["constants"].items()}, **sb)
    co = certs.get("coercivity", {})
    sv = raw.get("solver", {})
    solver = SolverConfig(**{k: sv[k] for k in _SOLVER_KEYS if k in sv})
    return ProblemSpec(
        raw, base_dir, mesh, cfg, maps, float(raw["coefficients"]["alpha"]), float(raw["coefficients"]["beta"]),
        growth, sign, solver,
        levels=sv.get("levels", 4), seed=sv.get("seed", 0), verify_tol=sv.get("verify_tol", 1e-6),
        samples=sv.get("samples", 10_000), embedding_iters=sv.get("embedding_iters", 200),
        epsilon=co.get("epsilon", 0.05), safety_factor=co.get("safety_factor", 1.1), name=raw.get("name", ""),
    )


def load_problem(path) -> ProblemSpec:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except OSError as err:
        raise ProblemError(f"cannot read {path}: {err.strerror}") from None
    except json.JSONDecodeError as err:
        raise ProblemError(f"{path} is not valid JSON: {err}") from None
    return parse_problem(raw, path.parent)
