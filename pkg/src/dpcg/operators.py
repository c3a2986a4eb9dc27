"""Double-phase fluxes and the weak-form assembly of the (competing) driving operator."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .mesh import FESpace

__all__ = [
    "DoublePhaseFlux",
    "CompetingPair",
    "flux",
    "flux_jacobian",
    "operator_vector",
    "assemble_residual_D",
    "assemble_jacobian_D",
    "pairing_D",
]


@dataclass(frozen=True, eq=False)
class DoublePhaseFlux:
    """xi -> (|xi|^2+eps^2)^((p-2)/2) xi + mu (|xi|^2+eps^2)^((q-2)/2) xi.

    ``mu`` is a number or an array of samples that broadcasts against the
    leading (non-vector) axes of the gradients it is applied to.
    """

    p: float
    q: float
    mu: np.ndarray | float = 0.0
    epsilon_reg: float = 0.0

    def __post_init__(self):
        if self.epsilon_reg < 0:
            raise ValueError("epsilon_reg must be nonnegative")

    def __call__(self, xi):
        return flux(xi, self)

    def jacobian(self, xi):
        return flux_jacobian(xi, self)


def _power_weight(s, r, eps):
    """s^((r-2)/2) with the convention 0 for s == 0 (odd extension, eps == 0)."""
    if r == 2:
        return np.ones_like(s)
    with np.errstate(divide="ignore", invalid="ignore"):
        w = s ** ((r - 2) / 2)
    if eps == 0:
        w = np.where(s > 0, w, 0.0)
    return w


def flux(xi, f: DoublePhaseFlux) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    s = np.sum(xi * xi, axis=-1) + f.epsilon_reg**2
    w = _power_weight(s, f.p, f.epsilon_reg) + f.mu * _power_weight(s, f.q, f.epsilon_reg)
    return w[..., None] * xi


def _power_jac(s, r, eps):
    """Coefficients a, b of a I + b xi xi^T for one power term."""
    a = _power_weight(s, r, eps)
    if r == 2:
        return a, np.zeros_like(s)
    with np.errstate(divide="ignore", invalid="ignore"):
        b = (r - 2) * s ** ((r - 4) / 2)
    b = np.where(s > 0, b, 0.0)
    return a, b


def flux_jacobian(xi, f: DoublePhaseFlux) -> np.ndarray:
    """Exact derivative of the regularized flux, shape (..., d, d).

    Needs ``epsilon_reg > 0`` when an exponent is below 2 and ``xi`` may vanish.
    """
    xi = np.asarray(xi, dtype=float)
    d = xi.shape[-1]
    s = np.sum(xi * xi, axis=-1) + f.epsilon_reg**2
    ap, bp = _power_jac(s, f.p, f.epsilon_reg)
    aq, bq = _power_jac(s, f.q, f.epsilon_reg)
    a = ap + f.mu * aq
    b = bp + f.mu * bq
    outer = xi[..., :, None] * xi[..., None, :]
    return a[..., None, None] * np.eye(d) + b[..., None, None] * outer


@dataclass(frozen=True, eq=False)
class CompetingPair:
    """primary(xi) - coefficient * secondary(xi)."""

    primary: DoublePhaseFlux
    secondary: DoublePhaseFlux
    coefficient: float = 0.0

    def __post_init__(self):
        if not (self.primary.p > self.secondary.p and self.primary.q > self.secondary.q):
            raise ValueError("primary exponents must exceed the secondary ones")

    def flux(self, xi):
        out = self.primary(xi)
        if self.coefficient != 0.0:
            out = out - self.coefficient * self.secondary(xi)
        return out

    def jacobian(self, xi):
        out = self.primary.jacobian(xi)
        if self.coefficient != 0.0:
            out = out - self.coefficient * self.secondary.jacobian(xi)
        return out

    def scaled(self, t: float) -> "CompetingPair":
        return CompetingPair(self.primary, self.secondary, t * self.coefficient)


def _qp_gradients(w, space: FESpace):
    g = space.cell_gradients(w)
    return np.repeat(g[:, None, :], space.mesh.qp_weights.shape[1], axis=1)


def operator_vector(w, pair: CompetingPair, space: FESpace) -> np.ndarray:
    """Full nodal vector k -> int pair.flux(grad w) . grad phi_k."""
    m = space.mesh
    fl = pair.flux(_qp_gradients(w, space))  # (nc, nq, d)
    cell_flux = np.einsum("cq,cqd->cd", m.qp_weights, fl)
    local = np.einsum("cd,cld->cl", cell_flux, m.grad_phi)
    return np.bincount(m.cells.ravel(), local.ravel(), minlength=m.num_vertices)


def assemble_residual_D(u, v, pair_u: CompetingPair, pair_v: CompetingPair, space: FESpace) -> np.ndarray:
    """Reduced dual vector of D(u, v) on U_h x V_h (u block first).

    ``u`` and ``v`` may be given in the free or full layout; both unknowns
    live on the same P1 space.
    """
    ru = space.restrict(operator_vector(space.expand(u), pair_u, space))
    rv = space.restrict(operator_vector(space.expand(v), pair_v, space))
    return np.concatenate([ru, rv])


def assemble_jacobian_D(u, v, pair_u: CompetingPair, pair_v: CompetingPair, space: FESpace) -> sp.csr_matrix:
    """Block-diagonal Galerkin matrix of the flux Jacobians (reduced layout)."""
    ku = space.assemble_matrix(pair_u.jacobian(_qp_gradients(space.expand(u), space)))
    kv = space.assemble_matrix(pair_v.jacobian(_qp_gradients(space.expand(v), space)))
    return sp.block_diag([ku, kv], format="csr")


def pairing_D(u, v, pair_u, pair_v, space: FESpace) -> float:
    """<D(u, v), (u, v)>."""
    r = assemble_residual_D(u, v, pair_u, pair_v, space)
    return float(r @ np.concatenate([space.restrict(space.expand(u)), space.restrict(space.expand(v))]))
