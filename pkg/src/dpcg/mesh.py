"""Simplicial meshes with a two-part boundary, P1 spaces and nested refinement.

Boundary facets carry one of two tags: ``DIRICHLET`` (the part where the
unknowns vanish) and ``CONTACT`` (the part carrying the multivalued
conormal condition).  In 1D a facet is a single vertex and boundary
integrals use counting measure.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import expression as ex

__all__ = [
    "DIRICHLET",
    "CONTACT",
    "TAG_NAMES",
    "MeshError",
    "Mesh",
    "interval_mesh",
    "rectangle_mesh",
    "refine",
    "FESpace",
    "GalerkinHierarchy",
    "build_hierarchy",
    "prolongate",
    "integrate_domain",
    "integrate_boundary2",
    "gradient_at_quadrature",
    "sample_field",
    "l2_error",
    "read_mesh",
    "write_mesh",
]

DIRICHLET = 0
CONTACT = 1
TAG_NAMES = {DIRICHLET: "DIRICHLET", CONTACT: "CONTACT"}
_TAG_CODES = {v: k for k, v in TAG_NAMES.items()}

_G = 0.5 / np.sqrt(3.0)
_GAUSS2_PTS = np.array([0.5 - _G, 0.5 + _G])
_GAUSS2_WTS = np.array([0.5, 0.5])
# edge-midpoint rule on the reference triangle, degree 2
_TRI_PTS = np.array([[0.5, 0.0], [0.5, 0.5], [0.0, 0.5]])
_TRI_WTS = np.full(3, 1.0 / 3.0)


class MeshError(ValueError):
    pass


def _readonly(a, dtype):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Mesh:
    """Conforming simplicial mesh of an interval or a polygon.

    Parameters
    ----------
    vertices : (nv, dim) array
    cells : (nc, dim + 1) int array
    facets : (nf, dim) int array of boundary facets
    facet_tags : (nf,) int array, ``DIRICHLET`` or ``CONTACT``
    level : refinement depth
    parent_edges : (nv - nv_parent, 2) int array or None
        Coarse edge bisected by each vertex created during refinement.
    """

    vertices: np.ndarray
    cells: np.ndarray
    facets: np.ndarray
    facet_tags: np.ndarray
    level: int = 0
    parent_edges: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim == 1:
            v = v[:, None]
        object.__setattr__(self, "vertices", _readonly(v, float))
        dim = v.shape[1]
        if dim not in (1, 2):
            raise MeshError(f"only 1D and 2D meshes are supported, got dim={dim}")
        cells = np.asarray(self.cells, dtype=np.int64).reshape(-1, dim + 1)
        facets = np.asarray(self.facets, dtype=np.int64).reshape(-1, dim)
        tags = np.asarray(self.facet_tags, dtype=np.int64).reshape(-1)
        cells = _orient(v, cells)
        object.__setattr__(self, "cells", _readonly(cells, np.int64))
        object.__setattr__(self, "facets", _readonly(facets, np.int64))
        object.__setattr__(self, "facet_tags", _readonly(tags, np.int64))
        if self.parent_edges is not None:
            object.__setattr__(self, "parent_edges", _readonly(self.parent_edges, np.int64))
        self._check()

    def _check(self):
        nv = len(self.vertices)
        if self.cells.size == 0:
            raise MeshError("mesh has no cells")
        if self.cells.min() < 0 or self.cells.max() >= nv:
            raise MeshError("cell vertex index out of range")
        if np.any(self.volumes <= 0):
            raise MeshError("degenerate cell (nonpositive volume)")
        if len(self.facets) != len(self.facet_tags):
            raise MeshError("every boundary facet needs exactly one tag")
        if not set(np.unique(self.facet_tags)) <= {DIRICHLET, CONTACT}:
            raise MeshError("unknown facet tag")
        facet_keys = _facet_keys(self.cells, self.dim)
        keys, counts = np.unique(facet_keys, axis=0, return_counts=True)
        if np.any(counts > 2):
            raise MeshError("nonconforming mesh: facet shared by more than two cells")
        boundary = {tuple(k) for k in keys[counts == 1]}
        tagged = [tuple(sorted(f)) for f in self.facets]
        if len(set(tagged)) != len(tagged):
            raise MeshError("boundary facet tagged more than once")
        if set(tagged) != boundary:
            raise MeshError("tagged facets do not match the mesh boundary")
        if not np.any(self.facet_tags == CONTACT):
            raise MeshError("contact boundary part is empty")
        if not np.any(self.facet_tags == DIRICHLET):
            raise MeshError("Dirichlet boundary part is empty")

    # -- geometry --------------------------------------------------------
    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_cells(self) -> int:
        return len(self.cells)

    @cached_property
    def volumes(self) -> np.ndarray:
        x = self.vertices[self.cells]
        if self.dim == 1:
            return x[:, 1, 0] - x[:, 0, 0]
        e1 = x[:, 1] - x[:, 0]
        e2 = x[:, 2] - x[:, 0]
        return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])

    @cached_property
    def diameter(self) -> float:
        return float(np.linalg.norm(self.vertices.max(0) - self.vertices.min(0)))

    @cached_property
    def measure(self) -> float:
        return float(self.volumes.sum())

    @cached_property
    def grad_phi(self) -> np.ndarray:
        """(nc, dim + 1, dim) constant gradients of the local P1 basis."""
        x = self.vertices[self.cells]
        if self.dim == 1:
            inv = 1.0 / self.volumes
            return np.stack([-inv, inv], axis=1)[:, :, None]
        jac = np.stack([x[:, 1] - x[:, 0], x[:, 2] - x[:, 0]], axis=2)  # columns are edges
        jinv_t = np.linalg.inv(jac).transpose(0, 2, 1)
        ref = np.array([[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]])
        return np.einsum("kd,cld->ckl", ref, jinv_t)

    # -- domain quadrature ------------------------------------------------
    @cached_property
    def phi(self) -> np.ndarray:
        """(nq, dim + 1) reference basis values at the quadrature points."""
        if self.dim == 1:
            t = _GAUSS2_PTS
            return np.stack([1 - t, t], axis=1)
        s, t = _TRI_PTS[:, 0], _TRI_PTS[:, 1]
        return np.stack([1 - s - t, s, t], axis=1)

    @cached_property
    def qp_weights(self) -> np.ndarray:
        ref = _GAUSS2_WTS if self.dim == 1 else _TRI_WTS
        w = self.volumes[:, None] * ref[None, :]
        w.setflags(write=False)
        return w

    @cached_property
    def qp_points(self) -> np.ndarray:
        """(nc, nq, dim) physical quadrature points."""
        return np.einsum("ql,cld->cqd", self.phi, self.vertices[self.cells])

    # -- contact-boundary quadrature ---------------------------------------
    @cached_property
    def contact_facets(self) -> np.ndarray:
        return self.facets[self.facet_tags == CONTACT]

    @cached_property
    def bphi(self) -> np.ndarray:
        if self.dim == 1:
            return np.ones((1, 1))
        t = _GAUSS2_PTS
        return np.stack([1 - t, t], axis=1)

    @cached_property
    def bq_weights(self) -> np.ndarray:
        f = self.contact_facets
        if self.dim == 1:
            return np.ones((len(f), 1))
        x = self.vertices[f]
        length = np.linalg.norm(x[:, 1] - x[:, 0], axis=1)
        return length[:, None] * _GAUSS2_WTS[None, :]

    @cached_property
    def bq_points(self) -> np.ndarray:
        return np.einsum("ql,fld->fqd", self.bphi, self.vertices[self.contact_facets])

    @cached_property
    def contact_measure(self) -> float:
        return float(self.bq_weights.sum())

    @cached_property
    def dirichlet_vertices(self) -> np.ndarray:
        return np.unique(self.facets[self.facet_tags == DIRICHLET])

    def is_refinement_of(self, coarse: "Mesh") -> bool:
        if self.parent_edges is None:
            return False
        nc = coarse.num_vertices
        return (
            self.level == coarse.level + 1
            and len(self.parent_edges) == self.num_vertices - nc
            and np.array_equal(self.vertices[:nc], coarse.vertices)
        )

    @cached_property
    def prolongation(self) -> sp.csr_matrix:
        """Nodal interpolation from the parent mesh (old vertices come first)."""
        if self.parent_edges is None:
            raise MeshError("mesh was not produced by refine()")
        n_new = len(self.parent_edges)
        nc = self.num_vertices - n_new
        rows = np.concatenate([np.arange(nc), np.repeat(np.arange(nc, self.num_vertices), 2)])
        cols = np.concatenate([np.arange(nc), self.parent_edges.ravel()])
        vals = np.concatenate([np.ones(nc), np.full(2 * n_new, 0.5)])
        return sp.csr_matrix((vals, (rows, cols)), shape=(self.num_vertices, nc))


def _orient(v, cells):
    cells = cells.copy()
    if v.shape[1] == 1:
        flip = v[cells[:, 1], 0] < v[cells[:, 0], 0]
        cells[flip] = cells[flip][:, ::-1]
    else:
        x = v[cells]
        e1 = x[:, 1] - x[:, 0]
        e2 = x[:, 2] - x[:, 0]
        flip = (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]) < 0
        cells[flip] = cells[flip][:, [0, 2, 1]]
    return cells


def _facet_keys(cells, dim):
    if dim == 1:
        return cells.reshape(-1, 1)
    e = np.concatenate([cells[:, [0, 1]], cells[:, [1, 2]], cells[:, [2, 0]]])
    return np.sort(e, axis=1)


# -- constructors ------------------------------------------------------------
def interval_mesh(n: int, a: float = 0.0, b: float = 1.0, dirichlet=("left",), contact=("right",)) -> Mesh:
    """Uniform mesh of (a, b) with ``n`` cells; endpoints tagged by side name."""
    if n < 1:
        raise MeshError("need at least one cell")
    x = np.linspace(a, b, n + 1)
    cells = np.stack([np.arange(n), np.arange(1, n + 1)], axis=1)
    ends = {"left": 0, "right": n}
    facets, tags = [], []
    for side, idx in ends.items():
        tag = _side_tag(side, dirichlet, contact)
        facets.append([idx])
        tags.append(tag)
    return Mesh(x[:, None], cells, facets, tags)


def rectangle_mesh(
    nx: int,
    ny: int | None = None,
    x0=(0.0, 0.0),
    x1=(1.0, 1.0),
    dirichlet=("left",),
    contact=("right", "bottom", "top"),
) -> Mesh:
    """Structured triangulation of a rectangle, each square split along its diagonal."""
    ny = nx if ny is None else ny
    xs = np.linspace(x0[0], x1[0], nx + 1)
    ys = np.linspace(x0[1], x1[1], ny + 1)
    X, Y = np.meshgrid(xs, ys, indexing="xy")
    verts = np.stack([X.ravel(), Y.ravel()], axis=1)
    idx = np.arange((nx + 1) * (ny + 1)).reshape(ny + 1, nx + 1)
    a = idx[:-1, :-1].ravel()
    b = idx[:-1, 1:].ravel()
    c = idx[1:, 1:].ravel()
    d = idx[1:, :-1].ravel()
    cells = np.concatenate([np.stack([a, b, c], 1), np.stack([a, c, d], 1)])
    sides = {
        "bottom": np.stack([idx[0, :-1], idx[0, 1:]], 1),
        "right": np.stack([idx[:-1, -1], idx[1:, -1]], 1),
        "top": np.stack([idx[-1, 1:], idx[-1, :-1]], 1),
        "left": np.stack([idx[1:, 0], idx[:-1, 0]], 1),
    }
    facets, tags = [], []
    for side, f in sides.items():
        tag = _side_tag(side, dirichlet, contact)
        facets.append(f)
        tags.append(np.full(len(f), tag))
    return Mesh(verts, cells, np.concatenate(facets), np.concatenate(tags))


def _side_tag(side, dirichlet, contact):
    if side in dirichlet and side in contact:
        raise MeshError(f"side {side!r} tagged twice")
    if side in dirichlet:
        return DIRICHLET
    if side in contact:
        return CONTACT
    raise MeshError(f"side {side!r} has no boundary tag")


def refine(mesh: Mesh) -> Mesh:
    """Uniform refinement: midpoint bisection in 1D, red refinement in 2D.

    Old vertices keep their indices; new vertices are appended in a fixed
    order so refinement is reproducible bit for bit.
    """
    v = mesh.vertices
    nv = mesh.num_vertices
    c = mesh.cells
    if mesh.dim == 1:
        edges = c.copy()
        mids = nv + np.arange(len(c))
        new_cells = np.empty((2 * len(c), 2), dtype=np.int64)
        new_cells[0::2] = np.stack([c[:, 0], mids], 1)
        new_cells[1::2] = np.stack([mids, c[:, 1]], 1)
        new_facets, new_tags = mesh.facets, mesh.facet_tags
    else:
        local = np.concatenate([c[:, [0, 1]], c[:, [1, 2]], c[:, [2, 0]]])
        edges, inverse = np.unique(np.sort(local, axis=1), axis=0, return_inverse=True)
        inverse = inverse.reshape(3, -1).T  # (nc, 3): edge ids of (01, 12, 20)
        m01, m12, m20 = (nv + inverse[:, k] for k in range(3))
        v0, v1, v2 = c[:, 0], c[:, 1], c[:, 2]
        children = [
            np.stack([v0, m01, m20], 1),
            np.stack([m01, v1, m12], 1),
            np.stack([m20, m12, v2], 1),
            np.stack([m01, m12, m20], 1),
        ]
        new_cells = np.stack(children, axis=1).reshape(-1, 3)
        lookup = {tuple(e): i for i, e in enumerate(edges)}
        new_facets, new_tags = [], []
        for f, tag in zip(mesh.facets, mesh.facet_tags):
            m = nv + lookup[tuple(sorted(f))]
            new_facets += [[f[0], m], [m, f[1]]]
            new_tags += [tag, tag]
    mids_xy = 0.5 * (v[edges[:, 0]] + v[edges[:, 1]])
    return Mesh(
        np.concatenate([v, mids_xy]),
        new_cells,
        new_facets,
        new_tags,
        level=mesh.level + 1,
        parent_edges=edges,
    )


# -- fields and integration -------------------------------------------------
def sample_field(c, points: np.ndarray) -> np.ndarray:
    """Evaluate a coefficient at ``points`` of shape (..., dim).

    ``c`` may be a number, an expression string or tree over ``z1, z2``,
    or a callable taking the points array.
    """
    points = np.asarray(points, dtype=float)
    shape = points.shape[:-1]
    if isinstance(c, (int, float, np.floating, np.integer)):
        return np.full(shape, float(c))
    if isinstance(c, str):
        c = ex.parse(c)
    if isinstance(c, (ex.Num, ex.Var, ex.Neg, ex.BinOp, ex.Call)):
        env = {"z1": points[..., 0], "z2": points[..., 1] if points.shape[-1] > 1 else np.zeros(shape)}
        return np.broadcast_to(ex.evaluate(c, env), shape).astype(float)
    if callable(c):
        return np.broadcast_to(np.asarray(c(points), dtype=float), shape).astype(float)
    arr = np.asarray(c, dtype=float)
    if arr.shape != shape:
        raise ValueError(f"coefficient samples have shape {arr.shape}, expected {shape}")
    return arr


def integrate_domain(f, mesh: Mesh) -> float:
    f = np.asarray(f, dtype=float)
    if f.ndim == 0:
        f = np.full(mesh.qp_weights.shape, float(f))
    if f.shape != mesh.qp_weights.shape:
        raise ValueError(f"domain samples have shape {f.shape}, expected {mesh.qp_weights.shape}")
    return float(np.sum(mesh.qp_weights * f))


def integrate_boundary2(f, mesh: Mesh) -> float:
    f = np.asarray(f, dtype=float)
    if f.ndim == 0:
        f = np.full(mesh.bq_weights.shape, float(f))
    if f.shape != mesh.bq_weights.shape:
        raise ValueError(f"boundary samples have shape {f.shape}, expected {mesh.bq_weights.shape}")
    return float(np.sum(mesh.bq_weights * f))


class FESpace:
    """Continuous P1 space on ``mesh`` vanishing on the Dirichlet part.

    Vectors come in two layouts: *full* (one value per vertex) and *free*
    (only the unconstrained vertices, in increasing vertex order).
    """

    def __init__(self, mesh: Mesh):
        self.mesh = mesh
        constrained = np.zeros(mesh.num_vertices, dtype=bool)
        constrained[mesh.dirichlet_vertices] = True
        self.constrained = constrained
        self.free_dofs = np.flatnonzero(~constrained)
        if len(self.free_dofs) == 0:
            raise MeshError("space has no free degrees of freedom")

    def __repr__(self):
        return f"FESpace(level={self.mesh.level}, dofs={self.dof_count})"

    @property
    def dof_count(self) -> int:
        return len(self.free_dofs)

    @property
    def num_nodes(self) -> int:
        return self.mesh.num_vertices

    def expand(self, x: np.ndarray) -> np.ndarray:
        """Free (or already full) vector to full nodal vector."""
        x = np.asarray(x, dtype=float)
        if x.shape == (self.num_nodes,):
            return x
        if x.shape != (self.dof_count,):
            raise ValueError(f"vector of length {x.shape} matches neither layout")
        out = np.zeros(self.num_nodes)
        out[self.free_dofs] = x
        return out

    def restrict(self, w: np.ndarray) -> np.ndarray:
        return np.asarray(w, dtype=float)[self.free_dofs]

    def interpolate(self, f) -> np.ndarray:
        """Full nodal interpolant of ``f`` with constrained values set to zero."""
        w = sample_field(f, self.mesh.vertices)
        w[self.constrained] = 0.0
        return w

    def values(self, w) -> np.ndarray:
        """(nc, nq) values of the P1 field at domain quadrature points."""
        w = self.expand(w)
        return w[self.mesh.cells] @ self.mesh.phi.T

    def boundary_values(self, w) -> np.ndarray:
        """(nb, nqb) values at contact-boundary quadrature points."""
        w = self.expand(w)
        return w[self.mesh.contact_facets] @ self.mesh.bphi.T

    def cell_gradients(self, w) -> np.ndarray:
        w = self.expand(w)
        return np.einsum("cl,cld->cd", w[self.mesh.cells], self.mesh.grad_phi)

    def load(self, f) -> np.ndarray:
        """Full vector of integrals of ``f`` (domain quadrature samples) times each hat."""
        m = self.mesh
        local = (m.qp_weights * f) @ m.phi  # (nc, nloc)
        return np.bincount(m.cells.ravel(), local.ravel(), minlength=m.num_vertices)

    def boundary_load(self, f) -> np.ndarray:
        m = self.mesh
        local = (m.bq_weights * f) @ m.bphi
        return np.bincount(m.contact_facets.ravel(), local.ravel(), minlength=m.num_vertices)

    def assemble_matrix(self, coeff: np.ndarray) -> sp.csr_matrix:
        """Reduced Galerkin matrix of int (K grad phi_l) . grad phi_k.

        ``coeff`` holds one (dim, dim) tensor per quadrature point, shape
        (nc, nq, dim, dim); the sum over quadrature points is taken first
        since P1 gradients are constant per cell.
        """
        m = self.mesh
        kc = np.einsum("cq,cqij->cij", m.qp_weights, coeff)
        g = m.grad_phi
        local = np.einsum("cki,cij,clj->ckl", g, kc, g)
        nloc = m.cells.shape[1]
        rows = np.repeat(m.cells, nloc, axis=1).ravel()
        cols = np.tile(m.cells, (1, nloc)).ravel()
        full = sp.csr_matrix((local.ravel(), (rows, cols)), shape=(m.num_vertices,) * 2)
        return full[self.free_dofs][:, self.free_dofs].tocsr()

    @cached_property
    def stiffness(self) -> sp.csr_matrix:
        """Reduced P1 Laplacian, the Gram matrix of the discrete H1 seminorm."""
        d = self.mesh.dim
        eye = np.broadcast_to(np.eye(d), self.mesh.qp_weights.shape + (d, d))
        return self.assemble_matrix(eye)

    @cached_property
    def stiffness_lu(self):
        return spla.splu(self.stiffness.tocsc())

    def dual_norm(self, r: np.ndarray) -> float:
        """Norm of a reduced residual as a functional on the H1-seminorm space."""
        r = np.asarray(r, dtype=float)
        return float(np.sqrt(max(r @ self.stiffness_lu.solve(r), 0.0)))


def gradient_at_quadrature(w, space: FESpace) -> np.ndarray:
    """(nc, nq, dim) gradients of the P1 interpolant at domain quadrature points."""
    g = space.cell_gradients(w)
    nq = space.mesh.qp_weights.shape[1]
    return np.repeat(g[:, None, :], nq, axis=1)


@dataclass
class GalerkinHierarchy:
    """Nested P1 spaces from uniform refinement of a base mesh."""

    spaces: list
    prolongations: list  # prolongations[k] maps level k to level k + 1

    def __len__(self):
        return len(self.spaces)

    def prolongate(self, x: np.ndarray, from_level: int, to_level: int) -> np.ndarray:
        """Full nodal vector on ``from_level`` interpolated onto ``to_level``."""
        if to_level < from_level:
            raise ValueError("can only prolongate to a finer level")
        w = self.spaces[from_level].expand(x)
        for k in range(from_level, to_level):
            w = self.prolongations[k] @ w
        return w

    def transfer_matrix(self, from_level: int, to_level: int) -> sp.csr_matrix:
        n = self.spaces[from_level].num_nodes
        P = sp.identity(n, format="csr")
        for k in range(from_level, to_level):
            P = (self.prolongations[k] @ P).tocsr()
        return P

    def interpolation_errors(self, probe: Callable | str | None = None) -> np.ndarray:
        """L2 nodal-interpolation errors of a smooth probe field on every level.

        The default probe sin(pi z1) certifies that the union of the spaces is
        dense: the error must decrease from level to level.
        """
        probe = probe or (lambda z: np.sin(np.pi * z[..., 0]))
        return np.array([l2_error(s, sample_field(probe, s.mesh.vertices), probe) for s in self.spaces])


def build_hierarchy(mesh: Mesh, levels: int) -> GalerkinHierarchy:
    if levels < 1:
        raise ValueError("need at least one level")
    meshes = [mesh]
    for _ in range(levels - 1):
        meshes.append(refine(meshes[-1]))
    return GalerkinHierarchy([FESpace(m) for m in meshes], [m.prolongation for m in meshes[1:]])


def prolongate(coarse_field, from_space: FESpace, to_space: FESpace) -> np.ndarray:
    """Interpolate a P1 field onto the once-refined space; exact for P1 fields."""
    if not to_space.mesh.is_refinement_of(from_space.mesh):
        raise ValueError("target space is not the refinement of the source space")
    return to_space.mesh.prolongation @ from_space.expand(coarse_field)


def _tri_rule(order: int):
    g, w = np.polynomial.legendre.leggauss(order)
    g = 0.5 * (g + 1)
    w = 0.5 * w
    U, Vv = np.meshgrid(g, g, indexing="ij")
    WU, WV = np.meshgrid(w, w, indexing="ij")
    s = U.ravel()
    t = (Vv * (1 - U)).ravel()
    wt = (WU * WV * (1 - U)).ravel()
    return np.stack([s, t], 1), wt


def l2_error(space: FESpace, w, exact, order: int = 5) -> float:
    """L2 distance between a P1 field and ``exact`` using a high-order rule."""
    m = space.mesh
    w = space.expand(w)
    if m.dim == 1:
        g, wt = np.polynomial.legendre.leggauss(order)
        t = 0.5 * (g + 1)
        phi = np.stack([1 - t, t], 1)
        wts = m.volumes[:, None] * (0.5 * wt)[None, :]
    else:
        pts, wt = _tri_rule(order)
        phi = np.stack([1 - pts[:, 0] - pts[:, 1], pts[:, 0], pts[:, 1]], 1)
        wts = 2.0 * m.volumes[:, None] * wt[None, :]
    x = np.einsum("ql,cld->cqd", phi, m.vertices[m.cells])
    uh = w[m.cells] @ phi.T
    diff = uh - sample_field(exact, x)
    return float(np.sqrt(np.sum(wts * diff**2)))


# -- text exchange format ------------------------------------------------------
def write_mesh(mesh: Mesh, path) -> None:
    """Write the block format::

        VERTICES <n>
        <x> [<y>]
        CELLS <n>
        <i> <j> [<k>]
        FACETS <n>
        <i> [<j>] DIRICHLET|CONTACT

    Indices are zero based, floats use repr so files round-trip exactly.
    Lines starting with ``#`` and blank lines are ignored on reading.
    """
    lines = [f"VERTICES {mesh.num_vertices}"]
    lines += [" ".join(repr(float(c)) for c in row) for row in mesh.vertices]
    lines.append(f"CELLS {mesh.num_cells}")
    lines += [" ".join(str(int(i)) for i in row) for row in mesh.cells]
    lines.append(f"FACETS {len(mesh.facets)}")
    lines += [
        " ".join(str(int(i)) for i in row) + " " + TAG_NAMES[int(t)]
        for row, t in zip(mesh.facets, mesh.facet_tags)
    ]
    Path(path).write_text("\n".join(lines) + "\n")


def read_mesh(path) -> Mesh:
    raw = [ln.strip() for ln in Path(path).read_text().splitlines()]
    lines = [ln for ln in raw if ln and not ln.startswith("#")]
    sections = {}
    i = 0
    while i < len(lines):
        head = lines[i].split()
        if len(head) != 2 or head[0] not in ("VERTICES", "CELLS", "FACETS"):
            raise MeshError(f"expected a section header, got {lines[i]!r}")
        n = int(head[1])
        sections[head[0]] = [ln.split() for ln in lines[i + 1 : i + 1 + n]]
        if len(sections[head[0]]) != n:
            raise MeshError(f"section {head[0]} is truncated")
        i += n + 1
    missing = {"VERTICES", "CELLS", "FACETS"} - set(sections)
    if missing:
        raise MeshError(f"missing sections: {sorted(missing)}")
    verts = np.array([[float(t) for t in row] for row in sections["VERTICES"]])
    cells = np.array([[int(t) for t in row] for row in sections["CELLS"]])
    try:
        tags = [_TAG_CODES[row[-1]] for row in sections["FACETS"]]
    except KeyError as err:
        raise MeshError(f"unknown facet tag {err.args[0]!r}") from None
    facets = np.array([[int(t) for t in row[:-1]] for row in sections["FACETS"]])
    return Mesh(verts, cells, facets, tags)


def mesh_from_spec(spec: dict, base_dir: Path | None = None) -> Mesh:
    """Build a mesh from the ``domain`` block of a problem file."""
    kind = spec.get("type")
    bnd = spec.get("boundary", {})
    dirichlet = tuple(bnd.get("dirichlet", ("left",)))
    if kind == "interval":
        contact = tuple(bnd.get("contact", ("right",)))
        return interval_mesh(int(spec["cells"]), spec.get("a", 0.0), spec.get("b", 1.0), dirichlet, contact)
    if kind == "rectangle":
        contact = tuple(bnd.get("contact", ("right", "bottom", "top")))
        lo = spec.get("lower", [0.0, 0.0])
        hi = spec.get("upper", [1.0, 1.0])
        return rectangle_mesh(int(spec["cells"]), int(spec.get("cells_y", spec["cells"])), lo, hi, dirichlet, contact)
    if kind == "file":
        p = Path(spec["path"])
        if base_dir is not None and not p.is_absolute():
            p = base_dir / p
        return read_mesh(p)
    if kind == "inline":
        tags = [_TAG_CODES[t] for t in spec["facet_tags"]]
        return Mesh(np.asarray(spec["vertices"], float), spec["cells"], spec["facets"], tags)
    raise MeshError(f"unknown mesh type {kind!r}")
