"""Piecewise-linear finite elements for the annulus Laplace problems.

On a triangle with vertices p1, p2, p3 and area A the P1 stiffness is
(b b^T + c c^T) / (4 A) with b = (y2-y3, y3-y1, y1-y2) and
c = (x3-x2, x1-x3, x2-x1). The mixed boundary value problem carries
Neumann data on the outer circle and Dirichlet data on the inner one;
Dirichlet nodes are eliminated symmetrically and the reduced SPD system is
solved by diagonally preconditioned conjugate gradients.

The outward normal flux on the inner circle is recovered variationally:
for a discrete solution whose load vanishes at inner-ring nodes, the
stiffness residual restricted to those nodes equals the ring mass applied
to the flux, so dividing by the lumped ring weights gives nodal flux
values. Together with the matching boundary quadratures used for the
Neumann load and the misfit functional, this makes the adjoint gradient
of the discrete functional exact up to solver tolerance.
"""

from __future__ import annotations

import numpy as np
from scipy import sparse
from scipy.sparse import linalg as spla

from .boundary import (
    BoundaryFunction,
    BoundaryRing,
    ring_lumped_weights,
    ring_mass_apply,
    rings_compatible,
)
from .mesh import AnnulusMesh

Array = np.ndarray

__all__ = [
    "SolverError",
    "assemble_stiffness",
    "neumann_load",
    "solve_mixed_bvp",
    "trace",
    "normal_flux",
    "CG_RTOL",
]

CG_RTOL = 1e-10
CG_MAXITER_FACTOR = 20


class SolverError(RuntimeError):
    """Iterative linear solve failed to reach the requested residual."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


def assemble_stiffness(mesh: AnnulusMesh) -> sparse.csr_matrix:
    """Global P1 stiffness matrix of the Laplace operator on ``mesh``."""
    tris = mesh.triangles
    x = mesh.nodes[tris, 0]
    y = mesh.nodes[tris, 1]
    b = y[:, [1, 2, 0]] - y[:, [2, 0, 1]]
    c = x[:, [2, 0, 1]] - x[:, [1, 2, 0]]
    area2 = x[:, 0] * b[:, 0] + x[:, 1] * b[:, 1] + x[:, 2] * b[:, 2]
    if np.any(area2 <= 0.0):
        raise ValueError("mesh contains a degenerate or inverted triangle")

    local = (b[:, :, None] * b[:, None, :] + c[:, :, None] * c[:, None, :]) / (
        2.0 * area2
    )[:, None, None]
    rows = tris[:, [0, 0, 0, 1, 1, 1, 2, 2, 2]].ravel()
    cols = tris[:, [0, 1, 2, 0, 1, 2, 0, 1, 2]].ravel()
    n = mesh.n_nodes
    return sparse.coo_matrix(
        (local.reshape(-1), (rows, cols)), shape=(n, n)
    ).tocsr()


def _require_mesh_ring(mesh: AnnulusMesh, ring: BoundaryRing) -> None:
    if ring.node_ids is None or not (
        rings_compatible(ring, mesh.inner_ring) or rings_compatible(ring, mesh.outer_ring)
    ):
        raise ValueError("boundary data must live on a ring of this mesh")


def neumann_load(mesh: AnnulusMesh, g: BoundaryFunction) -> Array:
    """Global load vector of Neumann data ``g`` on one boundary ring.

    The ring's piecewise-linear mass matrix is applied to the nodal data,
    i.e. the load is the exact line integral of g against each basis hat.
    """
    _require_mesh_ring(mesh, g.ring)
    load = np.zeros(mesh.n_nodes)
    load[g.ring.node_ids] = ring_mass_apply(g.ring, g.values)
    return load


def _cg_solve(matrix: sparse.csr_matrix, rhs: Array, rtol: float) -> Array:
    precond = sparse.diags(1.0 / matrix.diagonal())
    maxiter = CG_MAXITER_FACTOR * matrix.shape[0]
    x, info = spla.cg(matrix, rhs, rtol=rtol, atol=0.0, maxiter=maxiter, M=precond)
    if info != 0:
        rhs_norm = float(np.linalg.norm(rhs))
        res = float(np.linalg.norm(rhs - matrix @ x)) / max(rhs_norm, np.finfo(float).tiny)
        raise SolverError(
            f"conjugate gradients stopped at relative residual {res:.3e} "
            f"(target {rtol:.1e})",
            residual=res,
        )
    return x


def solve_mixed_bvp(
    mesh: AnnulusMesh,
    neumann_outer: BoundaryFunction,
    dirichlet_inner: BoundaryFunction,
    stiffness: sparse.csr_matrix | None = None,
    rtol: float = CG_RTOL,
) -> Array:
    """Nodal solution of the Laplace problem with outer Neumann data and
    inner Dirichlet data.

    Pass a preassembled ``stiffness`` to reuse it across solves on the
    same mesh.
    """
    if not rings_compatible(neumann_outer.ring, mesh.outer_ring):
        raise ValueError("Neumann data must live on the mesh's outer ring")
    if not rings_compatible(dirichlet_inner.ring, mesh.inner_ring):
        raise ValueError("Dirichlet data must live on the mesh's inner ring")
    matrix = assemble_stiffness(mesh) if stiffness is None else stiffness

    load = neumann_load(mesh, neumann_outer)
    fixed = mesh.inner_ring.node_ids
    free = np.ones(mesh.n_nodes, dtype=bool)
    free[fixed] = False

    k_ff = matrix[free][:, free]
    k_fd = matrix[free][:, fixed]
    rhs = load[free] - k_fd @ dirichlet_inner.values

    field = np.empty(mesh.n_nodes)
    field[fixed] = dirichlet_inner.values
    field[free] = _cg_solve(k_ff.tocsr(), rhs, rtol)
    return field


def trace(field: Array, ring: BoundaryRing) -> BoundaryFunction:
    """Restriction of a nodal field to a mesh boundary ring."""
    if ring.node_ids is None:
        raise ValueError("trace requires a ring attached to a mesh")
    return BoundaryFunction(ring, np.asarray(field, dtype=float)[ring.node_ids].copy())


def normal_flux(
    field: Array,
    mesh: AnnulusMesh,
    stiffness: sparse.csr_matrix | None = None,
) -> BoundaryFunction:
    """Outward normal derivative of a solution on the inner ring.

    Valid for fields produced by ``solve_mixed_bvp``: their load vanishes
    at inner-ring nodes, so the stiffness residual there is the ring mass
    applied to the flux. The residual divided by the lumped ring weights
    is the nodal flux, with the normal pointing out of the annulus
    (toward the origin).
    """
    matrix = assemble_stiffness(mesh) if stiffness is None else stiffness
    ring = mesh.inner_ring
    residual = (matrix @ np.asarray(field, dtype=float))[ring.node_ids]
    return BoundaryFunction(ring, residual / ring_lumped_weights(ring))
