"""Assembly of P1 finite element operators in 1D.

Element integrals are evaluated in closed form for constant velocity and
with two-point Gauss quadrature otherwise. Boundary "integrals" over the
inlet reduce to point evaluations at the inflow endpoint.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Union

import numpy as np
import scipy.sparse as sp

from .mesh import Mesh1D

Velocity = Union[float, Callable[[np.ndarray, float], np.ndarray]]
Datum = Union[float, Callable[[float], float]]


class DiffusionVariant(str, Enum):
    RUSANOV = "rusanov"
    DISCRETE_UPWINDING = "upwinding"


def eval_velocity(a: Velocity, x, t: float) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if callable(a):
        return np.broadcast_to(np.asarray(a(x, t), dtype=float), x.shape).copy()
    return np.full(x.shape, float(a))


def eval_datum(u_in: Datum, t: float) -> float:
    return float(u_in(t)) if callable(u_in) else float(u_in)


def _csr(rows, cols, vals, n) -> sp.csr_matrix:
    mat = sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    mat.sum_duplicates()
    mat.sort_indices()
    return mat


def _scatter_local(mesh: Mesh1D, local: np.ndarray) -> sp.csr_matrix:
    """Add ``(n_elements, 2, 2)`` element matrices into a global CSR matrix."""
    conn = mesh.element_nodes()
    rows = np.repeat(conn, 2, axis=1).ravel()
    cols = np.tile(conn, (1, 2)).ravel()
    return _csr(rows, cols, local.ravel(), mesh.n_unknowns)


def inflow_points(mesh: Mesh1D, a: Velocity, t: float = 0.0):
    """Inlet endpoints as ``(unknown indices, |a.n| weights)``.

    The left end is an inlet when ``a(0) > 0``, the right end when
    ``a(L) < 0``. Periodic meshes have no boundary.
    """
    if mesh.periodic:
        return np.zeros(0, dtype=int), np.zeros(0)
    ends = np.array([0.0, mesh.length])
    av = eval_velocity(a, ends, t)
    nodes, weights = [], []
    if av[0] > 0:
        nodes.append(0)
        weights.append(abs(av[0]))
    if av[1] < 0:
        nodes.append(mesh.n_unknowns - 1)
        weights.append(abs(av[1]))
    return np.array(nodes, dtype=int), np.array(weights, dtype=float)


def assemble_mass(mesh: Mesh1D):
    """Consistent mass matrix and lumped masses ``m_i = sum_j m_ij``.

    The lumped masses are summed from half element lengths rather than
    from matrix rows, which makes them exactly ``h`` on uniform meshes.
    """
    ell = mesh.spacing
    local = np.empty((ell.size, 2, 2))
    local[:, 0, 0] = local[:, 1, 1] = ell / 3.0
    local[:, 0, 1] = local[:, 1, 0] = ell / 6.0
    mc = _scatter_local(mesh, local)
    conn = mesh.element_nodes()
    half = 0.5 * ell
    ml = (np.bincount(conn[:, 0], weights=half, minlength=mesh.n_unknowns)
          + np.bincount(conn[:, 1], weights=half, minlength=mesh.n_unknowns))
    return mc, ml


_GAUSS2 = np.array([-1.0, 1.0]) / np.sqrt(3.0)


def assemble_advection(mesh: Mesh1D, a: Velocity = 1.0, t: float = 0.0) -> sp.csr_matrix:
    """Advection matrix ``a_ij = int phi_i a phi_j' + inlet point term``."""
    x = mesh.vertices
    ell = mesh.spacing
    local = np.empty((ell.size, 2, 2))
    if callable(a):
        mid = 0.5 * (x[:-1] + x[1:])
        # phi_left = (1 - s)/2, phi_right = (1 + s)/2 on the reference interval
        phi = np.empty((2, 2))
        for g, s in enumerate(_GAUSS2):
            phi[0, g] = 0.5 * (1.0 - s)
            phi[1, g] = 0.5 * (1.0 + s)
        xg = mid[:, None] + 0.5 * ell[:, None] * _GAUSS2[None, :]
        ag = eval_velocity(a, xg, t)
        # weights ell/2 and derivatives -+1/ell cancel the element length
        for p in range(2):
            moment = 0.5 * (ag * phi[p][None, :]).sum(axis=1)
            local[:, p, 0] = -moment
            local[:, p, 1] = moment
    else:
        half = 0.5 * float(a)
        local[:, :, 0] = -half
        local[:, :, 1] = half
    A = _scatter_local(mesh, local).tolil()
    nodes, weights = inflow_points(mesh, a, t)
    for k, w in zip(nodes, weights):
        A[k, k] += w
    A = A.tocsr()
    A.sort_indices()
    return A


def assemble_diffusion(A: sp.csr_matrix,
                       variant: DiffusionVariant | str = DiffusionVariant.RUSANOV) -> sp.csr_matrix:
    """Graph Laplacian ``D`` with zero row sums built from the off-diagonal of ``A``."""
    variant = DiffusionVariant(variant)
    off = A.tocoo()
    mask = off.row != off.col
    r, c, v = off.row[mask], off.col[mask], off.data[mask]
    At = sp.csr_matrix((v, (c, r)), shape=A.shape)  # a_ji at (i, j)
    aji = np.asarray(At[r, c]).ravel()
    if variant is DiffusionVariant.RUSANOV:
        d = np.maximum(np.abs(v), np.abs(aji))
    else:
        d = np.maximum(np.maximum(v, 0.0), aji)
    n = A.shape[0]
    diag = -np.bincount(r, weights=d, minlength=n)
    rows = np.concatenate([r, np.arange(n)])
    cols = np.concatenate([c, np.arange(n)])
    return _csr(rows, cols, np.concatenate([d, diag]), n)


def assemble_inflow(mesh: Mesh1D, a: Velocity, u_in: Datum, t: float = 0.0) -> np.ndarray:
    """Inflow vector ``b_i = phi_i(x_in) u_in(t) |a(x_in)|``."""
    b = np.zeros(mesh.n_unknowns)
    nodes, weights = inflow_points(mesh, a, t)
    if nodes.size:
        b[nodes] = weights * eval_datum(u_in, t)
    return b


@dataclass(frozen=True, eq=False)
class EdgeList:
    """Undirected stencil edges ``(i, j)`` with ``i < j`` and their coefficients."""

    i: np.ndarray
    j: np.ndarray
    m: np.ndarray
    a_ij: np.ndarray
    a_ji: np.ndarray
    d: np.ndarray

    @property
    def size(self) -> int:
        return self.i.size

    def scatter(self, f: np.ndarray, n: int) -> np.ndarray:
        """Nodal sums ``sum_{j != i} f_ij`` for antisymmetric edge values ``f``."""
        return (np.bincount(self.i, weights=f, minlength=n)
                - np.bincount(self.j, weights=f, minlength=n))


def edge_list(Mc: sp.csr_matrix, A: sp.csr_matrix, D: sp.csr_matrix) -> EdgeList:
    upper = sp.triu(Mc, k=1).tocoo()
    order = np.lexsort((upper.col, upper.row))
    i = upper.row[order].astype(int)
    j = upper.col[order].astype(int)

    def pick(mat, r, c):
        return np.asarray(mat[r, c]).ravel().astype(float)

    return EdgeList(i=i, j=j, m=upper.data[order].astype(float),
                    a_ij=pick(A, i, j), a_ji=pick(A, j, i), d=pick(D, i, j))


@dataclass(frozen=True, eq=False)
class SystemOperators:
    """Assembled operators of the semi-discrete problem on one mesh."""

    mesh: Mesh1D
    Mc: sp.csr_matrix
    mL: np.ndarray
    A: sp.csr_matrix
    D: sp.csr_matrix
    # low order operator D - A, formed once so that cancelling entries are exact
    L: sp.csr_matrix
    edges: EdgeList
    inflow_nodes: np.ndarray
    inflow_weights: np.ndarray
    velocity: Velocity
    u_in: Datum
    lam: float
    t: float = 0.0

    @property
    def n(self) -> int:
        return self.mL.size

    def inflow_vector(self, t: float | None = None) -> np.ndarray:
        t = self.t if t is None else t
        b = np.zeros(self.n)
        if self.inflow_nodes.size:
            b[self.inflow_nodes] = self.inflow_weights * eval_datum(self.u_in, t)
        return b


def max_speed(mesh: Mesh1D, a: Velocity, t: float = 0.0) -> float:
    if not callable(a):
        return abs(float(a))
    x = mesh.vertices
    mid = 0.5 * (x[:-1] + x[1:])
    xg = np.concatenate([x, (mid[:, None] + 0.5 * mesh.spacing[:, None] * _GAUSS2).ravel()])
    return float(np.abs(eval_velocity(a, xg, t)).max())


def assemble_operators(mesh: Mesh1D, velocity: Velocity = 1.0, u_in: Datum = 0.0,
                       t: float = 0.0,
                       variant: DiffusionVariant | str = DiffusionVariant.RUSANOV) -> SystemOperators:
    Mc, mL = assemble_mass(mesh)
    A = assemble_advection(mesh, velocity, t)
    D = assemble_diffusion(A, variant)
    nodes, weights = inflow_points(mesh, velocity, t)
    return SystemOperators(mesh=mesh, Mc=Mc, mL=mL, A=A, D=D, L=(D - A).tocsr(), edges=edge_list(Mc, A, D),
                           inflow_nodes=nodes, inflow_weights=weights, velocity=velocity,
                           u_in=u_in, lam=max_speed(mesh, velocity, t), t=t)


def write_coo(op: sp.spmatrix, path) -> None:
    """Dump a sparse operator as ``i j value`` lines."""
    coo = sp.coo_matrix(op)
    order = np.lexsort((coo.col, coo.row))
    with open(path, "w", encoding="utf-8") as fh:
        for r, c, v in zip(coo.row[order], coo.col[order], coo.data[order]):
            fh.write(f"{r} {c} {float(v)!r}\n")
