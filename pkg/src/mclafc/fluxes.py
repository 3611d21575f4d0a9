"""Flux potentials, raw antidiffusive fluxes, bar states and local bounds.

Edge quantities are stored once per undirected edge ``(i, j)`` with
``i < j``; the value for ``(j, i)`` is obtained by a sign flip, so the
antisymmetry ``f_ij = -f_ji`` holds by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .assembly import SystemOperators, eval_datum


def advective_potential(u, ops: SystemOperators, b=None) -> np.ndarray:
    """Lumped-mass Galerkin time derivative ``(b - A u) / m``."""
    b = ops.inflow_vector() if b is None else b
    return (b - ops.A @ u) / ops.mL


def dissipative_potential_loworder(u, ops: SystemOperators, omega: float = 1.0) -> np.ndarray:
    # D has zero row sums, so (D u)_i = sum_{j != i} d_ij (u_j - u_i)
    return omega * (ops.D @ u) / ops.mL


def discrete_laplacians(u, ops: SystemOperators) -> np.ndarray:
    """``Delta_l(u) = sum_{k != l} m_lk (u_k - u_l) / m_l``."""
    return (ops.Mc @ u) / ops.mL - u


def biharmonic_scaling(ops: SystemOperators) -> np.ndarray:
    """Per-node ``beta_l = sqrt(max_k d_lk / min_k m_lk)`` over off-diagonal neighbours."""
    e = ops.edges
    n = ops.n
    dmax = np.zeros(n)
    mmin = np.full(n, np.inf)
    np.maximum.at(dmax, e.i, e.d)
    np.maximum.at(dmax, e.j, e.d)
    np.minimum.at(mmin, e.i, e.m)
    np.minimum.at(mmin, e.j, e.m)
    return np.sqrt(dmax / mmin)


def dissipative_potential_biharmonic(u, ops: SystemOperators, omega: float = 1.0,
                                     lumped: bool = False) -> np.ndarray:
    """Fourth-order stabilizing potential built from averaged discrete Laplacians.

    With ``lumped=True`` the outer mass-weighted average is replaced by its
    diagonal (``m_il -> m_i delta_il``).
    """
    beta = biharmonic_scaling(ops)
    g = beta * discrete_laplacians(u, ops)
    avg = ops.mL * g if lumped else ops.Mc @ g
    return omega * beta * avg / ops.mL


@dataclass(eq=False)
class EdgeFluxSet:
    """Per-edge fluxes, bar states and correction factors (``i < j`` orientation)."""

    i: np.ndarray
    j: np.ndarray
    f_diff: np.ndarray
    f_mass: np.ndarray
    bar_ij: np.ndarray
    bar_ji: np.ndarray
    degenerate: np.ndarray
    f_star: Optional[np.ndarray] = None
    fdot_star: Optional[np.ndarray] = None
    f_final: Optional[np.ndarray] = None
    alpha: Optional[np.ndarray] = None
    alpha_dot: Optional[np.ndarray] = None
    alpha_dot_minus: Optional[np.ndarray] = None
    # factor actually multiplying f_mass in the final flux
    mass_factor: Optional[np.ndarray] = None
    # debug: prelimited ratio fdot / f_mass before the second MCL pass
    alpha_dot_prelimited: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def f_total(self) -> np.ndarray:
        return self.f_diff + self.f_mass

    def directed(self, name: str, a: int, b: int) -> float:
        """Value of the flux ``name`` oriented from node ``a`` to node ``b``."""
        values = getattr(self, name)
        lo, hi = min(a, b), max(a, b)
        k = np.flatnonzero((self.i == lo) & (self.j == hi))
        if k.size == 0:
            raise KeyError(f"no edge between {a} and {b}")
        v = float(values[k[0]])
        return v if a < b else -v


def bar_states(u, ops: SystemOperators):
    """Bar states ``(bar_ij, bar_ji, degenerate)`` for every edge.

    Edges with ``d_ij = 0`` are flagged degenerate; their bar states are set
    to the arithmetic mean and carry no antidiffusive flux.
    """
    e = ops.edges
    ui, uj = u[e.i], u[e.j]
    degenerate = e.d <= 0.0
    d = np.where(degenerate, 1.0, e.d)
    mean = 0.5 * (ui + uj)
    diff = uj - ui
    bar_ij = np.where(degenerate, mean, mean - e.a_ij * diff / (2.0 * d))
    bar_ji = np.where(degenerate, mean, mean + e.a_ji * diff / (2.0 * d))
    return bar_ij, bar_ji, degenerate


def raw_fluxes(u, udot, ops: SystemOperators) -> EdgeFluxSet:
    """Split target fluxes ``d_ij (u_i - u_j)`` and ``m_ij (udot_i - udot_j)``."""
    e = ops.edges
    u = np.asarray(u, dtype=float)
    udot = np.asarray(udot, dtype=float)
    bar_ij, bar_ji, degenerate = bar_states(u, ops)
    f_diff = e.d * (u[e.i] - u[e.j])
    f_mass = e.m * (udot[e.i] - udot[e.j])
    f_diff[degenerate] = 0.0
    f_mass[degenerate] = 0.0
    return EdgeFluxSet(i=e.i, j=e.j, f_diff=f_diff, f_mass=f_mass,
                       bar_ij=bar_ij, bar_ji=bar_ji, degenerate=degenerate)


@dataclass(frozen=True, eq=False)
class LocalBounds:
    umin: np.ndarray
    umax: np.ndarray


def local_bounds(u, ops: SystemOperators, u_in=None, t: float | None = None) -> LocalBounds:
    """Stencil minima and maxima, widened by the inflow datum at inlet nodes."""
    e = ops.edges
    u = np.asarray(u, dtype=float)
    umin = u.copy()
    umax = u.copy()
    np.minimum.at(umin, e.i, u[e.j])
    np.minimum.at(umin, e.j, u[e.i])
    np.maximum.at(umax, e.i, u[e.j])
    np.maximum.at(umax, e.j, u[e.i])
    if ops.inflow_nodes.size:
        datum = ops.u_in if u_in is None else u_in
        value = eval_datum(datum, ops.t if t is None else t)
        k = ops.inflow_nodes
        umin[k] = np.minimum(umin[k], value)
        umax[k] = np.maximum(umax[k], value)
    return LocalBounds(umin, umax)
