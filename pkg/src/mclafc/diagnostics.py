"""Error norms, convergence rates and limiter statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .mesh import Mesh1D


@dataclass(frozen=True)
class ConvergenceRecord:
    N: int
    h: float
    l2Error: float
    eoc: Optional[float] = None


def l2_error(u_h, mesh: Mesh1D, exact: Callable[[np.ndarray], np.ndarray],
             quad_order: int = 5) -> float:
    """L2 norm of ``u_h - exact`` with Gauss-Legendre quadrature on every element.

    ``u_h`` holds nodal values at the unknowns and is interpolated linearly
    inside each element.
    """
    s, w = np.polynomial.legendre.leggauss(quad_order)
    u_h = np.asarray(u_h, dtype=float)
    conn = mesh.element_nodes()
    x = mesh.vertices
    ell = mesh.spacing
    lam = 0.5 * (1.0 + s)  # local coordinate in [0, 1]
    xq = x[:-1, None] + ell[:, None] * lam[None, :]
    uq = u_h[conn[:, 0], None] * (1.0 - lam) + u_h[conn[:, 1], None] * lam
    err = (uq - exact(xq)) ** 2
    return math.sqrt(float(np.sum(0.5 * ell[:, None] * w[None, :] * err)))


def eoc(records: Sequence[tuple[float, float]]) -> list[Optional[float]]:
    """Rates ``log(e_prev / e_cur) / log(h_prev / h_cur)`` between consecutive levels.

    Undefined rates (a zero error) are returned as ``None``.
    """
    if len(records) < 2:
        raise ValueError("need at least two (h, error) records")
    rates = []
    for (h0, e0), (h1, e1) in zip(records[:-1], records[1:]):
        if e0 <= 0.0 or e1 <= 0.0:
            rates.append(None)
        else:
            rates.append(math.log(e0 / e1) / math.log(h0 / h1))
    return rates


def convergence_table(levels: Sequence[tuple[int, float, float]]) -> list[ConvergenceRecord]:
    """Attach EOCs to ``(N, h, error)`` triples."""
    rates = [None] + eoc([(h, err) for _, h, err in levels]) if len(levels) > 1 else [None]
    return [ConvergenceRecord(int(n), float(h), float(err), r)
            for (n, h, err), r in zip(levels, rates)]


def lumped_norm(u, mL) -> float:
    u = np.asarray(u, dtype=float)
    return math.sqrt(float(np.sum(mL * u * u)))


def overall_factors(edges, u, udot, ops):
    """Overall correction factors ``(alpha_bar, alpha_dot_bar)``.

    ``alpha_bar`` is one minus the fraction of low order diffusion that
    survives limiting; ``alpha_dot_bar`` is the fraction of the mass
    antidiffusion that is retained. Either is ``nan`` when its denominator
    vanishes.
    """
    e = ops.edges
    u = np.asarray(u, dtype=float)
    du2 = (u[e.i] - u[e.j]) ** 2
    den_d = float(np.sum(e.d * du2))
    alpha_bar = float("nan")
    if den_d > 0.0 and edges.alpha is not None:
        alpha_bar = 1.0 - float(np.sum((1.0 - edges.alpha) * e.d * du2)) / den_d
    alpha_dot_bar = float("nan")
    if udot is not None and edges.mass_factor is not None:
        udot = np.asarray(udot, dtype=float)
        dv2 = (udot[e.i] - udot[e.j]) ** 2
        den_m = float(np.sum(e.m * dv2))
        if den_m > 0.0:
            alpha_dot_bar = float(np.sum(edges.mass_factor * e.m * dv2)) / den_m
    return alpha_bar, alpha_dot_bar


def bounds_violation(bounds, u) -> float:
    """Largest amount by which ``u`` leaves ``[umin, umax]`` (0 if it does not)."""
    u = np.asarray(u, dtype=float)
    over = np.maximum(bounds.umin - u, u - bounds.umax)
    return float(max(0.0, over.max()))
