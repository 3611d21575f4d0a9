"""Monolithic convex limiting and coercivity enforcement."""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from enum import Enum

import numpy as np

from .assembly import SystemOperators
from .fluxes import EdgeFluxSet, LocalBounds


class LimiterConsistencyError(RuntimeError):
    """A correction factor left [0, 1]; indicates a bug, not bad input."""


def mcl_limit(f, bar_ij, bar_ji, bounds_i, bounds_j, d):
    """Limit ``f`` so that both limited bar states stay within local bounds.

    ``bounds_i`` and ``bounds_j`` are ``(umin, umax)`` pairs. Works on
    scalars and on arrays of edges. Edges with ``d <= 0`` get a zero flux.
    The caps are clipped at zero so that the result always has the sign of
    ``f`` even when roundoff puts a bar state marginally outside its bounds.
    """
    f = np.asarray(f, dtype=float)
    bar_ij = np.asarray(bar_ij, dtype=float)
    bar_ji = np.asarray(bar_ji, dtype=float)
    d = np.asarray(d, dtype=float)
    umin_i, umax_i = (np.asarray(v, dtype=float) for v in bounds_i)
    umin_j, umax_j = (np.asarray(v, dtype=float) for v in bounds_j)
    two_d = 2.0 * d
    up = np.minimum(f, np.minimum(two_d * (umax_i - bar_ij), two_d * (bar_ji - umin_j)))
    down = np.maximum(f, np.maximum(two_d * (umin_i - bar_ij), two_d * (bar_ji - umax_j)))
    out = np.where(f >= 0.0, np.maximum(up, 0.0), np.minimum(down, 0.0))
    out = np.where(d > 0.0, out, 0.0)
    return out if out.ndim else float(out)


def minmod(a, b):
    """``sign(a) * min(|a|, |b|)`` when ``a`` and ``b`` share a sign, else 0."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    out = np.where(a * b > 0.0, np.sign(a) * np.minimum(np.abs(a), np.abs(b)), 0.0)
    return out if out.ndim else float(out)


def _ratio(num, den):
    safe = np.where(den != 0.0, den, 1.0)
    return np.where(den != 0.0, num / safe, 0.0)


def edge_bounds(bounds: LocalBounds, edges: EdgeFluxSet):
    return ((bounds.umin[edges.i], bounds.umax[edges.i]),
            (bounds.umin[edges.j], bounds.umax[edges.j]))


def nonlinear_form_d(alpha, w, ops: SystemOperators, z=None) -> float:
    """Residual-diffusion form ``sum_{i<j} (1 - alpha_ij) d_ij (w_i - w_j)(z_i - z_j)``."""
    e = ops.edges
    w = np.asarray(w, dtype=float)
    z = w if z is None else np.asarray(z, dtype=float)
    return float(np.sum((1.0 - alpha) * e.d * (w[e.i] - w[e.j]) * (z[e.i] - z[e.j])))


def nonlinear_form_m(factors, w, ops: SystemOperators, z=None) -> float:
    """Mass-antidiffusion form ``sum_{i<j} c_ij m_ij (w_i - w_j)(z_i - z_j)``."""
    e = ops.edges
    w = np.asarray(w, dtype=float)
    z = w if z is None else np.asarray(z, dtype=float)
    return float(np.sum(factors * e.m * (w[e.i] - w[e.j]) * (z[e.i] - z[e.j])))


def gcc_tolerance(udot, ops: SystemOperators) -> float:
    e = ops.edges
    udot = np.asarray(udot, dtype=float)
    return 1e-12 * max(1.0, float(np.sum(e.m * (udot[e.i] - udot[e.j]) ** 2)))


def gcc_residual(alpha, mass_factors, u, udot, ops: SystemOperators,
                 gamma: float, h: float, lam: float):
    """Both sides of the generalized coercivity condition.

    ``alpha`` weights the diffusive form, ``mass_factors`` the mass form and
    ``udot`` is the (possibly rescaled) time-derivative approximation that
    enters the antidiffusive fluxes ``mass_factors * m_ij (udot_i - udot_j)``.
    """
    lhs = gamma * h / lam * nonlinear_form_m(mass_factors, udot, ops)
    rhs = (1.0 - gamma) * nonlinear_form_d(alpha, u, ops) - nonlinear_form_m(mass_factors, udot, ops, u)
    return lhs, rhs


@dataclass
class CoercivityReport:
    Pplus: float
    Pminus: float
    Q: float
    Dval: float
    alphaPlus: float
    alphaMinus: float
    gccLhs: float
    gccRhs: float
    satisfied: bool

    @classmethod
    def field_names(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def as_row(self) -> list:
        return [getattr(self, name) for name in self.field_names()]


def coercivity_factors(Pplus: float, Pminus: float, Q: float, Dval: float, gamma: float):
    """Global factors ``(alpha_plus, alpha_minus)`` for the sufficient coercivity condition."""
    if Q > 0.0:
        r = Pplus / (2.0 * gamma * Q)
        alpha_plus = min(1.0, r + np.sqrt(r * r + (1.0 - gamma) * Dval / (gamma * Q)))
    else:
        alpha_plus = 1.0
    if Pminus == 0.0 or alpha_plus == 0.0:
        alpha_minus = 1.0
    else:
        num = (alpha_plus * gamma * Q - Pplus) * alpha_plus - (1.0 - gamma) * Dval
        alpha_minus = min(1.0, num / (alpha_plus * Pminus))
        alpha_minus = min(1.0, max(0.0, alpha_minus))
    return float(alpha_plus), float(alpha_minus)


class Prelimit(str, Enum):
    """Second argument of the minmod prelimiter for the mass fluxes.

    ``CLIPPED``: ``f_mass - (f_diff - f_star)``, i.e. the mass flux is reduced
    by whatever the first pass removed from the diffusive flux.
    ``REMAINDER``: ``f_mass + f_diff - f_star``; with this choice the two
    limiting passes compose to plain MCL of the total flux whenever the
    global factors equal one.
    """

    CLIPPED = "clipped"
    REMAINDER = "remainder"


def prelimit_mass_flux(f_mass, f_diff, f_star, mode: Prelimit | str = Prelimit.CLIPPED):
    if Prelimit(mode) is Prelimit.CLIPPED:
        return minmod(f_mass, f_mass - (f_diff - f_star))
    return minmod(f_mass, f_mass + f_diff - f_star)


def ce_limit(edges: EdgeFluxSet, bounds: LocalBounds, ops: SystemOperators, u, udot,
             gamma: float = 0.4, h: float | None = None, lam: float | None = None,
             prelimit: Prelimit | str = Prelimit.CLIPPED, tol: float = 1e-12):
    """Coercivity-enforcing MCL.

    Returns a copy of ``edges`` with all limited quantities filled in and a
    :class:`CoercivityReport`. The diffusive part is limited first; the
    mass part is prelimited by minmod (see :class:`Prelimit`), limited again
    around the once-corrected bar states and finally scaled by the global
    factors ``alpha_plus`` and ``alpha_minus``.
    """
    h = ops.mesh.h if h is None else h
    lam = ops.lam if lam is None else lam
    e = ops.edges
    u = np.asarray(u, dtype=float)
    udot = np.asarray(udot, dtype=float)
    bi, bj = edge_bounds(bounds, edges)
    two_d = 2.0 * np.where(edges.degenerate, 1.0, e.d)

    f_star = mcl_limit(edges.f_diff, edges.bar_ij, edges.bar_ji, bi, bj, e.d)
    alpha = _ratio(f_star, edges.f_diff)

    bar_ij = edges.bar_ij + f_star / two_d
    bar_ji = edges.bar_ji - f_star / two_d
    fdot = prelimit_mass_flux(edges.f_mass, edges.f_diff, f_star, prelimit)
    fdot_star = mcl_limit(fdot, bar_ij, bar_ji, bi, bj, e.d)
    alpha_dot = _ratio(fdot_star, edges.f_mass)
    if np.any(alpha_dot < -tol) or np.any(alpha_dot > 1.0 + tol):
        raise LimiterConsistencyError(
            f"alpha_dot outside [0, 1]: [{alpha_dot.min()}, {alpha_dot.max()}]")
    alpha_dot = np.clip(alpha_dot, 0.0, 1.0)

    du = u[e.i] - u[e.j]
    dudot = udot[e.i] - udot[e.j]
    s = -dudot * du  # (udot_i - udot_j)(u_j - u_i)
    Pplus = float(np.sum(alpha_dot * e.m * np.maximum(0.0, s)))
    Pminus = float(np.sum(alpha_dot * e.m * np.minimum(0.0, s)))
    Q = float(h / lam * np.sum(alpha_dot * e.m * dudot ** 2))
    Dval = nonlinear_form_d(alpha, u, ops)
    alpha_plus, alpha_minus = coercivity_factors(Pplus, Pminus, Q, Dval, gamma)

    alpha_dot_minus = np.where(s >= 0.0, alpha_dot, alpha_minus * alpha_dot)
    f_final = f_star + alpha_plus * alpha_dot_minus * edges.f_mass

    lhs, rhs = gcc_residual(alpha, alpha_dot_minus, u, alpha_plus * udot, ops, gamma, h, lam)
    report = CoercivityReport(Pplus=Pplus, Pminus=Pminus, Q=Q, Dval=Dval,
                              alphaPlus=alpha_plus, alphaMinus=alpha_minus,
                              gccLhs=lhs, gccRhs=rhs,
                              satisfied=bool(lhs <= rhs + gcc_tolerance(udot, ops)))
    limited = replace(edges, f_star=f_star, fdot_star=fdot_star, f_final=f_final,
                      alpha=alpha, alpha_dot=alpha_dot, alpha_dot_minus=alpha_dot_minus,
                      mass_factor=alpha_plus * alpha_dot_minus,
                      alpha_dot_prelimited=_ratio(fdot, edges.f_mass))
    return limited, report
