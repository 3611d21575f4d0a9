"""Semi-discrete right-hand sides for the Galerkin, low order and flux-corrected schemes."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .assembly import (DiffusionVariant, SystemOperators, Velocity, Datum,
                       assemble_operators, eval_datum)
from .diagnostics import overall_factors
from .fluxes import (EdgeFluxSet, LocalBounds, dissipative_potential_biharmonic,
                     dissipative_potential_loworder, local_bounds, raw_fluxes)
from .limiter import (CoercivityReport, Prelimit, _ratio, ce_limit, edge_bounds, gcc_residual,
                      gcc_tolerance, mcl_limit)
from .mesh import Boundary, Mesh1D


class ConfigurationError(ValueError):
    pass


class FactorizationError(np.linalg.LinAlgError):
    pass


class SchemeKind(str, Enum):
    GC = "gc"
    GS = "gs"
    LF = "lf"
    MCL = "mcl"
    MC0 = "mc0"
    CE = "ce"

    @property
    def label(self) -> str:
        return {"gc": "GC", "gs": "GS", "lf": "LF", "mcl": "MC-L",
                "mc0": "MC-0", "ce": "CE"}[self.value]


class StabilizationVariant(str, Enum):
    LOW_ORDER = "loworder"
    BIHARMONIC = "biharmonic"


@dataclass(frozen=True)
class SchemeConfig:
    kind: SchemeKind
    omega: float = 1.0
    gamma: float = 0.4
    diffusion: DiffusionVariant = DiffusionVariant.RUSANOV
    stabilization: StabilizationVariant = StabilizationVariant.LOW_ORDER
    prelimit: Prelimit = Prelimit.CLIPPED

    def __post_init__(self):
        try:
            object.__setattr__(self, "kind", SchemeKind(self.kind))
            object.__setattr__(self, "prelimit", Prelimit(self.prelimit))
            object.__setattr__(self, "diffusion", DiffusionVariant(self.diffusion))
            object.__setattr__(self, "stabilization", StabilizationVariant(self.stabilization))
        except ValueError as exc:
            raise ConfigurationError(str(exc)) from None
        if not 0.0 < self.gamma < 1.0:
            raise ConfigurationError(f"gamma must lie in (0, 1), got {self.gamma}")
        if not 0.0 <= self.omega <= 1.0:
            raise ConfigurationError(f"omega must lie in [0, 1], got {self.omega}")

    @property
    def bound_preserving(self) -> bool:
        return self.kind in (SchemeKind.LF, SchemeKind.MC0, SchemeKind.MCL, SchemeKind.CE)


class MassSolver:
    """Direct solver for the consistent mass matrix.

    Tridiagonal systems are factored once with a banded Cholesky
    decomposition. For periodic meshes the two corner entries ``c`` are
    removed by adding ``c v v^T`` with ``v = e_0 - e_{n-1}``, which keeps the
    banded part SPD; the correction is undone with the Sherman-Morrison
    formula.
    """

    def __init__(self, Mc: sp.spmatrix, boundary: Boundary | str = Boundary.INFLOW_OUTFLOW):
        Mc = sp.csr_matrix(Mc)
        n = Mc.shape[0]
        if abs(Mc - Mc.T).max() > 1e-14 * abs(Mc).max():
            raise FactorizationError("mass matrix is not symmetric")
        self.n = n
        self.periodic = Boundary(boundary) is Boundary.PERIODIC
        self._dense = None
        try:
            if n <= 2:
                self._dense = sla.cho_factor(Mc.toarray())
                return
            diag = Mc.diagonal().copy()
            off = Mc.diagonal(1).copy()
            self.c = float(Mc[0, n - 1]) if self.periodic else 0.0
            if self.c != 0.0:
                diag[0] += self.c
                diag[-1] += self.c
            bands = np.zeros((2, n))
            bands[0, 1:] = off
            bands[1] = diag
            self._chol = sla.cholesky_banded(bands)
        except np.linalg.LinAlgError as exc:
            raise FactorizationError(f"mass matrix is not SPD: {exc}") from None
        if self.c != 0.0:
            v = np.zeros(n)
            v[0], v[-1] = 1.0, -1.0
            self._y = sla.cho_solve_banded((self._chol, False), v)
            denom = 1.0 - self.c * (self._y[0] - self._y[-1])
            if not denom > 0.0:
                raise FactorizationError("periodic mass matrix is not SPD")
            self._denom = denom

    def solve(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        if self._dense is not None:
            return sla.cho_solve(self._dense, r)
        z = sla.cho_solve_banded((self._chol, False), r)
        if self.c != 0.0:
            z = z + self.c * (z[0] - z[-1]) / self._denom * self._y
        return z


def mass_solve(Mc, r, boundary: Boundary | str = Boundary.INFLOW_OUTFLOW) -> np.ndarray:
    return MassSolver(Mc, boundary).solve(r)


@dataclass(eq=False)
class StageInfo:
    """By-products of one right-hand side evaluation."""

    bounds: LocalBounds
    udot: Optional[np.ndarray] = None
    edges: Optional[EdgeFluxSet] = None
    report: Optional[CoercivityReport] = None
    gcc_lhs: float = float("nan")
    gcc_rhs: float = float("nan")
    gcc_tol: float = 0.0
    alpha_plus: float = float("nan")
    alpha_minus: float = float("nan")
    alpha_bar: float = float("nan")
    alpha_dot_bar: float = float("nan")

    @property
    def gcc_violated(self) -> bool:
        return bool(self.gcc_lhs > self.gcc_rhs + self.gcc_tol)


def _flux_potential(u, base, cfg: SchemeConfig, ops: SystemOperators) -> np.ndarray:
    if cfg.kind in (SchemeKind.LF, SchemeKind.MC0):
        return np.zeros_like(u)
    udot = base / ops.mL
    if cfg.stabilization is StabilizationVariant.BIHARMONIC:
        return udot + dissipative_potential_biharmonic(u, ops, cfg.omega)
    return udot + dissipative_potential_loworder(u, ops, cfg.omega)


def evaluate(u, t: float, cfg: SchemeConfig, ops: SystemOperators,
             solver: MassSolver | None = None):
    """Return ``(du/dt, StageInfo)`` for scheme ``cfg`` at state ``u``."""
    u = np.asarray(u, dtype=float)
    base = ops.inflow_vector(t) - ops.A @ u
    bounds = local_bounds(u, ops, t=t)
    if cfg.kind is SchemeKind.GC:
        solver = solver or MassSolver(ops.Mc, ops.mesh.boundary)
        return solver.solve(base), StageInfo(bounds=bounds)

    udot = _flux_potential(u, base, cfg, ops)
    edges = raw_fluxes(u, udot, ops)
    e = ops.edges
    h, lam = ops.mesh.h, ops.lam
    info = StageInfo(bounds=bounds, udot=udot)
    kind = cfg.kind
    if kind is SchemeKind.CE:
        edges, report = ce_limit(edges, bounds, ops, u, udot, cfg.gamma, h, lam,
                                  prelimit=cfg.prelimit)
        info.report = report
        info.alpha_plus, info.alpha_minus = report.alphaPlus, report.alphaMinus
        info.gcc_lhs, info.gcc_rhs = report.gccLhs, report.gccRhs
    else:
        ones = np.ones(e.size)
        if kind is SchemeKind.LF:
            alpha, mass_factor = 0.0 * ones, 0.0 * ones
            f_final = np.zeros(e.size)
        elif kind is SchemeKind.GS:
            alpha, mass_factor = ones, ones
            f_final = edges.f_total
        else:
            target = edges.f_diff if kind is SchemeKind.MC0 else edges.f_total
            bi, bj = edge_bounds(bounds, edges)
            f_final = mcl_limit(target, edges.bar_ij, edges.bar_ji, bi, bj, e.d)
            alpha = _ratio(f_final, target)
            mass_factor = alpha if kind is SchemeKind.MCL else 0.0 * ones
        edges.f_star = f_final
        edges.f_final = f_final
        edges.alpha = alpha
        edges.mass_factor = mass_factor
        info.gcc_lhs, info.gcc_rhs = gcc_residual(alpha, mass_factor, u, udot, ops,
                                                  cfg.gamma, h, lam)
    info.gcc_tol = gcc_tolerance(udot, ops)
    info.edges = edges
    info.alpha_bar, info.alpha_dot_bar = overall_factors(edges, u, udot, ops)
    rhs_num = ops.inflow_vector(t) + ops.L @ u + e.scatter(edges.f_final, ops.n)
    return rhs_num / ops.mL, info


def rhs(u, t: float, cfg: SchemeConfig, ops: SystemOperators,
        solver: MassSolver | None = None) -> np.ndarray:
    """Time derivative ``du/dt`` of the semi-discrete scheme ``cfg``."""
    return evaluate(u, t, cfg, ops, solver)[0]


def bar_state_form(u, t: float, edges: EdgeFluxSet, ops: SystemOperators) -> np.ndarray:
    """``m_i du_i/dt`` assembled from limited bar states and the inlet term."""
    e = ops.edges
    u = np.asarray(u, dtype=float)
    ui, uj = u[e.i], u[e.j]
    deg = edges.degenerate
    two_d = 2.0 * e.d
    safe = np.where(deg, 1.0, two_d)
    f = edges.f_final
    to_i = np.where(deg, -e.a_ij * (uj - ui), two_d * (edges.bar_ij + f / safe - ui))
    to_j = np.where(deg, -e.a_ji * (ui - uj), two_d * (edges.bar_ji - f / safe - uj))
    out = np.bincount(e.i, weights=to_i, minlength=ops.n) + np.bincount(e.j, weights=to_j, minlength=ops.n)
    if ops.inflow_nodes.size:
        k = ops.inflow_nodes
        out[k] += ops.inflow_weights * (eval_datum(ops.u_in, t) - u[k])
    return out


def equivalence_check(u, cfg: SchemeConfig, ops: SystemOperators, t: float = 0.0) -> float:
    """Largest gap between the bar-state form and the flux form of the scheme."""
    if cfg.kind is SchemeKind.GC:
        raise ConfigurationError("GC has no bar-state representation")
    dudt, info = evaluate(u, t, cfg, ops)
    return float(np.max(np.abs(bar_state_form(u, t, info.edges, ops) - ops.mL * dudt)))


class Scheme:
    """A scheme bound to a mesh and problem data, caching operators.

    Operators are reassembled per evaluation only when the velocity is a
    callable (possibly time-dependent) field.
    """

    def __init__(self, cfg: SchemeConfig, mesh: Mesh1D, velocity: Velocity = 1.0,
                 u_in: Datum = 0.0):
        self.cfg = cfg
        self.mesh = mesh
        self.velocity = velocity
        self.u_in = u_in
        self._ops = assemble_operators(mesh, velocity, u_in, 0.0, cfg.diffusion)
        self._solver = MassSolver(self._ops.Mc, mesh.boundary) if cfg.kind is SchemeKind.GC else None

    def operators(self, t: float = 0.0) -> SystemOperators:
        if callable(self.velocity) and t != self._ops.t:
            self._ops = assemble_operators(self.mesh, self.velocity, self.u_in, t, self.cfg.diffusion)
        return self._ops

    def evaluate(self, u, t: float):
        return evaluate(u, t, self.cfg, self.operators(t), self._solver)

    def rhs(self, u, t: float) -> np.ndarray:
        return self.evaluate(u, t)[0]
