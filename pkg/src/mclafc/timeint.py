"""Explicit SSP Runge-Kutta time stepping with CFL control and per-stage diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from typing import Callable, Optional, Sequence

import numpy as np

from .diagnostics import bounds_violation, lumped_norm
from .mesh import Mesh1D, min_spacing
from .problems import Problem
from .schemes import Scheme, SchemeConfig


class DivergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class TimeConfig:
    nu: float = 0.25
    rk_order: int = 2
    final_time: Optional[float] = None
    snapshot_times: Sequence[float] = ()

    def __post_init__(self):
        if not self.nu > 0:
            raise ValueError(f"CFL number must be positive, got {self.nu}")
        if self.rk_order not in (1, 2, 3):
            raise ValueError(f"unsupported SSP Runge-Kutta order {self.rk_order}")
        if self.final_time is not None and self.final_time < 0:
            raise ValueError("final time must be non-negative")


def cfl_timestep(mesh: Mesh1D, nu: float) -> float:
    return nu * min_spacing(mesh)


# Shu-Osher form: stage k computes a_k * u + (1 - a_k) * (w + dt L(w))
_SSP_WEIGHTS = {1: [(0.0, 0.0)],
                2: [(0.0, 0.0), (0.5, 1.0)],
                3: [(0.0, 0.0), (0.75, 1.0), (1.0 / 3.0, 0.5)]}


def ssprk_step(u, t: float, dt: float, order: int,
               rhs_fn: Callable[[np.ndarray, float], np.ndarray],
               on_stage: Callable | None = None) -> np.ndarray:
    """One SSP Runge-Kutta step of order 1, 2 or 3.

    Every stage is a forward Euler update ``w + dt L(w)`` blended convexly
    with the step's initial state. ``on_stage(k, w, t_k, euler)`` is called
    with the stage input and its forward Euler output.
    """
    if order not in _SSP_WEIGHTS:
        raise ValueError(f"unsupported SSP Runge-Kutta order {order}")
    u = np.asarray(u, dtype=float)
    w = u
    for k, (a, c) in enumerate(_SSP_WEIGHTS[order]):
        tk = t + c * dt
        euler = w + dt * rhs_fn(w, tk)
        if on_stage is not None:
            on_stage(k, w, tk, euler)
        w = a * u + (1.0 - a) * euler
    return w


@dataclass
class StageRecord:
    step: int
    stage: int
    t: float
    dt: float
    partial: bool
    min_u: float
    max_u: float
    lumped_norm: float
    gcc_lhs: float
    gcc_rhs: float
    alpha_plus: float
    alpha_minus: float
    max_bound_violation: float
    alpha_bar: float
    alpha_dot_bar: float
    gcc_violated: bool

    @classmethod
    def field_names(cls) -> list[str]:
        return [f.name for f in fields(cls)]


@dataclass
class RunResult:
    mesh: Mesh1D
    u: np.ndarray
    t: float
    u0: np.ndarray
    mL: np.ndarray
    stages: list[StageRecord] = field(default_factory=list)
    snapshots: dict[float, np.ndarray] = field(default_factory=dict)
    n_steps: int = 0

    def max_bound_violation(self) -> float:
        return max((s.max_bound_violation for s in self.stages), default=0.0)

    def gcc_violations(self) -> int:
        return sum(s.gcc_violated for s in self.stages)


def run(mesh: Mesh1D, cfg: SchemeConfig, tcfg: TimeConfig, problem: Problem,
        diagnostics: bool = True) -> RunResult:
    """Integrate ``problem`` from its interpolated initial data to the final time."""
    T = problem.final_time if tcfg.final_time is None else tcfg.final_time
    scheme = Scheme(cfg, mesh, problem.velocity, problem.inflow)
    mL = scheme.operators(0.0).mL
    u = problem.initial(mesh.nodes).astype(float)
    result = RunResult(mesh=mesh, u=u, t=0.0, u0=u.copy(), mL=mL)
    snaps = sorted({float(s) for s in tcfg.snapshot_times if 0.0 <= s <= T})
    if 0.0 in snaps:
        result.snapshots[0.0] = u.copy()
    dt0 = cfl_timestep(mesh, tcfg.nu)

    state = {}

    def rhs_fn(w, tk):
        dudt, info = scheme.evaluate(w, tk)
        state["info"] = info
        return dudt

    def on_stage(k, w, tk, euler):
        if not diagnostics:
            return
        info = state["info"]
        violation = bounds_violation(info.bounds, euler) if cfg.kind.value != "gc" else float("nan")
        result.stages.append(StageRecord(
            step=state["step"], stage=k, t=tk, dt=state["dt"], partial=state["partial"],
            min_u=float(w.min()), max_u=float(w.max()), lumped_norm=lumped_norm(w, mL),
            gcc_lhs=info.gcc_lhs, gcc_rhs=info.gcc_rhs,
            alpha_plus=info.alpha_plus, alpha_minus=info.alpha_minus,
            max_bound_violation=violation,
            alpha_bar=info.alpha_bar, alpha_dot_bar=info.alpha_dot_bar,
            gcc_violated=info.gcc_violated))

    t = 0.0
    step = 0
    targets = [s for s in snaps if s > 0.0]
    if not targets or targets[-1] < T:
        targets.append(T)
    for target in targets:
        t_start = t
        n = max(0, math.ceil((target - t_start) / dt0 - 1e-9))
        for k in range(n):
            t_next = target if k == n - 1 else t_start + (k + 1) * dt0
            dt = t_next - t
            state.update(step=step, dt=dt, partial=not math.isclose(dt, dt0, rel_tol=1e-9))
            u = ssprk_step(u, t, dt, tcfg.rk_order, rhs_fn, on_stage)
            if not np.all(np.isfinite(u)):
                raise DivergenceError(f"non-finite state after step {step} (t = {t_next})")
            t = t_next
            step += 1
        if target in snaps:
            result.snapshots[target] = u.copy()
    result.u, result.t, result.n_steps = u, t, step
    return result
