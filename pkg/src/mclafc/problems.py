"""Built-in linear advection test problems with unit velocity."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .mesh import Boundary


@dataclass(frozen=True)
class Problem:
    name: str
    length: float
    boundary: Boundary
    initial: Callable[[np.ndarray], np.ndarray]
    inflow: float
    velocity: float
    final_time: float

    def exact(self, x, t: float) -> np.ndarray:
        """Translated initial profile ``u0(x - a t)``."""
        shifted = np.asarray(x, dtype=float) - self.velocity * t
        if self.boundary is Boundary.PERIODIC:
            shifted = np.mod(shifted, self.length)
            return self.initial(shifted)
        # outside the initial domain the profile is the (zero) inflow datum
        inside = (shifted >= 0.0) & (shifted <= self.length)
        return np.where(inside, self.initial(np.clip(shifted, 0.0, self.length)), self.inflow)


def twoprofile_initial(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    u = np.zeros_like(x)
    u[(x >= 0.2) & (x <= 0.4)] = 1.0
    bump = (x > 0.5) & (x < 0.9)
    xb = x[bump]
    u[bump] = np.exp(10.0 + 1.0 / (0.5 - xb) + 1.0 / (xb - 0.9))
    return u


def coshump_initial(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    hump = np.abs(x - 0.25) <= 0.15
    return np.where(hump, 0.5 * (1.0 + np.cos(np.pi / 0.15 * (x - 0.25))), 0.0)


def problem_twoprofile() -> Problem:
    """Square wave plus smooth bump on the periodic unit interval, ``T = 1``."""
    return Problem("twoprofile", 1.0, Boundary.PERIODIC, twoprofile_initial,
                   inflow=0.0, velocity=1.0, final_time=1.0)


def problem_coshump() -> Problem:
    """C1 cosine hump with inflow at ``x = 0`` and zero inflow datum, ``T = 0.5``."""
    return Problem("coshump", 1.0, Boundary.INFLOW_OUTFLOW, coshump_initial,
                   inflow=0.0, velocity=1.0, final_time=0.5)


PROBLEMS = {"twoprofile": problem_twoprofile, "coshump": problem_coshump}


def get_problem(name: str) -> Problem:
    try:
        return PROBLEMS[name]()
    except KeyError:
        raise ValueError(f"unknown problem {name!r}; choose from {sorted(PROBLEMS)}") from None
