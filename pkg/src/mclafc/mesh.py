"""One-dimensional meshes: uniform construction, random perturbation, bisection."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum

import numpy as np


class InvalidMeshError(ValueError):
    pass


class Boundary(str, Enum):
    PERIODIC = "periodic"
    INFLOW_OUTFLOW = "inflow-outflow"


@dataclass(frozen=True, eq=False)
class Mesh1D:
    """Vertices of a partition of ``[0, L]``.

    For periodic meshes the last vertex is identified with the first, so
    there are ``n_vertices - 1`` unknowns and stencils wrap around.
    """

    vertices: np.ndarray
    boundary: Boundary

    def __post_init__(self):
        x = np.array(self.vertices, dtype=float)
        if x.ndim != 1 or x.size < 3:
            raise InvalidMeshError("a mesh needs at least 3 vertices")
        if x[0] != 0.0:
            raise InvalidMeshError("first vertex must be 0")
        if not np.all(np.diff(x) > 0):
            raise InvalidMeshError("vertices must be strictly increasing")
        x.setflags(write=False)
        dx = np.diff(x)
        h = x[-1] / dx.size
        if np.allclose(dx, h, rtol=1e-12, atol=0.0):
            # uniform: drop the roundoff of i * h so that every element has length h
            dx = np.full(dx.size, h)
        dx.setflags(write=False)
        object.__setattr__(self, "vertices", x)
        object.__setattr__(self, "_spacing", dx)
        object.__setattr__(self, "boundary", Boundary(self.boundary))

    @property
    def length(self) -> float:
        return float(self.vertices[-1])

    @property
    def n_vertices(self) -> int:
        return self.vertices.size

    @property
    def n_elements(self) -> int:
        return self.vertices.size - 1

    @property
    def n_unknowns(self) -> int:
        if self.boundary is Boundary.PERIODIC:
            return self.n_vertices - 1
        return self.n_vertices

    @property
    def periodic(self) -> bool:
        return self.boundary is Boundary.PERIODIC

    @property
    def spacing(self) -> np.ndarray:
        """Element lengths (exactly constant on uniform meshes)."""
        return self._spacing

    @property
    def h(self) -> float:
        """Mesh size, i.e. the largest element length."""
        return float(self.spacing.max())

    @property
    def nodes(self) -> np.ndarray:
        """Coordinates of the unknowns."""
        return self.vertices[: self.n_unknowns]

    def element_nodes(self) -> np.ndarray:
        """``(n_elements, 2)`` array of unknown indices per element."""
        left = np.arange(self.n_elements)
        right = left + 1
        if self.periodic:
            right = right % self.n_unknowns
        return np.column_stack([left, right])

    def stencil(self, i: int) -> np.ndarray:
        """Sorted unknown indices coupled to unknown ``i`` (including ``i``)."""
        n = self.n_unknowns
        if self.periodic:
            return np.unique([(i - 1) % n, i, (i + 1) % n])
        return np.arange(max(i - 1, 0), min(i + 2, n))

    def is_uniform(self, rtol: float = 1e-12) -> bool:
        dx = self.spacing
        return bool(np.allclose(dx, dx.mean(), rtol=rtol, atol=0.0))

    def write_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x"])
            for x in self.vertices:
                writer.writerow([repr(float(x))])


def build_uniform(n: int, length: float = 1.0,
                  boundary: Boundary | str = Boundary.PERIODIC) -> Mesh1D:
    """Uniform mesh with ``n`` vertices ``x_i = i * length / (n - 1)``."""
    if n < 3:
        raise InvalidMeshError(f"need N >= 3 vertices, got {n}")
    if not length > 0:
        raise InvalidMeshError(f"domain length must be positive, got {length}")
    x = np.arange(n) * (length / (n - 1))
    x[-1] = length
    return Mesh1D(x, Boundary(boundary))


def make_rng(seed: int) -> np.random.Generator:
    """Deterministic generator used for mesh perturbation (PCG64, seeded explicitly)."""
    return np.random.Generator(np.random.PCG64(seed))


def perturb(mesh: Mesh1D, zeta: float, seed: int = 0) -> Mesh1D:
    """Randomly displace interior vertices of a uniform mesh.

    Each interior vertex moves by ``xi * zeta * h`` with ``xi`` drawn from
    U[-0.5, 0.5] by :func:`make_rng`. Since ``zeta < 1`` the displacement is
    below ``h / 2`` and the ordering of vertices is preserved.
    """
    if not 0.0 <= zeta < 1.0:
        raise InvalidMeshError(f"relative perturbation must lie in [0, 1), got {zeta}")
    if not mesh.is_uniform():
        raise InvalidMeshError("perturb expects a uniform mesh")
    h = mesh.length / mesh.n_elements
    xi = make_rng(seed).uniform(-0.5, 0.5, size=mesh.n_vertices - 2)
    x = mesh.vertices.copy()
    x[1:-1] += xi * zeta * h
    return Mesh1D(x, mesh.boundary)


def refine(mesh: Mesh1D) -> Mesh1D:
    """Bisect every element; node count goes from N to 2N - 1."""
    x = mesh.vertices
    fine = np.empty(2 * x.size - 1)
    fine[0::2] = x
    fine[1::2] = 0.5 * (x[:-1] + x[1:])
    return Mesh1D(fine, mesh.boundary)


def min_spacing(mesh: Mesh1D) -> float:
    return float(mesh.spacing.min())


def hierarchy(n_coarse: int, levels: int, length: float = 1.0,
              boundary: Boundary | str = Boundary.INFLOW_OUTFLOW,
              zeta: float = 0.0, seed: int = 0) -> list[Mesh1D]:
    """Perturb the coarsest mesh once, then bisect ``levels - 1`` times."""
    mesh = perturb(build_uniform(n_coarse, length, boundary), zeta, seed)
    meshes = [mesh]
    for _ in range(levels - 1):
        meshes.append(refine(meshes[-1]))
    return meshes
