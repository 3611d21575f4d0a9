import functools

import numpy as np
import pytest

from mclafc.assembly import assemble_operators
from mclafc.diagnostics import convergence_table, l2_error
from mclafc.mesh import Boundary, build_uniform, hierarchy, perturb
from mclafc.problems import get_problem
from mclafc.schemes import SchemeConfig
from mclafc.timeint import TimeConfig, run

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def make_ops(n=9, boundary=Boundary.PERIODIC, zeta=0.0, seed=0, velocity=1.0, u_in=0.0,
             variant="rusanov"):
    mesh = perturb(build_uniform(n, 1.0, boundary), zeta, seed)
    return assemble_operators(mesh, velocity, u_in, 0.0, variant)


@functools.lru_cache(maxsize=None)
def convergence_study(problem_name, kind, zeta=0.0, seed=0, nu=0.25, rk=2,
                      levels=(33, 65, 129, 257, 513), diagnostics=True):
    """Errors, EOCs and per-run stage statistics on a bisection hierarchy."""
    problem = get_problem(problem_name)
    cfg = SchemeConfig(kind)
    meshes = hierarchy(levels[0], len(levels), problem.length, problem.boundary, zeta, seed)
    triples, results = [], []
    for mesh in meshes:
        res = run(mesh, cfg, TimeConfig(nu=nu, rk_order=rk), problem, diagnostics=diagnostics)
        triples.append((mesh.n_vertices, mesh.h, l2_error(res.u, mesh, lambda x: problem.exact(x, res.t))))
        results.append(res)
    table = convergence_table(triples)
    return [r.l2Error for r in table], [r.eoc for r in table[1:]], results


@functools.lru_cache(maxsize=None)
def twoprofile_run(kind, zeta, seed=0, N=101):
    problem = get_problem("twoprofile")
    mesh = perturb(build_uniform(N, 1.0, problem.boundary), zeta, seed)
    return run(mesh, SchemeConfig(kind), TimeConfig(nu=0.25, rk_order=2), problem)
