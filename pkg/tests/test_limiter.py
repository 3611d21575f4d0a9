import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mclafc.fluxes import local_bounds, raw_fluxes
from mclafc.limiter import (Prelimit, ce_limit, coercivity_factors, edge_bounds, gcc_residual,
                            mcl_limit, minmod, nonlinear_form_d, nonlinear_form_m)
from mclafc.mesh import Boundary

from conftest import make_ops


def test_mcl_limit_examples():
    # caps 2d (umax_i - bar_ij) = 0.3 and 2d (bar_ji - umin_j) = 0.8
    assert mcl_limit(1.0, 0.7, 0.8, (0.0, 1.0), (0.0, 1.0), 0.5) == pytest.approx(0.3)
    assert mcl_limit(0.0, 0.7, 0.8, (0.0, 1.0), (0.0, 1.0), 0.5) == 0.0
    assert mcl_limit(-0.2, 0.5, 0.5, (-10, 10), (-10, 10), 0.5) == pytest.approx(-0.2)


def test_mcl_limit_degenerate_edge():
    assert mcl_limit(1.0, 0.5, 0.5, (0.0, 1.0), (0.0, 1.0), 0.0) == 0.0


@pytest.mark.parametrize("a, b, expected", [(2, 3, 2), (-1, 2, 0), (-3, -1, -1), (0, 5, 0)])
def test_minmod(a, b, expected):
    assert minmod(a, b) == expected


@settings(max_examples=200, deadline=None)
@given(f=st.floats(-5, 5), bij=st.floats(-1, 1), bji=st.floats(-1, 1),
       lo=st.floats(-2, 0), hi=st.floats(0, 2), d=st.floats(0.01, 3))
def test_mcl_limit_keeps_bar_states_in_bounds(f, bij, bji, lo, hi, d):
    # bar states inside the bounds, as produced by the low order scheme
    bij, bji = np.clip(bij, lo, hi), np.clip(bji, lo, hi)
    fs = mcl_limit(f, bij, bji, (lo, hi), (lo, hi), d)
    assert abs(fs) <= abs(f) and fs * f >= 0
    assert lo - 1e-12 <= bij + fs / (2 * d) <= hi + 1e-12
    assert lo - 1e-12 <= bji - fs / (2 * d) <= hi + 1e-12


@settings(max_examples=100, deadline=None)
@given(a=st.floats(-10, 10), b=st.floats(-10, 10))
def test_minmod_properties(a, b):
    m = minmod(a, b)
    assert abs(m) <= min(abs(a), abs(b))
    assert m * a >= 0 and m * b >= 0
    assert minmod(b, a) == m


def test_coercivity_factor_examples():
    assert coercivity_factors(0.4, 0.0, 1.0, 0.0, 0.4)[0] == pytest.approx(1.0)
    assert coercivity_factors(0.0, 0.0, 1.0, 0.6, 0.4)[0] == pytest.approx(np.sqrt(0.9))
    assert coercivity_factors(1.0, -1.0, 0.0, 0.0, 0.4) == (1.0, 1.0)


def test_nonlinear_form_d_examples():
    ops = make_ops(3, Boundary.INFLOW_OUTFLOW)
    u = np.array([0.0, 1.0, 1.0])
    one = np.ones(ops.edges.size)
    assert nonlinear_form_d(one, u, ops) == 0.0
    assert nonlinear_form_d(0 * one, u, ops) == pytest.approx(0.5)


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**31))
def test_nonlinear_forms_positive_and_cauchy_schwarz(seed):
    rng = np.random.default_rng(seed)
    ops = make_ops(15, Boundary.PERIODIC, zeta=0.5, seed=seed % 13)
    alpha = rng.uniform(0, 1, ops.edges.size)
    w, z = rng.standard_normal((2, ops.n))
    for form in (nonlinear_form_d, nonlinear_form_m):
        ww, zz, wz = form(alpha, w, ops), form(alpha, z, ops), form(alpha, w, ops, z)
        assert ww >= 0 and zz >= 0
        assert wz ** 2 <= ww * zz * (1 + 1e-12) + 1e-300


def test_gcc_zero_udot_is_satisfied(rng):
    ops = make_ops(11)
    u = rng.standard_normal(ops.n)
    alpha = rng.uniform(0, 1, ops.edges.size)
    lhs, rhs = gcc_residual(alpha, alpha, u, np.zeros(ops.n), ops, 0.4, ops.mesh.h, ops.lam)
    assert lhs == 0.0 and rhs >= 0.0


def _random_ce(seed, zeta, boundary, prelimit=Prelimit.CLIPPED):
    rng = np.random.default_rng(seed)
    ops = make_ops(21, boundary, zeta=zeta, seed=seed)
    u = rng.uniform(-1, 1, ops.n)
    udot = rng.standard_normal(ops.n) / ops.mesh.h
    edges = raw_fluxes(u, udot, ops)
    return ops, u, udot, edges, ce_limit(edges, local_bounds(u, ops), ops, u, udot, 0.4,
                                         prelimit=prelimit)


def test_ce_zero_mass_flux_reduces_to_mcl(rng):
    ops = make_ops(15)
    u = rng.uniform(0, 1, ops.n)
    edges = raw_fluxes(u, np.zeros(ops.n), ops)
    bounds = local_bounds(u, ops)
    limited, report = ce_limit(edges, bounds, ops, u, np.zeros(ops.n))
    bi, bj = edge_bounds(bounds, edges)
    expected = mcl_limit(edges.f_diff, edges.bar_ij, edges.bar_ji, bi, bj, ops.edges.d)
    np.testing.assert_array_equal(limited.f_final, expected)
    assert report.alphaPlus == 1.0 and report.satisfied


@pytest.mark.parametrize("seed", range(20))
@pytest.mark.parametrize("zeta", [0.0, 0.5])
def test_ce_limit_satisfies_gcc(seed, zeta):
    _, _, _, _, (limited, report) = _random_ce(seed, zeta, Boundary.PERIODIC)
    assert report.satisfied
    assert report.gccLhs <= report.gccRhs + 1e-12 * max(1.0, abs(report.gccRhs))
    for name in ("alpha", "alpha_dot", "mass_factor"):
        v = getattr(limited, name)
        assert np.all((v >= 0) & (v <= 1))


@pytest.mark.parametrize("seed", range(10))
def test_ce_limited_bar_states_in_bounds(seed):
    ops, u, _, edges, (limited, _) = _random_ce(seed, 0.3, Boundary.INFLOW_OUTFLOW)
    bounds = local_bounds(u, ops)
    (lo_i, hi_i), (lo_j, hi_j) = edge_bounds(bounds, edges)
    two_d = 2 * ops.edges.d
    bij = edges.bar_ij + limited.f_final / two_d
    bji = edges.bar_ji - limited.f_final / two_d
    assert np.all((bij >= lo_i - 1e-13) & (bij <= hi_i + 1e-13))
    assert np.all((bji >= lo_j - 1e-13) & (bji <= hi_j + 1e-13))
