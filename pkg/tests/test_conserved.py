import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gpx.grid import Grid, GridField
from gpx import conserved as C
from gpx import profiles as P

PROPERTY_GRID = Grid(30.0, 1024)


def mod_dist(a, b):
    return abs(np.angle(np.exp(1j * (a - b))))


@pytest.mark.parametrize("c", [0.0, 0.3, -0.5, 0.9])
def test_soliton_values(fine_grid, c):
    q = P.sample(P.soliton(c), fine_grid)
    ex = P.exact_invariants(P.soliton(c))
    assert abs(C.mass(q) - ex.mass) < 1e-10
    assert abs(C.momentum(q) - ex.momentum) < 1e-10
    assert abs(C.energy(q) - ex.energy) < 1e-10
    assert mod_dist(C.theta(q)[0], ex.theta) < 1e-10


def test_background_is_zero(one):
    rep = C.report(one)
    assert (rep.mass, rep.momentum, rep.energy, rep.theta, rep.h1) == (0, 0, 0, 0, 0)


@pytest.mark.parametrize("beta,ramp", [(0.2 + 0.1j, 0.0), (0.1 - 0.3j, 0.8), (-0.3, -1.2)])
def test_h1_is_momentum_minus_theta(grid, beta, ramp):
    q = P.sample(P.bump(beta, phase_ramp=ramp), grid)
    h, _ = C.h1(q)
    assert mod_dist(h, C.momentum(q) - C.theta(q)[0]) < 1e-7


def test_h1_soliton(grid):
    q = P.sample(P.soliton(0.5), grid)
    h, _ = C.h1(q)
    assert mod_dist(h, np.sqrt(0.75) - 2 * np.arccos(0.5)) < 1e-7


def test_gauge_invariance(twisted_bump):
    rot = twisted_bump.with_samples(np.exp(1.1j) * twisted_bump.samples)
    assert abs(C.mass(rot) - C.mass(twisted_bump)) < 1e-10
    assert mod_dist(C.theta(rot)[0], C.theta(twisted_bump)[0]) < 1e-10
    assert mod_dist(C.h1(rot)[0], C.h1(twisted_bump)[0]) < 1e-10


def test_theta_additive_for_separated_ramps():
    g = Grid(40.0, 2048)
    x = g.x
    step = lambda y: 0.5 * (1 + np.tanh(y))
    a1, a2 = 0.9, 2.3
    q = GridField(g, np.exp(1j * (a1 * step(x + 15) + a2 * step(x - 15))), a1 + a2)
    q1 = GridField(g, np.exp(1j * a1 * step(x + 15)), a1)
    q2 = GridField(g, np.exp(1j * a2 * step(x - 15)), a2)
    tot = C.theta(q)[0]
    assert mod_dist(tot, C.theta(q1)[0] + C.theta(q2)[0]) < 1e-6


def test_h3_background_and_real_field(grid):
    one = P.sample(P.constant_one(), grid)
    assert C.h3_diagnostic(one) == 0.0
    real = P.sample(P.bump(0.3), grid)
    assert abs(C.h3_diagnostic(real)) < 1e-12


def test_report_json_has_branches(twisted_bump):
    d = C.report(twisted_bump).to_json()
    assert isinstance(d["theta_branch"], int) and isinstance(d["h1_branch"], int)


@settings(max_examples=25, deadline=None)
@given(br=st.floats(-0.3, 0.3), bi=st.floats(-0.3, 0.3), width=st.floats(0.6, 2.5),
       ramp=st.floats(-3.0, 3.0), phase=st.floats(-np.pi, np.pi))
def test_h1_identity_and_gauge_invariance_property(br, bi, width, ramp, phase):
    q = P.sample(P.bump(complex(br, bi), width, ramp), PROPERTY_GRID)
    h, _ = C.h1(q)
    assert mod_dist(h, C.momentum(q) - C.theta(q)[0]) < 1e-7
    rot = q.with_samples(np.exp(1j * phase) * q.samples)
    assert abs(C.mass(rot) - C.mass(q)) < 1e-10
    assert mod_dist(C.h1(rot)[0], h) < 1e-9
