import mpmath as mp
import numpy as np
import pytest

from gpx.errors import InvalidInput, TruncationError, UnsupportedProfile
from gpx.grid import Grid
from gpx import conserved as C
from gpx import profiles as P


def quad_mass(c):
    """Independent oracle: integral of |q_c|^2 - 1 by mpmath quadrature."""
    with mp.workdps(40):
        c = mp.mpf(c)
        a = mp.sqrt(1 - c ** 2)
        f = lambda x: (a * mp.tanh(a * x)) ** 2 + c ** 2 - 1
        # the integrand is below 1e-30 beyond |x| = 40
        return float(mp.quad(f, mp.linspace(-40, 40, 17)))


@pytest.mark.parametrize("c", [0.0, 0.3, -0.5, 0.9])
def test_exact_mass_matches_quadrature(c):
    assert abs(P.exact_invariants(P.soliton(c)).mass - quad_mass(c)) < 1e-12


def test_soliton_asymptotes_and_twist(fine_grid):
    q = P.sample(P.soliton(0.5), fine_grid)
    assert abs(q.samples[0] - (-np.sqrt(0.75) + 0.5j)) < 1e-12
    assert abs(q.twist + 2 * np.arccos(0.5)) < 1e-15


def test_traveling_soliton_moves_at_2c(fine_grid):
    q = P.sample(P.soliton(0.5), fine_grid, t=1.0)
    # the zero of Re q sits at x = 2 c t
    i = np.argmin(np.abs(q.samples.real))
    assert abs(fine_grid.x[i] - 1.0) <= fine_grid.dx


def test_truncation_detected():
    with pytest.raises(TruncationError):
        P.sample(P.soliton(0.9), Grid(5.0, 256))


def test_from_json_variants():
    assert P.from_json("constant_one") == P.constant_one()
    p = P.from_json('{"kind":"perturbed_background","beta_re":0.1,"beta_im":-0.2,"width":2}')
    assert p.beta == 0.1 - 0.2j and p.width == 2
    with pytest.raises(InvalidInput):
        P.from_json('{"kind":"soliton","speed":1}')
    with pytest.raises(InvalidInput):
        P.soliton(1.5)


def test_profile_json_round_trip():
    for p in [P.soliton(0.3), P.bump(0.1 + 0.2j, 1.2, 0.5), P.soliton_pair(0.3, 0.6, 12.0),
              P.soliton_plus_bump(0.2, 0.05j)]:
        assert P.from_json(p.to_json()) == p


def test_no_closed_form_for_bumps():
    with pytest.raises(UnsupportedProfile):
        P.exact_invariants(P.bump(0.1))


def test_constant_one_invariants_zero():
    ex = P.exact_invariants(P.constant_one())
    assert (ex.mass, ex.momentum, ex.energy, ex.theta) == (0.0, 0.0, 0.0, 0.0)


def test_pair_twist_is_sum(fine_grid):
    q = P.sample(P.soliton_pair(0.3, 0.6, 12.0), fine_grid)
    th, _ = C.theta(q)
    exact = np.mod(2 * np.arccos(0.3) + 2 * np.arccos(0.6), 2 * np.pi)
    assert abs(np.angle(np.exp(1j * (th - exact)))) < 1e-8
