import numpy as np

from gpx.grid import GridField
from gpx import profiles as P


def asymmetric(grid, a):
    """Twisted bump with an odd modulus perturbation, scaled by a."""
    base = P.sample(P.bump(a * (1 + 0.5j), phase_ramp=3 * a), grid)
    x = grid.x
    return GridField(grid, base.samples * (1 + a * x * np.exp(-(x - 0.5) ** 2)), base.twist)


def slope(amps, values):
    return float(np.polyfit(np.log(amps), np.log(values), 1)[0])
