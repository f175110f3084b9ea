"""Mass, momentum, phase change, renormalized momentum and related functionals."""

from dataclasses import dataclass, field, asdict

import numpy as np

from .grid import e_s_tau
from .regularize import nonvanishing_reference, winding

TWO_PI = 2 * np.pi


def reduce_angle(value):
    """(value mod 2 pi in [0, 2 pi), branch) with value = reduced + 2 pi branch."""
    red = float(np.mod(value, TWO_PI))
    if red >= TWO_PI - 1e-13:
        red = 0.0
    return red, int(round((value - red) / TWO_PI))


def integrate(values, grid):
    return complex(np.sum(values) * grid.dx)


def mass(q):
    return float(np.sum(np.abs(q.samples) ** 2 - 1) * q.grid.dx)


def momentum(q):
    """Im int q conj(q)'.

    q' is the spectral derivative of the twisted field, so the ramp
    contribution i*kappa*q of the untwisting is already included.
    """
    dq = q.derivative().samples
    return float(np.imag(np.sum(q.samples * np.conj(dq))) * q.grid.dx)


def energy(q):
    """int (|q|^2 - 1)^2 + |q'|^2."""
    return float(e_s_tau(q, 1, 2.0) ** 2)


def theta_raw(q_tilde):
    return -winding(q_tilde)


def theta(q, tau=4.0, pair=None):
    pair = pair or nonvanishing_reference(q, tau)
    return reduce_angle(theta_raw(pair.q_tilde))


def h1_value(q, pair):
    """Unreduced H1 from the three-term integral with the reference q~."""
    qt = pair.q_tilde
    dq = q.derivative().samples
    dqt = qt.derivative().samples
    a, b = q.samples, qt.samples
    main = (np.conj(a) - np.conj(b)) * dq - np.conj(dqt) * (a - b)
    guard = (np.abs(b) ** 2 - 1) * dqt / b
    val = -np.imag(np.sum(main + guard)) * q.grid.dx
    guard_size = float(np.max(np.abs(guard)))
    return float(val), guard_size


def h1(q, tau=4.0, pair=None):
    pair = pair or nonvanishing_reference(q, tau)
    val, guard = h1_value(q, pair)
    if guard > 1e-10:
        raise ArithmeticError(f"reference field not unimodular: {guard:.2e}")
    return reduce_angle(val)


def h3_diagnostic(q):
    d1 = q.derivative().samples
    d2 = q.derivative(2).samples
    a = q.samples
    integrand = d1 * np.conj(d2) + 3 * (np.abs(a) ** 2 - 1) * a * np.conj(d1)
    return float(np.imag(np.sum(integrand)) * q.grid.dx - momentum(q))


@dataclass
class ConservedReport:
    mass: float
    momentum: float | None
    energy: float
    theta: float
    theta_branch: int
    h1: float
    h1_branch: int
    notes: list = field(default_factory=list)

    def to_json(self):
        return asdict(self)


def report(q, tau=4.0):
    pair = nonvanishing_reference(q, tau)
    th, thb = theta(q, tau, pair)
    hv, hb = h1(q, tau, pair)
    notes = [f"reference built with tau={tau}",
             f"{len(pair.intervals)} polar interpolation interval(s)"]
    return ConservedReport(mass(q), momentum(q), energy(q), th, thb, hv, hb, notes)
