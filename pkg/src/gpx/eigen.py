"""Discrete eigenvalues of the Lax operator and zeros of T_c^{-1} on (-1, 1)."""

from dataclasses import dataclass, field, asdict

import numpy as np
from scipy import linalg, optimize

from .errors import BranchError, DomainError, GpxError
from .scattering import tc_inv


def _check_band(band):
    lo, hi = band
    if not -1 < lo < hi < 1:
        raise DomainError("band must be an interval inside (-1, 1)")


def default_band(grid, margin=None):
    """(-1 + m, 1 - m); m defaults to (pi / L)^2, well inside the band edge."""
    m = (np.pi / grid.L) ** 2 if margin is None else margin
    return (-1 + m, 1 - m)


def lax_matrix(q):
    """Dense Hermitian matrix of L = (i d, -i q; i conj q, -i d) in a periodic gauge.

    With u1 = e^{i k x / 2} v1, u2 = e^{-i k x / 2} v2 and k the twist rate,
    v is periodic and the off-diagonal multiplier is e^{-i k x} q.
    """
    N = q.grid.N
    kap = q.kappa
    F = np.fft.fft(np.eye(N), axis=0)
    xi = q.grid.xi
    # i d/dx on periodic samples: F^-1 diag(-xi) F
    D = (F.conj().T * (-xi)) @ F / N
    u = q.untwisted()
    H = np.zeros((2 * N, 2 * N), dtype=complex)
    H[:N, :N] = D - 0.5 * kap * np.eye(N)
    H[N:, N:] = -D - 0.5 * kap * np.eye(N)
    H[:N, N:] = np.diag(-1j * u)
    H[N:, :N] = np.diag(1j * np.conj(u))
    return H


def lax_eigs(q, band=None):
    band = default_band(q.grid) if band is None else band
    _check_band(band)
    H = lax_matrix(q)
    asym = float(np.max(np.abs(H - H.conj().T)))
    if asym > 1e-12:
        raise GpxError(f"assembled operator not Hermitian ({asym:.1e})")
    vals = linalg.eigh(H, eigvals_only=True, subset_by_value=band, driver="evr")
    return sorted(float(v) for v in vals)


def tc_zeros(q, band=None, resolution=1e-10, samples=81, imag_tol=1e-6, **kw):
    """Sign changes of the real function T_c^{-1} on the band, refined by Brent's method."""
    band = default_band(q.grid) if band is None else band
    _check_band(band)
    grid = np.linspace(band[0], band[1], samples)
    max_imag = [0.0]

    def f(lam):
        t = tc_inv(q, float(lam), **kw)
        # near a zero compare against the unit scale of T_c^{-1}
        rel = abs(t.imag) / max(abs(t), 1.0)
        if rel > imag_tol:
            raise BranchError(f"T_c^-1 not real at {lam}: relative imaginary part {rel:.1e}")
        max_imag[0] = max(max_imag[0], rel)
        return t.real

    vals = [f(l) for l in grid]
    zeros = []
    for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if fa == 0:
            zeros.append(float(a))
        elif fa * fb < 0:
            zeros.append(float(optimize.brentq(f, a, b, xtol=resolution)))
    return zeros, max_imag[0]


def hausdorff(a, b):
    if not a and not b:
        return 0.0
    if not a or not b:
        return np.inf
    A, B = np.array(a)[:, None], np.array(b)[None, :]
    d = np.abs(A - B)
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


@dataclass
class EigenReport:
    operator_eigs: list
    tc_zeros: list
    pairing: list
    hausdorff: float
    max_imag_residue: float
    notes: list = field(default_factory=list)

    def to_json(self):
        return asdict(self)


def eigen_report(q, band=None, resolution=1e-10):
    band = default_band(q.grid) if band is None else band
    eigs = lax_eigs(q, band)
    zeros, imag = tc_zeros(q, band, resolution)
    pairing = []
    for z in zeros:
        if eigs:
            e = min(eigs, key=lambda v: abs(v - z))
            pairing.append([z, e, abs(z - e)])
    return EigenReport(eigs, zeros, pairing, hausdorff(eigs, zeros), imag,
                       [f"band=({band[0]:.6f}, {band[1]:.6f})"])
