"""Compiled inner loops for the spectral ODE sweeps."""

import numpy as np
from numba import njit


@njit(cache=True)
def apply_steps(mats, v0, start, stop):
    """Apply 2x2 step matrices mats[start:stop] in order to v0."""
    a = v0[0]
    b = v0[1]
    for n in range(start, stop):
        m = mats[n]
        a, b = m[0, 0] * a + m[0, 1] * b, m[1, 0] * a + m[1, 1] * b
    out = np.empty(2, dtype=np.complex128)
    out[0] = a
    out[1] = b
    return out


@njit(cache=True)
def _rhs(c2, c3, c4, w, I, n, dw, dI):
    # dI_k = c4 I_k + c3 w_{k-1},  dw_k = c2 I_k,  w_0 frozen at 1
    dw[0] = 0.0
    for k in range(1, n + 1):
        dI[k] = c4 * I[k] + c3 * w[k - 1]
        dw[k] = c2 * I[k]


@njit(cache=True)
def nested_sweep(c2, c3, c4, two_iz, h, n):
    """Iterated integrals w_k(L), k = 0..n, by integrating-factor RK4.

    The coefficient arrays hold values at x = -L + j h / 2, j = 0..2M, so
    even entries are step nodes and odd entries are midpoints. The constant
    rate two_iz on the I components is integrated exactly.
    """
    M = (c2.shape[0] - 1) // 2
    w = np.zeros(n + 1, dtype=np.complex128)
    I = np.zeros(n + 1, dtype=np.complex128)
    w[0] = 1.0
    E = np.exp(two_iz * h / 2)
    E2 = E * E
    k1w = np.zeros(n + 1, dtype=np.complex128)
    k1I = np.zeros(n + 1, dtype=np.complex128)
    k2w = np.zeros(n + 1, dtype=np.complex128)
    k2I = np.zeros(n + 1, dtype=np.complex128)
    k3w = np.zeros(n + 1, dtype=np.complex128)
    k3I = np.zeros(n + 1, dtype=np.complex128)
    k4w = np.zeros(n + 1, dtype=np.complex128)
    k4I = np.zeros(n + 1, dtype=np.complex128)
    tw = np.zeros(n + 1, dtype=np.complex128)
    tI = np.zeros(n + 1, dtype=np.complex128)
    hh = h / 2
    for s in range(M):
        j = 2 * s
        _rhs(c2[j], c3[j], c4[j], w, I, n, k1w, k1I)
        for k in range(n + 1):
            tw[k] = w[k] + hh * k1w[k]
            tI[k] = E * (I[k] + hh * k1I[k])
        _rhs(c2[j + 1], c3[j + 1], c4[j + 1], tw, tI, n, k2w, k2I)
        for k in range(n + 1):
            tw[k] = w[k] + hh * k2w[k]
            tI[k] = E * I[k] + hh * k2I[k]
        _rhs(c2[j + 1], c3[j + 1], c4[j + 1], tw, tI, n, k3w, k3I)
        for k in range(n + 1):
            tw[k] = w[k] + h * k3w[k]
            tI[k] = E2 * I[k] + h * E * k3I[k]
        _rhs(c2[j + 2], c3[j + 2], c4[j + 2], tw, tI, n, k4w, k4I)
        for k in range(n + 1):
            w[k] = w[k] + h / 6 * (k1w[k] + 2 * k2w[k] + 2 * k3w[k] + k4w[k])
            I[k] = E2 * I[k] + h / 6 * (E2 * k1I[k] + 2 * E * (k2I[k] + k3I[k]) + k4I[k])
    return w
