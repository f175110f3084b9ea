"""Uniform grids on [-L, L) with twisted-periodic fields.

A field q is stored by its samples at x_j = -L + j*dx together with a twist
angle theta, meaning q(x + 2L) = exp(i*theta) q(x). Spectral operators act on
the untwisted field u = exp(-i*kappa*x) q with kappa = theta / (2L), so that a
Fourier multiplier m(xi) applied to q becomes m(xi_k + kappa) applied to u.
"""

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InvalidInput


@dataclass(frozen=True)
class Grid:
    L: float
    N: int

    def __post_init__(self):
        if self.L <= 0:
            raise InvalidInput("half length must be positive")
        if self.N < 16 or self.N & (self.N - 1):
            raise InvalidInput("N must be a power of two and at least 16")

    @property
    def dx(self):
        return 2.0 * self.L / self.N

    @property
    def dxi(self):
        return np.pi / self.L

    @property
    def x(self):
        return -self.L + self.dx * np.arange(self.N)

    @property
    def xi(self):
        # numpy FFT ordering
        return 2.0 * np.pi * np.fft.fftfreq(self.N, d=self.dx)


@dataclass(frozen=True, eq=False)
class GridField:
    grid: Grid
    samples: np.ndarray
    twist: float = 0.0
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=complex)
        if s.shape != (self.grid.N,):
            raise InvalidInput(f"expected {self.grid.N} samples, got {s.shape}")
        if not np.all(np.isfinite(s)):
            raise InvalidInput("non-finite samples")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)
        object.__setattr__(self, "twist", float(self.twist))

    @property
    def kappa(self):
        return self.twist / (2.0 * self.grid.L)

    @property
    def x(self):
        return self.grid.x

    def untwisted(self):
        return self.samples * np.exp(-1j * self.kappa * self.grid.x)

    def bloch_xi(self):
        return self.grid.xi + self.kappa

    def with_samples(self, samples, twist=None):
        return GridField(self.grid, samples, self.twist if twist is None else twist)

    def spectrum(self):
        """FFT of the untwisted samples (numpy normalization), cached."""
        if "fft" not in self._cache:
            self._cache["fft"] = np.fft.fft(self.untwisted())
        return self._cache["fft"]

    def derivative(self, order=1):
        return multiply(self, lambda k: (1j * k) ** order)

    def right_end(self):
        """q(L), reached through the twist."""
        return np.exp(1j * self.twist) * self.samples[0]


def dft(f):
    """Continuous-normalized transform (1/sqrt(2 pi)) int e^{-i xi x} f dx.

    Returned in FFT order at the Bloch frequencies f.bloch_xi().
    """
    g = f.grid
    k = np.arange(g.N)
    # x_0 = -L contributes exp(i xi_k L) = (-1)^k; the Bloch shift is
    # already carried by the untwisted samples.
    phase = np.where(k % 2, -1.0, 1.0)
    return g.dx / np.sqrt(2 * np.pi) * phase * f.spectrum()


def idft(fhat, grid, twist=0.0):
    k = np.arange(grid.N)
    kappa = twist / (2 * grid.L)
    phase = np.where(k % 2, -1.0, 1.0)
    u = np.fft.ifft(fhat / phase) * np.sqrt(2 * np.pi) / grid.dx
    return GridField(grid, u * np.exp(1j * kappa * grid.x), twist)


def multiply(f, symbol):
    """Apply the Fourier multiplier symbol(xi) to the twisted field f."""
    m = symbol(f.bloch_xi())
    u = np.fft.ifft(f.spectrum() * m)
    return GridField(f.grid, u * np.exp(1j * f.kappa * f.grid.x), f.twist)


def real_field(grid, values):
    return GridField(grid, np.asarray(values, dtype=complex), 0.0)


def check_tau(tau):
    if not tau >= 2:
        raise DomainError(f"tau must be >= 2, got {tau}")


def apply_fractional(f, s, tau):
    check_tau(tau)
    if s == 0:
        return f
    return multiply(f, lambda k: (k * k + tau * tau) ** (s / 2))


def sobolev_norm_sq(f, sigma, tau):
    """||f||^2 in H^sigma_tau, i.e. sum |f^|^2 (xi^2 + tau^2)^sigma dxi."""
    fh = dft(f)
    k = f.bloch_xi()
    return float(np.sum(np.abs(fh) ** 2 * (k * k + tau * tau) ** sigma) * f.grid.dxi)


def l2_norm(f):
    return float(np.sqrt(np.sum(np.abs(f.samples) ** 2) * f.grid.dx))


def density(q):
    """|q|^2 - 1 as an untwisted field."""
    return GridField(q.grid, np.abs(q.samples) ** 2 - 1.0, 0.0)


def e_s_tau(q, s, tau):
    check_tau(tau)
    return np.sqrt(sobolev_norm_sq(density(q), s - 1, tau)
                   + sobolev_norm_sq(q.derivative(), s - 1, tau))


def j_tau_convolve(f, tau):
    """(j_tau * f)(x) = int_{y > x} e^{tau (x - y)} f(y) dy.

    Evaluated as the exact convolution of the trigonometric interpolant with
    the periodized kernel, whose symbol is 1 / (tau - i xi).
    """
    return multiply(f, lambda k: 1.0 / (tau - 1j * k))


def w_minus1_p_norm(f, tau, p):
    """||j_tau * f||_{L^p} with j_tau(x) = e^{tau x} for x < 0."""
    check_tau(tau)
    if not 1 < p < np.inf:
        raise DomainError("p must lie in (1, inf)")
    g = j_tau_convolve(f, tau).samples
    return float((np.sum(np.abs(g) ** p) * f.grid.dx) ** (1.0 / p))


def _centered_windows(q, rows, window):
    """Samples of q re-indexed so each row's node sits at the center."""
    N = q.grid.N
    offs = np.arange(N) - N // 2
    idx = rows[:, None] + offs[None, :]
    wraps = np.floor_divide(idx, N)
    vals = q.samples[np.mod(idx, N)] * np.exp(1j * q.twist * wraps)
    return vals * window[None, :]


def metric_d_s(p, q, s, batch=256):
    """Phase-invariant local metric d^s(p, q) with sech localization.

    For each node y the inner infimum over unimodular lambda is attained at
    lambda = <a, b>/|<a, b>|, with a = sech(. - y) p and b = sech(. - y) q;
    the norm uses the weight (4 + xi^2)^s.
    """
    if p.grid != q.grid:
        raise InvalidInput("fields live on different grids")
    grid = p.grid
    N = grid.N
    xr = (np.arange(N) - N // 2) * grid.dx
    window = 1.0 / np.cosh(xr)
    weight = (grid.xi ** 2 + 4.0) ** s if s else None
    local = np.empty(N)
    for start in range(0, N, batch):
        rows = np.arange(start, min(start + batch, N))
        a = _centered_windows(p, rows, window)
        b = _centered_windows(q, rows, window)
        if weight is None:
            ip = np.sum(np.conj(a) * b, axis=1)
        else:
            a = np.fft.fft(a, axis=1)
            b = np.fft.fft(b, axis=1)
            ip = np.sum(np.conj(a) * b * weight, axis=1)
        lam = np.where(np.abs(ip) > 0, ip / np.where(ip == 0, 1, np.abs(ip)), 1.0)
        diff = lam[:, None] * a - b
        if weight is None:
            local[rows] = np.sum(np.abs(diff) ** 2, axis=1) * grid.dx
        else:
            local[rows] = np.sum(np.abs(diff) ** 2 * weight, axis=1) * grid.dx / N
    return float(np.sqrt(np.sum(local) * grid.dx))


def resample(f, factor, offset=0.0):
    """Trigonometric interpolant of f at x = -L + j*dx/factor + offset."""
    g = f.grid
    N = g.N
    M = N * factor
    fh = f.spectrum()
    padded = np.zeros(M, dtype=complex)
    h = N // 2
    padded[:h] = fh[:h]
    padded[M - h + 1:] = fh[h + 1:]
    padded[h] = 0.5 * fh[h]
    padded[M - h] = 0.5 * fh[h]
    xi = 2 * np.pi * np.fft.fftfreq(M, d=g.dx / factor)
    if offset:
        padded = padded * np.exp(1j * xi * offset)
    u = np.fft.ifft(padded) * factor
    x = -g.L + g.dx / factor * np.arange(M) + offset
    return u * np.exp(1j * f.kappa * x)


def save_csv(f, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "re_q", "im_q"])
        for x, v in zip(f.grid.x, f.samples):
            w.writerow([repr(float(x)), repr(float(v.real)), repr(float(v.imag))])
    with open(str(path) + ".json", "w") as fh:
        json.dump({"L": f.grid.L, "N": f.grid.N, "twist": f.twist}, fh, sort_keys=True)


def load_csv(path):
    with open(str(path) + ".json") as fh:
        meta = json.load(fh)
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    grid = Grid(float(meta["L"]), int(meta["N"]))
    return GridField(grid, data[:, 1] + 1j * data[:, 2], float(meta["twist"]))
