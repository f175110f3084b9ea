"""Conserved energies from the renormalized transmission coefficient on the imaginary axis."""

from dataclasses import dataclass, field, asdict

import numpy as np
from scipy import integrate, special

from .errors import DomainError, QuadratureError
from .grid import check_tau, e_s_tau
from .regularize import nonvanishing_reference
from . import scattering as sc


@dataclass(frozen=True)
class EnergyQuadratureConfig:
    tau_max: float | None = None  # defaults to 16 tau0
    n_nodes: int = 64  # subinterval budget of the adaptive rule
    epsrel: float = 1e-7
    tail_limit: float = 0.01

    def __post_init__(self):
        if self.n_nodes < 64:
            raise DomainError("n_nodes must be at least 64")


@dataclass
class EnergyReport:
    s: float
    tau0: float
    value: float
    quad_error: float
    tail_fraction: float
    nodes: int
    control: float = 0.0
    notes: list = field(default_factory=list)

    def to_json(self):
        return asdict(self)


def imaginary_point(tau):
    check_tau(tau)
    return 1j * np.sqrt(tau * tau / 4 - 1)


def re_ln_tc(q, tau, **kw):
    """Re ln T_c^{-1}(i sqrt(tau^2/4 - 1)), branch free."""
    t = sc.tc_inv(q, imaginary_point(tau), tau_reg=tau, **kw)
    return float(np.log(abs(t)))


def script_e0(q, tau, **kw):
    return -tau * re_ln_tc(q, tau, **kw)


# ---------------------------------------------------------------- quadrature engine

def weighted_integral(f, a, tau0, tau_max, epsrel=1e-8, limit=64):
    """int_{tau0}^inf (tau^2 - tau0^2)^a tau f(tau) dtau for a > -1.

    Near tau0 the algebraic endpoint weight is integrated exactly by the
    QUADPACK weighted rule in v = tau^2 - tau0^2. The middle range is done in
    log tau. Past tau_max f is extrapolated as a power law fitted on the last
    decade and integrated against the weight in closed form. Returns (value,
    error estimate, tail, evaluations).
    """
    calls = [0]

    def g(tau):
        calls[0] += 1
        return f(tau)

    v1 = 3 * tau0 * tau0
    head, e1 = integrate.quad(lambda v: 0.5 * g(np.sqrt(tau0 * tau0 + v)), 0, v1,
                              weight="alg", wvar=(a, 0), epsrel=epsrel, limit=limit)

    def G(tau):
        return (tau * tau - tau0 * tau0) ** a * tau * g(tau)

    mid, e2 = integrate.quad(lambda t: G(np.exp(t)) * np.exp(t), np.log(2 * tau0),
                             np.log(tau_max), epsrel=epsrel, limit=limit)
    ts = tau_max * np.array([0.1, 10 ** -0.5, 1.0])
    fs = np.array([g(t) for t in ts])
    if np.any(fs == 0):
        tail = 0.0
    else:
        # f ~ c tau^p past tau_max; integrate the weight against it termwise in
        # (1 - tau0^2 / tau^2)^a = sum_k binom(a, k) (-tau0^2 / tau^2)^k
        p = (np.diff(np.log(np.abs(fs))) / np.diff(np.log(ts)))[-1]
        e = 2 * a + 1 + p
        if not e < -1:
            raise QuadratureError(f"tail does not decay fast enough (exponent {e:.3f})")
        k = np.arange(4)
        terms = special.binom(a, k) * (-(tau0 / tau_max) ** 2) ** k / (2 * k - e - 1)
        tail = fs[-1] * tau_max ** (2 * a + 2) * np.sum(terms)
    return head + mid + tail, e1 + e2, tail, calls[0]


# reference grid of the contour self-test, both kernels
CONTOUR_SUITE = tuple((st, xi, t0) for st in (-0.5, -0.25, 0.5) for xi in (0.0, 1.0, 3.0)
                      for t0 in (2.0, 4.0, 8.0))


def contour_identity_check(s_tilde, xi, tau0, tau_max=None):
    """Both sides of the contour identity for (tau0^2 + xi^2)^s_tilde.

    s_tilde in (-1, 0) uses the plain kernel, s_tilde in [0, 1) the
    subtracted kernel plus the tau0^(2 s_tilde) boundary term.
    """
    if not -1 < s_tilde < 1:
        raise DomainError("s_tilde must lie in (-1, 1)")
    rhs = (tau0 * tau0 + xi * xi) ** s_tilde
    tau_max = 1e4 * tau0 if tau_max is None else tau_max
    pref = -2 / np.pi * np.sin(np.pi * s_tilde)
    if s_tilde < 0:
        val, _, _, _ = weighted_integral(lambda t: 1 / (t * t + xi * xi), s_tilde, tau0,
                                         tau_max, epsrel=1e-11, limit=200)
        lhs = pref * val
    else:
        # (t^2 + xi^2)^-1 - t^-2 written without cancellation
        val, _, _, _ = weighted_integral(lambda t: -xi * xi / (t * t * (t * t + xi * xi)),
                                         s_tilde, tau0, tau_max, epsrel=1e-11, limit=200)
        lhs = pref * val + tau0 ** (2 * s_tilde)
    return float(lhs), float(rhs)


# ---------------------------------------------------------------- E^s

def _energy_defect(q, cache):
    """tau -> script E0_tau(q) - (E0_tau(q))^2, with T_c values cached per tau."""
    def d(tau):
        key = float(tau)
        if key not in cache:
            cache[key] = script_e0(q, key) - e_s_tau(q, 0, key) ** 2
        return cache[key]
    return d


def _script_es(q, s, tau0, cfg, cache):
    check_tau(tau0)
    cfg = cfg or EnergyQuadratureConfig()
    tau_max = cfg.tau_max or 16 * tau0
    if tau_max < 4 * tau0:
        raise DomainError("tau_max must be at least 4 tau0")
    cache = {} if cache is None else cache
    control = e_s_tau(q, s, tau0) ** 2
    pref = -2 / np.pi * np.sin(np.pi * (s - 1))
    val, err, tail, calls = weighted_integral(_energy_defect(q, cache), s - 1, tau0, tau_max,
                                              epsrel=cfg.epsrel, limit=cfg.n_nodes)
    total = control + pref * val
    frac = abs(pref * tail) / max(abs(total), 1e-300)
    if frac > cfg.tail_limit:
        raise QuadratureError(f"extrapolated tail is {100 * frac:.2f}% of the total")
    notes = [f"tau_max={tau_max:g}", "control variate: exact (E^s)^2 subtracted"]
    return EnergyReport(float(s), float(tau0), float(total), float(abs(pref) * err),
                        float(frac), int(calls), float(control), notes)


def script_es(q, s, tau0, cfg=None, cache=None, report=False):
    """Energy of order s in (0, 1) from the imaginary-axis quadrature."""
    if not 0 < s < 1:
        raise DomainError("s must lie in (0, 1)")
    rep = _script_es(q, s, tau0, cfg, cache)
    return rep if report else rep.value


def script_es_high(q, s, tau0, cfg=None, cache=None, report=False):
    """Energy of order s in [1, 2) with the E1 counterterm; s = 1 is exact."""
    if not 1 <= s < 2:
        raise DomainError("s must lie in [1, 2)")
    if s == 1:
        e1 = e_s_tau(q, 1, max(tau0, 2.0)) ** 2
        rep = EnergyReport(1.0, float(tau0), float(e1), 0.0, 0.0, 0, float(e1), ["exact"])
    else:
        rep = _script_es(q, s, tau0, cfg, cache)
    return rep if report else rep.value


def energy(q, s, tau0=2.0, cfg=None, cache=None):
    """Dispatch on s: 0, (0, 1), [1, 2)."""
    if s == 0:
        v = script_e0(q, tau0)
        return EnergyReport(0.0, float(tau0), float(v), 0.0, 0.0, 1, notes=["single evaluation"])
    if 0 < s < 1:
        return script_es(q, s, tau0, cfg, cache, report=True)
    if 1 <= s < 2:
        return script_es_high(q, s, tau0, cfg, cache, report=True)
    raise DomainError("s must lie in [0, 2)")


# ---------------------------------------------------------------- bound checks

def _log_tc(q, lam, tau):
    return complex(np.log(sc.tc_inv(q, lam, tau_reg=tau)))


def verify_energy_bound(q, lam):
    """Even part of ln T_c^{-1} against its quadratic frequency integral."""
    p = sc.make_params(lam)
    if p.lam.imag <= 0 or p.tau < 2:
        raise DomainError("needs Im lambda > 0 with 2 Im z >= 2")
    mirror = -np.conj(p.lam)
    even = 0.5 * (_log_tc(q, p.lam, p.tau) + np.conj(_log_tc(q, mirror, p.tau)))
    quad = sc.a_even_freq(q, p)
    scale = (e_s_tau(q, 0, p.tau) / np.sqrt(p.tau)) ** 3
    return {"lambda": [p.lam.real, p.lam.imag], "scattering": [even.real, even.imag],
            "frequency": [quad.real, quad.imag], "residual": float(abs(even - quad)),
            "cubic_scale": float(scale)}


def odd_part_check(q, lam, corrected=True):
    """Termwise odd part of ln T_c^{-1}.

    With corrected=True the double integral against Im(r conj(r')) enters
    with the coefficient i (lambda - z) / (4 z^2), which keeps every term
    invariant under lambda -> -conj(lambda) as the odd part must be; the
    alternative coefficient -(lambda - z) / (4 z^2) is kept for comparison.
    """
    p = sc.make_params(lam)
    if p.lam.imag <= 0 or p.tau < 2:
        raise DomainError("needs Im lambda > 0 with 2 Im z >= 2")
    z, lz = p.z, p.lam - p.z
    mirror = -np.conj(p.lam)
    odd = (_log_tc(q, p.lam, p.tau) - np.conj(_log_tc(q, mirror, p.tau))) / 2j
    pair = nonvanishing_reference(q, p.tau)
    i3, irr, di3, di4 = sc.b_pieces(q, pair.r, pair.q_tilde, p)
    c3 = 1j * lz / (4 * z * z) if corrected else -lz / (4 * z * z)
    terms = [odd, -sc.a_odd_freq(q, p), lz / (2 * z) * i3, lz * lz / (4 * z * z) * irr,
             c3 * di3, -lz / (2 * z) * di4]
    res = sum(terms)
    scale = (e_s_tau(q, 0, p.tau) / np.sqrt(p.tau)) ** 3
    return {"residual": float(abs(res)), "odd_part": [odd.real, odd.imag],
            "cubic_scale": float(scale),
            "terms": [[complex(t).real, complex(t).imag] for t in terms]}
