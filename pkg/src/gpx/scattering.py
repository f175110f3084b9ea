"""Zakharov-Shabat scattering on the unit background.

Transmission coefficient by a direct Jost solve, the diagonalized system with
coefficients q1..q4, its Picard series, the correction Phi, the renormalized
transmission coefficient T_c^{-1} = e^Phi sum T_2n and the quadratic parts A, B.
"""

import os
from dataclasses import dataclass, field

import numpy as np

from ._kernels import apply_steps, nested_sweep
from .conserved import mass, reduce_angle, theta_raw
from .errors import BranchError, IntegratorError, RegimeError, SingularCoefficients
from .grid import GridField, dft, e_s_tau, multiply, resample
from .regularize import nonvanishing_reference

DELTA0 = 0.05
SMALLNESS_C = 2.0
GAUSS = np.sqrt(3.0) / 6.0
MAX_LEVEL = 32


def _quad_tol():
    return float(os.environ.get("GPX_QUAD_TOL", "1e-9"))


@dataclass(frozen=True)
class SpectralParams:
    lam: complex
    z: complex
    zeta: complex

    @property
    def tau(self):
        return 2.0 * self.z.imag


def make_params(lam):
    lam = complex(lam)
    z = np.sqrt(lam * lam - 1.0 + 0j)
    if z.imag < 0:
        z = -z
    if abs(z.imag) < 1e-6:
        raise BranchError(f"lambda = {lam} is on or too close to the cut")
    return SpectralParams(lam, complex(z), complex(lam + z))


# ---------------------------------------------------------------- coefficients

def _coefficient_values(q, r, dr, zeta, variant):
    """q1..q4 from point values of q, r and r'."""
    qr = q - r
    rr = np.abs(r) ** 2
    S = rr - 1 + 2 * np.real(np.conj(r) * qr)
    cur = np.imag(r * np.conj(dr))
    if variant == "plus":
        e = zeta
        den = rr - e * e
        q1 = (1j * e * S - np.conj(r) * dr) / den
        q4 = (2j * e * S + 2j * cur) / den
    else:
        e = 1.0 / zeta
        den = rr - e * e
        q1 = (-1j * e * S - r * np.conj(dr)) / den
        q4 = (-2j * e * S - 2j * cur) / den
    q2 = (r * S + 1j * e * dr) / den - qr
    q3 = (np.conj(r) * S - 1j * e * np.conj(dr)) / den - np.conj(qr)
    return q1, q2, q3, q4, den


@dataclass(frozen=True, eq=False)
class CoefficientSet:
    q1: GridField
    q2: GridField
    q3: GridField
    q4: GridField
    variant: str
    kappa: float
    # point data for evaluation at sub-grid points
    q: GridField = field(repr=False, default=None)
    r: GridField = field(repr=False, default=None)
    params: SpectralParams = field(repr=False, default=None)

    def fine(self, m):
        """(q1, q2, q3, q4) at x = -L + j dx / (2m), j = 0..2Nm."""
        vals = [_with_end(self.q, m), _with_end(self.r, m),
                _with_end(self.r.derivative(), m)]
        return _coefficient_values(*vals, self.params.zeta, self.variant)[:4]


def _with_end(f, m):
    v = resample(f, 2 * m)
    return np.concatenate([v, [np.exp(1j * f.twist) * v[0]]])


def variant_for(lam):
    return "plus" if complex(lam).imag >= 0 else "minus"


def coefficients(q, r, lam):
    p = lam if isinstance(lam, SpectralParams) else make_params(lam)
    variant = variant_for(p.lam)
    dr = r.derivative().samples
    q1, q2, q3, q4, den = _coefficient_values(q.samples, r.samples, dr, p.zeta, variant)
    e = p.zeta if variant == "plus" else 1 / p.zeta
    kappa = float(np.min(np.abs(den) / (abs(e) ** 2 + np.abs(r.samples) ** 2)))
    if not kappa > 1e-8:
        raise SingularCoefficients(f"denominator |r|^2 - zeta^2 degenerate (kappa={kappa:.2e})")
    g, th = q.grid, q.twist
    return CoefficientSet(GridField(g, q1), GridField(g, q2, th), GridField(g, q3, -th),
                          GridField(g, q4), variant, kappa, q, r, p)


# ---------------------------------------------------------------- direct Jost solve

def _expm2(O):
    """exp of a stack of 2x2 matrices via the trace / traceless split."""
    a = 0.5 * (O[:, 0, 0] + O[:, 1, 1])
    b11 = O[:, 0, 0] - a
    mu = np.sqrt(b11 * b11 + O[:, 0, 1] * O[:, 1, 0])
    ep, em = np.exp(a + mu), np.exp(a - mu)
    ch = 0.5 * (ep + em)
    small = np.abs(mu) < 1e-4
    safe = np.where(small, 1.0, mu)
    sh = np.where(small, np.exp(a) * (1 + mu * mu / 6 + mu ** 4 / 120), (ep - em) / (2 * safe))
    E = np.empty_like(O)
    E[:, 0, 0] = ch + sh * b11
    E[:, 1, 1] = ch - sh * b11
    E[:, 0, 1] = sh * O[:, 0, 1]
    E[:, 1, 0] = sh * O[:, 1, 0]
    return E


def _magnus(A1, A2, h):
    """Fourth-order Magnus step exponentials from the two Gauss-point matrices."""
    C = np.einsum("nij,njk->nik", A2, A1) - np.einsum("nij,njk->nik", A1, A2)
    return _expm2(0.5 * h * (A1 + A2) + (np.sqrt(3.0) / 12.0) * h * h * C)


def _gauss_values(f, m):
    h = f.grid.dx / m
    return (resample(f, m, h * (0.5 - GAUSS)), resample(f, m, h * (0.5 + GAUSS)))


def _u_matrices(qv, p):
    n = len(qv)
    A = np.empty((n, 2, 2), dtype=complex)
    A[:, 0, 0] = -1j * p.lam + 1j * p.z
    A[:, 1, 1] = 1j * p.lam + 1j * p.z
    A[:, 0, 1] = qv
    A[:, 1, 0] = np.conj(qv)
    return A


def _w_matrices(q2, q3, q4, p, variant):
    A = np.zeros((len(q2), 2, 2), dtype=complex)
    A[:, 0, 1] = q2
    A[:, 1, 0] = q3
    if variant == "plus":
        A[:, 1, 1] = 2j * p.z + q4
    else:
        A[:, 0, 0] = 2j * p.z + q4
    return A


def _left_vector(qm, p):
    return np.array([1.0, 1j * (p.lam - p.z) * np.conj(qm)], dtype=complex)


def _project(U, qp, p):
    """Coefficient of (1, i(lam - z) conj(q+)) in U, against the growing mode."""
    a = 1j * (p.lam - p.z) * np.conj(qp)
    b = 1j * (p.lam + p.z) * np.conj(qp)
    return (b * U[0] - U[1]) / (b - a)


def _richardson(level_fn, tol, order=4, what="integrator"):
    """Step halving with Richardson extrapolation until the correction is below tol."""
    prev = level_fn(1)
    m = 1
    while True:
        m *= 2
        cur = level_fn(m)
        corr = (np.asarray(cur) - np.asarray(prev)) / (2 ** order - 1)
        scale = max(float(np.max(np.abs(cur))), 1e-3)
        err = float(np.max(np.abs(corr)))
        if err <= tol * scale:
            return np.asarray(cur) + corr, err / scale, m
        if m >= MAX_LEVEL:
            raise IntegratorError(f"{what}: step refinement stalled at level {m}, "
                                  f"relative change {err / scale:.2e}")
        prev = cur


def jost_transmission_direct(q, lam, tol=None, with_info=False):
    """T^{-1}(lambda) from the growth-normalized Jost solution U = e^{izx} u."""
    p = lam if isinstance(lam, SpectralParams) else make_params(lam)
    tol = _quad_tol() if tol is None else tol
    qm, qp = q.samples[0], q.right_end()
    v0 = _left_vector(qm, p)

    def level(m):
        g1, g2 = _gauss_values(q, m)
        mats = _magnus(_u_matrices(g1, p), _u_matrices(g2, p), q.grid.dx / m)
        U = apply_steps(mats, v0, 0, len(mats))
        return _project(U, qp, p)

    val, err, m = _richardson(level, tol, what="direct Jost solve")
    val = complex(val)
    if with_info:
        return val, {"step_refine": err, "level": m}
    return val


# ---------------------------------------------------------------- Picard series

def cumulative(f):
    """F(x_j) = int_{-L}^{x_j} f for an untwisted field, exact for the interpolant."""
    g = f.grid
    mean = np.mean(f.samples)
    centered = f.with_samples(f.samples - mean)
    anti = multiply(centered, lambda k: np.where(k == 0, 0, 1 / np.where(k == 0, 1, 1j * k)))
    F = anti.samples - anti.samples[0] + mean * (g.x + g.L)
    return F, complex(mean * 2 * g.L)


def _l2(f):
    return float(np.sqrt(np.sum(np.abs(f.samples) ** 2) * f.grid.dx))


def check_smallness(coeffs, C=SMALLNESS_C):
    q4n = _l2(coeffs.q4) ** 2
    bound = 4 * C * coeffs.params.z.imag
    return q4n <= bound, q4n, bound


def picard_terms(coeffs, params=None, n_max=8, tol=None, C=SMALLNESS_C, with_info=False):
    """[T_0, T_2, ..., T_2n] for the diagonalized system."""
    p = params or coeffs.params
    tol = _quad_tol() if tol is None else tol
    ok, q4n, bound = check_smallness(coeffs, C)
    if not ok:
        raise RegimeError(f"||q4||^2 = {q4n:.3g} exceeds 4 C Im z = {bound:.3g}; "
                          "use the multi-region route")
    dx = coeffs.q.grid.dx

    def level(m):
        _, c2, c3, c4 = coeffs.fine(m)
        if coeffs.variant == "minus":
            c2, c3 = c3, c2
        return nested_sweep(c2, c3, c4, 2j * p.z, dx / m, n_max)

    terms, err, m = _richardson(level, tol, what="Picard sweep")
    terms = [complex(t) for t in terms]
    total = abs(sum(terms))
    # drop the terms below round-off
    for k in range(1, len(terms)):
        if abs(terms[k]) < 1e-14 * total:
            terms = terms[:k + 1]
            break
    if with_info:
        return terms, {"step_refine": err, "level": m}
    return terms


def picard_bound_ratio(coeffs, C=SMALLNESS_C):
    """e^C ||q2|| ||q3|| / Im z, the ratio of the geometric bound on T_2n."""
    return float(np.exp(C) * _l2(coeffs.q2) * _l2(coeffs.q3) / coeffs.params.z.imag)


# ---------------------------------------------------------------- Phi

def _integral(v, grid):
    return complex(np.sum(v) * grid.dx)


def phi_correction(q, r, q_tilde, params):
    """Phi from the four regularized integrals; returns (phi, branch).

    branch counts the 2 pi multiples of the phase change carried by q~, so
    phi + pi i branch / (z zeta) is the value with the reduced phase change.
    """
    p = params if isinstance(params, SpectralParams) else make_params(params)
    g = q.grid
    z, zeta = p.z, p.zeta
    a, b, t = q.samples, r.samples, q_tilde.samples
    db, dt = r.derivative().samples, q_tilde.derivative().samples
    rr = np.abs(b) ** 2
    den = rr - zeta * zeta
    i1 = _integral((np.abs(a) ** 2 - 1) * (rr - 1) / den, g)
    i2 = _integral(np.abs(a - b) ** 2 / den, g)
    i3 = np.imag(_integral((np.conj(b) - np.conj(t)) * db - np.conj(dt) * (b - t)
                           + dt / t * (np.abs(t) ** 2 - 1), g))
    i4 = _integral((rr - 1) * np.conj(b) * db / den, g)
    phi = (-1j / (2 * z) * i1 + 1j * zeta * i2 - 1j / (2 * z * zeta) * i3
           + i4 / (2 * z * zeta))
    _, branch = reduce_angle(theta_raw(q_tilde))
    return complex(phi), branch


def phi_primitive(q, coeffs, q_tilde):
    """Phi = -int q1 - (i/2z) M - (i/(2 z zeta)) Theta, in the plus variant.

    For the minus variant the same renormalization of T^{-1} reads
    -int q1^- - i Theta - (i/2z) M - (i/(2 z zeta)) Theta.
    """
    p = coeffs.params
    th = theta_raw(q_tilde)
    val = (-_integral(coeffs.q1.samples, q.grid) - 1j / (2 * p.z) * mass(q)
           - 1j / (2 * p.z * p.zeta) * th)
    if coeffs.variant == "minus":
        val -= 1j * th
    return complex(val)


def reduce_phi(phi, branch, params):
    return phi + np.pi * 1j * branch / (params.z * params.zeta)


# ---------------------------------------------------------------- renormalized route

def small_tau_reference(q, delta0=DELTA0, tau_cap=1e5):
    """Smallest tau0 >= 2 on a geometric ladder with E0_tau0(q) <= delta0."""
    tau = 2.0
    while tau <= tau_cap:
        if e_s_tau(q, 0, tau) <= delta0:
            return tau
        tau *= 2 ** 0.25
    raise RegimeError(f"no tau0 <= {tau_cap:g} with E0 <= {delta0}")


def exterior_display(q, r, tau):
    """||r|^2-1|| + tau ||r-q|| + ||r'|| restricted to |x| >= R, per symmetric cut R.

    Returns (R values, display values) for R = |x_j|, j >= N/2.
    """
    g = q.grid
    dx = g.dx
    parts = [np.abs(np.abs(r.samples) ** 2 - 1) ** 2,
             np.abs(r.samples - q.samples) ** 2,
             np.abs(r.derivative().samples) ** 2]
    N = g.N
    h = N // 2
    R = g.x[h:]
    out = np.zeros(len(R))
    for wgt, v in zip((1.0, tau, 1.0), parts):
        # mass of v outside (-R, R): nodes j <= N - k and j >= k for R = x_k
        left = np.cumsum(v)
        right = np.cumsum(v[::-1])[::-1]
        k = np.arange(h, N)
        outside = left[N - k] + right[k]
        out += wgt * np.sqrt(outside * dx)
    return R, out


def _pick_cut(q, r, tau, delta0):
    R, disp = exterior_display(q, r, tau)
    full = float(disp[0])
    if full < delta0 * tau:
        return None, full
    ok = np.flatnonzero(disp <= 0.5 * delta0 * tau)
    if len(ok) == 0:
        raise RegimeError("no cut R makes the exterior small; enlarge the domain")
    return int(ok[0]), full


def _chain(q, r, coeffs, p, k, tol):
    """w-ODE on the exteriors, u-ODE on [-R, R], glued through V.

    k is the offset of the cut from the center node; returns w1(L).
    """
    g = q.grid
    N = g.N
    iL, iR = N // 2 - k, N // 2 + k
    q1f = coeffs.q1
    Q1, _ = cumulative(q1f)
    z, zeta = p.z, p.zeta
    rs = r.samples

    def V(j):
        return np.array([[-1j * zeta, rs[j]], [np.conj(rs[j]), 1j * zeta]])

    dr = r.derivative()

    def level(m):
        h = g.dx / m
        off = (h * (0.5 - GAUSS), h * (0.5 + GAUSS))
        qg = [resample(q, m, o) for o in off]
        rg = [resample(r, m, o) for o in off]
        dg = [resample(dr, m, o) for o in off]
        cw = [_coefficient_values(qg[i], rg[i], dg[i], zeta, "plus") for i in range(2)]
        Aw = [_w_matrices(c[1], c[2], c[3], p, "plus") for c in cw]
        Wm = _magnus(Aw[0], Aw[1], h)
        Um = _magnus(_u_matrices(qg[0], p), _u_matrices(qg[1], p), h)
        w = apply_steps(Wm, np.array([1.0, 0.0], dtype=complex), 0, iL * m)
        den = abs(rs[iL]) ** 2 - zeta * zeta
        U = -2j * z * np.exp(-Q1[iL]) * (V(iL) @ w) / den
        U = apply_steps(Um, U, iL * m, iR * m)
        w = -np.exp(Q1[iR]) * (V(iR) @ U) / (2j * z)
        w = apply_steps(Wm, w, iR * m, N * m)
        return w[0]

    val, err, m = _richardson(level, tol, what="multi-region solve")
    return complex(val), err


@dataclass
class ScatteringResult:
    lam: complex
    z: complex
    t_inv: complex | None
    tc_inv: complex
    phi: complex
    t2n: list
    branch: int
    route: str
    tau_reg: float
    a_term: complex | None = None
    b_term: complex | None = None
    residuals: dict = field(default_factory=dict)

    def to_json(self):
        def cj(v):
            return None if v is None else [float(np.real(v)), float(np.imag(v))]
        return {"lambda": cj(self.lam), "z": cj(self.z), "t_inv": cj(self.t_inv),
                "tc_inv": cj(self.tc_inv), "phi": cj(self.phi),
                "t2n": [cj(t) for t in self.t2n], "branch": self.branch,
                "route": self.route, "tau_reg": self.tau_reg,
                "a_term": cj(self.a_term), "b_term": cj(self.b_term),
                "residuals": {k: float(v) for k, v in sorted(self.residuals.items())}}


def boundary_residual(q):
    """How far the ends are from a unimodular constant state."""
    d = q.derivative().samples
    return float(max(abs(abs(q.samples[0]) ** 2 - 1), abs(d[0])))


def choose_tau_reg(q, p, delta0=DELTA0):
    if p.tau >= 2:
        return p.tau
    return small_tau_reference(q, delta0)


def renormalized_transmission(q, lam, tau_reg=None, route="auto", delta0=DELTA0,
                              n_max=8, tol=None, with_direct=True, with_ab=False):
    """T_c^{-1}(lambda) with Phi and the Picard terms.

    route: "auto", "single" (Picard on the whole line) or "multi".
    Lower half-plane values come from the minus variant on the single route
    and from T_c^{-1}(conj lambda) = conj T_c^{-1}(lambda) on the multi route.
    """
    p = make_params(lam)
    tol = _quad_tol() if tol is None else tol
    if route not in ("auto", "single", "multi"):
        raise ValueError(route)
    tau = choose_tau_reg(q, p, delta0) if tau_reg is None else float(tau_reg)
    pair = nonvanishing_reference(q, tau)
    r, qt = pair.r, pair.q_tilde
    residuals = {"boundary": boundary_residual(q)}
    cut, display = _pick_cut(q, r, tau, delta0)
    residuals["smallness_display"] = display
    use_single = route == "single" or (route == "auto" and cut is None)

    if use_single:
        coeffs = coefficients(q, r, p)
        t2n, info = picard_terms(coeffs, p, n_max=n_max, tol=tol, with_info=True)
        residuals["step_refine"] = info["step_refine"]
        residuals["series_tail"] = abs(t2n[-1])
        series = sum(t2n)
        if coeffs.variant == "plus":
            phi, branch = phi_correction(q, r, qt, p)
        else:
            phi = phi_primitive(q, coeffs, qt)
            _, branch = reduce_angle(theta_raw(qt))
        tc = complex(np.exp(phi) * series)
        name = "single"
    else:
        if p.lam.imag < 0:
            res = renormalized_transmission(q, np.conj(p.lam), tau, "multi", delta0,
                                            n_max, tol, with_direct, with_ab=False)
            res.lam, res.z = p.lam, p.z
            res.tc_inv = np.conj(res.tc_inv)
            res.phi = np.conj(res.phi)
            if res.t_inv is not None:
                res.t_inv = jost_transmission_direct(q, p, tol)
            res.route = "multi-reflected"
            return res
        if cut is None:
            cut = 0
        coeffs = coefficients(q, r, p)
        k = cut
        w1, err = _chain(q, r, coeffs, p, k, tol)
        residuals["step_refine"] = err
        residuals["cut_R"] = float(q.grid.x[q.grid.N // 2 + k])
        phi, branch = phi_correction(q, r, qt, p)
        t2n = [w1]
        tc = complex(np.exp(phi) * w1)
        name = "multi"

    t_inv = None
    if with_direct:
        t_inv = jost_transmission_direct(q, p, tol)
        M = mass(q)
        th = theta_raw(qt)
        ren = t_inv * np.exp(-1j * M / (2 * p.z) - 1j * th / (2 * p.z * p.zeta))
        residuals["pipeline"] = abs(ren - tc) / max(abs(tc), 1e-300)
    a_term = b_term = None
    if with_ab and p.lam.imag > 0:
        a_term, b_term = ab_decomposition(q, r, qt, p)
    return ScatteringResult(p.lam, p.z, t_inv, tc, complex(phi), [complex(t) for t in t2n],
                            int(branch), name, float(tau), a_term, b_term, residuals)


def tc_inv(q, lam, **kw):
    kw.setdefault("with_direct", False)
    return renormalized_transmission(q, lam, **kw).tc_inv


# ---------------------------------------------------------------- A and B

def double_integral(g, h, p, tol=None):
    """int_{x<y} e^{2iz(y-x)} g(x) h(y) dx dy by an exponential-kernel sweep."""
    tol = _quad_tol() if tol is None else tol
    dx = g.grid.dx

    def level(m):
        cg, ch = _with_end(g, m), _with_end(h, m)
        w = nested_sweep(ch, cg, np.zeros_like(cg), 2j * p.z, dx / m, 1)
        return w[1]

    val, _, _ = _richardson(level, tol, what="double integral")
    return complex(val)


def double_integral_freq(g, h, p):
    """Same double integral from the transforms: int h^(-xi) g^(xi) i / (2z - xi)."""
    gh = dft(g)
    hh = dft(h)
    xi = g.bloch_xi()
    N = g.grid.N
    hm = hh[(-np.arange(N)) % N]
    return complex(np.sum(hm * gh * 1j / (2 * p.z - xi)) * g.grid.dxi)


def _conj(f):
    return GridField(f.grid, np.conj(f.samples), -f.twist)


def _real(f, v):
    return GridField(f.grid, np.asarray(v, dtype=complex))


def a_term(q, r, p, tol=None, freq=False):
    """A(lambda) from its defining double integrals."""
    dq = q.derivative()
    dr = r.derivative()
    g = q.grid
    cur = np.imag(q.samples * np.conj(dq.samples) - r.samples * np.conj(dr.samples))
    n = _real(q, np.abs(q.samples) ** 2 - 1)
    di = double_integral_freq if freq else (lambda a, b, pp: double_integral(a, b, pp, tol))
    quad = di(_conj(dq), dq, p) + di(n, n, p)
    return complex(1j / (4 * p.z ** 2) * np.sum(cur) * g.dx + quad / (4 * p.z ** 2))


def a_even_freq(q, p):
    """(A(lambda) + conj A(-conj lambda)) / 2 as a frequency integral."""
    z = p.z
    qh = dft(q.derivative())
    nh = dft(_real(q, np.abs(q.samples) ** 2 - 1))
    xi_q, xi_n = q.bloch_xi(), q.grid.xi
    val = (np.sum(np.abs(qh) ** 2 / (xi_q ** 2 - 4 * z * z))
           + np.sum(np.abs(nh) ** 2 / (xi_n ** 2 - 4 * z * z)))
    return complex(-1j / (2 * z) * val * q.grid.dxi)


def a_odd_freq(q, p, tau=None):
    """(A(lambda) - conj A(-conj lambda)) / 2i for r = tau^2 D^{-2} q."""
    z = p.z
    tau = p.tau if tau is None else tau
    qh = dft(q.derivative())
    xi = q.bloch_xi()
    t2 = tau * tau
    kern = xi * (t2 * t2 + 4 * z * z * (2 * t2 + xi * xi)) / ((t2 + xi * xi) ** 2 * (xi * xi - 4 * z * z))
    return complex(np.sum(kern * np.abs(qh) ** 2) * q.grid.dxi / (4 * z * z))


def b_pieces(q, r, q_tilde, p, tol=None):
    """The four integrals of B: (I3, I_rr, DI3, DI4), coefficients applied by b_term."""
    g = q.grid
    a, b, t = q.samples, r.samples, q_tilde.samples
    db, dt = r.derivative().samples, q_tilde.derivative().samples
    i3 = float(np.imag(np.sum((np.conj(b) - np.conj(t)) * db - np.conj(dt) * (b - t)
                              + dt / t * (np.abs(t) ** 2 - 1)) * g.dx))
    irr = float(np.sum((np.abs(b) ** 2 - 1) * np.imag(np.conj(b) * db)) * g.dx)
    n = _real(q, np.abs(a) ** 2 - 1)
    cur = _real(q, np.imag(b * np.conj(db)))
    di3 = double_integral(n, cur, p, tol) + double_integral(cur, n, p, tol)
    f1 = _real(q, np.imag(np.conj(b) * (a - b)))
    f2 = _real(q, np.imag(b * np.conj(a - b)))
    di4 = double_integral(n, f1, p, tol) + double_integral(f2, n, p, tol)
    return i3, irr, di3, di4


def b_term(q, r, q_tilde, p, tol=None):
    z, zeta = p.z, p.zeta
    i3, irr, di3, di4 = b_pieces(q, r, q_tilde, p, tol)
    return complex(-1j / (2 * z * zeta) * i3 - 1j / (4 * z * z * zeta * zeta) * irr
                   + di3 / (4 * z * z * zeta) + 1j / (2 * z * zeta) * di4)


def ab_decomposition(q, r, q_tilde, params, tol=None):
    p = params if isinstance(params, SpectralParams) else make_params(params)
    return a_term(q, r, p, tol), b_term(q, r, q_tilde, p, tol)
