"""Smoothing q -> r = tau^2 D_tau^{-2} q and the unimodular reference q~."""

from dataclasses import dataclass

import numpy as np

from .errors import UnboundedDip
from .grid import (GridField, apply_fractional, check_tau, e_s_tau,
                   w_minus1_p_norm, density)
from .profiles import smooth_step

# the inner third of every interval is at least this long, so the cutoffs
# stay resolved on the grid
MIN_INNER = 1.0


@dataclass(frozen=True, eq=False)
class RegularizationPair:
    r: GridField
    q_tilde: GridField
    tau_used: float
    intervals: list

    def to_json(self):
        return {"tau": self.tau_used, "intervals": [list(iv) for iv in self.intervals]}


def regularize(q, tau):
    check_tau(tau)
    out = apply_fractional(q, -2, tau)
    return out.with_samples(out.samples * tau * tau)


def _runs(mask):
    """Index ranges [i, j] of maximal True runs."""
    m = np.concatenate([[False], mask, [False]]).astype(int)
    d = np.diff(m)
    return list(zip(np.flatnonzero(d == 1), np.flatnonzero(d == -1) - 1))


def _widen(lo, hi, inner_min):
    w = max(hi - lo, inner_min)
    mid = 0.5 * (lo + hi)
    return mid - 1.5 * w, mid + 1.5 * w


def find_dip_intervals(r, inner_min=MIN_INNER):
    """Intervals (a, b) around the deep dips of |r|.

    Components of {|r| < 1/2} that reach below 1/4 get an interval whose
    inner third covers the component and whose outer thirds keep |r| >= 1/2.
    Components swallowed by an outer third, or overlapping intervals, are
    merged and the scan repeats.
    """
    x = r.grid.x
    dx = r.grid.dx
    mod = np.abs(r.samples)
    low = mod < 0.5
    comps = []
    for i, j in _runs(low):
        if mod[i:j + 1].min() >= 0.25:
            continue
        if i == 0 or j == len(x) - 1:
            raise UnboundedDip("|r| < 1/2 reaches the domain boundary")
        comps.append((x[i] - dx, x[j] + dx))
    while True:
        comps.sort()
        merged = []
        for lo, hi in comps:
            if merged and _widen(lo, hi, inner_min)[0] <= _widen(*merged[-1], inner_min)[1]:
                merged[-1] = (merged[-1][0], max(hi, merged[-1][1]))
            else:
                merged.append((lo, hi))
        grown = []
        for lo, hi in merged:
            a, b = _widen(lo, hi, inner_min)
            bad = low & (x >= a) & (x <= b)
            if bad.any():
                lo = min(lo, x[bad].min() - dx)
                hi = max(hi, x[bad].max() + dx)
            grown.append((lo, hi))
        if grown == comps:
            break
        comps = grown
    out = []
    for lo, hi in comps:
        a, b = _widen(lo, hi, inner_min)
        if a <= x[0] or b >= x[-1]:
            raise UnboundedDip("dip interval reaches the domain boundary")
        out.append((float(a), float(b)))
    return out


def _bump(t):
    """Smooth cutoff supported in (0, 1), equal to 1 on [1/3, 2/3]."""
    return smooth_step(3 * t) * smooth_step(3 * (1 - t))


def _phase_from(values, start):
    """Continuous phase along values, anchored at the branch of start."""
    inc = np.angle(values[1:] / values[:-1])
    return start + np.concatenate([[0.0], np.cumsum(inc)])


def nonvanishing_reference(q, tau):
    """RegularizationPair (r, q~) with |q~| = 1 and q~ = r/|r| off the dips."""
    r = regularize(q, tau)
    intervals = find_dip_intervals(r)
    x = q.grid.x
    rs = r.samples
    qt = rs / np.abs(np.where(rs == 0, 1, rs))
    for a, b in intervals:
        inside = (x > a) & (x < b)
        idx = np.flatnonzero(inside)
        t = (x[idx] - a) / (b - a)
        left = t <= 1 / 3
        right = t >= 2 / 3
        ia, ib = idx[0] - 1, idx[-1] + 1
        rho = np.abs(rs[idx])
        th_a = np.angle(rs[ia])
        jump = np.mod(np.angle(rs[ib]) - th_a, 2 * np.pi)
        th_b = th_a + jump
        theta = np.zeros(len(idx))
        # continuous polar angle on each outer third, anchored at the ends
        li = np.concatenate([[ia], idx[left]])
        theta[left] = _phase_from(rs[li], th_a)[1:]
        ri = np.concatenate([[ib], idx[right][::-1]])
        theta[right] = _phase_from(rs[ri], th_b)[1:][::-1]
        eta = _bump(t)
        phi = smooth_step(3 * t - 1)
        rho_a, rho_b = abs(rs[ia]), abs(rs[ib])
        mod = (1 - eta) * np.where(left | right, rho, 0) + eta * (rho_a + phi * (rho_b - rho_a))
        ang = (1 - eta) * theta + eta * (th_a + phi * jump)
        qt[idx] = mod * np.exp(1j * ang)
    qt = qt / np.abs(qt)
    return RegularizationPair(r, GridField(q.grid, qt, q.twist), float(tau), intervals)


def winding(field):
    """Unwrapped phase change of a non-vanishing field from -L to L."""
    s = field.samples
    ext = np.concatenate([s, [field.right_end()]])
    inc = np.angle(ext[1:] / ext[:-1])
    if np.max(np.abs(inc)) > 0.5 * np.pi:
        from .errors import BranchError
        raise BranchError("phase increments too large for unambiguous winding")
    return float(np.sum(inc))


def verify_regularity_bounds(q, tau, p=2.0, constant=None):
    """Both sides of the three lines of the smoothing estimate for r.

    line 1: ||q - r||_p + ||r'||_p / tau  <=  C ||q'||_{W^{-1,p}_tau}
    line 2: ||r||_inf  <=  C tau (1 + E0_tau / sqrt(tau))
    line 3: |||r|^2 - 1||_p  <=  C tau (1 + E0_tau / sqrt(tau)) ||(|q|^2 - 1, q')||_{W^{-1,p}_tau}
    The ratios lhs/rhs are reported; with a constant, pass means all are <= it.
    """
    r = regularize(q, tau)
    e0 = e_s_tau(q, 0, tau)
    dx = q.grid.dx

    def lp(v):
        return float((np.sum(np.abs(v) ** p) * dx) ** (1 / p))

    wd = w_minus1_p_norm(q.derivative(), tau, p)
    wq = np.hypot(w_minus1_p_norm(density(q), tau, p), wd)
    growth = tau * (1 + e0 / np.sqrt(tau))
    lhs = [lp(q.samples - r.samples) + lp(r.derivative().samples) / tau,
           float(np.max(np.abs(r.samples))),
           lp(np.abs(r.samples) ** 2 - 1)]
    rhs = [wd, growth, growth * wq]
    ratios = [a / b if b > 0 else 0.0 for a, b in zip(lhs, rhs)]
    ok = None if constant is None else all(x <= constant for x in ratios)
    return {"tau": tau, "p": p, "lhs": lhs, "rhs": rhs, "ratios": ratios, "pass": ok}
