"""Analytic profiles on the unit background and their closed-form invariants."""

import json
from dataclasses import dataclass, asdict

import numpy as np

from .errors import InvalidInput, TruncationError, UnsupportedProfile
from .grid import GridField

BOUNDARY_TOL = 1e-10


@dataclass(frozen=True)
class Profile:
    kind: str
    c: float = 0.0
    beta: complex = 0.0
    width: float = 1.0
    phase_ramp: float = 0.0
    # second soliton for the "soliton_pair" composite
    c2: float = 0.0
    separation: float = 0.0

    def __post_init__(self):
        kinds = {"soliton", "constant_one", "perturbed_background",
                 "soliton_plus_bump", "soliton_pair"}
        if self.kind not in kinds:
            raise InvalidInput(f"unknown profile kind {self.kind!r}")
        if not -1 <= self.c <= 1 or not -1 <= self.c2 <= 1:
            raise InvalidInput("soliton parameter must lie in [-1, 1]")
        if self.width <= 0:
            raise InvalidInput("bump width must be positive")

    def to_json(self):
        d = {"kind": self.kind}
        if self.kind in ("soliton", "soliton_plus_bump", "soliton_pair"):
            d["c"] = self.c
        if self.kind in ("perturbed_background", "soliton_plus_bump"):
            d.update(beta_re=complex(self.beta).real, beta_im=complex(self.beta).imag,
                     width=self.width)
        if self.kind == "perturbed_background":
            d["phase_ramp"] = self.phase_ramp
        if self.kind == "soliton_pair":
            d.update(c2=self.c2, separation=self.separation)
        return d


def soliton(c):
    return Profile("soliton", c=c)


def constant_one():
    return Profile("constant_one")


def bump(beta, width=1.5, phase_ramp=0.0):
    return Profile("perturbed_background", beta=complex(beta), width=width,
                   phase_ramp=phase_ramp)


def soliton_plus_bump(c, beta, width=1.5):
    return Profile("soliton_plus_bump", c=c, beta=complex(beta), width=width)


def soliton_pair(c1, c2, separation):
    return Profile("soliton_pair", c=c1, c2=c2, separation=separation)


def from_json(obj):
    if isinstance(obj, str):
        text = obj.strip()
        obj = json.loads(text) if text.startswith("{") else {"kind": text}
    obj = dict(obj)
    kind = obj.pop("kind", None)
    if kind is None:
        raise InvalidInput("profile needs a kind")
    beta = complex(obj.pop("beta_re", 0.0), obj.pop("beta_im", 0.0))
    known = {"c", "width", "phase_ramp", "c2", "separation"}
    extra = set(obj) - known
    if extra:
        raise InvalidInput(f"unknown profile fields {sorted(extra)}")
    return Profile(kind, beta=beta, **obj)


def smooth_step(t):
    """C-infinity step: 0 for t <= 0, 1 for t >= 1."""
    t = np.asarray(t, dtype=float)
    a = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
    b = np.where(t < 1, np.exp(-1.0 / np.where(t < 1, 1.0 - t, 1.0)), 0.0)
    return a / (a + b)


def _soliton_values(c, x):
    a = np.sqrt(1.0 - c * c)
    return a * np.tanh(a * x) + 1j * c


def _soliton_twist(c):
    return -2.0 * np.arccos(c)


def _evaluate(profile, x, t, L):
    """Values at x and the asymptotes (left, right)."""
    k = profile.kind
    if k == "constant_one":
        return np.ones_like(x, dtype=complex), 1.0 + 0j, 1.0 + 0j
    if k == "soliton":
        c = profile.c
        a = np.sqrt(1 - c * c)
        return _soliton_values(c, x - 2 * c * t), -a + 1j * c, a + 1j * c
    if k == "perturbed_background":
        env = 1.0 + profile.beta * np.exp(-(x / profile.width) ** 2)
        phase = profile.phase_ramp * smooth_step((x + L / 2) / L)
        return env * np.exp(1j * phase), 1.0 + 0j, np.exp(1j * profile.phase_ramp)
    if k == "soliton_plus_bump":
        c = profile.c
        a = np.sqrt(1 - c * c)
        vals = _soliton_values(c, x - 2 * c * t) + profile.beta * np.exp(-(x / profile.width) ** 2)
        return vals, -a + 1j * c, a + 1j * c
    if k == "soliton_pair":
        d = profile.separation / 2
        c1, c2 = profile.c, profile.c2
        a1, a2 = np.sqrt(1 - c1 * c1), np.sqrt(1 - c2 * c2)
        vals = _soliton_values(c1, x + d - 2 * c1 * t) * _soliton_values(c2, x - d - 2 * c2 * t)
        return vals, (-a1 + 1j * c1) * (-a2 + 1j * c2), (a1 + 1j * c1) * (a2 + 1j * c2)
    raise InvalidInput(k)


def sample(profile, grid, t=0.0):
    x = grid.x
    vals, left, right = _evaluate(profile, x, t, grid.L)
    twist = float(np.angle(right / left)) if abs(left) > 0 else 0.0
    if profile.kind == "soliton":
        twist = _soliton_twist(profile.c)
    elif profile.kind == "soliton_pair":
        twist = _soliton_twist(profile.c) + _soliton_twist(profile.c2)
    elif profile.kind == "perturbed_background":
        twist = profile.phase_ramp
    elif profile.kind == "soliton_plus_bump":
        twist = _soliton_twist(profile.c)
    residual = max(abs(vals[0] - left), abs(vals[-1] - right))
    # the periodic continuation must also close up: q(L) = e^{i twist} q(-L)
    end, _, _ = _evaluate(profile, np.array([grid.L]), t, grid.L)
    residual = max(residual, abs(end[0] - np.exp(1j * twist) * vals[0]))
    if residual > BOUNDARY_TOL:
        raise TruncationError(
            f"profile not settled at the boundary: residual {residual:.2e}")
    return GridField(grid, vals, twist)


@dataclass(frozen=True)
class ExactInvariants:
    mass: float
    momentum: float
    energy: float
    theta: float
    eigenvalue_hint: float | None = None

    def to_json(self):
        return asdict(self)


def exact_invariants(profile):
    if profile.kind == "constant_one":
        return ExactInvariants(0.0, 0.0, 0.0, 0.0)
    if profile.kind != "soliton":
        raise UnsupportedProfile(f"no closed-form invariants for {profile.kind}")
    c = profile.c
    a = np.sqrt(1.0 - c * c)
    theta = float(np.mod(2 * np.arccos(c), 2 * np.pi))
    # |q|^2 - 1 = -a^2 sech^2(a x) integrates to -2a
    return ExactInvariants(-2 * a, 2 * c * a, 8.0 / 3.0 * a ** 3, theta)
