"""Command-line front end.

Exit codes: 0 success, 1 failed verification, 2 usage or invalid input,
3 numerical regime problem.
"""

import argparse
import hashlib
import itertools
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import conserved, eigen, energies, evolve, profiles, scattering
from .errors import GpxError, InvalidInput
from .grid import Grid, e_s_tau, load_csv


def parse_complex(text):
    """Accepts '2', '2i', '-i', '0.3+0.7i', '0.3-0.7j'."""
    try:
        return complex(text.strip().replace(" ", "").replace("i", "j"))
    except ValueError:
        raise InvalidInput(f"cannot parse complex number {text!r}") from None


def parse_grid(text):
    try:
        kv = dict(part.split("=") for part in text.split(","))
        return Grid(float(kv["L"]), int(kv["N"]))
    except (KeyError, ValueError):
        raise InvalidInput(f"grid must look like L=40,N=4096, got {text!r}") from None


def parse_list(text, conv=float):
    return [conv(v) for v in text.split(",") if v.strip()]


def load_field(args):
    src = args.profile
    if src.endswith(".csv") and Path(src).exists():
        return load_csv(src), {"csv": src}
    prof = profiles.from_json(src)
    return profiles.sample(prof, args.grid), prof.to_json()


def _cj(v):
    return [float(np.real(v)), float(np.imag(v))]


def _clean(obj):
    """Plain JSON types with floats as-is and NaN mapped to null."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (complex, np.complexfloating)):
        return _cj(obj)
    if isinstance(obj, (np.floating, float)):
        return None if not np.isfinite(obj) else float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def config_hash(args):
    cfg = {k: (str(v) if not isinstance(v, (int, float, str, bool, type(None))) else v)
           for k, v in sorted(vars(args).items()) if k != "func"}
    blob = json.dumps(cfg, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def emit(args, payload, out=None):
    payload = dict(payload)
    payload["config_hash"] = config_hash(args)
    text = json.dumps(_clean(payload), sort_keys=True, indent=2)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _threads():
    return max(1, int(os.environ.get("GPX_THREADS", "1")))


def _map(fn, items):
    with ThreadPoolExecutor(_threads()) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------- subcommands

def cmd_invariants(args):
    q, prof = load_field(args)
    rep = conserved.report(q, args.tau)
    table = {f"{s:g}": e_s_tau(q, s, args.tau) for s in args.s}
    out = {"profile": prof, "grid": {"L": q.grid.L, "N": q.grid.N}, "tau": args.tau,
           **rep.to_json(), "e_s_tau": table}
    if isinstance(prof, dict) and prof.get("kind") in ("soliton", "constant_one"):
        out["exact"] = profiles.exact_invariants(profiles.from_json(prof)).to_json()
    emit(args, out, args.out)
    return 0


def _lambda_list(args):
    if args.lambda_grid:
        re_part, im_part = args.lambda_grid.split(";")
        r0, r1, nr = re_part.split(":")
        i0, i1, ni = im_part.split(":")
        res = np.linspace(float(r0), float(r1), int(nr))
        ims = np.linspace(float(i0), float(i1), int(ni))
        return [complex(a, b) for a, b in itertools.product(res, ims)]
    return parse_list(args.lam, parse_complex)


def cmd_transmission(args):
    q, prof = load_field(args)
    lams = _lambda_list(args)

    def one(lam):
        try:
            res = scattering.renormalized_transmission(q, lam, route=args.route)
            return res.to_json()
        except GpxError as exc:
            if len(lams) == 1:
                raise
            return {"lambda": _cj(lam), "error": str(exc)}

    emit(args, {"profile": prof, "results": _map(one, lams)}, args.out)
    return 0


def cmd_energy(args):
    q, prof = load_field(args)
    cfg = energies.EnergyQuadratureConfig(tau_max=args.tau_max)
    cache = {}
    reports = [energies.energy(q, s, args.tau0, cfg, cache).to_json() for s in args.s]
    emit(args, {"profile": prof, "energies": reports}, args.out)
    return 0


def cmd_evolve(args):
    q, prof = load_field(args)
    probes = tuple(parse_list(args.probe, parse_complex)) if args.probe else ()
    cfg = evolve.EvolveConfig(dt=args.dt, t_final=args.t_final, probe_lambdas=probes,
                              report_every=args.report_every, spectral=not args.no_spectral)
    traj = evolve.run(q, cfg)
    if args.csv:
        traj.write_csv(args.csv)
    names = list(traj.rows[0])
    drifts = {n: traj.drift(n) for n in names if n not in ("theta_branch", "h1_branch")}
    emit(args, {"profile": prof, "completed": traj.completed, "steps_recorded": len(traj.rows),
                "drift": drifts, "notes": traj.notes}, args.out)
    return 0 if traj.completed else 3


def cmd_eigs(args):
    q, prof = load_field(args)
    band = tuple(parse_list(args.band)) if args.band else None
    rep = eigen.eigen_report(q, band)
    emit(args, {"profile": prof, **rep.to_json()}, args.out)
    return 0


def _suite_contour():
    checks = []
    for st, xi, t0 in energies.CONTOUR_SUITE:
        lhs, rhs = energies.contour_identity_check(st, xi, t0)
        rel = abs(lhs - rhs) / abs(rhs)
        checks.append({"s_tilde": st, "xi": xi, "tau0": t0, "lhs": lhs, "rhs": rhs,
                       "pass": bool(rel <= 1e-6)})
    return checks


def _suite_invariants():
    g = Grid(40.0, 4096)
    checks = []
    for c in (0.0, 0.3, -0.3, 0.5, -0.5, 0.9, -0.9):
        q = profiles.sample(profiles.soliton(c), g)
        ex = profiles.exact_invariants(profiles.soliton(c))
        th, _ = conserved.theta(q)
        errs = [abs(conserved.mass(q) - ex.mass), abs(conserved.momentum(q) - ex.momentum),
                abs(conserved.energy(q) - ex.energy),
                abs(np.angle(np.exp(1j * (th - ex.theta))))]
        checks.append({"c": c, "errors": errs, "pass": bool(max(errs) <= 1e-6)})
    return checks


def _suite_scattering():
    g = Grid(30.0, 1024)
    checks = []
    q = profiles.sample(profiles.bump(0.2 + 0.1j), g)
    for lam in (0.3 + 0.7j, 1.5j, -0.4 + 1.1j):
        a = scattering.jost_transmission_direct(q, lam)
        b = scattering.jost_transmission_direct(q, np.conj(lam))
        checks.append({"check": "schwarz", "lambda": lam, "error": abs(a - np.conj(b)),
                       "pass": bool(abs(a - np.conj(b)) <= 1e-8)})
        res = scattering.renormalized_transmission(q, lam, route="single")
        checks.append({"check": "pipeline", "lambda": lam, "error": res.residuals["pipeline"],
                       "pass": bool(res.residuals["pipeline"] <= 1e-6)})
    return checks


SUITES = {"contour": _suite_contour, "invariants": _suite_invariants,
          "scattering": _suite_scattering}


def cmd_verify(args):
    names = list(SUITES) if args.suite == "all" else [args.suite]
    out, ok = {}, True
    for n in names:
        checks = SUITES[n]()
        passed = sum(c["pass"] for c in checks)
        out[n] = {"passed": passed, "total": len(checks), "checks": checks}
        ok &= passed == len(checks)
    emit(args, {"suites": out, "pass": ok}, args.out)
    return 0 if ok else 1


# ---------------------------------------------------------------- parser

def build_parser():
    p = argparse.ArgumentParser(prog="gpx", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, field=True):
        if field:
            sp.add_argument("--profile", required=True,
                            help="profile JSON, a bare kind, or a CSV file with its .json sidecar")
            sp.add_argument("--grid", type=parse_grid, default=Grid(40.0, 2048),
                            help="L=<half length>,N=<points>")
        sp.add_argument("--out", help="write the JSON report here instead of stdout")
        sp.add_argument("--seed", type=int, default=0, help="seed for randomized families")

    sp = sub.add_parser("invariants", help="mass, momentum, phase change, H1 and E^s norms")
    common(sp)
    sp.add_argument("--tau", type=float, default=4.0)
    sp.add_argument("--s", type=lambda t: parse_list(t), default=[0.0, 0.5, 1.0])
    sp.set_defaults(func=cmd_invariants)

    sp = sub.add_parser("transmission", help="T^-1 and T_c^-1 at spectral points")
    common(sp)
    sp.add_argument("--lambda", dest="lam", default="2i", help="comma-separated list, e.g. 2i,0.3+0.7i")
    sp.add_argument("--lambda-grid", help="re0:re1:n;im0:im1:n")
    sp.add_argument("--route", choices=["auto", "single", "multi"], default="auto")
    sp.set_defaults(func=cmd_transmission)

    sp = sub.add_parser("energy", help="conserved energies on a ladder of s")
    common(sp)
    sp.add_argument("--s", type=lambda t: parse_list(t), default=[0.0, 0.5, 1.0])
    sp.add_argument("--tau0", type=float, default=2.0)
    sp.add_argument("--tau-max", type=float, default=None)
    sp.set_defaults(func=cmd_energy)

    sp = sub.add_parser("evolve", help="split-step trajectory with drift report")
    common(sp)
    sp.add_argument("--dt", type=float, default=1e-3)
    sp.add_argument("--t-final", type=float, default=1.0)
    sp.add_argument("--probe", default="", help="comma-separated spectral probes")
    sp.add_argument("--report-every", type=int, default=100)
    sp.add_argument("--no-spectral", action="store_true", help="skip T_c and E0 diagnostics")
    sp.add_argument("--csv", help="trajectory CSV path")
    sp.set_defaults(func=cmd_evolve)

    sp = sub.add_parser("eigs", help="Lax eigenvalues and T_c zeros in (-1, 1)")
    common(sp)
    sp.add_argument("--band", help="lo,hi inside (-1, 1)")
    sp.set_defaults(func=cmd_eigs)

    sp = sub.add_parser("verify", help="run a self-check suite")
    common(sp, field=False)
    sp.add_argument("--suite", choices=["all", *SUITES], default="all")
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GpxError as exc:
        print(f"gpx: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
