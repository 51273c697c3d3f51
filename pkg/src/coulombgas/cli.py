"""Command-line front end: emits machine-readable plot data and reports.

Subcommands
-----------
droplet     boundary polylines in both coordinate systems, phase and area
fekete      energy minimisation, point cloud plus diagnostics sidecar
verify      variational certification report
spectrum1d  Hermitian-limit density samples and band data
moments     closed-form moments against Cauchy-transform extraction

CSV files carry ``re,im`` or ``x,density`` headers; JSON reports use
stable key order.  All numbers are written with full round-trip
precision, so outputs are bytewise reproducible.  The environment
variable ``COULOMBGAS_OUTDIR`` overrides the default output directory.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from .droplet import (
    ContainmentViolated,
    MappedRegion,
    Phase,
    PhaseError,
    boundary_points,
    area,
    build_rational_map,
    check_containment,
    classify_phase,
    critical_tau,
    droplet,
    precritical_droplet,
    postcritical_droplet,
)
from .fekete import empirical_diagnostics, minimize, points_csv
from .potentials import COORD_SQUARED, COORD_SYMMETRIC, ModelParams, Symmetry
from .transforms import equilibrium_moments, postcritical_moments_from_cauchy
from .spectrum1d import band_edges, band_integral, density
from .variational import (
    InequalityViolated,
    mass_one_check,
    unit_mass_residues,
    verify_equality,
    verify_inequality,
)

EXIT_OK = 0
EXIT_BAD_PARAMS = 2
EXIT_PHASE = 3
EXIT_NONCONVERGED = 4
EXIT_VERIFY_FAILED = 5


def _parse_complex(text: str) -> complex:
    parts = text.split(",")
    if len(parts) == 1:
        return complex(float(parts[0]), 0.0)
    if len(parts) == 2:
        return complex(float(parts[0]), float(parts[1]))
    raise argparse.ArgumentTypeError("complex values use 're' or 're,im'")


def _params_from(args) -> ModelParams:
    symmetry = Symmetry(getattr(args, "symmetry", "complex"))
    return ModelParams(tau=args.tau, c=args.c, p=getattr(args, "p", 0j), symmetry=symmetry)


def _out_path(args, default_stem: str, suffix: str) -> str:
    stem = args.output if args.output else default_stem
    if not os.path.isabs(stem):
        outdir = os.environ.get("COULOMBGAS_OUTDIR", ".")
        stem = os.path.join(outdir, stem)
    return stem + suffix


def _fmt(x: float) -> str:
    return repr(float(x))


def _write_curve_csv(path: str, pts: np.ndarray) -> None:
    lines = ["re,im"]
    for z in pts:
        lines.append(f"{_fmt(z.real)},{_fmt(z.imag)}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _announce(path: str) -> None:
    print(f"wrote {path}")


# ----------------------------------------------------------------------
# droplet
# ----------------------------------------------------------------------

def cmd_droplet(args) -> int:
    params = _params_from(args)
    try:
        if params.p == 0:
            phase = classify_phase(params)
        else:
            if not check_containment(params):
                raise ContainmentViolated("off-centre parameters outside the "
                                          "contained-hole regime")
            phase = Phase.POST_CRITICAL
        sym_region = droplet(params, COORD_SYMMETRIC)
        sq_region = droplet(params, COORD_SQUARED) if params.p == 0 else None
    except (PhaseError, ContainmentViolated) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PHASE

    curves_sym = boundary_points(sym_region, args.n)
    curves_sq = boundary_points(sq_region, args.n) if sq_region else []
    meta = {
        "phase": phase.value,
        "tau": params.tau,
        "c": params.c,
        "p": [params.p.real, params.p.imag],
        "critical_tau": critical_tau(params.c),
        "area_symmetric": area(sym_region),
        "area_squared": area(sq_region) if sq_region else None,
    }
    if params.p == 0 and phase in (Phase.CRITICAL, Phase.PRE_CRITICAL):
        m = build_rational_map(params)
        meta["map"] = {"r1": m.r1, "r2": m.r2, "r3": m.r3, "r4": m.r4,
                       "a": m.a, "d": m.d}
    if args.format == "json":
        meta["curves_symmetric"] = [[[z.real, z.imag] for z in c] for c in curves_sym]
        meta["curves_squared"] = [[[z.real, z.imag] for z in c] for c in curves_sq]
        path = _out_path(args, "droplet", ".json")
        _write_json(path, meta)
        _announce(path)
        return EXIT_OK
    files = []
    for i, curve in enumerate(curves_sym):
        path = _out_path(args, "droplet", f".sym{i}.csv")
        _write_curve_csv(path, curve)
        _announce(path)
        files.append(os.path.basename(path))
    for i, curve in enumerate(curves_sq):
        path = _out_path(args, "droplet", f".sq{i}.csv")
        _write_curve_csv(path, curve)
        _announce(path)
        files.append(os.path.basename(path))
    meta["curve_files"] = files
    path = _out_path(args, "droplet", ".json")
    _write_json(path, meta)
    _announce(path)
    return EXIT_OK


# ----------------------------------------------------------------------
# fekete
# ----------------------------------------------------------------------

def cmd_fekete(args) -> int:
    params = _params_from(args)
    threads = 1 if args.deterministic else args.threads
    config = minimize(
        args.n,
        params,
        which=args.potential,
        seed=args.seed,
        max_iter=args.max_iter,
        tol=args.tol,
        threads=threads,
    )
    coords = COORD_SYMMETRIC if args.potential == COORD_SYMMETRIC else COORD_SQUARED
    diagnostics = None
    try:
        region = droplet(params, coords)
        diagnostics = empirical_diagnostics(config, region, params)
    except (PhaseError, ContainmentViolated, ValueError):
        pass
    if args.format == "json":
        payload = config.to_json_dict(params)
        payload["points"] = [[z.real, z.imag] for z in config.points]
        if diagnostics:
            payload["diagnostics"] = diagnostics.to_json_dict()
        path = _out_path(args, "fekete", ".json")
        _write_json(path, payload)
        _announce(path)
    else:
        path = _out_path(args, "fekete", ".csv")
        with open(path, "w") as fh:
            fh.write(points_csv(config))
        _announce(path)
        sidecar = config.to_json_dict(params)
        if diagnostics:
            sidecar["diagnostics"] = diagnostics.to_json_dict()
        side_path = _out_path(args, "fekete", ".meta.json")
        _write_json(side_path, sidecar)
        _announce(side_path)
    if not config.converged:
        print("warning: optimiser did not reach the gradient tolerance",
              file=sys.stderr)
        return EXIT_NONCONVERGED
    return EXIT_OK


# ----------------------------------------------------------------------
# verify
# ----------------------------------------------------------------------

def cmd_verify(args) -> int:
    params = _params_from(args)
    try:
        if params.p == 0:
            phase = classify_phase(params)
        else:
            phase = Phase.POST_CRITICAL
        if phase is Phase.PRE_CRITICAL:
            region = precritical_droplet(params, COORD_SQUARED)
        else:
            region = postcritical_droplet(params, COORD_SYMMETRIC)
    except (PhaseError, ContainmentViolated) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PHASE

    threads = 1 if args.deterministic else args.threads
    failed = False
    eq = verify_equality(params, region, args.grid_n, threads=threads)
    try:
        ineq = verify_inequality(params, region, args.rays, threads=threads)
    except InequalityViolated as exc:
        ineq = None
        failed = True
        print(f"error: {exc}", file=sys.stderr)
    report = {
        "phase": phase.value,
        "grid_n": args.grid_n,
        "rays": args.rays,
        "interior_max_residual": eq.interior_max_residual,
        "constant_spread": eq.constant_spread,
        "fitted_constant": eq.fitted_constant,
    }
    if ineq is not None:
        report.update(
            exterior_min_margin=ineq.exterior_min_margin,
            monotone_beyond_layer=ineq.monotone_beyond_layer,
            min_exterior_gradient=ineq.min_exterior_gradient,
            real_axis_margin=ineq.real_axis_margin,
        )
    if isinstance(region.shape, MappedRegion):
        m = region.shape.map
        report["mass_residual"] = mass_one_check(m)
        res0, resa = unit_mass_residues(m)
        t, c = params.tau, params.c
        report["residue_origin_error"] = abs(res0 - (1 + c) * (1 - t * t))
        report["residue_pole_error"] = abs(resa - (-c * (1 - t * t)))
    else:
        report["containment"] = check_containment(params)

    failed = failed or eq.interior_max_residual > 1e-8
    if ineq is not None and ineq.exterior_min_margin < -1e-9:
        failed = True
    if report.get("mass_residual") is not None and report["mass_residual"] > 1e-8:
        failed = True
    if report.get("containment") is False:
        failed = True
    report["pass"] = not failed

    if args.format == "json":
        path = _out_path(args, "verify", ".json")
        _write_json(path, report)
    else:
        path = _out_path(args, "verify", ".txt")
        with open(path, "w") as fh:
            for key, val in report.items():
                fh.write(f"{key} {val!r}\n")
    _announce(path)
    print("PASS" if not failed else "FAIL")
    return EXIT_OK if not failed else EXIT_VERIFY_FAILED


# ----------------------------------------------------------------------
# spectrum1d
# ----------------------------------------------------------------------

def cmd_spectrum1d(args) -> int:
    if args.p.imag != 0:
        print("error: the 1D spectrum requires a real charge location",
              file=sys.stderr)
        return EXIT_BAD_PARAMS
    if args.c < 0:
        print("error: charge strength must be >= 0", file=sys.stderr)
        return EXIT_BAD_PARAMS
    c, p = args.c, args.p.real
    l1, l2, l3, l4 = band_edges(c, p)
    xs = np.linspace(l1 - 0.5, l4 + 0.5, args.n)
    ys = [density(c, p, float(x)) for x in xs]
    mass = band_integral(c, p)
    meta = {
        "c": c,
        "p": p,
        "edges": [l1, l2, l3, l4],
        "mass": mass,
        "mass_error": abs(mass - 1.0),
    }
    if args.format == "json":
        meta["samples"] = [[float(x), float(y)] for x, y in zip(xs, ys)]
        path = _out_path(args, "spectrum1d", ".json")
        _write_json(path, meta)
        _announce(path)
        return EXIT_OK
    path = _out_path(args, "spectrum1d", ".csv")
    lines = ["x,density"]
    for x, y in zip(xs, ys):
        lines.append(f"{_fmt(x)},{_fmt(y)}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    _announce(path)
    side = _out_path(args, "spectrum1d", ".meta.json")
    _write_json(side, meta)
    _announce(side)
    return EXIT_OK


# ----------------------------------------------------------------------
# moments
# ----------------------------------------------------------------------

def cmd_moments(args) -> int:
    params = _params_from(args)
    try:
        closed = [equilibrium_moments(params, k) for k in range(args.k + 1)]
    except PhaseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PHASE
    series = postcritical_moments_from_cauchy(params, args.k)
    discrepancy = float(max(abs(a - b) for a, b in zip(closed, series)))
    payload = {
        "tau": params.tau,
        "c": params.c,
        "p": [params.p.real, params.p.imag],
        "closed_form": [[m.real, m.imag] for m in closed],
        "series_extraction": [[m.real, m.imag] for m in series],
        "max_discrepancy": discrepancy,
    }
    if args.format == "json":
        path = _out_path(args, "moments", ".json")
        _write_json(path, payload)
    else:
        path = _out_path(args, "moments", ".csv")
        lines = ["k,closed_re,closed_im,series_re,series_im"]
        for k, (ac, bc) in enumerate(zip(closed, series)):
            lines.append(
                f"{k},{_fmt(ac.real)},{_fmt(ac.imag)},{_fmt(bc.real)},{_fmt(bc.imag)}"
            )
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")
    _announce(path)
    if discrepancy > 1e-6:
        print(f"moment discrepancy {discrepancy} exceeds 1e-6", file=sys.stderr)
        return EXIT_VERIFY_FAILED
    return EXIT_OK


# ----------------------------------------------------------------------
# parser
# ----------------------------------------------------------------------

def _add_common(sub, tau=True):
    if tau:
        sub.add_argument("--tau", type=float, required=True, help="anisotropy in [0,1)")
    sub.add_argument("--c", type=float, required=True, help="point-charge strength")
    sub.add_argument("--p", type=_parse_complex, default=0j,
                     help="charge location as 're' or 're,im'")
    sub.add_argument("--format", choices=("csv", "json"), default="csv")
    sub.add_argument("--output", default=None,
                     help="output path stem (default: subcommand name)")
    sub.add_argument("--deterministic", action="store_true",
                     help="force single-threaded, bytewise-reproducible output")
    sub.add_argument("--threads", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coulombgas",
        description="Equilibrium droplets of the quadratic planar Coulomb gas "
                    "with a point charge",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    d = subs.add_parser("droplet", help="droplet boundary data")
    _add_common(d)
    d.add_argument("--n", type=int, default=512, help="samples per boundary curve")
    d.set_defaults(func=cmd_droplet)

    f = subs.add_parser("fekete", help="minimise the discrete energy")
    _add_common(f)
    f.add_argument("--n", type=int, required=True, help="number of points")
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--potential", choices=(COORD_SYMMETRIC, COORD_SQUARED),
                   default=COORD_SYMMETRIC)
    f.add_argument("--symmetry", choices=("complex", "symplectic"),
                   default="complex")
    f.add_argument("--max-iter", dest="max_iter", type=int, default=3000)
    f.add_argument("--tol", type=float, default=1e-6)
    f.set_defaults(func=cmd_fekete)

    v = subs.add_parser("verify", help="variational certification")
    _add_common(v)
    v.add_argument("--grid-n", dest="grid_n", type=int, default=20)
    v.add_argument("--rays", type=int, default=64)
    v.set_defaults(func=cmd_verify)

    s = subs.add_parser("spectrum1d", help="Hermitian-limit density")
    _add_common(s, tau=False)
    s.add_argument("--n", type=int, default=1000, help="sample count")
    s.set_defaults(func=cmd_spectrum1d)

    m = subs.add_parser("moments", help="equilibrium moments cross-check")
    _add_common(m)
    m.add_argument("--k", type=int, default=4, help="highest moment order")
    m.set_defaults(func=cmd_moments)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_PARAMS


if __name__ == "__main__":
    sys.exit(main())
