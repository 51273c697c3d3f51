"""Low-temperature particle configurations (discrete energy minimisers).

The discrete Coulomb energy

    E = sum_{j<k} log 1/|z_j - z_k|^2 + N sum_j W(z_j)

(with mirror terms and doubled confinement for the symplectic symmetry
class) is minimised by gradient descent with Armijo backtracking.  The
empirical measure of the minimiser approximates the equilibrium measure,
so converged configurations fill the predicted droplet.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from . import kernels
from .droplet import (
    ContainmentViolated,
    DropletRegion,
    EllipseWithHole,
    Position,
    boundary_points,
    contains,
    droplet,
)
from .potentials import (
    COORD_SQUARED,
    COORD_SYMMETRIC,
    ModelParams,
    Symmetry,
    d_potential,
    d_squared_potential,
    potential,
    squared_potential,
)
from .transforms import PhaseError, equilibrium_moments

ARMIJO_SLOPE = 1e-4
ARMIJO_SHRINK = 0.5
REAL_AXIS_BAND = 1e-6


@dataclass
class FeketeConfiguration:
    """Minimiser output: points with energy, gradient norm and trace."""

    points: np.ndarray
    energy: float
    grad_norm: float
    iterations: int
    seed: int
    converged: bool
    energy_history: np.ndarray = field(repr=False, default_factory=lambda: np.array([]))

    def to_json_dict(self, params: ModelParams) -> dict:
        return {
            "params": {
                "tau": params.tau,
                "c": params.c,
                "p_re": params.p.real,
                "p_im": params.p.imag,
                "symmetry": params.symmetry.value,
            },
            "n": int(len(self.points)),
            "seed": int(self.seed),
            "energy": float(self.energy),
            "grad_norm": float(self.grad_norm),
            "iterations": int(self.iterations),
            "converged": bool(self.converged),
        }


def _confinement(params: ModelParams, which: str):
    if which in (COORD_SYMMETRIC, "Qp"):
        return (
            lambda z: potential(params, z),
            lambda z: np.conj(d_potential(params, z)),
            params.p,
        )
    if which == COORD_SQUARED:
        return (
            lambda z: squared_potential(params, z),
            lambda z: np.conj(d_squared_potential(params, z)),
            0j,
        )
    raise ValueError(f"unknown potential kind {which!r}")


def _check_config(points: np.ndarray, params: ModelParams) -> None:
    if params.symmetry is Symmetry.SYMPLECTIC:
        if params.p.imag != 0:
            raise ValueError("symplectic symmetry requires a conjugation-symmetric "
                             "potential (real p)")
        if np.any(points.imag == 0):
            raise ValueError("symplectic configuration has a point on the real axis")


def energy(points, params: ModelParams, which: str = COORD_SYMMETRIC,
           threads: int = 1) -> float:
    """Total discrete energy of a configuration."""
    z = np.ascontiguousarray(points, dtype=np.complex128)
    n = len(z)
    _check_config(z, params)
    w_fn, _, _ = _confinement(params, which)
    interaction = -kernels.interaction_energy(z, threads=threads)
    confinement = float(np.sum(w_fn(z)))
    if params.symmetry is Symmetry.SYMPLECTIC:
        interaction -= kernels.mirror_energy(z, threads=threads)
        total = interaction + 2.0 * n * confinement
    else:
        total = interaction + n * confinement
    if not math.isfinite(total):
        raise ValueError("energy is singular (coincident points)")
    return total


def gradient(points, params: ModelParams, which: str = COORD_SYMMETRIC,
             threads: int = 1) -> np.ndarray:
    """Wirtinger gradient dE/dconj(z_j); the real gradient is twice this."""
    z = np.ascontiguousarray(points, dtype=np.complex128)
    n = len(z)
    _check_config(z, params)
    _, dw_fn, _ = _confinement(params, which)
    g = -kernels.interaction_grad(z, threads=threads)
    if params.symmetry is Symmetry.SYMPLECTIC:
        g = g - kernels.mirror_grad(z, threads=threads)
        g = g + 2.0 * n * dw_fn(z)
    else:
        g = g + n * dw_fn(z)
    if not np.all(np.isfinite(g)):
        raise ValueError("gradient is singular (coincident points)")
    return g


def _prediction_box(params: ModelParams, which: str):
    """Bounding box of the predicted droplet, inflated by 20%."""
    coords = COORD_SYMMETRIC if which in (COORD_SYMMETRIC, "Qp") else COORD_SQUARED
    try:
        region = droplet(params, coords)
        pts = np.concatenate(boundary_points(region, 256))
        xmin, xmax = pts.real.min(), pts.real.max()
        ymin, ymax = pts.imag.min(), pts.imag.max()
    except (ContainmentViolated, PhaseError, ValueError):
        r = (1.0 + params.tau) * math.sqrt(1.0 + params.c) + abs(params.p)
        if coords == COORD_SQUARED:
            r = r * r
        xmin, xmax, ymin, ymax = -r, r, -r, r
    cx, cy = 0.5 * (xmin + xmax), 0.5 * (ymin + ymax)
    hx, hy = 0.6 * (xmax - xmin), 0.6 * (ymax - ymin)
    return cx - hx, cx + hx, cy - hy, cy + hy


def _initial_points(n, params, which, rng, symmetric_init):
    xmin, xmax, ymin, ymax = _prediction_box(params, which)
    _, _, charge = _confinement(params, which)
    guard = 0.1 / math.sqrt(n) if params.c > 0 else 0.0
    symplectic = params.symmetry is Symmetry.SYMPLECTIC
    m = (n + 1) // 2 if symmetric_init else n
    pts = np.empty(m, dtype=complex)
    filled = 0
    while filled < m:
        cand = (
            rng.uniform(xmin, xmax, size=m - filled)
            + 1j * rng.uniform(ymin, ymax, size=m - filled)
        )
        ok = np.ones(len(cand), dtype=bool)
        if guard > 0:
            ok &= np.abs(cand - charge) > guard
        if symplectic:
            ok &= np.abs(cand.imag) > REAL_AXIS_BAND
        kept = cand[ok]
        pts[filled : filled + len(kept)] = kept
        filled += len(kept)
    if symmetric_init:
        if n % 2:
            raise ValueError("sign-symmetric initialisation needs an even count")
        pts = np.concatenate([pts, -pts])
    return pts


def minimize(
    n: int,
    params: ModelParams,
    which: str = COORD_SYMMETRIC,
    seed: int = 0,
    max_iter: int = 3000,
    tol: float = 1e-6,
    threads: int = 1,
    symmetric_init: bool = False,
    step_policy: str = "bb",
) -> FeketeConfiguration:
    """Gradient descent with Armijo backtracking from a random start inside
    the inflated droplet bounding box.

    The trial step follows the Barzilai-Borwein spectral rule (``"bb"``,
    default) or doubles the last accepted step (``"grow"``); either way
    every step is safeguarded by the Armijo test with slope 1e-4 and
    shrink factor 0.5.  Terminates when the real-gradient norm falls below
    ``tol * n`` or after ``max_iter`` accepted steps; a failed termination
    returns the best iterate flagged not converged.  Deterministic for a
    fixed seed.
    """
    if n < 1:
        raise ValueError("need at least one point")
    if step_policy not in ("bb", "grow"):
        raise ValueError(f"unknown step policy {step_policy!r}")
    rng = np.random.default_rng(seed)
    z = _initial_points(n, params, which, rng, symmetric_init)
    e = energy(z, params, which, threads)
    history = [e]
    step = 0.5 / n
    iterations = 0
    converged = False
    symplectic = params.symmetry is Symmetry.SYMPLECTIC
    g = gradient(z, params, which, threads)
    gnorm = 2.0 * float(np.linalg.norm(g))
    z_prev = None
    g_prev = None
    for iterations in range(1, max_iter + 1):
        if gnorm <= tol * n:
            converged = True
            iterations -= 1
            break
        direction = -2.0 * g
        slope = -(gnorm * gnorm) * ARMIJO_SLOPE
        if step_policy == "bb" and z_prev is not None:
            dz = z - z_prev
            dg = 2.0 * (g - g_prev)
            denom = float(np.vdot(dg, dg).real)
            t = float(np.vdot(dz, dg).real) / denom if denom > 0 else step * 2.0
            if not (t > 0 and math.isfinite(t)):
                t = step * 2.0
        else:
            t = step * 2.0
        accepted = False
        while t > 1e-18:
            z_new = z + t * direction
            if symplectic and np.any(np.abs(z_new.imag) < REAL_AXIS_BAND):
                t *= ARMIJO_SHRINK
                continue
            try:
                e_new = energy(z_new, params, which, threads)
            except ValueError:
                t *= ARMIJO_SHRINK
                continue
            if e_new <= e + t * slope:
                accepted = True
                break
            t *= ARMIJO_SHRINK
        if not accepted:
            break
        z_prev, g_prev = z, g
        z, e, step = z_new, e_new, t
        history.append(e)
        g = gradient(z, params, which, threads)
        gnorm = 2.0 * float(np.linalg.norm(g))
    else:
        iterations = max_iter
    converged = converged or gnorm <= tol * n
    return FeketeConfiguration(
        points=z,
        energy=e,
        grad_norm=gnorm,
        iterations=iterations,
        seed=seed,
        converged=converged,
        energy_history=np.array(history),
    )


# ----------------------------------------------------------------------
# Diagnostics against the predicted droplet
# ----------------------------------------------------------------------

@dataclass
class DiagnosticsReport:
    inside_fraction: float
    dilation: float
    cluster_count: int
    cluster_threshold: float
    hole_empty: Optional[bool]
    empirical_moments: list
    reference_moments: Optional[list]
    moment_errors: Optional[list]

    def to_json_dict(self) -> dict:
        def cpair(v):
            return [v.real, v.imag]

        return {
            "inside_fraction": self.inside_fraction,
            "dilation": self.dilation,
            "cluster_count": self.cluster_count,
            "cluster_threshold": self.cluster_threshold,
            "hole_empty": self.hole_empty,
            "empirical_moments": [cpair(v) for v in self.empirical_moments],
            "reference_moments": (
                None
                if self.reference_moments is None
                else [cpair(v) for v in self.reference_moments]
            ),
            "moment_errors": self.moment_errors,
        }


def cluster_count(points: np.ndarray, threshold: float) -> int:
    """Single-linkage component count at the given linking distance."""
    n = len(points)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    tree = cKDTree(np.column_stack([points.real, points.imag]))
    for i, j in tree.query_pairs(threshold):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
    return len({find(i) for i in range(n)})


def empirical_diagnostics(
    config: FeketeConfiguration, region: DropletRegion, params: ModelParams
) -> DiagnosticsReport:
    """Compare a configuration with the predicted droplet: dilated inside
    fraction, single-linkage cluster count, hole occupancy and the first
    empirical moments against the closed forms (post-critical only)."""
    z = config.points
    n = len(z)
    eps = 3.0 / math.sqrt(n)
    pts = np.concatenate(boundary_points(region, 1024))
    tree = cKDTree(np.column_stack([pts.real, pts.imag]))
    inside = 0
    for zz in z:
        if contains(region, zz) in (Position.INTERIOR, Position.BOUNDARY):
            inside += 1
        else:
            dist, _ = tree.query([zz.real, zz.imag])
            if dist <= eps:
                inside += 1
    hole_empty = None
    if isinstance(region.shape, EllipseWithHole) and region.shape.hole_radius > 0:
        clearance = np.min(np.abs(z - region.shape.hole_center))
        hole_empty = bool(clearance > 0.5 * region.shape.hole_radius)
    emp = [complex(np.mean(z**k)) for k in range(1, 5)]
    try:
        ref = [equilibrium_moments(params, k) for k in range(1, 5)]
        errors = [abs(e - r) for e, r in zip(emp, ref)]
    except PhaseError:
        ref, errors = None, None
    return DiagnosticsReport(
        inside_fraction=inside / n,
        dilation=eps,
        cluster_count=cluster_count(z, 4.0 / math.sqrt(n)),
        cluster_threshold=4.0 / math.sqrt(n),
        hole_empty=hole_empty,
        empirical_moments=emp,
        reference_moments=ref,
        moment_errors=errors,
    )


# ----------------------------------------------------------------------
# Serialization
# ----------------------------------------------------------------------

def points_csv(config: FeketeConfiguration) -> str:
    lines = ["re,im"]
    for z in config.points:
        lines.append(f"{float(z.real)!r},{float(z.imag)!r}")
    return "\n".join(lines) + "\n"


def save_csv(config: FeketeConfiguration, path) -> None:
    with open(path, "w") as fh:
        fh.write(points_csv(config))


def save_json(config: FeketeConfiguration, params: ModelParams, path) -> None:
    payload = config.to_json_dict(params)
    payload["points"] = [[z.real, z.imag] for z in config.points]
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
