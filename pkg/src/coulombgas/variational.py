"""Numerical certification of the equilibrium variational conditions.

A candidate (density, droplet) pair is certified by checking that the
effective potential H = -2 log-potential + W has vanishing Wirtinger
derivative inside the droplet (equality condition), grows along rays
leaving the droplet (inequality condition), and that the boundary map
carries unit total mass (residue identities of the mass-one contour
integral).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from .droplet import (
    PHASE_TIE_TOL,
    DropletRegion,
    EllipseWithHole,
    MappedRegion,
    Phase,
    PhaseError,
    Position,
    RationalMap,
    boundary_points,
    classify_phase,
    contains,
    critical_tau,
)
from .potentials import ModelParams, d_potential, d_squared_potential
from .transforms import (
    BoundaryAmbiguity,
    _ellipse_log_constant,
    disk_log_potential,
    ellipse_cauchy,
    ellipse_log_potential,
    postcritical_cauchy,
    precritical_cauchy,
)


class PhaseMismatch(ValueError):
    """Region and parameters belong to different phases."""


class InequalityViolated(RuntimeError):
    def __init__(self, point, margin):
        self.point = point
        self.margin = margin
        super().__init__(f"variational inequality violated at {point} (margin {margin})")


@dataclass
class VerificationReport:
    phase: Phase
    grid_size: int
    interior_max_residual: Optional[float] = None
    fitted_constant: Optional[float] = None
    constant_spread: Optional[float] = None
    exterior_min_margin: Optional[float] = None
    monotone_beyond_layer: Optional[bool] = None
    min_exterior_gradient: Optional[float] = None
    real_axis_margin: Optional[float] = None
    mass_residual: Optional[float] = None

    def to_text(self) -> str:
        """Flat key-value block, one ``key value`` pair per line."""
        lines = [f"phase {self.phase.value}", f"grid_size {self.grid_size}"]
        for key in (
            "interior_max_residual",
            "fitted_constant",
            "constant_spread",
            "exterior_min_margin",
            "monotone_beyond_layer",
            "min_exterior_gradient",
            "real_axis_margin",
            "mass_residual",
        ):
            val = getattr(self, key)
            if val is not None:
                lines.append(f"{key} {val!r}")
        return "\n".join(lines) + "\n"


def _phase_of(params: ModelParams) -> Phase:
    if params.p == 0:
        return classify_phase(params)
    return Phase.POST_CRITICAL


def _check_region_matches(params: ModelParams, region: DropletRegion) -> Phase:
    phase = _phase_of(params)
    if isinstance(region.shape, MappedRegion):
        if phase is Phase.POST_CRITICAL:
            raise PhaseMismatch("mapped region supplied for a post-critical model")
    else:
        if phase is Phase.PRE_CRITICAL:
            raise PhaseMismatch("ellipse region supplied for a pre-critical model")
    return phase


def _boundary_cloud(region: DropletRegion, n: int = 512):
    pts = np.concatenate(boundary_points(region, n))
    xy = np.column_stack([pts.real, pts.imag])
    return pts, cKDTree(xy)


def _interior_grid(region: DropletRegion, grid_n: int, standoff_frac: float = 0.02):
    """Lattice points strictly inside the region, at least
    standoff_frac * diameter away from the boundary."""
    pts, tree = _boundary_cloud(region)
    xmin, xmax = pts.real.min(), pts.real.max()
    ymin, ymax = pts.imag.min(), pts.imag.max()
    diameter = math.hypot(xmax - xmin, ymax - ymin)
    standoff = standoff_frac * diameter
    xs = np.linspace(xmin, xmax, grid_n)
    ys = np.linspace(ymin, ymax, grid_n)
    out = []
    for x in xs:
        for y in ys:
            z = complex(x, y)
            dist, _ = tree.query([x, y])
            if dist < standoff:
                continue
            if contains(region, z) is Position.INTERIOR:
                out.append(z)
    return np.array(out), diameter


def _dH_interior(params: ModelParams, region: DropletRegion):
    """Wirtinger derivative of the effective potential, valid on the
    droplet (post-critical: closed forms; pre-critical: residue sum)."""
    t, c = params.tau, params.c
    if isinstance(region.shape, EllipseWithHole):
        s = region.shape
        rho2 = s.hole_radius**2

        def dH(z):
            cv = ellipse_cauchy(s.semi_x, s.semi_y, z).value
            hole = rho2 / (z - s.hole_center) if rho2 > 0 else 0.0
            return d_potential(params, z) - (cv - hole) / (1.0 - t * t)

        return dH
    m = region.shape.map

    def dH(z):
        return d_squared_potential(params, z) - precritical_cauchy(m, params, z)

    return dH


def _ordered_map(fn, items, threads):
    """Map preserving order; thread results are reduced in input order so
    output is deterministic regardless of scheduling."""
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def verify_equality(params: ModelParams, region: DropletRegion, grid_n: int,
                    threads: int = 1) -> VerificationReport:
    """Maximum of |dW/dz - C(z)| over an interior lattice, plus the spread
    of the effective potential itself (the equality constant)."""
    phase = _check_region_matches(params, region)
    grid, _ = _interior_grid(region, grid_n)
    dH = _dH_interior(params, region)
    residuals = np.array(_ordered_map(lambda z: abs(dH(z)), grid, threads))
    report = VerificationReport(phase=phase, grid_size=grid_n)
    report.interior_max_residual = float(residuals.max())
    if isinstance(region.shape, EllipseWithHole):
        s = region.shape
        t = params.tau
        c0 = _ellipse_log_constant(s.semi_x, s.semi_y)
        report.fitted_constant = -c0 / (1.0 - t * t)
        hvals = np.array([_effective_potential_closed(params, region, z) for z in grid])
        report.constant_spread = float(hvals.max() - hvals.min())
    else:
        report.constant_spread = _interior_spread_by_paths(params, region, grid, dH)
    return report


def _effective_potential_closed(params: ModelParams, region: DropletRegion, z) -> float:
    """Closed-form H(z) on the post-critical droplet (and inside the hole)."""
    from .potentials import potential

    s = region.shape
    t = params.tau
    L1 = ellipse_log_potential(s.semi_x, s.semi_y, z)
    L2 = (
        2.0 * disk_log_potential(s.hole_radius, s.hole_center, z)
        if s.hole_radius > 0
        else 0.0
    )
    return potential(params, z) - (L1 - L2) / (1.0 - t * t)


def _interior_spread_by_paths(params, region, grid, dH) -> float:
    """Spread of H over interior points, recovered by integrating dH along
    straight segments from an anchor point.  Points whose connecting
    segment leaves the safe interior are skipped."""
    if len(grid) < 2:
        return 0.0
    anchor = grid[np.argmin(np.abs(grid - grid.mean()))]
    nodes, weights = np.polynomial.legendre.leggauss(8)
    values = [0.0]
    for z in grid:
        if z == anchor:
            continue
        seg = z - anchor
        try:
            total = 0.0
            for s, w in zip(0.5 * (nodes + 1.0), 0.5 * weights):
                zz = anchor + s * seg
                if contains(region, zz) is not Position.INTERIOR:
                    raise BoundaryAmbiguity("path leaves the droplet")
                total += w * (2.0 * (dH(zz) * seg).real)
            values.append(total)
        except BoundaryAmbiguity:
            continue
    values = np.array(values)
    return float(values.max() - values.min())


def _gauss_segment(dH, z0, z1, nodes, weights) -> float:
    seg = z1 - z0
    total = 0.0
    for s, w in zip(0.5 * (nodes + 1.0), 0.5 * weights):
        total += w * (2.0 * (dH(z0 + s * seg) * seg).real)
    return total


def _ray_schedule(scale: float, far: float):
    t0 = 1e-5 * scale
    near = np.linspace(t0, 0.2 * scale, 16)
    mid = np.geomspace(0.2 * scale, far, 24)[1:]
    return np.concatenate([near, mid])


def verify_inequality(params: ModelParams, region: DropletRegion, rays: int,
                      threads: int = 1) -> VerificationReport:
    """March radial rays off the droplet boundary and confirm that the
    effective potential only grows:

    * the running margin H(t) - H(boundary) stays >= -1e-9,
    * the margin increases monotonically beyond a short boundary layer,
    * dH never vanishes at exterior sample points,
    * post-critically the hole interior is checked against its closed-form
      margin; pre-critically the real-axis stationary-point bound is
      scanned as well.

    Rays are independent; with ``threads > 1`` they are evaluated
    concurrently and reduced in ray order (deterministic).
    """
    phase = _check_region_matches(params, region)
    report = VerificationReport(phase=phase, grid_size=rays)
    pts, _ = _boundary_cloud(region, 512)
    xmin, xmax = pts.real.min(), pts.real.max()
    ymin, ymax = pts.imag.min(), pts.imag.max()
    diameter = math.hypot(xmax - xmin, ymax - ymin)
    scale = diameter / 2.0
    nodes, weights = np.polynomial.legendre.leggauss(6)

    if isinstance(region.shape, EllipseWithHole):
        s = region.shape
        outer = [s.center + s.semi_x * math.cos(a) + 1j * s.semi_y * math.sin(a)
                 for a in np.linspace(0.0, 2.0 * math.pi, rays, endpoint=False)]
        centroid = s.center
        charge = s.hole_center
        dH = _make_postcritical_exterior_dH(params)
    else:
        m = region.shape.map
        angles = np.linspace(0.0, 2.0 * math.pi, rays, endpoint=False)
        outer = list(m(np.exp(1j * angles)))
        centroid = complex(np.mean(np.asarray(outer)))
        charge = 0j
        dH = _make_precritical_exterior_dH(m, params)

    layer = 0.05 * scale
    standoff = 0.05 * scale if params.c > 0 else 0.0
    schedule = _ray_schedule(scale, 10.0 * diameter)

    def march(b):
        direction = b - centroid
        direction /= abs(direction)
        samples = b + schedule[:, None].ravel() * direction
        # stop the march before running into the charge singularity
        hit = np.nonzero(np.abs(samples - charge) < standoff)[0]
        if len(hit):
            samples = samples[: hit[0]]
        margin = 0.0
        ray_min_margin = math.inf
        ray_min_grad = math.inf
        ray_monotone = True
        violation = None
        prev_z = samples[0] if len(samples) else None
        prev_margin = None
        for i, z in enumerate(samples):
            if i > 0:
                margin += _gauss_segment(dH, prev_z, z, nodes, weights)
                prev_z = z
            ray_min_grad = min(ray_min_grad, abs(dH(z)))
            ray_min_margin = min(ray_min_margin, margin)
            if margin < -1e-9 and violation is None:
                violation = z
            if schedule[i] > layer:
                if prev_margin is not None and margin <= prev_margin:
                    ray_monotone = False
                prev_margin = margin
        return ray_min_margin, ray_min_grad, ray_monotone, violation

    results = _ordered_map(march, outer, threads)
    min_margin = min(r[0] for r in results)
    min_grad = min(r[1] for r in results)
    monotone = all(r[2] for r in results)
    for r in results:
        if r[3] is not None:
            raise InequalityViolated(r[3], min_margin)

    if isinstance(region.shape, EllipseWithHole) and region.shape.hole_radius > 0:
        hole_min = _hole_margin_scan(params, region.shape, rays)
        min_margin = min(min_margin, hole_min)
        if hole_min < -1e-9:
            raise InequalityViolated(region.shape.hole_center, hole_min)
    if isinstance(region.shape, MappedRegion):
        report.real_axis_margin = _real_axis_scan(region.shape.map, params)
        if report.real_axis_margin <= 0:
            raise InequalityViolated(None, report.real_axis_margin)

    report.exterior_min_margin = float(min_margin)
    report.monotone_beyond_layer = bool(monotone)
    report.min_exterior_gradient = float(min_grad)
    return report


def _make_postcritical_exterior_dH(params: ModelParams):
    def dH(z):
        return d_potential(params, z) - postcritical_cauchy(params, z)

    return dH


def _make_precritical_exterior_dH(m: RationalMap, params: ModelParams):
    def dH(z):
        return d_squared_potential(params, z) - precritical_cauchy(m, params, z)

    return dH


def _hole_margin_scan(params: ModelParams, s: EllipseWithHole, rays: int) -> float:
    """Closed-form margin inside the excluded disk:

        (2 rho^2 log(rho/r) + r^2 - rho^2) / (1 - tau^2),  r = |z - p|,

    which vanishes on the hole boundary and grows toward the charge.
    Radially symmetric about the charge, so a single radius scan covers
    every inward ray."""
    t = params.tau
    rho = s.hole_radius
    radii = np.linspace(0.999 * rho, 0.05 * rho, 8 * max(rays, 1))
    margins = (2.0 * rho * rho * np.log(rho / radii) + radii**2 - rho * rho) / (
        1.0 - t * t
    )
    return float(np.min(margins))


def _real_axis_scan(m: RationalMap, params: ModelParams) -> float:
    """Minimum of tau |f(x)| - d (a tau x - (a^2 tau^2 + 1) + a tau / x)
    over real |x| in [1.01, 10]; positivity rules out exterior stationary
    points with a real residual preimage."""
    t = params.tau
    a, d = m.a, m.d
    xs = np.concatenate([np.linspace(1.01, 10.0, 400), np.linspace(-10.0, -1.01, 400)])
    xs = xs[np.abs(xs - a) > 1e-9]
    lhs = d * (a * t * xs - (a * a * t * t + 1.0) + a * t / xs)
    bound = t * np.abs(m(xs.astype(complex)))
    return float(np.min(bound - lhs))


# ----------------------------------------------------------------------
# Mass-one contour integral and its residues
# ----------------------------------------------------------------------

def _require_strictly_precritical(m: RationalMap):
    if m.tau <= critical_tau(m.c) + PHASE_TIE_TOL:
        raise PhaseError(
            "mass-one contour requires a strictly pre-critical map; at the "
            "critical tie the pole residue that removes the hole mass is absent"
        )


def mass_one_check(m: RationalMap, params: ModelParams | None = None) -> float:
    """|contour - (1 - tau^2)| for the unit-mass contour integral

        (1/2 pi i) oint sqrt(conj(f(1/conj(w))) f(w)) f'(w)/f(w) dw

    over the unit circle.  On the circle the square root is |f(w)|, which
    is the continuous branch since f does not vanish there.  Trapezoid
    nodes are doubled until the estimate stabilises.
    """
    _require_strictly_precritical(m)
    target = 1.0 - m.tau**2

    def estimate(n):
        theta = 2.0 * np.pi * np.arange(n) / n
        w = np.exp(1j * theta)
        fw = m(w)
        integrand = np.abs(fw) * m.deriv(w) / fw * w
        return complex(np.mean(integrand))

    n = 512
    prev = estimate(n)
    for _ in range(10):
        n *= 2
        cur = estimate(n)
        if abs(cur - prev) < 1e-11:
            return abs(cur - target)
        prev = cur
    raise RuntimeError("mass-one contour quadrature did not converge")


def unit_mass_residues(m: RationalMap, n: int = 4096) -> tuple[complex, complex]:
    """Residues of the mass integrand at w = 0 and w = a by small-circle
    quadrature; they equal (1+c)(1-tau^2) and -c(1-tau^2).

    The square root is continued along each circle by phase unwrapping,
    anchored at the positive-real starting point where the reflected
    product conj(f(1/conj(w))) f(w) is a positive real number.
    """
    _require_strictly_precritical(m)
    t, a = m.tau, m.a
    eps0 = 0.45 * abs(a) * t
    epsa = 0.45 * min(abs(a) * (1.0 - t), (1.0 - a * a) / abs(a))
    res0 = _circle_residue(m, 0.0, eps0, n)
    resa = _circle_residue(m, a, epsa, n)
    return res0, resa


def _circle_residue(m: RationalMap, center: float, eps: float, n: int) -> complex:
    theta = 2.0 * np.pi * np.arange(n) / n
    w = center + eps * np.exp(1j * theta)
    G = m.conj_reflected(w) * m(w)
    if not (abs(G[0].imag) < 1e-9 * abs(G[0]) and G[0].real > 0):
        raise RuntimeError("square-root anchor is not positive real")
    phase = np.unwrap(np.angle(G))
    sqrt_G = np.sqrt(np.abs(G)) * np.exp(0.5j * phase)
    F = sqrt_G * m.deriv(w) / m(w)
    return complex(np.mean(F * (w - center)))
