"""Droplet geometry: phase classification, explicit regions, conformal maps.

The support of the equilibrium measure (the droplet) undergoes a topology
transition at the critical anisotropy tau_c = 1/(1 + 2c):

* tau < tau_c ("post-critical"): ellipse minus a round hole cut around the
  charge, doubly connected in symmetric coordinates;
* tau = tau_c: the hole touches the ellipse at two symmetric points;
* tau > tau_c ("pre-critical"): two disconnected components in symmetric
  coordinates; in squared coordinates a single Jordan domain whose
  complement is the image of the unit-disk exterior under an explicit
  rational map.

Regions are represented in either coordinate system and answer
membership, boundary-sampling and area queries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .potentials import COORD_SQUARED, COORD_SYMMETRIC, ModelParams

IDENTITY_TOL = 1e-10          # relative tolerance for map-coefficient identities
ROOT_BAND = 1e-9              # |w| - 1 band classifying boundary points
PHASE_TIE_TOL = 1e-14


class PhaseError(ValueError):
    """Operation invoked outside its validity regime."""


class ContainmentViolated(ValueError):
    """The hole disk is not contained in the confining ellipse."""


class NoValidRoot(RuntimeError):
    """No (or more than one) admissible root of a defining polynomial."""


class Phase(Enum):
    POST_CRITICAL = "post-critical"
    CRITICAL = "critical"
    PRE_CRITICAL = "pre-critical"


class Position(Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    EXTERIOR = "exterior"


def critical_tau(c: float) -> float:
    """Critical anisotropy 1/(1 + 2c) separating the two droplet phases."""
    if c < 0:
        raise ValueError("charge strength c must be >= 0")
    return 1.0 / (1.0 + 2.0 * c)


def classify_phase(params: ModelParams) -> Phase:
    """Phase of the centred model; ties within 1e-14 of tau_c are Critical."""
    if params.p != 0:
        raise ValueError("phase dichotomy is defined for the centred charge (p = 0)")
    tc = critical_tau(params.c)
    if abs(params.tau - tc) <= PHASE_TIE_TOL:
        return Phase.CRITICAL
    return Phase.POST_CRITICAL if params.tau < tc else Phase.PRE_CRITICAL


# ----------------------------------------------------------------------
# Rational conformal map of the pre-critical squared-coordinate droplet
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class RationalMap:
    """Rational map w -> r1 w + r2 + r3/w + r4/(w - a) carrying the exterior
    of the unit disk onto the exterior of the squared-coordinate droplet.

    Equivalently d (1 - a w)(w - a tau)^2 / (w (w - a)) with leading
    constant d = (1 + tau)(1 + 2c)/2.  At tau = tau_c the pole at ``a``
    disappears (r4 = 0) and the map degenerates to a shifted Joukowsky
    transform.
    """

    r1: float
    r2: float
    r3: float
    r4: float
    a: float
    d: float
    tau: float
    c: float

    def __call__(self, w):
        w = np.asarray(w, dtype=complex)
        if np.any(w == 0) or (self.r4 != 0 and np.any(w == self.a)):
            raise ZeroDivisionError("map evaluated at a pole")
        val = self.r1 * w + self.r2 + self.r3 / w
        if self.r4 != 0:
            val = val + self.r4 / (w - self.a)
        return val if val.ndim else complex(val)

    def deriv(self, w):
        w = np.asarray(w, dtype=complex)
        if np.any(w == 0) or (self.r4 != 0 and np.any(w == self.a)):
            raise ZeroDivisionError("map derivative evaluated at a pole")
        val = self.r1 - self.r3 / w**2
        if self.r4 != 0:
            val = val - self.r4 / (w - self.a) ** 2
        return val if val.ndim else complex(val)

    def factored(self, w):
        """Product-form evaluation d (1-aw)(w-a tau)^2 / (w (w-a)); the
        factor (1-aw)/(w-a) reduces to -1/a when the pole vanishes."""
        w = np.asarray(w, dtype=complex)
        num = (w - self.a * self.tau) ** 2
        if self.r4 == 0:
            # critical case a = -1: (1 - aw)/(w - a) == 1
            val = self.d * num / w
        else:
            val = self.d * (1.0 - self.a * w) * num / (w * (w - self.a))
        return val if val.ndim else complex(val)

    def conj_reflected(self, w):
        """Schwarz reflection conj(f(1/conj(w))); rational since the
        coefficients are real.  Equals conj(f(w)) on the unit circle."""
        w = np.asarray(w, dtype=complex)
        return np.conj(self.__call__(1.0 / np.conj(w)))


def _rel_err(lhs, rhs, scale):
    return abs(lhs - rhs) / max(scale, 1e-300)


def _validate_map(m: RationalMap) -> None:
    t, c = m.tau, m.c
    if not (-1.0 - 1e-12 <= m.a < 0.0):
        raise AssertionError(f"pole location a = {m.a} outside [-1, 0)")
    scale = abs(m.r1) + abs(m.r2) + abs(m.r3) + abs(m.r4)
    checks = {
        "r1 = -a d": (m.r1, -m.a * m.d, abs(m.r1)),
        "r3 = r1 tau^2": (m.r3, m.r1 * t * t, abs(m.r1)),
        "r4 relation": (m.r4, m.a * (1 - t * t) * (m.r2 - 2 * t * (1 + c)), scale),
        "double-zero coefficient": (
            (m.a * m.a - 1) / (m.a * m.a) * m.r1 - m.r2 / m.a,
            2 * m.r1 * t,
            scale,
        ),
        "pole-strength product": (
            ((2 - m.a**2 + m.a**4 * t * t) * m.r1 + m.a * m.r2)
            * (m.r2 - 2 * t * (1 + c)),
            (1 - t * t) * c * c * m.a * (m.a * m.a - 1),
            scale * scale,
        ),
    }
    # r2 in terms of r1 and the pole location
    denom = 1 - m.a * m.a * t * t
    checks["r2 relation"] = (
        m.r2,
        m.r1 * (1 + m.a**2 * t * t) / denom * (m.a**2 - 1) / m.a
        + 2 * m.a**2 * (1 - t * t) * t * (1 + c) / denom,
        scale,
    )
    for name, (lhs, rhs, sc) in checks.items():
        if _rel_err(lhs, rhs, sc) > IDENTITY_TOL:
            raise AssertionError(f"map identity violated: {name}")
    # zero at the reflected pole (degenerate when the pole itself vanishes)
    if m.r4 != 0 and abs(m(1.0 / m.a)) > IDENTITY_TOL * scale:
        raise AssertionError("map identity violated: f(1/a) = 0")
    w0 = m.a * t
    if abs(m(w0)) > IDENTITY_TOL * scale or abs(m.deriv(w0)) > IDENTITY_TOL * scale:
        raise AssertionError("map identity violated: double zero at a tau")
    # sum and product forms agree away from the poles
    probe = 2.0 * np.exp(1j * np.linspace(0.3, 5.9, 7))
    if np.max(np.abs(m(probe) - m.factored(probe))) > 1e-12 * scale * 2:
        raise AssertionError("map representations disagree")


def build_rational_map(params: ModelParams) -> RationalMap:
    """Closed-form coefficients of the boundary map, valid for
    tau_c <= tau < 1 with a centred positive charge."""
    t, c = params.tau, params.c
    if params.p != 0:
        raise PhaseError("boundary map requires a centred charge (p = 0)")
    if c <= 0:
        raise PhaseError("boundary map requires a positive charge strength")
    tc = critical_tau(c)
    if t < tc - PHASE_TIE_TOL:
        raise PhaseError(f"tau = {t} is below the critical value {tc}")
    s = math.sqrt(t * (1.0 + 2.0 * c))
    a = -1.0 / s
    d = (1.0 + t) * (1.0 + 2.0 * c) / 2.0
    r1 = (1.0 + t) / 2.0 * math.sqrt((1.0 + 2.0 * c) / t)
    r2 = (1.0 + t) / (2.0 * t) * (t * (1.0 + 2.0 * c) + 2.0 * t - 1.0)
    r3 = (1.0 + t) / 2.0 * t * s
    r4 = (1.0 - t) ** 2 * (1.0 + t) * (1.0 - (1.0 + 2.0 * c) * t) / (2.0 * t * s)
    if abs(a + 1.0) < 1e-13:
        a, r4 = -1.0, 0.0
    m = RationalMap(r1=r1, r2=r2, r3=r3, r4=r4, a=a, d=d, tau=t, c=c)
    _validate_map(m)
    return m


def eval_map(m: RationalMap, w):
    """Evaluate the boundary map; poles at 0 (and at ``a`` when r4 != 0)."""
    return m(w)


def invert_map(m: RationalMap, zeta) -> np.ndarray:
    """All three preimages of ``zeta`` under the map, i.e. the roots of

        a d w^3 - (d + 2 a^2 d tau - zeta) w^2
            + a (2 d tau + a^2 tau^2 d - zeta) w - a^2 tau^2 d = 0,

    computed as companion-matrix eigenvalues and polished by Newton steps.
    The product of the roots is a tau^2.
    """
    z = complex(zeta)
    a, d, t = m.a, m.d, m.tau
    c3 = a * d
    c2 = -(d + 2 * a * a * d * t - z)
    c1 = a * (2 * d * t + a * a * t * t * d - z)
    c0 = -a * a * t * t * d
    roots = np.roots([c3, c2, c1, c0])
    for _ in range(2):
        val = ((c3 * roots + c2) * roots + c1) * roots + c0
        dval = (3 * c3 * roots + 2 * c2) * roots + c1
        safe = np.abs(dval) > 0
        roots[safe] = roots[safe] - val[safe] / dval[safe]
    return roots


# ----------------------------------------------------------------------
# Regions
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class EllipseWithHole:
    """Ellipse (axis-aligned, centred at ``center``) minus an open disk."""

    center: complex
    semi_x: float
    semi_y: float
    hole_center: complex
    hole_radius: float


@dataclass(frozen=True)
class MappedRegion:
    """Jordan domain bounded by the image of the unit circle under ``map``."""

    map: RationalMap


@dataclass(frozen=True)
class DropletRegion:
    coords: str                      # COORD_SYMMETRIC or COORD_SQUARED
    shape: EllipseWithHole | MappedRegion
    params: ModelParams


def check_containment(params: ModelParams) -> bool:
    """True iff the closed hole disk lies inside the closed confining
    ellipse.  The ellipse quadratic form is maximised over the disk
    boundary by dense angular sampling plus golden-section refinement."""
    t, c = params.tau, params.c
    if c == 0:
        return True
    ax = (1.0 + t) * math.sqrt(1.0 + c)
    ay = (1.0 - t) * math.sqrt(1.0 + c)
    rho = math.sqrt((1.0 - t * t) * c)
    px, py = params.p.real, params.p.imag

    def form(theta):
        x = px + rho * np.cos(theta)
        y = py + rho * np.sin(theta)
        return (x / ax) ** 2 + (y / ay) ** 2

    theta = np.linspace(0.0, 2.0 * np.pi, 1024, endpoint=False)
    vals = form(theta)
    k = int(np.argmax(vals))
    lo = theta[k] - 2.0 * np.pi / 1024
    hi = theta[k] + 2.0 * np.pi / 1024
    golden = (math.sqrt(5.0) - 1.0) / 2.0
    for _ in range(80):
        m1 = hi - golden * (hi - lo)
        m2 = lo + golden * (hi - lo)
        if form(m1) > form(m2):
            hi = m2
        else:
            lo = m1
    peak = max(float(np.max(vals)), float(form(0.5 * (lo + hi))))
    return peak <= 1.0 + 1e-13


def postcritical_droplet(params: ModelParams, coords: str = COORD_SYMMETRIC) -> DropletRegion:
    """Explicit ellipse-minus-disk droplet of the post-critical regime.

    Symmetric coordinates allow any charge location satisfying the
    containment condition; squared coordinates require p = 0.
    """
    t, c = params.tau, params.c
    if not check_containment(params):
        raise ContainmentViolated(
            "hole disk is not contained in the ellipse (pre-critical regime or invalid p)"
        )
    if coords == COORD_SYMMETRIC:
        shape = EllipseWithHole(
            center=0j,
            semi_x=(1.0 + t) * math.sqrt(1.0 + c),
            semi_y=(1.0 - t) * math.sqrt(1.0 + c),
            hole_center=params.p,
            hole_radius=math.sqrt((1.0 - t * t) * c),
        )
    elif coords == COORD_SQUARED:
        if params.p != 0:
            raise ValueError("squared-coordinate droplet requires a centred charge")
        shape = EllipseWithHole(
            center=complex(2.0 * t * (1.0 + c), 0.0),
            semi_x=(1.0 + t * t) * (1.0 + c),
            semi_y=(1.0 - t * t) * (1.0 + c),
            hole_center=0j,
            hole_radius=(1.0 - t * t) * c,
        )
    else:
        raise ValueError(f"unknown coordinate system {coords!r}")
    return DropletRegion(coords=coords, shape=shape, params=params)


def precritical_droplet(params: ModelParams, coords: str = COORD_SQUARED) -> DropletRegion:
    """Pre-critical droplet carried by the rational boundary map."""
    m = build_rational_map(params)
    if coords not in (COORD_SQUARED, COORD_SYMMETRIC):
        raise ValueError(f"unknown coordinate system {coords!r}")
    return DropletRegion(coords=coords, shape=MappedRegion(map=m), params=params)


def droplet(params: ModelParams, coords: str = COORD_SYMMETRIC) -> DropletRegion:
    """Droplet for the given parameters in the requested coordinates.

    At the critical tie the post-critical (internally tangent) region is
    canonical: the Jordan-curve interior at exactly tau_c overcounts the
    hole, which still carries zero equilibrium mass margin.
    """
    if params.p != 0:
        return postcritical_droplet(params, coords)
    phase = classify_phase(params)
    if phase is Phase.PRE_CRITICAL:
        return precritical_droplet(params, coords)
    return postcritical_droplet(params, coords)


def to_symmetric(region: DropletRegion) -> DropletRegion:
    """Symmetric-coordinate region with the same membership semantics:
    contains(S, z) == contains(Shat, z^2)."""
    if region.coords != COORD_SQUARED:
        raise ValueError("input region must be in squared coordinates")
    if isinstance(region.shape, EllipseWithHole):
        return postcritical_droplet(region.params, COORD_SYMMETRIC)
    return DropletRegion(coords=COORD_SYMMETRIC, shape=region.shape, params=region.params)


def square_region(region: DropletRegion) -> DropletRegion:
    """Alias of :func:`to_symmetric`: unfold a squared-coordinate region."""
    return to_symmetric(region)


def contains(region: DropletRegion, zeta, tol: float = ROOT_BAND) -> Position:
    """Classify a point as Interior / Boundary / Exterior of the region.

    Post-critical regions use direct inequality tests; pre-critical
    squared regions count preimages inside the unit disk (3 interior,
    2 exterior, boundary when a preimage sits within ``tol`` of the unit
    circle).  Symmetric pre-critical membership delegates to the squared
    region at zeta^2.
    """
    z = complex(zeta)
    if isinstance(region.shape, MappedRegion):
        if region.coords == COORD_SYMMETRIC:
            squared = DropletRegion(COORD_SQUARED, region.shape, region.params)
            return contains(squared, z * z, tol)
        roots = invert_map(region.shape.map, z)
        dist = np.abs(np.abs(roots) - 1.0)
        if np.min(dist) <= tol:
            return Position.BOUNDARY
        inside = int(np.sum(np.abs(roots) < 1.0))
        if inside == 3:
            return Position.INTERIOR
        if inside == 2:
            return Position.EXTERIOR
        raise RuntimeError(f"unexpected preimage configuration ({inside} inside)")
    s = region.shape
    ex = ((z.real - s.center.real) / s.semi_x) ** 2 + (
        (z.imag - s.center.imag) / s.semi_y
    ) ** 2 - 1.0
    hole = s.hole_radius - abs(z - s.hole_center) if s.hole_radius > 0 else -math.inf
    if ex > tol or hole > tol:
        return Position.EXTERIOR
    if abs(ex) <= tol or (s.hole_radius > 0 and abs(hole) <= tol):
        return Position.BOUNDARY
    return Position.INTERIOR


def _unwrapped_sqrt_curve(m: RationalMap, n: int):
    """Continuous square root of the mapped boundary f(e^{i theta}).

    Pre-critically the boundary does not wind around 0 and the result is a
    closed Jordan curve (its negative is the second component).  If the
    curve winds once (exact criticality) the two square-root branches join
    into a single closed curve traversed over 4 pi.
    """
    theta = 2.0 * np.pi * np.arange(n) / n
    fvals = m(np.exp(1j * theta))
    phase = np.unwrap(np.angle(fvals))
    closing = np.angle(fvals[0]) - np.angle(fvals[-1])
    closing = (closing + np.pi) % (2.0 * np.pi) - np.pi
    winding = (phase[-1] + closing - phase[0]) / (2.0 * np.pi)
    curve = np.sqrt(np.abs(fvals)) * np.exp(0.5j * phase)
    return curve, int(round(winding))


def boundary_points(region: DropletRegion, n: int) -> list[np.ndarray]:
    """Sample the boundary with n points per closed curve.

    Returns one complex array per closed curve: ellipse and hole circle in
    the post-critical case, the mapped unit circle in squared coordinates,
    and the two square-root branches in symmetric pre-critical coordinates.
    """
    if n < 3:
        raise ValueError("need at least 3 boundary samples")
    theta = 2.0 * np.pi * np.arange(n) / n
    if isinstance(region.shape, EllipseWithHole):
        s = region.shape
        ellipse = s.center + s.semi_x * np.cos(theta) + 1j * s.semi_y * np.sin(theta)
        curves = [ellipse]
        if s.hole_radius > 0:
            curves.append(s.hole_center + s.hole_radius * np.exp(1j * theta))
        return curves
    m = region.shape.map
    if region.coords == COORD_SQUARED:
        return [m(np.exp(1j * theta))]
    curve, winding = _unwrapped_sqrt_curve(m, n)
    if winding == 0:
        return [curve, -curve]
    # critical tie: the branches merge into one closed double-cover
    return [np.concatenate([curve, -curve])]


def area(region: DropletRegion) -> float:
    """Region area; exact for ellipse-minus-disk shapes, contour integral
    (1/2i) oint conj(z) dz with doubled trapezoid nodes and one Richardson
    extrapolation for mapped regions.  The symmetric-coordinate droplet
    always has area (1 - tau^2) pi.
    """
    if isinstance(region.shape, EllipseWithHole):
        s = region.shape
        return math.pi * (s.semi_x * s.semi_y - s.hole_radius**2)
    m = region.shape.map

    def contour_estimate(n):
        theta = 2.0 * np.pi * np.arange(n) / n
        w = np.exp(1j * theta)
        if region.coords == COORD_SQUARED:
            z = m(w)
            dz = m.deriv(w) * 1j * w
            val = np.mean(np.conj(z) * dz) * 2.0 * np.pi
            return abs((val / 2j).real)
        curve, winding = _unwrapped_sqrt_curve(m, n)
        dz = m.deriv(w) * 1j * w / (2.0 * curve)
        val = np.mean(np.conj(curve) * dz) * 2.0 * np.pi
        factor = 2.0 if winding == 0 else 1.0
        return factor * abs((val / 2j).real)

    n = 256
    prev = contour_estimate(n)
    for _ in range(12):
        n *= 2
        cur = contour_estimate(n)
        if abs(cur - prev) < 1e-10:
            return cur + (cur - prev) / 3.0
        prev = cur
    raise RuntimeError("contour area did not converge")


# ----------------------------------------------------------------------
# Off-centre isotropic map (tau = 0, charge strong enough to open the hole)
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class OffCenterMap:
    """Conformal map R z - kappa/(z - q) - kappa/q of the unit-disk
    exterior onto the complement of the simply connected tau = 0 droplet
    with an off-centre charge at p > 0."""

    R: float
    kappa: float
    q: float
    c: float
    p: float

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        val = self.R * z - self.kappa / (z - self.q) - self.kappa / self.q
        return val if val.ndim else complex(val)

    def deriv(self, z):
        z = np.asarray(z, dtype=complex)
        val = self.R + self.kappa / (z - self.q) ** 2
        return val if val.ndim else complex(val)


def offcenter_tau0_map(c: float, p: float) -> OffCenterMap:
    """Solve the cubic x^3 - ((p^2 + 4c + 2)/(2 p^2)) x^2 + 1/(2 p^4) = 0
    for x = q^2 and build the off-centre map.  Requires tau = 0, p > 0 and
    c above the threshold (1 - p^2)^2 / (4 p^2) where the droplet is
    simply connected."""
    if p <= 0:
        raise ValueError("charge location p must be positive")
    threshold = (1.0 - p * p) ** 2 / (4.0 * p * p)
    if c <= threshold:
        raise PhaseError(
            f"c = {c} is below the simply-connected threshold {threshold}"
        )
    coeffs = [1.0, -(p * p + 4.0 * c + 2.0) / (2.0 * p * p), 0.0, 1.0 / (2.0 * p**4)]
    roots = np.roots(coeffs)
    candidates = []
    for x in roots:
        if abs(x.imag) > 1e-10:
            continue
        x = float(x.real)
        if not 0.0 < x < 1.0:
            continue
        q = math.sqrt(x)
        kappa = (1.0 - q * q) * (1.0 - p * p * q * q) / (2.0 * p * q)
        if kappa > 0:
            candidates.append((q, kappa))
    if len(candidates) != 1:
        raise NoValidRoot(
            f"expected exactly one admissible root, found {len(candidates)}"
        )
    q, kappa = candidates[0]
    R = (1.0 + p * p * q * q) / (2.0 * p * q)
    return OffCenterMap(R=R, kappa=kappa, q=q, c=c, p=p)
