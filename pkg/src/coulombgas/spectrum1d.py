"""One-dimensional spectral density in the Hermitian limit.

The strongly anisotropic limit of the planar model confines the particles
to the real line with potential V(x) = x^2/2 - 2c log|x - p|.  The
equilibrium density is supported on two bands [l1, l2] and [l3, l4] and
equals sqrt(-prod(x - l_j)) / (2 pi |x - p|); for p = 0 it reduces to the
Marchenko-Pastur law in squared variables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

EDGE_CLAMP = 1e-14
_ONE_CUT_MERGE = 1e-12


def band_edges(c: float, p: float) -> tuple[float, float, float, float]:
    """Closed-form band edges, ordered l1 <= l2 <= l3 <= l4:

        l1,3 = (p - 2 -+ sqrt((p+2)^2 + 8c)) / 2
        l2,4 = (p + 2 -+ sqrt((p-2)^2 + 8c)) / 2
    """
    if c < 0:
        raise ValueError("charge strength c must be >= 0")
    sp = math.sqrt((p + 2.0) ** 2 + 8.0 * c)
    sm = math.sqrt((p - 2.0) ** 2 + 8.0 * c)
    l1 = (p - 2.0 - sp) / 2.0
    l2 = (p + 2.0 - sm) / 2.0
    l3 = (p - 2.0 + sp) / 2.0
    l4 = (p + 2.0 + sm) / 2.0
    return l1, l2, l3, l4


@dataclass(frozen=True)
class SpectralDensity1D:
    """Band edges plus the coefficients (A, B, C) of the rational function

        R(z) = z^2/4 + (A z^2 + B z + C)/(z - p)^2

    whose square root gives the Stieltjes transform deviation."""

    c: float
    p: float
    edges: tuple[float, float, float, float]
    A: float
    B: float
    C: float

    def __post_init__(self):
        l1, l2, l3, l4 = self.edges
        if not (l1 <= l2 <= l3 <= l4):
            raise ValueError("band edges are not ordered")
        if self.c > 0 and not (l1 < l2 <= l3 < l4):
            raise ValueError("positive charge must produce two proper bands")

    def __call__(self, x: float) -> float:
        return density(self.c, self.p, x)


def spectral_density(c: float, p: float) -> SpectralDensity1D:
    """Construct and cross-validate the density data for (c, p)."""
    edges = band_edges(c, p)
    A = -c - 1.0
    B = p * (c + 2.0)
    C = c * c - p * p
    # the quartic in R factors as ((z-p)(z-2) - 2c)((z-p)(z+2) - 2c)
    for z in (0.37, -1.2, 2.9):
        lhs = z * z / 4.0 + (A * z * z + B * z + C) / (z - p) ** 2 if z != p else None
        rhs = math.prod(z - l for l in edges) / (4.0 * (z - p) ** 2)
        if lhs is not None and abs(lhs - rhs) > 1e-10 * max(1.0, abs(rhs)):
            raise AssertionError("quartic factorisation check failed")
    return SpectralDensity1D(c=c, p=p, edges=edges, A=A, B=B, C=C)


def density(c: float, p: float, x: float) -> float:
    """Equilibrium density at x: sqrt(-prod(x - l_j)) / (2 pi |x - p|) on
    the bands, zero elsewhere.  Roundoff at the soft edges is absorbed by
    clamping the square-root argument at -1e-14; the one-cut formula takes
    over automatically when the inner edges merge (c = 0)."""
    l1, l2, l3, l4 = band_edges(c, p)
    if not (l1 <= x <= l2 or l3 <= x <= l4):
        return 0.0
    if l3 - l2 < _ONE_CUT_MERGE:
        val = (x - l1) * (l4 - x)
        val = 0.0 if val < 0 else val
        return math.sqrt(val) / (2.0 * math.pi)
    val = -(x - l1) * (x - l2) * (x - l3) * (x - l4)
    if val < 0:
        val = 0.0 if val > -EDGE_CLAMP else 0.0
    return math.sqrt(val) / (2.0 * math.pi * abs(x - p))


def marchenko_pastur_density(c: float, x: float) -> float:
    """Marchenko-Pastur density sqrt((lp^2 - x)(x - lm^2)) / (2 pi x) on
    [lm^2, lp^2] with lm, lp = sqrt(2c+1) -+ 1; the squared-variable
    pushforward of the p = 0 two-band density."""
    lm = math.sqrt(2.0 * c + 1.0) - 1.0
    lp = math.sqrt(2.0 * c + 1.0) + 1.0
    if not (lm * lm <= x <= lp * lp):
        return 0.0
    val = (lp * lp - x) * (x - lm * lm)
    if val < 0:
        val = 0.0
    if x == 0.0:
        return 0.0
    return math.sqrt(val) / (2.0 * math.pi * x)


def _band_quad(f, a: float, b: float) -> float:
    """Integrate f over [a, b] with the substitution x = edge +- t^2 on
    each half, removing the square-root edge singularities."""
    mid = 0.5 * (a + b)
    left, _ = quad(lambda t: f(a + t * t) * 2.0 * t, 0.0, math.sqrt(mid - a),
                   epsabs=1e-12, epsrel=1e-12, limit=200)
    right, _ = quad(lambda t: f(b - t * t) * 2.0 * t, 0.0, math.sqrt(b - mid),
                    epsabs=1e-12, epsrel=1e-12, limit=200)
    return left + right


def band_integral(c: float, p: float, f=lambda x: 1.0) -> float:
    """integral of f(x) against the density over both bands."""
    l1, l2, l3, l4 = band_edges(c, p)
    g = lambda x: f(x) * density(c, p, x)
    if l3 - l2 < _ONE_CUT_MERGE:
        return _band_quad(g, l1, l4)
    return _band_quad(g, l1, l2) + _band_quad(g, l3, l4)


def mp_mass(c: float) -> float:
    """Total Marchenko-Pastur mass (should be one)."""
    lm = math.sqrt(2.0 * c + 1.0) - 1.0
    lp = math.sqrt(2.0 * c + 1.0) + 1.0
    return _band_quad(lambda x: marchenko_pastur_density(c, x), lm * lm, lp * lp)


def schiffer_rational(c: float, p: float, z) -> complex:
    """The rational function R(z) = z^2/4 + (A z^2 + B z + C)/(z - p)^2;
    asserted against the factored form prod(z - l_j) / (4 (z - p)^2)."""
    z = complex(z)
    if z == p:
        raise ValueError("R has a double pole at z = p")
    sd = spectral_density(c, p)
    val = z * z / 4.0 + (sd.A * z * z + sd.B * z + sd.C) / (z - p) ** 2
    factored = math.prod([1.0 + 0j] + [z - l for l in sd.edges]) / (4.0 * (z - p) ** 2)
    if abs(val - factored) > 1e-12 * max(1.0, abs(val)):
        raise AssertionError("rational form disagrees with its factorisation")
    return val


def stieltjes(c: float, p: float, z) -> complex:
    """Stieltjes transform g(z) = V'(z)/2 - sqrt(R(z)), with the branch
    fixed by g ~ 1/z at infinity.

    The square root is the product of individually continued principal
    square roots of the four linear factors, whose jumps cancel except on
    the two bands.
    """
    z = complex(z)
    edges = band_edges(c, p)
    if _support_distance(z, edges) < 1e-12:
        raise ValueError("point is within 1e-12 of the support; branch ambiguous")
    if z == p:
        raise ValueError("Stieltjes transform evaluated at the charge location")
    root = 1.0 + 0j
    for l in edges:
        root *= np.sqrt(z - l)
    vp = z - 2.0 * c / (z - p)
    return complex(vp / 2.0 - root / (2.0 * (z - p)))


def _support_distance(z: complex, edges) -> float:
    l1, l2, l3, l4 = edges
    d = math.inf
    for a, b in ((l1, l2), (l3, l4)):
        x = min(max(z.real, a), b)
        d = min(d, abs(z - x))
    return d
