"""Closed-form logarithmic and Cauchy transforms of the model measures.

Uniform measures on ellipses and disks admit elementary Cauchy and
logarithmic potentials; combining them gives the Cauchy transform of the
post-critical equilibrium measure in closed form.  Pre-critically the
transform follows from residue calculus on the unit circle through the
rational boundary map.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .droplet import (
    PHASE_TIE_TOL,
    ROOT_BAND,
    Phase,
    PhaseError,
    RationalMap,
    check_containment,
    classify_phase,
    critical_tau,
    invert_map,
)
from .potentials import ModelParams


class BoundaryAmbiguity(RuntimeError):
    """Preimage count is ambiguous within the root tolerance band."""


class SourceRegion(Enum):
    INSIDE_SOURCE = "inside"
    OUTSIDE_SOURCE = "outside"


@dataclass(frozen=True)
class CauchyValue:
    value: complex
    region_tag: SourceRegion


def _stable_sqrt_pair(z: complex, shift: float) -> complex:
    """Root s of s^2 = z^2 - shift chosen so that |z + s| >= |z - s|.

    With this sign z - s = shift/(z + s) is the branch vanishing at
    infinity, computed without cancellation.
    """
    s = np.sqrt(z * z - shift)
    if (z.real * s.real + z.imag * s.imag) < 0:
        s = -s
    return s


def ellipse_cauchy(a_axis: float, b_axis: float, zeta) -> CauchyValue:
    """Cauchy transform of the uniform measure dA on the solid ellipse
    with semi-axes (a_axis, b_axis):

        inside:  conj(z) - (a - b)/(a + b) z
        outside: 2ab / (z + sqrt(z^2 - a^2 + b^2))

    The outside form equals the textbook (2ab/(a^2-b^2))(z - sqrt(...))
    branch but stays finite in the circular limit a == b.
    """
    if a_axis <= 0 or b_axis <= 0:
        raise ValueError("ellipse semi-axes must be positive")
    z = complex(zeta)
    a, b = a_axis, b_axis
    if (z.real / a) ** 2 + (z.imag / b) ** 2 <= 1.0:
        val = np.conj(z) - (a - b) / (a + b) * z
        return CauchyValue(complex(val), SourceRegion.INSIDE_SOURCE)
    s = _stable_sqrt_pair(z, a * a - b * b)
    return CauchyValue(complex(2.0 * a * b / (z + s)), SourceRegion.OUTSIDE_SOURCE)


_log_constant_cache: dict[tuple[float, float], float] = {}
_log_constant_lock = threading.Lock()


def _ellipse_log_constant(a: float, b: float) -> float:
    """Additive constant of the interior ellipse log-potential, fixed once
    per axis pair by quadrature at the centre:

        c0 = integral_K log|z|^2 dA(z)
           = -ab + (ab / 2 pi) * oint log(a^2 cos^2 t + b^2 sin^2 t) dt

    (exact radial reduction; the angular integral is done by the
    spectrally convergent periodic trapezoid rule).
    """
    key = (float(a), float(b))
    with _log_constant_lock:
        cached = _log_constant_cache.get(key)
        if cached is not None:
            return cached
        t = 2.0 * np.pi * np.arange(4096) / 4096
        angular = float(np.mean(np.log(a * a * np.cos(t) ** 2 + b * b * np.sin(t) ** 2)))
        c0 = -a * b + a * b * angular
        _log_constant_cache[key] = c0
        return c0


def ellipse_log_potential(a_axis: float, b_axis: float, zeta) -> float:
    """integral_K log|zeta - z|^2 dA(z) for zeta inside the ellipse:
    |zeta|^2 - (a-b)/(a+b) Re zeta^2 + c0."""
    if a_axis <= 0 or b_axis <= 0:
        raise ValueError("ellipse semi-axes must be positive")
    z = complex(zeta)
    a, b = a_axis, b_axis
    if (z.real / a) ** 2 + (z.imag / b) ** 2 > 1.0:
        raise ValueError("log potential closed form is valid inside the ellipse only")
    return abs(z) ** 2 - (a - b) / (a + b) * (z * z).real + _ellipse_log_constant(a, b)


def disk_log_potential(R: float, p, zeta) -> float:
    """integral over the disk D(p, R) of log|zeta - z| dA(z):

        outside: R^2 log|zeta - p|
        inside:  R^2 log R - R^2/2 + |zeta - p|^2 / 2

    Both branches agree on |zeta - p| = R.
    """
    if R <= 0:
        raise ValueError("disk radius must be positive")
    r = abs(complex(zeta) - complex(p))
    if r >= R:
        return R * R * math.log(r)
    return R * R * math.log(R) - R * R / 2.0 + r * r / 2.0


def jensen_average(r: float, zeta) -> float:
    """Angular average (1/2pi) oint log|zeta - r e^{it}| dt = log max(r, |zeta|)."""
    if r <= 0:
        raise ValueError("circle radius must be positive")
    return math.log(max(r, abs(complex(zeta))))


def _binom_half(m: int) -> float:
    """Generalized binomial coefficient C(1/2, m)."""
    num = 1.0
    for i in range(m):
        num *= 0.5 - i
    return num / math.factorial(m)


def ellipse_power_moment(a_axis: float, b_axis: float, k: int) -> float:
    """Even power moment integral_K z^{2k} dA = 2ab C(1/2, k+1) (b^2-a^2)^k;
    odd moments vanish by symmetry."""
    if k < 0:
        raise ValueError("moment order must be non-negative")
    a, b = a_axis, b_axis
    return 2.0 * a * b * _binom_half(k + 1) * (b * b - a * a) ** k


def _require_postcritical(params: ModelParams) -> None:
    if params.p == 0:
        if classify_phase(params) is Phase.PRE_CRITICAL:
            raise PhaseError("closed-form moments hold in the post-critical regime")
    elif not check_containment(params):
        raise PhaseError("closed-form moments require the contained-hole regime")


def equilibrium_moments(params: ModelParams, k: int) -> complex:
    """k-th moment of the post-critical equilibrium measure:

        m_0 = 1
        m_{2j}   = 2 (2j-1)! / ((j-1)! (j+1)!) tau^j (1+c)^{j+1} - c p^{2j}
        m_{2j+1} = -c p^{2j+1}
    """
    if k < 0:
        raise ValueError("moment order must be non-negative")
    if k == 0:
        return 1.0 + 0j
    _require_postcritical(params)
    t, c, p = params.tau, params.c, params.p
    if k % 2 == 1:
        return -c * p**k
    j = k // 2
    ratio = 2.0 * math.factorial(2 * j - 1) / (math.factorial(j - 1) * math.factorial(j + 1))
    return ratio * t**j * (1.0 + c) ** (j + 1) - c * p**k


def postcritical_cauchy(params: ModelParams, zeta) -> complex:
    """Cauchy transform of the post-critical equilibrium measure outside
    the confining ellipse:

        2 (1 + c) / (zeta + sqrt(zeta^2 - 4 tau (1+c))) - c/(zeta - p)

    The square-root branch makes the first term behave like (1+c)/zeta at
    infinity, and the expression passes smoothly through tau = 0.
    """
    t, c = params.tau, params.c
    z = complex(zeta)
    ax = (1.0 + t) * math.sqrt(1.0 + c)
    ay = (1.0 - t) * math.sqrt(1.0 + c)
    if (z.real / ax) ** 2 + (z.imag / ay) ** 2 <= 1.0:
        raise ValueError("closed-form Cauchy transform is valid outside the ellipse")
    s = _stable_sqrt_pair(z, 4.0 * t * (1.0 + c))
    val = 2.0 * (1.0 + c) / (z + s)
    if c > 0:
        val = val - c / (z - params.p)
    return complex(val)


def precritical_cauchy(m: RationalMap, params: ModelParams, zeta) -> complex:
    """Cauchy transform of the pre-critical squared-coordinate measure via
    residue calculus: preimages of zeta inside the unit disk contribute

        (d / zeta) (a tau w - (a^2 tau^2 + 1) + a tau / w)

    on top of the fixed residue 1/tau at the origin, plus sqrt(conj(zeta)/
    zeta) for interior points; the total is divided by 1 - tau^2.
    """
    z = complex(zeta)
    if z == 0:
        raise ValueError("Cauchy transform evaluated at the charge location")
    t = params.tau
    roots = invert_map(m, z)
    dist = np.abs(np.abs(roots) - 1.0)
    if np.min(dist) <= ROOT_BAND:
        raise BoundaryAmbiguity(
            "a preimage sits on the unit circle within tolerance; the point is "
            "too close to the droplet boundary"
        )
    selected = roots[np.abs(roots) < 1.0]
    if len(selected) not in (2, 3):
        raise BoundaryAmbiguity(
            f"unexpected preimage count inside the disk: {len(selected)}"
        )
    a, d = m.a, m.d
    total = 1.0 / t
    for w in selected:
        total = total + d / z * (a * t * w - (a * a * t * t + 1.0) + a * t / w)
    if len(selected) == 3:
        total = total + np.conj(z) / abs(z)
    return complex(total / (1.0 - t * t))


def postcritical_moments_from_cauchy(
    params: ModelParams, k_max: int, radius: float | None = None, n_samples: int = 128
) -> np.ndarray:
    """Moments m_0..m_{k_max} extracted from the large-|zeta| expansion of
    the closed-form Cauchy transform by least squares on a circle.

    Circle samples make the power columns orthogonal, so the fit is an
    exact projection up to the (negligible) tail aliasing.
    """
    t, c = params.tau, params.c
    scale = (1.0 + t) * math.sqrt(1.0 + c) + abs(params.p)
    R = radius if radius is not None else 10.0 * scale
    theta = 2.0 * np.pi * np.arange(n_samples) / n_samples
    zs = R * np.exp(1j * theta)
    vals = np.array([postcritical_cauchy(params, z) for z in zs])
    powers = np.arange(k_max + 1)
    design = zs[:, None] ** (-(powers[None, :] + 1))
    coeffs, *_ = np.linalg.lstsq(design, vals, rcond=None)
    return coeffs
