"""External potentials of the model and their complex derivatives.

Two confining fields are used throughout the package.  In the symmetric
coordinate (the physical plane) the potential is quadratic with an
anisotropy parameter ``tau`` plus a repelling point charge of strength
``c`` at ``p``:

    W(z) = (|z|^2 - tau Re z^2) / (1 - tau^2) - 2 c log|z - p|

Removing the z -> -z symmetry of the centred model (p = 0) leads to the
squared-coordinate potential

    Wsq(z) = 2 (|z| - tau Re z) / (1 - tau^2) - 2 c log|z|

which satisfies W(z) = Wsq(z^2) / 2 when p = 0.

Derivatives are Wirtinger derivatives d/dz = (d/dx - i d/dy) / 2, and the
Laplacian follows the quarter convention lap = d/dz d/dzbar (a quarter of
the usual one).  All functions accept scalars or numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

COORD_SYMMETRIC = "symmetric"
COORD_SQUARED = "squared"


class Symmetry(Enum):
    """Ensemble symmetry class of the induced particle system."""

    COMPLEX = "complex"
    SYMPLECTIC = "symplectic"


@dataclass(frozen=True)
class ModelParams:
    """Model parameters: anisotropy ``tau``, charge strength ``c``, charge
    location ``p`` and the ensemble symmetry flag."""

    tau: float
    c: float
    p: complex = 0j
    symmetry: Symmetry = Symmetry.COMPLEX

    def __post_init__(self):
        if not (0.0 <= self.tau < 1.0):
            raise ValueError(f"tau must lie in [0, 1), got {self.tau}")
        if self.c < 0.0:
            raise ValueError(f"charge strength c must be >= 0, got {self.c}")
        if not (math.isfinite(self.tau) and math.isfinite(self.c)):
            raise ValueError("tau and c must be finite")
        p = complex(self.p)
        if not (math.isfinite(p.real) and math.isfinite(p.imag)):
            raise ValueError("charge location p must be finite")
        object.__setattr__(self, "p", p)

    @property
    def centred(self) -> bool:
        return self.p == 0


def _as_complex(z):
    return np.asarray(z, dtype=complex)


def potential(params: ModelParams, z) -> float:
    """Symmetric-coordinate potential W(z).

    Raises ValueError at the charge location when c > 0 (log singularity).
    """
    z = _as_complex(z)
    t = params.tau
    val = (np.abs(z) ** 2 - t * np.real(z * z)) / (1.0 - t * t)
    if params.c > 0:
        dist = np.abs(z - params.p)
        if np.any(dist == 0):
            raise ValueError("potential is singular at the charge location")
        val = val - 2.0 * params.c * np.log(dist)
    return val if val.ndim else float(val)


def squared_potential(params: ModelParams, z) -> float:
    """Squared-coordinate potential Wsq(z); the charge always sits at 0."""
    z = _as_complex(z)
    t = params.tau
    val = 2.0 * (np.abs(z) - t * np.real(z)) / (1.0 - t * t)
    if params.c > 0:
        mod = np.abs(z)
        if np.any(mod == 0):
            raise ValueError("squared potential is singular at the origin")
        val = val - 2.0 * params.c * np.log(mod)
    return val if val.ndim else float(val)


def d_potential(params: ModelParams, z) -> complex:
    """Wirtinger derivative dW/dz = (zbar - tau z)/(1 - tau^2) - c/(z - p).

    The gradient of W in real coordinates is twice the conjugate of this.
    """
    z = _as_complex(z)
    t = params.tau
    val = (np.conj(z) - t * z) / (1.0 - t * t)
    if params.c > 0:
        diff = z - params.p
        if np.any(diff == 0):
            raise ValueError("derivative is singular at the charge location")
        val = val - params.c / diff
    return val if val.ndim else complex(val)


def d_squared_potential(params: ModelParams, z) -> complex:
    """Wirtinger derivative of Wsq:

        (sqrt(zbar/z) - tau)/(1 - tau^2) - c/z

    where sqrt(zbar/z) = exp(-i arg z) = conj(z)/|z| has modulus one.
    """
    z = _as_complex(z)
    mod = np.abs(z)
    if np.any(mod == 0):
        raise ValueError("derivative is singular at the origin")
    t = params.tau
    val = (np.conj(z) / mod - t) / (1.0 - t * t) - params.c / z
    return val if val.ndim else complex(val)


def laplacian(params: ModelParams, z, which: str = COORD_SYMMETRIC) -> float:
    """Quarter-Laplacian of the chosen potential.

    Symmetric coordinates give the constant 1/(1 - tau^2); squared
    coordinates give 1/(2 (1 - tau^2) |z|).
    """
    t = params.tau
    if which == COORD_SYMMETRIC:
        z = _as_complex(z)
        val = np.full(z.shape, 1.0 / (1.0 - t * t))
        return val if val.ndim else float(val)
    if which == COORD_SQUARED:
        mod = np.abs(_as_complex(z))
        if np.any(mod == 0):
            raise ValueError("squared-coordinate Laplacian is singular at 0")
        val = 1.0 / (2.0 * (1.0 - t * t) * mod)
        return val if val.ndim else float(val)
    raise ValueError(f"unknown potential kind {which!r}")
