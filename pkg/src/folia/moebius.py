"""SU(1,1) and its Moebius action on the Poincare disc.

An element is stored as the pair (alpha, beta) of the matrix
``[[alpha, beta], [conj(beta), conj(alpha)]]`` with ``|alpha|^2 - |beta|^2 = 1``.
It acts on the disc by ``z -> (alpha z + beta) / (conj(beta) z + conj(alpha))``.
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import NonUnitDeterminant

DET_TOL = 1e-12
CLASS_TOL = 1e-9


class Isometry(enum.Enum):
    IDENTITY = "Identity"
    ELLIPTIC = "Elliptic"
    PARABOLIC = "Parabolic"
    HYPERBOLIC = "Hyperbolic"


@dataclass(frozen=True)
class SU11Element:
    alpha: complex
    beta: complex

    @property
    def det(self) -> float:
        return abs(self.alpha) ** 2 - abs(self.beta) ** 2

    @property
    def trace(self) -> float:
        return 2.0 * self.alpha.real

    def matrix(self) -> np.ndarray:
        a, b = self.alpha, self.beta
        return np.array([[a, b], [b.conjugate(), a.conjugate()]], dtype=complex)

    def __matmul__(self, other: "SU11Element") -> "SU11Element":
        return compose(self, other)

    def __call__(self, z):
        return apply_disc(self, z)


def su11_new(alpha, beta, det_tol: float = DET_TOL) -> SU11Element:
    """Build an element, rescaling (alpha, beta) onto the unit determinant.

    Raises NonUnitDeterminant when ``|alpha|^2 - |beta|^2 <= 0``, since no
    positive rescaling can fix the sign.
    """
    alpha, beta = complex(alpha), complex(beta)
    raw = abs(alpha) ** 2 - abs(beta) ** 2
    if not raw > 0.0 or not math.isfinite(raw):
        raise NonUnitDeterminant(f"|alpha|^2 - |beta|^2 = {raw!r} is not positive")
    scale = math.sqrt(raw)
    alpha, beta = alpha / scale, beta / scale
    # rescaling is exact up to rounding; anything worse signals overflow
    if abs(abs(alpha) ** 2 - abs(beta) ** 2 - 1.0) > max(det_tol, 1e-12 * abs(alpha) ** 2):
        raise NonUnitDeterminant(f"determinant could not be normalized (raw={raw!r})")
    return SU11Element(alpha, beta)


IDENTITY = SU11Element(1 + 0j, 0j)


def identity() -> SU11Element:
    return IDENTITY


def rotation(theta: float) -> SU11Element:
    """Rotation of the disc by angle ``theta`` about the origin."""
    return SU11Element(cmath.exp(0.5j * theta), 0j)


def translation(length: float) -> SU11Element:
    """Hyperbolic translation of the given length along the real diameter."""
    return SU11Element(complex(math.cosh(length / 2)), complex(math.sinh(length / 2)))


def inverse(g: SU11Element) -> SU11Element:
    return SU11Element(g.alpha.conjugate(), -g.beta)


def compose(g: SU11Element, h: SU11Element) -> SU11Element:
    """Matrix product ``g h`` (apply ``h`` first)."""
    a1, b1, a2, b2 = g.alpha, g.beta, h.alpha, h.beta
    return SU11Element(a1 * a2 + b1 * b2.conjugate(), a1 * b2 + b1 * a2.conjugate())


def negate(g: SU11Element) -> SU11Element:
    return SU11Element(-g.alpha, -g.beta)


def distance(g: SU11Element, h: SU11Element) -> float:
    """Max-entry distance between the two matrices."""
    return max(abs(g.alpha - h.alpha), abs(g.beta - h.beta))


def distance_mod_center(g: SU11Element, h: SU11Element) -> float:
    """Distance in PSU(1,1): compares ``g`` with both ``h`` and ``-h``."""
    return min(distance(g, h), distance(g, negate(h)))


def equal_mod_center(g: SU11Element, h: SU11Element, tol: float = CLASS_TOL) -> bool:
    return distance_mod_center(g, h) < tol


def apply_disc(g: SU11Element, z):
    """Moebius action on disc points; accepts scalars or numpy arrays."""
    a, b = g.alpha, g.beta
    return (a * z + b) / (b.conjugate() * z + a.conjugate())


def classify_isometry(g: SU11Element, class_tol: float = CLASS_TOL) -> Isometry:
    if abs(g.beta) < class_tol and min(abs(g.alpha - 1), abs(g.alpha + 1)) < class_tol:
        return Isometry.IDENTITY
    tr = abs(g.trace)
    if tr < 2.0 - class_tol:
        return Isometry.ELLIPTIC
    if tr > 2.0 + class_tol:
        return Isometry.HYPERBOLIC
    return Isometry.PARABOLIC


def fixed_points(g: SU11Element) -> list[complex]:
    """Roots of ``conj(beta) z^2 + (conj(alpha) - alpha) z - beta = 0``.

    Returns both roots (possibly outside the closed disc); an element with
    ``beta == 0`` fixes the origin, reported as ``[0j]``.
    """
    a, b = g.alpha, g.beta
    if b == 0:
        return [0j]
    qa, qb, qc = b.conjugate(), a.conjugate() - a, -b
    disc = cmath.sqrt(qb * qb - 4 * qa * qc)
    return [(-qb + disc) / (2 * qa), (-qb - disc) / (2 * qa)]


def attracting_fixed_point(g: SU11Element) -> complex:
    """Boundary fixed point that attracts forward iterates of a hyperbolic element."""
    pts = fixed_points(g)
    # derivative of the Moebius map at a fixed point is 1/(conj(b) z + conj(a))^2
    return min(pts, key=lambda z: abs(1.0 / (g.beta.conjugate() * z + g.alpha.conjugate()) ** 2))
