"""The invariant cone in RP^4 and its leafwise holomorphic function.

A cone point ``[z1, z2, t]`` satisfies ``|z1|^2 - |z2|^2 = t^2``.  SU(1,1)
acts by ``[alpha z1 + beta conj(z2), alpha z2 + beta conj(z1), t]`` and

    f(z, [z1, z2, t]) = (conj(z1) z - z2) / (-conj(z2) z + z1)

is invariant under the diagonal action on disc x cone.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import moebius as mb
from .errors import DegenerateFiber
from .moebius import SU11Element

CONE_TOL = 1e-12


@dataclass(frozen=True)
class ConePoint:
    z1: complex
    z2: complex
    t: float

    def vector(self) -> np.ndarray:
        """Real coordinates ``(t, Re z1, Im z1, Re z2, Im z2)``."""
        return np.array([self.t, self.z1.real, self.z1.imag, self.z2.real, self.z2.imag])

    @property
    def constraint(self) -> float:
        return abs(self.z1) ** 2 - abs(self.z2) ** 2 - self.t**2

    def equals(self, other: "ConePoint", tol: float = 1e-10) -> bool:
        a, b = self.vector(), other.vector()
        return min(np.max(np.abs(a - b)), np.max(np.abs(a + b))) < tol


def cone_point(z1, z2, t) -> ConePoint:
    """Normalized representative: unit norm, first nonzero of (t, Re z1, Im z1, Re z2, Im z2) positive."""
    v = np.array([float(t), complex(z1).real, complex(z1).imag, complex(z2).real, complex(z2).imag])
    n = np.linalg.norm(v)
    if n == 0:
        raise DegenerateFiber("the zero vector is not a projective point")
    v = v / n
    for c in v:
        if abs(c) > 1e-15:
            if c < 0:
                v = -v
            break
    return ConePoint(complex(v[1], v[2]), complex(v[3], v[4]), float(v[0]))


def cone_act(g: SU11Element, p: ConePoint) -> ConePoint:
    a, b = g.alpha, g.beta
    z1 = a * p.z1 + b * p.z2.conjugate()
    z2 = a * p.z2 + b * p.z1.conjugate()
    return cone_point(z1, z2, p.t)


def f_eval(z, p: ConePoint):
    """The invariant function; accepts scalar or array ``z``."""
    if p.z1 == 0 and p.z2 == 0:
        raise DegenerateFiber("f is undefined where z1 = z2 = 0")
    den = -p.z2.conjugate() * z + p.z1
    if p.t != 0:
        # |z1| > |z2| keeps the pole outside the closed disc
        assert abs(p.z1) > abs(p.z2)
    return (p.z1.conjugate() * z - p.z2) / den


def invariance_residual(g: SU11Element, z, p: ConePoint) -> float:
    return float(np.max(np.abs(f_eval(mb.apply_disc(g, z), cone_act(g, p)) - f_eval(z, p))))


def random_cone_point(rng: np.random.Generator, max_ratio: float = 0.9, t_zero: bool = False) -> ConePoint:
    """Seeded cone point with ``|z2| / |z1| <= max_ratio`` (or on the t = 0 locus)."""
    ph1, ph2 = rng.uniform(0, 2 * math.pi, 2)
    if t_zero:
        return cone_point(np.exp(1j * ph1), np.exp(1j * ph2), 0.0)
    ratio = rng.uniform(0, max_ratio)
    t = math.sqrt(1 - ratio * ratio) * (1 if rng.uniform() < 0.5 else -1)
    return cone_point(np.exp(1j * ph1), ratio * np.exp(1j * ph2), t)


def random_su11(rng: np.random.Generator, max_beta: float = 2.0) -> SU11Element:
    b = max_beta * math.sqrt(rng.uniform()) * np.exp(1j * rng.uniform(0, 2 * math.pi))
    a = math.sqrt(1 + abs(b) ** 2) * np.exp(1j * rng.uniform(0, 2 * math.pi))
    return mb.su11_new(a, b)


def random_disc_point(rng: np.random.Generator, max_radius: float = 0.9) -> complex:
    r = max_radius * math.sqrt(rng.uniform())
    return complex(r * np.exp(1j * rng.uniform(0, 2 * math.pi)))
