"""Leafwise Kaehler operators on the Poincare disc.

Conventions: for the conformal metric ``lam(z) |dz|^2``

    dbar-Laplacian   h  ->  -(2 / lam) d^2 h / dz dzbar      (= -1/2 div grad h)
    norm of df       |df|^2 := (2 / lam) |df/dz|^2

With these, ``Lap_dbar(|f|^2) = -|df|^2`` for holomorphic ``f``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import StepOutOfRange

HOLO_TOL = 1e-8
# dbar f has truncation error step^2 |f'''| / 6, so holomorphy is probed with a finer step
HOLO_STEP = 1e-6


@dataclass(frozen=True)
class ConformalMetric:
    factor: Callable[[complex], float]
    name: str = "custom"

    def __call__(self, z) -> float:
        lam = float(self.factor(z))
        if not lam > 0:
            raise ValueError(f"metric factor {lam} is not positive at z={z}")
        return lam


def poincare_factor(z) -> float:
    return 4.0 / (1.0 - abs(z) ** 2) ** 2


POINCARE = ConformalMetric(poincare_factor, "poincare")
EUCLIDEAN = ConformalMetric(lambda z: 1.0, "euclidean")


def _check_step(z: complex, step: float, reach: float = 2.0) -> None:
    if not 1e-8 <= step <= 1e-2:
        raise StepOutOfRange(f"step {step} outside [1e-8, 1e-2]")
    if 1 - abs(z) <= reach * step:
        raise StepOutOfRange(f"z={z} within {reach}*step of the boundary circle")


def _wirtinger(h, z, s):
    dx = h(z + s) - h(z - s)
    dy = h(z + 1j * s) - h(z - 1j * s)
    return (dx - 1j * dy) / (4 * s), (dx + 1j * dy) / (4 * s)


def wirtinger_derivs(h: Callable, z: complex, step: float) -> tuple[complex, complex]:
    """Central-difference ``(dh/dz, dh/dzbar)``."""
    z = complex(z)
    _check_step(z, step)
    d, dbar = _wirtinger(h, z, step)
    return complex(d), complex(dbar)


def mixed_derivative(h: Callable, z: complex, step: float) -> complex:
    """``d/dz d/dzbar h`` by nesting the central differences (stencil reach 2*step)."""
    z = complex(z)
    _check_step(z, step, reach=3.0)
    return complex(_wirtinger(lambda w: _wirtinger(h, w, step)[1], z, step)[0])


def laplacian_dbar(h: Callable, z: complex, metric: ConformalMetric, step: float) -> complex:
    z = complex(z)
    return -(2.0 / metric(z)) * mixed_derivative(h, z, step)


def laplace_beltrami(h: Callable, z: complex, metric: ConformalMetric, step: float) -> complex:
    """``(1/lam)(h_xx + h_yy)`` by the five-point stencil; an independent route to -2 Lap_dbar."""
    z = complex(z)
    _check_step(z, step)
    lap = (h(z + step) + h(z - step) + h(z + 1j * step) + h(z - 1j * step) - 4 * h(z)) / step**2
    return lap / metric(z)


def divergence(X: Callable, z: complex, metric: ConformalMetric, step: float) -> float:
    """Riemannian divergence ``(1/lam)(d_x(lam X1) + d_y(lam X2))`` of a vector field ``X(z) -> (X1, X2)``."""
    z = complex(z)
    _check_step(z, step)

    def flux(w, i):
        return metric(w) * X(w)[i]

    dx = (flux(z + step, 0) - flux(z - step, 0)) / (2 * step)
    dy = (flux(z + 1j * step, 1) - flux(z - 1j * step, 1)) / (2 * step)
    return (dx + dy) / metric(z)


def identity_residual(f: Callable, z: complex, metric: ConformalMetric, step: float,
                      holo_tol: float = HOLO_TOL) -> float:
    """``|Lap_dbar(|f|^2) + |df|^2|`` at ``z`` for holomorphic ``f``."""
    z = complex(z)
    d, _ = wirtinger_derivs(f, z, step)
    _, dbar = wirtinger_derivs(f, z, HOLO_STEP)
    if abs(dbar) >= holo_tol:
        raise ValueError(f"f is not holomorphic at z={z}: |dbar f| = {abs(dbar):.3e}")
    lhs = laplacian_dbar(lambda w: abs(f(w)) ** 2, z, metric, step)
    return float(abs(lhs + (2.0 / metric(z)) * abs(d) ** 2))


def disc_grid(n: int = 21, max_radius: float = 0.7) -> np.ndarray:
    """Points of the ``n x n`` square grid on [-max_radius, max_radius]^2 with ``|z| <= max_radius``."""
    xs = np.linspace(-max_radius, max_radius, n)
    zz = (xs[None, :] + 1j * xs[:, None]).ravel()
    return zz[np.abs(zz) <= max_radius + 1e-15]
