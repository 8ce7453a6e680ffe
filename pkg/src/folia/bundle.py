"""Foliated bundle M = (D x X) / Gamma over the genus-2 octagon surface.

A point of M is stored as a lift ``(base, fiber)`` with ``base`` in the
closed fundamental domain.  Lifts ``(z, v)`` and ``(g z, rho(g) v)`` name the
same point, so moving the base across a side paired by the letter ``x``
replaces the fiber by ``rho(x) v``.

A fiber action is any callable ``fiber_action(letter, fiber) -> fiber``
realizing ``rho`` on single letters.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Optional, Sequence

import numpy as np

from . import moebius as mb
from .errors import NonTermination, PathTooLong, StepOutOfRange
from .fuchsian import (
    MAX_STEPS,
    FuchsianRepresentation,
    Letter,
    Word,
    locate_in_domain,
    reduce_word,
)
from .moebius import SU11Element

FiberAction = Callable[[Letter, Any], Any]

CROSSING_TOL = 1e-12
MARCH_STEP = 2e-3
MAX_MARCH = 1_000_000
CONST_TOL = 1e-10
LEAF_RADIUS = 0.9


@dataclass(frozen=True)
class LeafPoint:
    base: complex
    fiber: Any


@dataclass(frozen=True)
class LeafwiseFunction:
    """Function on D x X meant to descend to M; ``evaluate(z, fiber)``."""

    evaluate: Callable[[Any, Any], Any]
    name: str = "F"

    def __call__(self, z, fiber):
        return self.evaluate(z, fiber)


def su11_fiber_action(rep: FuchsianRepresentation, act: Callable[[SU11Element, Any], Any]) -> FiberAction:
    """Fiber action through the lattice itself (rho = inclusion into SU(1,1))."""

    def action(letter, fiber):
        return act(rep.letter_matrix(letter), fiber)

    return action


def linear_fiber_action(linear_rep) -> FiberAction:
    """Fiber action on projective space through a ``projdyn.LinearRep``."""
    from .projdyn import act

    def action(letter, fiber):
        return act(linear_rep.letter_matrix(letter), fiber)

    return action


def apply_word_to_fiber(fiber_action: FiberAction, w: Word, fiber):
    # the last letter of w acts first
    for letter in reversed(w):
        fiber = fiber_action(letter, fiber)
    return fiber


def leaf_point(rep: FuchsianRepresentation, fiber_action: FiberAction, z: complex, fiber) -> LeafPoint:
    """Leaf point of the lift ``(z, fiber)`` for an arbitrary disc point ``z``."""
    w, zz = locate_in_domain(rep, z)
    return LeafPoint(zz, apply_word_to_fiber(fiber_action, w, fiber))


def _outside(rep, u) -> bool:
    return bool(np.max(rep.violations(u)) > CROSSING_TOL)


def transport_path(
    rep: FuchsianRepresentation,
    fiber_action: FiberAction,
    lp: LeafPoint,
    waypoints: Sequence[complex],
    max_steps: int = MAX_STEPS,
) -> tuple[LeafPoint, Word]:
    """Carry ``lp`` along the polyline ``lp.base -> waypoints[0] -> ...``.

    Waypoints are given in the chart of the lift ``lp``.  Returns the final
    leaf point and the word of side pairings crossed (last crossing first).
    """
    for t in waypoints:
        if abs(t) > 1 - 1e-6:
            raise ValueError(f"waypoint {t} too close to the boundary circle")
    W = mb.IDENTITY
    fiber = lp.fiber
    crossed: list[Letter] = []
    start = complex(lp.base)
    marched = 0

    def pair(u):
        nonlocal W, fiber
        v = rep.violations(u)
        letter = rep.sides[int(np.argmax(v))].pairing
        W = mb.compose(rep.letter_matrix(letter), W)
        fiber = fiber_action(letter, fiber)
        crossed.append(letter)
        if len(crossed) > max_steps:
            raise PathTooLong(f"more than {max_steps} side crossings")

    for end in waypoints:
        end = complex(end)
        seg = end - start
        s = 0.0
        while True:
            u = mb.apply_disc(W, start + s * seg)
            while _outside(rep, u):
                pair(u)
                u = mb.apply_disc(W, start + s * seg)
            if s >= 1.0:
                break
            z = start + s * seg
            speed = abs(seg) / abs(W.beta.conjugate() * z + W.alpha.conjugate()) ** 2
            s_next = 1.0 if speed == 0 else min(1.0, s + MARCH_STEP / speed)
            marched += 1
            if marched > MAX_MARCH:
                raise NonTermination("path marching did not finish")
            if not _outside(rep, mb.apply_disc(W, start + s_next * seg)):
                s = s_next
                continue
            lo, hi = s, s_next
            while hi - lo > 1e-12:
                mid = 0.5 * (lo + hi)
                if _outside(rep, mb.apply_disc(W, start + mid * seg)):
                    hi = mid
                else:
                    lo = mid
            s = hi
        start = end
    base = complex(mb.apply_disc(W, start))
    return LeafPoint(base, fiber), reduce_word(reversed(crossed))


def holonomy_transport(
    rep: FuchsianRepresentation,
    fiber_action: FiberAction,
    lp: LeafPoint,
    target: complex,
    max_steps: int = MAX_STEPS,
) -> LeafPoint:
    """Move along the straight segment from ``lp.base`` to ``target`` and reduce into the domain."""
    return transport_path(rep, fiber_action, lp, [target], max_steps)[0]


def relator_loop(rep: FuchsianRepresentation, z0: complex) -> list[complex]:
    """Waypoints ``P_1 z0, ..., P_8 z0`` with ``P_k`` the prefixes of the relator.

    The last waypoint equals ``z0`` because the relator is trivial in the lattice.
    """
    pts = []
    g = mb.IDENTITY
    for letter in rep.presentation.relator:
        g = mb.compose(g, rep.letter_matrix(letter))
        pts.append(complex(mb.apply_disc(g, z0)))
    return pts


def dbar_residual(F: LeafwiseFunction, lp: LeafPoint, h: float) -> float:
    """``|dF/dzbar|`` at ``lp.base`` by central differences, fiber held fixed."""
    if not 1e-8 <= h <= 1e-2:
        raise StepOutOfRange(f"step {h} outside [1e-8, 1e-2]")
    z = complex(lp.base)
    if 1 - abs(z) <= 2 * h:
        raise StepOutOfRange("base point too close to the boundary circle for this step")
    v = lp.fiber
    d = ((F(z + h, v) - F(z - h, v)) + 1j * (F(z + 1j * h, v) - F(z - 1j * h, v))) / (4 * h)
    return float(abs(d))


@dataclass(frozen=True)
class Constant:
    spread: float


@dataclass(frozen=True)
class Witness:
    z1: complex
    z2: complex
    delta: float


def leafwise_constancy(
    F: LeafwiseFunction,
    lp: LeafPoint,
    samples: int,
    seed: int,
    rep: FuchsianRepresentation,
    fiber_action: FiberAction,
    const_tol: float = CONST_TOL,
    radius: float = LEAF_RADIUS,
):
    """Sample ``F`` along the leaf through ``lp`` at seeded points reached by holonomy.

    The spread is the diameter of the sampled value set.  Returns ``Constant``
    when it stays below ``const_tol`` and otherwise the extremal pair.
    """
    if samples < 2:
        raise ValueError("need at least two samples")
    rng = np.random.default_rng(seed)
    r = radius * np.sqrt(rng.uniform(size=samples))
    targets = r * np.exp(2j * np.pi * rng.uniform(size=samples))
    pts, vals = [], []
    for t in targets:
        moved = holonomy_transport(rep, fiber_action, lp, complex(t))
        pts.append(complex(t))
        vals.append(complex(F(moved.base, moved.fiber)))
    vals = np.array(vals)
    diff = np.abs(vals[:, None] - vals[None, :])
    i, j = np.unravel_index(int(np.argmax(diff)), diff.shape)
    delta = float(diff[i, j])
    if delta < const_tol:
        return Constant(delta)
    return Witness(pts[i], pts[j], delta)


def invariance_residual(
    F: LeafwiseFunction,
    rep: FuchsianRepresentation,
    fiber_action: FiberAction,
    points: Sequence[tuple[complex, Any]],
) -> float:
    """Max of ``|F(x z, rho(x) v) - F(z, v)|`` over generator letters and samples."""
    worst = 0.0
    for z, v in points:
        base = F(z, v)
        for letter in rep.presentation.letters():
            gz = mb.apply_disc(rep.letter_matrix(letter), z)
            worst = max(worst, float(abs(F(gz, fiber_action(letter, v)) - base)))
    return worst


def leaf_grid(
    F: LeafwiseFunction, fiber, rep: FuchsianRepresentation, n: int
) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate ``F(., fiber)`` on an ``n x n`` grid over the domain's bounding box.

    Returns the grid points and values; values outside the domain are NaN.
    """
    from .fuchsian import boundary_radius

    extent = float(np.max(boundary_radius(rep.sides, np.linspace(0, 2 * np.pi, 721))))
    xs = np.linspace(-extent, extent, n)
    zz = xs[None, :] + 1j * xs[::-1, None]
    inside = np.all(rep.violations(zz) <= 1e-12, axis=0)
    vals = np.full(zz.shape, np.nan + 1j * np.nan)
    vals[inside] = np.array([F(z, fiber) for z in zz[inside]])
    return zz, vals


def write_grid_csv(path: Path, zz: np.ndarray, vals: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["re_z", "im_z", "re_F", "im_F"])
        for z, v in zip(zz.ravel(), vals.ravel()):
            if np.isnan(v.real):
                continue
            out.writerow([repr(float(z.real)), repr(float(z.imag)), repr(float(v.real)), repr(float(v.imag))])


def write_pgm(path: Path, vals: np.ndarray, mode: str = "abs") -> None:
    """8-bit binary PGM, row-major; |F| clamped to [0, 1] or arg F mapped from [-pi, pi]."""
    if mode == "abs":
        x = np.clip(np.abs(vals), 0.0, 1.0)
    elif mode == "arg":
        x = (np.angle(vals) + math.pi) / (2 * math.pi)
    else:
        raise ValueError(f"unknown PGM mode {mode!r}")
    img = np.where(np.isnan(x), 0, np.round(x * 255)).astype(np.uint8)
    h, w = img.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(img.tobytes())
