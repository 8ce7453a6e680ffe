"""Genus-2 surface group as a uniform lattice in SU(1,1).

Words are tuples of letters ``(generator_index, exponent)`` with exponent
``+1`` or ``-1``.  ``evaluate_word`` multiplies the letters left to right, so
the last letter acts first on the disc.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np
from scipy import integrate, optimize

from . import moebius as mb
from .errors import ConstructionFailure, IndexOutOfRange, NonTermination, RadiusTooLarge
from .moebius import SU11Element

Letter = tuple[int, int]
Word = tuple[Letter, ...]

REL_TOL = 1e-9
MEMBERSHIP_TOL = 1e-12
MAX_STEPS = 10_000
MAX_RADIUS = 12

EMPTY_WORD: Word = ()


def inverse_letter(letter: Letter) -> Letter:
    return (letter[0], -letter[1])


def inverse_word(w: Word) -> Word:
    return tuple(inverse_letter(x) for x in reversed(w))


def reduce_word(w: Sequence[Letter]) -> Word:
    out: list[Letter] = []
    for x in w:
        if out and out[-1] == inverse_letter(x):
            out.pop()
        else:
            out.append(tuple(x))
    return tuple(out)


def is_reduced(w: Word) -> bool:
    return all(w[i + 1] != inverse_letter(w[i]) for i in range(len(w) - 1))


def format_word(w: Word) -> str:
    if not w:
        return "e"
    return " ".join(f"g{i}" if e > 0 else f"g{i}^-1" for i, e in w)


def parse_letters(items) -> Word:
    """Parse ``[[index, exponent], ...]`` as stored in JSON documents."""
    return tuple((int(i), int(e)) for i, e in items)


@dataclass(frozen=True)
class SurfaceGroupPresentation:
    genus: int
    relator: Word

    def __post_init__(self):
        if self.genus < 1:
            raise ValueError("genus must be positive")
        if len(self.relator) != 4 * self.genus or not is_reduced(self.relator):
            raise ValueError("relator must be a reduced word of length 4*genus")
        for i, e in self.relator:
            if not 0 <= i < self.generator_count or e not in (1, -1):
                raise ValueError(f"bad relator letter {(i, e)}")

    @property
    def generator_count(self) -> int:
        return 2 * self.genus

    def letters(self) -> list[Letter]:
        return [(i, e) for i in range(self.generator_count) for e in (1, -1)]


# Opposite sides of the regular octagon are paired by g_k (k = 0..3).  This is
# the cyclic order in which the eight tiles meet at a vertex.
OCTAGON_RELATOR: Word = ((0, 1), (1, -1), (2, 1), (3, -1), (0, -1), (1, 1), (2, -1), (3, 1))


def genus2_presentation() -> SurfaceGroupPresentation:
    return SurfaceGroupPresentation(2, OCTAGON_RELATOR)


@dataclass(frozen=True)
class Side:
    """Geodesic side of the domain: the arc of ``|z - center| = radius``.

    The domain lies outside the circle.  ``pairing`` is the letter whose
    matrix carries points just beyond this side back into the domain.
    """

    center: complex
    radius: float
    pairing: Letter

    def violation(self, z):
        return self.radius - np.abs(z - self.center)


@dataclass(frozen=True)
class FuchsianRepresentation:
    presentation: SurfaceGroupPresentation
    images: tuple[SU11Element, ...]
    sides: tuple[Side, ...]
    translation_length: float = float("nan")
    _inverses: tuple[SU11Element, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.images) != self.presentation.generator_count:
            raise ValueError("one image per generator required")
        object.__setattr__(self, "_inverses", tuple(mb.inverse(g) for g in self.images))

    def letter_matrix(self, letter: Letter) -> SU11Element:
        i, e = letter
        if not 0 <= i < len(self.images) or e not in (1, -1):
            raise IndexOutOfRange(f"letter {letter} outside generators 0..{len(self.images) - 1}")
        return self.images[i] if e > 0 else self._inverses[i]

    def relator_residual(self) -> float:
        return mb.distance_mod_center(evaluate_word(self, self.presentation.relator), mb.IDENTITY)

    def violations(self, z):
        """Per-side violation; positive entries mean ``z`` lies beyond that side."""
        return np.array([s.violation(z) for s in self.sides])

    def contains(self, z, tol: float = MEMBERSHIP_TOL) -> bool:
        return bool(np.all(self.violations(z) <= tol))

    def area(self) -> float:
        return polygon_area(self.sides)

    def to_json(self) -> dict:
        return {
            "genus": self.presentation.genus,
            "relator": [list(x) for x in self.presentation.relator],
            "generators": [
                {"alpha": [g.alpha.real, g.alpha.imag], "beta": [g.beta.real, g.beta.imag]}
                for g in self.images
            ],
            "domain": [
                {"center": [s.center.real, s.center.imag], "radius": s.radius, "pairing": list(s.pairing)}
                for s in self.sides
            ],
            "translation_length": self.translation_length,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "FuchsianRepresentation":
        pres = SurfaceGroupPresentation(int(doc["genus"]), parse_letters(doc["relator"]))
        images = tuple(
            SU11Element(complex(*g["alpha"]), complex(*g["beta"])) for g in doc["generators"]
        )
        sides = tuple(
            Side(complex(*s["center"]), float(s["radius"]), tuple(s["pairing"])) for s in doc["domain"]
        )
        return cls(pres, images, sides, float(doc.get("translation_length", "nan")))


def _octagon_generators(length: float) -> tuple[SU11Element, ...]:
    t = mb.translation(length)
    out = []
    for k in range(4):
        r = mb.rotation(k * math.pi / 4)
        out.append(mb.compose(mb.compose(r, t), mb.inverse(r)))
    return tuple(out)


def _octagon_sides(length: float) -> tuple[Side, ...]:
    # the side at direction phi is the bisector of 0 and the translate of 0 at distance `length`
    r = math.tanh(length / 4)
    c = (1 + r * r) / (2 * r)
    radius = (1 - r * r) / (2 * r)
    sides = []
    for j in range(8):
        pairing = (j, -1) if j < 4 else (j - 4, 1)
        sides.append(Side(c * complex(math.cos(j * math.pi / 4), math.sin(j * math.pi / 4)), radius, pairing))
    return tuple(sides)


def _relator_matrix(length: float, relator: Word) -> SU11Element:
    gens = _octagon_generators(length)
    out = mb.IDENTITY
    for i, e in relator:
        out = mb.compose(out, gens[i] if e > 0 else mb.inverse(gens[i]))
    return out


def solve_translation_length(relator: Word = OCTAGON_RELATOR, rel_tol: float = REL_TOL) -> float:
    """Translation length at which the octagon relator closes.

    ``Im(alpha)`` of the relator matrix changes sign at the solution; a coarse
    scan around the textbook value ``cosh(l/2) = 1 + sqrt(2)`` brackets it.
    """
    guess = 2 * math.acosh(1 + math.sqrt(2))
    signed = lambda ell: _relator_matrix(ell, relator).alpha.imag
    grid = np.linspace(0.8 * guess, 1.2 * guess, 81)
    vals = [signed(x) for x in grid]
    brackets = [
        (grid[i], grid[i + 1])
        for i in range(len(grid) - 1)
        if np.sign(vals[i]) != np.sign(vals[i + 1])
    ]
    if not brackets:
        raise ConstructionFailure("no sign change of the relator residual near the initial guess")
    for lo, hi in sorted(brackets, key=lambda b: abs(0.5 * (b[0] + b[1]) - guess)):
        ell = optimize.brentq(signed, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
        res = mb.distance_mod_center(_relator_matrix(ell, relator), mb.IDENTITY)
        if res < rel_tol:
            return ell
    raise ConstructionFailure("relator residual could not be brought below rel_tol")


def genus2_octagon_representation(rel_tol: float = REL_TOL) -> FuchsianRepresentation:
    """Regular-octagon lattice: four translations along axes at angles k*pi/4."""
    ell = solve_translation_length(OCTAGON_RELATOR, rel_tol)
    rep = FuchsianRepresentation(
        genus2_presentation(), _octagon_generators(ell), _octagon_sides(ell), ell
    )
    res = rep.relator_residual()
    if not res < rel_tol:
        raise ConstructionFailure(f"relator residual {res:.3e} exceeds {rel_tol:.1e}")
    return rep


def evaluate_word(rep: FuchsianRepresentation, w: Word) -> SU11Element:
    out = mb.IDENTITY
    for letter in w:
        out = mb.compose(out, rep.letter_matrix(letter))
    return out


def locate_in_domain(
    rep: FuchsianRepresentation, z: complex, max_steps: int = MAX_STEPS, tol: float = MEMBERSHIP_TOL
) -> tuple[Word, complex]:
    """Pull ``z`` into the fundamental domain by greedy side pairings.

    Returns ``(w, z')`` with ``z' = evaluate_word(rep, w)(z)``.  When several
    sides are violated the largest violation is paired first.
    """
    z = complex(z)
    word: list[Letter] = []
    for _ in range(max_steps):
        v = rep.violations(z)
        j = int(np.argmax(v))
        if v[j] <= tol:
            return reduce_word(reversed(word)), z
        letter = rep.sides[j].pairing
        z = complex(mb.apply_disc(rep.letter_matrix(letter), z))
        word.append(letter)
    raise NonTermination(f"no domain point reached after {max_steps} pairings (z={z})")


def iter_word_ball(presentation: SurfaceGroupPresentation, radius: int) -> Iterator[Word]:
    """Reduced words of length <= radius, shortlex order."""
    if radius > MAX_RADIUS:
        raise RadiusTooLarge(f"radius {radius} > {MAX_RADIUS}")
    letters = presentation.letters()
    layer: list[Word] = [EMPTY_WORD]
    yield EMPTY_WORD
    for _ in range(radius):
        nxt = []
        for w in layer:
            for x in letters:
                if w and w[-1] == inverse_letter(x):
                    continue
                nxt.append(w + (x,))
        yield from nxt
        layer = nxt


def word_ball(presentation: SurfaceGroupPresentation, radius: int) -> list[Word]:
    return list(iter_word_ball(presentation, radius))


def _ray_exit(side: Side, phi: np.ndarray) -> np.ndarray:
    # |r e^{i phi} - c|^2 = R^2 with |c|^2 - R^2 = 1 (circle orthogonal to the unit circle)
    p = np.real(np.conj(side.center) * np.exp(1j * phi))
    q = abs(side.center) ** 2 - side.radius**2
    disc = p * p - q
    with np.errstate(invalid="ignore"):
        r = np.where((disc >= 0) & (p > 0), p - np.sqrt(np.maximum(disc, 0.0)), np.inf)
    return r


def boundary_radius(sides: Sequence[Side], phi) -> np.ndarray:
    """Euclidean distance from 0 to the domain boundary along direction ``phi``."""
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    return np.min([_ray_exit(s, phi) for s in sides], axis=0)


def polygon_area(sides: Sequence[Side]) -> float:
    """Hyperbolic area of a star-shaped (about 0) domain, by quadrature in polar form.

    The radial integral of ``4 r / (1 - r^2)^2`` is ``2 rho^2 / (1 - rho^2)``.
    """
    angles = sorted({float(np.angle(s.center)) % (2 * math.pi) for s in sides})
    n = len(angles)
    # breakpoints at side midpoints and at the corners in between
    pts = sorted(set(angles + [(angles[i] + ((angles[(i + 1) % n] - angles[i]) % (2 * math.pi)) / 2) % (2 * math.pi) for i in range(n)]))
    pts = [0.0] + [p for p in pts if 0 < p < 2 * math.pi] + [2 * math.pi]

    def density(phi):
        rho = float(boundary_radius(sides, phi)[0])
        return 2 * rho * rho / (1 - rho * rho)

    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        val, _ = integrate.quad(density, a, b, epsabs=1e-13, epsrel=1e-13, limit=200)
        total += val
    return total
