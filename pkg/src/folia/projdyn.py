"""Projective dynamics of finitely generated matrix groups.

Proximality, attractor probing, finite-orbit search and a heuristic
plainness classification.  Points of P(W) are unit vectors; two vectors
name the same point when ``|<u, v>| = 1``.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import DimensionMismatch, EigenFailure, ParseError, RadiusTooLarge
from .fuchsian import MAX_RADIUS, SurfaceGroupPresentation, Word, format_word, inverse_letter

PROX_TOL = 1e-6
CONV_TOL = 1e-6
COMP_BOUND = 1e3
PROJ_EQ_TOL = 1e-10
ORBIT_TOL = 1e-8
MULTIPLICITY_RTOL = 1e-9


def normalize(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    n = np.linalg.norm(v)
    if n == 0:
        raise ValueError("zero vector has no projective class")
    return v / n


def proj_distance(u, v) -> float:
    """Sine of the angle between the lines through ``u`` and ``v``.

    Computed as the norm of the component of ``u`` orthogonal to ``v``, which
    stays accurate far below the ``sqrt(eps)`` floor of ``sqrt(1 - |<u,v>|^2)``.
    """
    u, v = normalize(u), normalize(v)
    return float(np.linalg.norm(u - np.vdot(v, u) * v))


def proj_equal(u, v, tol: float = PROJ_EQ_TOL) -> bool:
    return abs(abs(np.vdot(normalize(u), normalize(v))) - 1.0) <= tol


@dataclass
class LinearRep:
    """Generator matrices of a representation into GL(n, F)."""

    matrices: list[np.ndarray]
    field: str = "complex"
    labels: Optional[list[str]] = None

    def __post_init__(self):
        if self.field not in ("real", "complex"):
            raise ValueError(f"unknown field tag {self.field!r}")
        dtype = float if self.field == "real" else complex
        self.matrices = [np.array(m, dtype=dtype) for m in self.matrices]
        if not self.matrices:
            raise ValueError("at least one generator required")
        n = self.matrices[0].shape[0]
        for m in self.matrices:
            if m.shape != (n, n):
                raise DimensionMismatch(f"generator of shape {m.shape}, expected {(n, n)}")
            if abs(np.linalg.det(m)) <= 1e-12:
                raise ValueError("generator matrix is not invertible")
        self._inverses = [np.linalg.inv(m) for m in self.matrices]

    @property
    def dimension(self) -> int:
        return self.matrices[0].shape[0]

    def letter_matrix(self, letter) -> np.ndarray:
        i, e = letter
        return self.matrices[i] if e > 0 else self._inverses[i]

    def evaluate(self, w: Word) -> np.ndarray:
        out = np.eye(self.dimension, dtype=self.matrices[0].dtype)
        for x in w:
            out = out @ self.letter_matrix(x)
        return out

    def to_json(self) -> dict:
        doc = {
            "field": self.field,
            "dimension": self.dimension,
            "matrices": [
                {"re": np.real(m).tolist(), "im": np.imag(m).tolist()} for m in self.matrices
            ],
        }
        if self.labels:
            doc["labels"] = list(self.labels)
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "LinearRep":
        try:
            tag = doc.get("field", "complex")
            n = int(doc["dimension"])
            mats = []
            for m in doc["matrices"]:
                re = np.asarray(m["re"], dtype=float)
                im = np.asarray(m.get("im", np.zeros_like(re)), dtype=float)
                mats.append(re + 1j * im if tag == "complex" else re)
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed representation document: {exc}") from exc
        for m in mats:
            if m.shape != (n, n):
                raise DimensionMismatch(f"matrix of shape {m.shape} in a dimension-{n} representation")
        return cls(mats, tag, doc.get("labels"))

    @classmethod
    def loads(cls, text: str) -> "LinearRep":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON at byte {exc.pos}: {exc.msg}", offset=exc.pos) from exc
        if not isinstance(doc, dict):
            raise ParseError("representation document must be a JSON object", offset=0)
        return cls.from_json(doc)


def act(matrix, p) -> np.ndarray:
    matrix = np.asarray(matrix)
    p = np.asarray(p)
    if matrix.ndim != 2 or matrix.shape[1] != p.shape[-1]:
        raise DimensionMismatch(f"matrix {matrix.shape} cannot act on a point of length {p.shape[-1]}")
    return normalize(matrix @ p)


def _moduli(matrix) -> np.ndarray:
    try:
        ev = np.linalg.eigvals(np.asarray(matrix))
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(str(exc)) from exc
    if not np.all(np.isfinite(ev)):
        raise EigenFailure("non-finite eigenvalues")
    return np.sort(np.abs(ev))[::-1]


def proximality_gap(matrix) -> float:
    """Relative gap ``(|l1| - |l2|) / |l1|`` between the two largest eigenvalue moduli.

    Ties within a relative 1e-9 are reported as a zero gap.
    """
    mod = _moduli(matrix)
    if len(mod) < 2:
        return 0.0
    gap = (mod[0] - mod[1]) / mod[0]
    return 0.0 if gap <= MULTIPLICITY_RTOL else float(gap)


def is_proximal(matrix, prox_tol: float = PROX_TOL) -> bool:
    return proximality_gap(matrix) > prox_tol


def top_eigenvector(matrix) -> np.ndarray:
    ev, vecs = np.linalg.eig(np.asarray(matrix, dtype=complex))
    return normalize(vecs[:, int(np.argmax(np.abs(ev)))])


def _letters(rep: LinearRep, presentation: Optional[SurfaceGroupPresentation]) -> list:
    # without a presentation the generators are treated as free
    n = len(rep.matrices) if presentation is None else min(len(rep.matrices), presentation.generator_count)
    return [(i, e) for i in range(n) for e in (1, -1)]


def iter_ball_products(rep: LinearRep, presentation: Optional[SurfaceGroupPresentation], radius: int):
    """Yield ``(word, matrix)`` over the reduced word ball, reusing prefix products."""
    if radius > MAX_RADIUS:
        raise RadiusTooLarge(f"radius {radius} > {MAX_RADIUS}")
    letters = _letters(rep, presentation)
    eye = np.eye(rep.dimension, dtype=rep.matrices[0].dtype)
    layer = [((), eye)]
    yield (), eye
    for _ in range(radius):
        nxt = []
        for w, m in layer:
            for x in letters:
                if w and w[-1] == inverse_letter(x):
                    continue
                item = (w + (x,), m @ rep.letter_matrix(x))
                nxt.append(item)
                yield item
        layer = nxt


def find_proximal(
    rep: LinearRep, presentation: Optional[SurfaceGroupPresentation], radius: int, prox_tol: float = PROX_TOL
) -> Optional[tuple[Word, float]]:
    """Word of maximal proximality gap in the ball, or None when every gap is <= prox_tol.

    Ties keep the earliest word in shortlex order.
    """
    best = None
    for w, m in iter_ball_products(rep, presentation, radius):
        gap = proximality_gap(m)
        if gap > prox_tol and (best is None or gap > best[1]):
            best = (w, gap)
    return best


@dataclass
class ConvergenceReport:
    attractor: np.ndarray
    converged_fraction: float
    exceptional_residual: float
    samples: int
    iterations: int
    word: Optional[str] = None

    def to_json(self) -> dict:
        return {
            "word": self.word,
            "attractor": {"re": np.real(self.attractor).tolist(), "im": np.imag(self.attractor).tolist()},
            "converged_fraction": self.converged_fraction,
            "exceptional_residual": self.exceptional_residual,
            "samples": self.samples,
            "iterations": self.iterations,
        }


def random_points(n: int, dim: int, rng: np.random.Generator, complex_field: bool = True) -> np.ndarray:
    pts = rng.standard_normal((n, dim))
    if complex_field:
        pts = pts + 1j * rng.standard_normal((n, dim))
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def convergence_probe(
    matrix,
    samples: int,
    iterations: int,
    seed: int,
    conv_tol: float = CONV_TOL,
    field: Optional[str] = None,
    word: Optional[str] = None,
) -> ConvergenceReport:
    """Push seeded random points through ``matrix**m`` and measure collapse onto the top eigendirection.

    ``exceptional_residual`` is the largest distance to the attractor among
    the samples that did not converge (0 when all did); it measures how far
    the unconverged mass sits from the attractor.
    """
    matrix = np.asarray(matrix)
    if field is None:
        field = "real" if np.isrealobj(matrix) else "complex"
    rng = np.random.default_rng(seed)
    pts = random_points(samples, matrix.shape[0], rng, field == "complex").T.astype(complex)
    attractor = top_eigenvector(matrix)
    for _ in range(iterations):
        pts = matrix @ pts
        pts /= np.linalg.norm(pts, axis=0, keepdims=True)
    dist = np.linalg.norm(pts - np.outer(attractor, attractor.conj() @ pts), axis=0)
    ok = dist < conv_tol
    resid = float(dist[~ok].max()) if (~ok).any() else 0.0
    return ConvergenceReport(attractor, float(ok.mean()), resid, samples, iterations, word)


def finite_orbit_search(
    rep: LinearRep,
    presentation: Optional[SurfaceGroupPresentation],
    p,
    bound: int,
    tol: float = ORBIT_TOL,
) -> Optional[int]:
    """Size of the orbit of ``p`` if it closes up with at most ``bound`` points.

    A numerically stabilized closure is accepted only if every generator
    permutes the found points; a contracting sequence that merely stalls at
    the tolerance fails this check and is reported as infinite (None).
    """
    if bound > 100_000:
        raise ValueError("bound must be <= 1e5")
    gens = [rep.letter_matrix(x) for x in _letters(rep, presentation)]
    pts = np.zeros((bound, rep.dimension), dtype=complex)
    pts[0] = normalize(p)
    count = 1

    def find(q) -> int:
        over = np.abs(pts[:count].conj() @ q)
        k = int(np.argmax(over))
        return k if abs(over[k] - 1.0) <= tol else -1

    head = 0
    while head < count:
        for g in gens:
            q = normalize(g @ pts[head])
            if find(q) < 0:
                if count >= bound:
                    return None
                pts[count] = q
                count += 1
        head += 1
    for g in gens:
        images = {find(normalize(g @ pts[k])) for k in range(count)}
        if len(images) != count or -1 in images:
            return None
    return count


class Plainness(enum.Enum):
    COMPACT = "PlainByCompactness"
    PROXIMAL = "PlainByProximal"
    UNDETERMINED = "Undetermined"


@dataclass
class Classification:
    verdict: Plainness
    radius: int
    max_norm: float
    max_gap: float
    witness: Optional[Word] = None
    witness_gap: Optional[float] = None
    heuristic: bool = True
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "heuristic": self.heuristic,
            "radius": self.radius,
            "max_normalized_norm": self.max_norm,
            "max_gap": self.max_gap,
            "witness": None if self.witness is None else [list(x) for x in self.witness],
            "witness_text": None if self.witness is None else format_word(self.witness),
            "witness_gap": self.witness_gap,
            "notes": self.notes,
        }


def _normalized_norm(m: np.ndarray) -> float:
    # norm in PGL: scale to |det| = 1 first
    n = m.shape[0]
    return float(np.linalg.norm(m, 2) / abs(np.linalg.det(m)) ** (1.0 / n))


def classify_action(
    rep: LinearRep,
    presentation: Optional[SurfaceGroupPresentation],
    radius: int,
    prox_tol: float = PROX_TOL,
    comp_bound: float = COMP_BOUND,
) -> Classification:
    """Heuristic plainness verdict from the word ball of the given radius.

    Bounded (determinant-normalized) norms with no proximal word suggest a
    relatively compact image; a proximal word is an explicit witness.  The
    identity alone (radius 0) is no evidence either way.
    """
    max_norm, max_gap = 0.0, 0.0
    best = None
    for w, m in iter_ball_products(rep, presentation, radius):
        max_norm = max(max_norm, _normalized_norm(m))
        gap = proximality_gap(m)
        max_gap = max(max_gap, gap)
        if gap > prox_tol and (best is None or gap > best[1]):
            best = (w, gap)
    if best is not None:
        w, gap = best
        # re-derive the gap from scratch so the witness is self-certifying
        check = proximality_gap(rep.evaluate(w))
        if check > prox_tol:
            return Classification(Plainness.PROXIMAL, radius, max_norm, max_gap, w, check)
    if radius == 0:
        return Classification(
            Plainness.UNDETERMINED, radius, max_norm, max_gap, notes=["empty search space"]
        )
    if max_norm <= comp_bound:
        return Classification(Plainness.COMPACT, radius, max_norm, max_gap)
    return Classification(Plainness.UNDETERMINED, radius, max_norm, max_gap)


def su11_linear_rep(images: Iterable) -> LinearRep:
    """Linear representation on C^2 from SU(1,1) generator images."""
    return LinearRep([g.matrix() for g in images], "complex")


def permutation_matrix(perm: Sequence[int]) -> np.ndarray:
    n = len(perm)
    m = np.zeros((n, n))
    for i, j in enumerate(perm):
        m[j, i] = 1.0
    return m
