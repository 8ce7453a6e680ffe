"""The universal fiber Hol(D, closed D) and its PSU(1,1) action.

Functions are truncated Taylor series ``sum c_k z^k`` with a sampled
sup-norm certificate.  The group acts by precomposition, ``g . f = f o g^-1``,
and the tautological function ``phi(z, f) = f(z)`` satisfies
``phi(g z, g . f) = phi(z, f)``.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Sequence

import numpy as np

from . import moebius as mb
from .bundle import FiberAction, LeafwiseFunction
from .errors import EquivarianceFailure, SupNormViolation, TruncationError
from .fuchsian import FuchsianRepresentation
from .moebius import SU11Element

DEGREE = 64
R_CHECK = 0.999
CHECK_RADII = 16
CHECK_ANGLES = 2048
SUP_TOL = 1e-6
TAIL_TOL = 1e-8
TAIL_RADIUS = 0.5
FIT_RADIUS = 1.0
EQUIV_TOL = 1e-9
EQUIV_RADIUS = 0.5


def _pow2_at_least(n: int) -> int:
    return 1 << max(0, math.ceil(math.log2(max(n, 1))))


def sampled_sup(coeffs: np.ndarray, r_check: float = R_CHECK, n_radii: int = CHECK_RADII,
                n_angles: int = CHECK_ANGLES) -> float:
    """Max modulus of the polynomial on ``n_radii`` circles up to ``r_check``."""
    m = max(n_angles, _pow2_at_least(len(coeffs)))
    k = np.arange(len(coeffs))
    best = 0.0
    for r in r_check * np.arange(1, n_radii + 1) / n_radii:
        buf = np.zeros(m, dtype=complex)
        buf[: len(coeffs)] = coeffs * r**k
        best = max(best, float(np.max(np.abs(np.fft.ifft(buf) * m))))
    return best


@dataclass(frozen=True, eq=False)
class HoloFunction:
    taylor: np.ndarray
    certified_sup: float
    r_check: float = R_CHECK

    @property
    def degree(self) -> int:
        return len(self.taylor) - 1

    def __call__(self, z):
        return tautological_phi(z, self)

    def to_json(self) -> dict:
        return {
            "N": self.degree,
            "r_check": self.r_check,
            "certified_sup": self.certified_sup,
            "coefficients": [[c.real, c.imag] for c in self.taylor],
        }

    @classmethod
    def from_json(cls, doc: dict, sup_tol: float = SUP_TOL) -> "HoloFunction":
        coeffs = np.array([complex(re, im) for re, im in doc["coefficients"]])
        if len(coeffs) != int(doc["N"]) + 1:
            raise ValueError("coefficient count does not match N")
        return holo_function(coeffs, r_check=float(doc.get("r_check", R_CHECK)), sup_tol=sup_tol)


def holo_function(coeffs, r_check: float = R_CHECK, sup_tol: float = SUP_TOL, validate: bool = True) -> HoloFunction:
    """Wrap Taylor coefficients, certifying ``sup |f| <= 1 + sup_tol`` unless ``validate`` is off."""
    coeffs = np.array(coeffs, dtype=complex)
    if coeffs.ndim != 1 or len(coeffs) == 0:
        raise ValueError("need a non-empty coefficient vector")
    sup = sampled_sup(coeffs, r_check)
    if validate and sup > 1 + sup_tol:
        raise SupNormViolation(f"sampled sup {sup:.9f} exceeds 1 + {sup_tol:g}")
    return HoloFunction(coeffs, sup, r_check)


def identity_function(degree: int = DEGREE) -> HoloFunction:
    c = np.zeros(degree + 1, dtype=complex)
    c[1] = 1
    return holo_function(c)


def constant_function(value: complex, degree: int = DEGREE, sup_tol: float = SUP_TOL) -> HoloFunction:
    c = np.zeros(degree + 1, dtype=complex)
    c[0] = value
    return holo_function(c, sup_tol=sup_tol)


def fit_taylor(F: Callable, degree: int, decay: float = 0.0, fit_radius: float = FIT_RADIUS,
               tail_radius: float = TAIL_RADIUS, tail_tol: float = TAIL_TOL) -> np.ndarray:
    """Taylor coefficients of ``F`` up to ``degree`` by discrete Fourier orthogonality.

    ``F`` must be holomorphic on a neighbourhood of ``|z| <= fit_radius``;
    ``decay`` is a bound on the geometric decay rate of its coefficients and
    sets the sample count so aliasing stays below rounding.
    """
    m = 8 * (degree + 1)
    if 0 < decay < 1:
        m = max(m, int(math.ceil(-40.0 / math.log(decay))))
    m = min(_pow2_at_least(m), 1 << 22)
    theta = 2 * np.pi * np.arange(m) / m
    vals = np.asarray(F(fit_radius * np.exp(1j * theta)), dtype=complex)
    c = np.fft.fft(vals) / m
    k = np.arange(m // 2)
    c = c[: m // 2] / fit_radius**k
    tail = float(np.sum(np.abs(c[degree + 1:]) * tail_radius ** k[degree + 1:]))
    if tail > tail_tol:
        raise TruncationError(f"degree-{degree} tail {tail:.3e} at |z|={tail_radius} exceeds {tail_tol:g}")
    return c[: degree + 1]


def tautological_phi(z, f: HoloFunction):
    """``phi(z, f) = f(z)`` by Horner evaluation; scalar or array ``z``."""
    out = np.zeros_like(np.asarray(z, dtype=complex))
    for c in f.taylor[::-1]:
        out = out * z + c
    return out[()] if out.ndim == 0 else out


def _moebius_decay(g: SU11Element) -> float:
    # g^{-1} has its pole at alpha / conj(beta); coefficients decay like |beta| / |alpha|
    return abs(g.beta) / abs(g.alpha)


def precompose_action(
    g: SU11Element,
    f: HoloFunction,
    degree: Optional[int] = None,
    fit_radius: float = FIT_RADIUS,
    tail_radius: float = TAIL_RADIUS,
    tail_tol: float = TAIL_TOL,
    sup_tol: float = SUP_TOL,
) -> HoloFunction:
    """Truncated Taylor expansion of ``f o g^-1``.

    Raises TruncationError when the discarded tail is too large at
    ``tail_radius`` or when the truncation no longer certifies the sup bound
    (the degree is then too low for this element).
    """
    degree = f.degree if degree is None else degree
    ginv = mb.inverse(g)
    coeffs = fit_taylor(lambda z: tautological_phi(mb.apply_disc(ginv, z), f), degree,
                        _moebius_decay(g), fit_radius, tail_radius, tail_tol)
    try:
        return holo_function(coeffs, f.r_check, sup_tol)
    except SupNormViolation as exc:
        raise TruncationError(f"degree {degree} too low to certify the sup bound: {exc}") from exc


def function_distance(f: HoloFunction, h: HoloFunction, radius: float = EQUIV_RADIUS, samples: int = 256) -> float:
    """Sup of ``|f - h|`` on ``|z| <= radius`` (attained on the circle)."""
    z = radius * np.exp(2j * np.pi * np.arange(samples) / samples)
    return float(np.max(np.abs(tautological_phi(z, f) - tautological_phi(z, h))))


def coefficient_distance(f: HoloFunction, h: HoloFunction) -> float:
    n = max(len(f.taylor), len(h.taylor))
    a = np.zeros(n, dtype=complex)
    b = np.zeros(n, dtype=complex)
    a[: len(f.taylor)] = f.taylor
    b[: len(h.taylor)] = h.taylor
    return float(np.max(np.abs(a - b)))


@dataclass(frozen=True)
class LimitConstant:
    value: complex
    on_circle: bool
    sup_distance: float


@dataclass(frozen=True)
class NoLimit:
    sup_distance: float


def orbit_limit_probe(
    gs: Sequence[SU11Element],
    f: HoloFunction,
    compact_radius: float,
    tol: float = 1e-6,
    tail: int = 5,
    n_radii: int = 8,
    n_angles: int = 64,
):
    """Does ``f o g_n^-1`` converge to a constant on ``|z| <= compact_radius``?

    ``f o g_n^-1`` is evaluated directly (no re-expansion), so diverging
    ``g_n`` cost no accuracy.  The candidate constant is the value at 0; a
    limit is reported when the last element is within ``tol`` of it in sup
    and the values at 0 are Cauchy over the last ``tail`` elements.
    ``on_circle`` flags whether the limit lies on the circle at infinity.
    """
    if compact_radius > 0.9:
        raise ValueError("compact_radius must be <= 0.9")
    r = compact_radius * np.arange(1, n_radii + 1) / n_radii
    grid = np.concatenate([[0j], (r[:, None] * np.exp(2j * np.pi * np.arange(n_angles) / n_angles)).ravel()])
    centers, dists = [], []
    for g in gs:
        vals = tautological_phi(mb.apply_disc(mb.inverse(g), grid), f)
        centers.append(vals[0])
        dists.append(float(np.max(np.abs(vals - vals[0]))))
    if not gs:
        return NoLimit(float("inf"))
    last = centers[-1]
    cauchy = max(abs(c - last) for c in centers[-tail:])
    if dists[-1] < tol and cauchy < tol:
        return LimitConstant(complex(last), bool(abs(abs(last) - 1) <= tol), dists[-1])
    return NoLimit(dists[-1])


def equivariant_to_leafwise(
    psi_hat: Callable[[Any], HoloFunction],
    rep: FuchsianRepresentation,
    fiber_action: FiberAction,
    samples: Sequence[Any],
    tol: float = EQUIV_TOL,
    sup_tol: float = SUP_TOL,
) -> LeafwiseFunction:
    """Leafwise function ``F(z, v) = psi_hat(v)(z)`` from an equivariant fiber map.

    Equivariance is ``psi_hat(rho(g) v) = g . psi_hat(v) = psi_hat(v) o g^-1``,
    the convention under which ``F(g z, rho(g) v) = F(z, v)``.  It is checked
    on every sample fiber and every generator letter, comparing the two
    sides in sup on ``|z| <= 1/2``.
    """
    cached = _fiber_cache(psi_hat)
    worst, worst_at = 0.0, None
    for v in samples:
        fv = cached(v)
        if fv.certified_sup > 1 + sup_tol:
            raise SupNormViolation(f"psi_hat({v!r}) has sampled sup {fv.certified_sup:.9f}")
        for letter in rep.presentation.letters():
            lhs = cached(fiber_action(letter, v))
            rhs = precompose_action(rep.letter_matrix(letter), fv, degree=lhs.degree, sup_tol=sup_tol)
            d = function_distance(lhs, rhs)
            if d > worst:
                worst, worst_at = d, (v, letter)
    if worst > tol:
        raise EquivarianceFailure(
            f"equivariance residual {worst:.3e} exceeds {tol:g}", worst_sample=worst_at, residual=worst
        )
    return LeafwiseFunction(lambda z, v: tautological_phi(z, cached(v)), name="phi o psi_hat")


def _fiber_cache(psi_hat):
    memo = functools.lru_cache(maxsize=4096)(psi_hat)

    def call(v):
        try:
            return memo(v)
        except TypeError:
            return psi_hat(v)

    return call


def cone_embedding(p, degree: Optional[int] = None, sup_tol: float = SUP_TOL) -> HoloFunction:
    """``f(., p)`` for a cone point as an element of Hol(D, closed D).

    The default degree makes the truncation negligible at ``|z| = r_check``.
    """
    from .cone import f_eval

    if p.t == 0:
        # on the t = 0 locus f(., p) is the unimodular constant -z2/z1
        return constant_function(-p.z2 / p.z1, DEGREE if degree is None else degree, sup_tol)
    ratio = abs(p.z2) / abs(p.z1)
    if degree is None:
        degree = DEGREE if ratio < 0.5 else max(DEGREE, int(math.ceil(-40.0 / math.log(ratio))))
    coeffs = fit_taylor(lambda z: f_eval(z, p), degree, ratio)
    return holo_function(coeffs, sup_tol=sup_tol)
