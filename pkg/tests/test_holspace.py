import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from folia import bundle as bd
from folia import cone as cn
from folia import holspace as hs
from folia import moebius as mb
from folia.errors import EquivarianceFailure, SupNormViolation, TruncationError


def su11(a_phase, beta):
    return mb.su11_new(math.sqrt(1 + abs(beta) ** 2) * np.exp(1j * a_phase), beta)


small_su11 = st.builds(
    lambda ph, r, th: su11(ph, r * np.exp(1j * th)),
    st.floats(0, 2 * math.pi), st.floats(0, 0.5), st.floats(0, 2 * math.pi),
)


def test_identity_and_constant():
    f = hs.identity_function()
    assert f.degree == 64
    assert f.certified_sup == pytest.approx(hs.R_CHECK)
    assert f(0.3 + 0.2j) == 0.3 + 0.2j
    c = hs.constant_function(0.5j)
    assert c(0.9) == 0.5j and c.certified_sup == 0.5
    assert hs.tautological_phi(np.array([0.1, 0.2]), f).shape == (2,)


def test_sup_violation():
    with pytest.raises(SupNormViolation):
        hs.holo_function([0, 1.01])
    with pytest.raises(SupNormViolation):
        hs.constant_function(1.1)
    assert hs.holo_function([0, 1.01], validate=False).certified_sup > 1


def test_sampled_sup_matches_brute_force(rng):
    c = rng.normal(size=9) + 1j * rng.normal(size=9)
    z = 0.999 * np.exp(2j * np.pi * np.arange(2048) / 2048)
    assert hs.sampled_sup(c) == pytest.approx(np.max(np.abs(np.polyval(c[::-1], z))), rel=1e-12)


def test_rotation_acts_on_coefficients():
    theta = 0.7
    g = mb.rotation(theta)
    h = hs.precompose_action(g, hs.identity_function())
    # rotation by theta on the disc is z -> e^{i theta} z, so f o g^-1 = e^{-i theta} z
    assert abs(h.taylor[1] - np.exp(-1j * theta)) < 1e-14
    assert np.max(np.abs(np.delete(h.taylor, 1))) < 1e-14


@settings(max_examples=30, deadline=None)
@given(small_su11)
def test_moebius_taylor_closed_form(g):
    h = hs.precompose_action(g, hs.identity_function())
    a, b = g.alpha, g.beta
    # g^-1 z = (conj(a) z - b) / (a - conj(b) z)
    k = np.arange(1, 65)
    expected = np.concatenate([[-b / a], (a.conjugate() / a) * (b.conjugate() / a) ** (k - 1)
                               - (b / a) * (b.conjugate() / a) ** k])
    assert np.max(np.abs(h.taylor - expected)) < 1e-12


@settings(max_examples=30, deadline=None)
@given(small_su11, small_su11, st.floats(0, 2 * math.pi), st.floats(0, 0.5))
def test_action_law(g, h, ph, r):
    f = hs.precompose_action(su11(ph, r), hs.identity_function())
    lhs = hs.precompose_action(mb.compose(g, h), f)
    rhs = hs.precompose_action(g, hs.precompose_action(h, f))
    assert hs.function_distance(lhs, rhs) < 1e-9
    assert hs.function_distance(hs.precompose_action(mb.IDENTITY, f), f) < 1e-14


def test_truncation_guard():
    g = mb.translation(6.0)  # |beta|/|alpha| ~ 0.995, far beyond degree 64
    with pytest.raises(TruncationError):
        hs.precompose_action(g, hs.identity_function(), degree=64)


def test_fit_taylor_recovers_polynomial():
    c = hs.fit_taylor(lambda z: 1 + 2 * z - 0.5j * z**3, 8)
    assert np.allclose(c, [1, 2, 0, -0.5j, 0, 0, 0, 0, 0], atol=1e-15)
    with pytest.raises(TruncationError):
        hs.fit_taylor(lambda z: 1 / (1.05 - z), 8)


def test_json_round_trip():
    f = hs.precompose_action(su11(0.3, 0.2 + 0.1j), hs.identity_function())
    doc = f.to_json()
    assert doc["N"] == 64 and len(doc["coefficients"]) == 65
    g = hs.HoloFunction.from_json(doc)
    assert np.array_equal(g.taylor, f.taylor)
    doc["N"] = 63
    with pytest.raises(ValueError):
        hs.HoloFunction.from_json(doc)


def test_orbit_probe_translations_converge_to_minus_one():
    gs = [mb.translation(n) for n in range(1, 41)]
    res = hs.orbit_limit_probe(gs, hs.identity_function(), 0.5)
    assert isinstance(res, hs.LimitConstant)
    assert abs(res.value + 1) < 1e-6 and res.on_circle


def test_orbit_probe_rotations_have_no_limit():
    gs = [mb.rotation(0.1 * n) for n in range(1, 41)]
    assert isinstance(hs.orbit_limit_probe(gs, hs.identity_function(), 0.5), hs.NoLimit)


def test_orbit_probe_interior_constant():
    c = hs.constant_function(0.3 - 0.2j)
    res = hs.orbit_limit_probe([mb.translation(n) for n in range(5)], c, 0.5)
    assert isinstance(res, hs.LimitConstant) and not res.on_circle
    assert res.value == 0.3 - 0.2j and res.sup_distance == 0


def test_cone_embedding_sup_and_values(rng):
    z = 0.99 * np.exp(2j * np.pi * np.arange(64) / 64)
    for _ in range(10):
        p = cn.random_cone_point(rng, 0.9)
        f = hs.cone_embedding(p)
        assert f.certified_sup <= 1 + 1e-6
        assert np.max(np.abs(f(0.5 * z) - cn.f_eval(0.5 * z, p))) < 1e-12
    flat = cn.random_cone_point(rng, t_zero=True)
    f = hs.cone_embedding(flat)
    assert f.degree == 64 and abs(abs(f.taylor[0]) - 1) < 1e-15


def test_equivariance_builds_cone_function(lattice, rng):
    action = bd.su11_fiber_action(lattice, cn.cone_act)
    fibers = [cn.random_cone_point(rng, 0.3) for _ in range(3)] + [cn.random_cone_point(rng, t_zero=True)]
    F = hs.equivariant_to_leafwise(hs.cone_embedding, lattice, action, fibers)
    for p in fibers:
        z = cn.random_disc_point(rng, 0.5)
        assert abs(F(z, p) - cn.f_eval(z, p)) < 1e-12
    assert bd.invariance_residual(F, lattice, action, [(0.1j, fibers[0])]) < 1e-9


def test_equivariance_constant_map(lattice):
    c = hs.constant_function(0.25)
    F = hs.equivariant_to_leafwise(lambda v: c, lattice, lambda x, v: v, [0, 1])
    assert F(0.4, 0) == 0.25


def test_equivariance_failure(lattice, rng):
    action = bd.su11_fiber_action(lattice, cn.cone_act)
    # wrong convention: ignores the fiber entirely
    with pytest.raises(EquivarianceFailure) as info:
        hs.equivariant_to_leafwise(lambda v: hs.identity_function(400), lattice, action, [cn.cone_point(1, 0, 1)])
    assert info.value.residual > 1e-9


def test_equivariance_rejects_sup_violation(lattice):
    big = hs.holo_function([1.5], validate=False)
    with pytest.raises(SupNormViolation):
        hs.equivariant_to_leafwise(lambda v: big, lattice, lambda x, v: v, [0])
