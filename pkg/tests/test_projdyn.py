import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from folia import fuchsian as fu
from folia import moebius as mb
from folia import projdyn as pd
from folia.errors import DimensionMismatch, ParseError, RadiusTooLarge

FIB_GAP = 2 * math.sqrt(5) / (3 + math.sqrt(5))


def rotation2(theta):
    return np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])


def test_act_examples():
    p = pd.normalize([0.3, 1j])
    assert pd.proj_equal(pd.act(np.eye(2), p), p)
    got = pd.act(np.diag([2.0, 1.0]), pd.normalize([1, 1]))
    assert np.allclose(got, np.array([2, 1]) / math.sqrt(5))
    with pytest.raises(DimensionMismatch):
        pd.act(np.eye(3), p)


def test_act_power_converges():
    p = pd.normalize([1, 1])
    m = np.diag([2.0, 1.0])
    for _ in range(40):
        p = pd.act(m, p)
    assert pd.proj_distance(p, [1, 0]) < 1e-8


def test_gap_examples():
    assert pd.proximality_gap(np.diag([2.0, 1.0])) == 0.5
    assert pd.proximality_gap(rotation2(0.4)) == 0.0
    # eigenvalues (3 +- sqrt5)/2 from the characteristic polynomial x^2 - 3x + 1
    assert abs(pd.proximality_gap(np.array([[2.0, 1.0], [1.0, 1.0]])) - FIB_GAP) < 1e-10


@settings(max_examples=100, deadline=None)
@given(arrays(float, (3, 3), elements=st.floats(-2, 2)), st.floats(0.1, 10))
def test_gap_conjugation_and_scale_invariance(a, scale):
    m = np.diag([3.0, 1.5, 0.5]) + 0.1 * a
    c = np.eye(3) + 0.3 * a.T
    if abs(np.linalg.det(c)) < 0.1 or np.linalg.cond(c) > 1e3:
        return
    gap = pd.proximality_gap(m)
    assert abs(pd.proximality_gap(c @ m @ np.linalg.inv(c)) - gap) < 1e-8
    assert abs(pd.proximality_gap(scale * m) - gap) < 1e-12


@settings(max_examples=100, deadline=None)
@given(arrays(float, (2, 3, 3), elements=st.floats(-2, 2)), arrays(float, 3, elements=st.floats(-1, 1)))
def test_act_is_an_action(ab, v):
    a, b = ab[0] + 3 * np.eye(3), ab[1] + 3 * np.eye(3)
    if np.linalg.norm(v) < 1e-3 or min(abs(np.linalg.det(a)), abs(np.linalg.det(b))) < 1e-2:
        return
    p = pd.normalize(v)
    assert pd.proj_equal(pd.act(a @ b, p), pd.act(a, pd.act(b, p)))


def _rep(*mats, field="real"):
    return pd.LinearRep(list(mats), field)


def test_find_proximal_examples():
    pres = fu.genus2_presentation()
    eye = np.eye(3)
    rep = _rep(np.diag([2.0, 1.0, 1.0]), eye, eye, eye)
    w, gap = pd.find_proximal(rep, pres, 1)
    assert w == ((0, 1),) and gap == 0.5
    rot = _rep(rotation2(0.3), rotation2(1.1), np.array([[0.0, 1.0], [1.0, 0.0]]), np.eye(2))
    assert pd.find_proximal(rot, pres, 3) is None
    fib = np.array([[2.0, 1.0], [1.0, 1.0]])
    rep = _rep(fib, np.linalg.inv(fib), np.eye(2), np.eye(2))
    w, gap = pd.find_proximal(rep, pres, 1)
    assert len(w) == 1 and abs(gap - FIB_GAP) < 1e-10


def test_find_proximal_radius_guard():
    with pytest.raises(RadiusTooLarge):
        pd.find_proximal(_rep(np.eye(2)), None, 13)


def test_convergence_probe_diagonal():
    rep = pd.convergence_probe(np.diag([2.0, 1.0]), 1000, 200, seed=7)
    assert rep.converged_fraction >= 0.99
    assert pd.proj_distance(rep.attractor, [1, 0]) < 1e-12


def test_convergence_probe_rotation():
    rep = pd.convergence_probe(rotation2(0.9), 1000, 200, seed=7)
    assert rep.converged_fraction < 0.01


def test_convergence_probe_hyperbolic_moebius():
    g = mb.compose(mb.rotation(2.0), mb.compose(mb.translation(0.8), mb.rotation(-2.0)))
    rep = pd.convergence_probe(g.matrix(), 1000, 200, seed=3)
    zeta = mb.attracting_fixed_point(g)
    assert rep.converged_fraction >= 0.99
    assert pd.proj_distance(rep.attractor, pd.normalize([zeta, 1])) < 1e-8


def test_convergence_probe_is_seeded():
    a = pd.convergence_probe(np.diag([1.5, 1.0, 0.3]), 50, 30, seed=11)
    b = pd.convergence_probe(np.diag([1.5, 1.0, 0.3]), 50, 30, seed=11)
    assert json.dumps(a.to_json()) == json.dumps(b.to_json())


@pytest.mark.parametrize("diag", [[3.0, 1.0], [1.2, 1.0, 0.5], [5.0, 0.1, 0.1]])
def test_probe_attractor_matches_top_eigenvector(diag):
    rng = np.random.default_rng(1)
    q, _ = np.linalg.qr(rng.standard_normal((len(diag), len(diag))))
    m = q @ np.diag(diag) @ q.T
    assert pd.proximality_gap(m) > 0.1
    rep = pd.convergence_probe(m, 100, 400, seed=2)
    assert pd.proj_distance(rep.attractor, q[:, 0]) < 1e-8


def _closure_oracle(perms, start):
    # brute force: enumerate the permutation group, then the orbit of `start`
    group = {tuple(range(len(start)))}
    frontier = list(group)
    while frontier:
        g = frontier.pop()
        for p in perms:
            h = tuple(p[i] for i in g)
            if h not in group:
                group.add(h)
                frontier.append(h)
    return len({tuple(start[list(g).index(i)] for i in range(len(start))) for g in group})


def test_finite_orbit_examples():
    eye = np.eye(3)
    assert pd.finite_orbit_search(_rep(eye, eye), None, [0.2, 0.5, 1.0], 100) == 1
    perms = [(1, 2, 0), (1, 0, 2)]
    rep = _rep(*[pd.permutation_matrix(p) for p in perms])
    expected = _closure_oracle(perms, (1, 0, 0))
    assert expected == 3
    assert pd.finite_orbit_search(rep, None, [1, 0, 0], 100) == expected
    assert pd.finite_orbit_search(_rep(np.diag([2.0, 1.0])), None, [1, 1], 1000) is None


def test_finite_orbit_bound():
    rep = _rep(pd.permutation_matrix((1, 2, 3, 0)), pd.permutation_matrix((1, 0, 2, 3)))
    assert pd.finite_orbit_search(rep, None, [1, 0.5, 0.2, 0.1], 10) is None
    assert pd.finite_orbit_search(rep, None, [1, 0.5, 0.2, 0.1], 100) == 24


def test_classify_examples():
    pres = fu.genus2_presentation()
    eye = np.eye(3)
    c = pd.classify_action(_rep(pd.permutation_matrix((1, 2, 0)), eye, eye, eye), pres, 3)
    assert c.verdict is pd.Plainness.COMPACT
    c = pd.classify_action(_rep(np.diag([2.0, 1.0, 1.0]), eye, eye, eye), pres, 2)
    assert c.verdict is pd.Plainness.PROXIMAL and c.witness is not None
    parabolic = np.array([[1.0, 1.0], [0.0, 1.0]])
    c = pd.classify_action(_rep(parabolic, np.eye(2), np.eye(2), np.eye(2)), pres, 0)
    assert c.verdict is pd.Plainness.UNDETERMINED


def test_classify_unbounded_without_proximal_is_undetermined():
    parabolic = np.array([[1.0, 1.0], [0.0, 1.0]])
    c = pd.classify_action(_rep(parabolic), None, 12, comp_bound=5.0)
    assert c.verdict is pd.Plainness.UNDETERMINED
    assert c.max_norm > 5.0


@settings(max_examples=40, deadline=None)
@given(arrays(float, (2, 2, 2), elements=st.floats(-2, 2)))
def test_proximal_verdict_always_has_a_checkable_witness(mats):
    ms = [m + 2.5 * np.eye(2) for m in mats]
    if min(abs(np.linalg.det(m)) for m in ms) < 1e-3:
        return
    c = pd.classify_action(_rep(*ms), None, 2)
    if c.verdict is pd.Plainness.PROXIMAL:
        rep = _rep(*ms)
        assert pd.proximality_gap(rep.evaluate(c.witness)) > pd.PROX_TOL


def test_linear_rep_json_round_trip():
    rep = pd.LinearRep([np.array([[1 + 2j, 0.5], [0, 1j]])], "complex")
    back = pd.LinearRep.loads(json.dumps(rep.to_json()))
    assert np.array_equal(back.matrices[0], rep.matrices[0])


def test_linear_rep_parse_errors():
    with pytest.raises(ParseError) as err:
        pd.LinearRep.loads('{"field": "real", "dim')
    assert err.value.offset is not None
    with pytest.raises(ParseError):
        pd.LinearRep.loads('{"field": "real"}')
    with pytest.raises(DimensionMismatch):
        pd.LinearRep.loads(json.dumps({"field": "real", "dimension": 3, "matrices": [{"re": [[1, 0], [0, 1]]}]}))
