import math

import numpy as np
import pytest

from folia import bundle as bd
from folia import cone as cn
from folia import fuchsian as fu
from folia import moebius as mb
from folia import projdyn as pd
from folia.errors import StepOutOfRange

CONE_F = bd.LeafwiseFunction(cn.f_eval, "cone")


@pytest.fixture(scope="module")
def cone_action(lattice):
    return bd.su11_fiber_action(lattice, cn.cone_act)


@pytest.fixture(scope="module")
def proj_action(lattice):
    return bd.linear_fiber_action(pd.su11_linear_rep(lattice.images))


def _same_cone(a, b, tol=1e-8):
    return a.equals(b, tol)


def test_short_path_leaves_fiber(lattice, cone_action):
    p = cn.cone_point(0.9, 0.2j, math.sqrt(0.81 - 0.04))
    lp = bd.LeafPoint(0.05j, p)
    out, word = bd.transport_path(lattice, cone_action, lp, [0.2 + 0.1j])
    assert word == ()
    assert out.fiber == p
    assert out.base == pytest.approx(0.2 + 0.1j)


@pytest.mark.parametrize("k", range(4))
def test_crossing_a_paired_side(lattice, cone_action, proj_action, k):
    g = lattice.images[k]
    base = 0.05 + 0.02j
    p = cn.cone_point(1, 0.3, math.sqrt(0.91))
    out = bd.holonomy_transport(lattice, cone_action, bd.LeafPoint(base, p), mb.apply_disc(g, base))
    assert abs(out.base - base) < 1e-10
    assert _same_cone(out.fiber, cn.cone_act(mb.inverse(g), p), 1e-12)
    v = pd.normalize([0.3 + 0.1j, 1.0])
    out = bd.holonomy_transport(lattice, proj_action, bd.LeafPoint(base, v), mb.apply_disc(g, base))
    assert pd.proj_equal(out.fiber, np.linalg.solve(g.matrix(), v))


@pytest.mark.parametrize("z0", [0.1 + 0.05j, -0.2 + 0.3j, 0.0])
def test_relator_loop_is_trivial(lattice, cone_action, proj_action, z0):
    loop = bd.relator_loop(lattice, z0)
    assert abs(loop[-1] - z0) < 1e-12
    for p in [cn.cone_point(1, 0, 1), cn.cone_point(1, 0.5j, math.sqrt(0.75)), cn.cone_point(1, 1, 0)]:
        out, word = bd.transport_path(lattice, cone_action, bd.LeafPoint(z0, p), loop)
        assert len(word) == 8
        assert abs(out.base - z0) < 1e-8
        assert _same_cone(out.fiber, p)
    v = pd.normalize([1.0, 0.4 - 0.2j])
    out, _ = bd.transport_path(lattice, proj_action, bd.LeafPoint(z0, v), loop)
    assert pd.proj_distance(out.fiber, v) < 1e-8


def test_transport_agrees_with_domain_location(lattice, cone_action, rng):
    p = cn.cone_point(1, 0.4, math.sqrt(0.84))
    lp = bd.LeafPoint(0.1j, p)
    for _ in range(20):
        target = cn.random_disc_point(rng, 0.95)
        out = bd.holonomy_transport(lattice, cone_action, lp, target)
        w, zz = fu.locate_in_domain(lattice, target)
        assert abs(out.base - zz) < 1e-9
        assert _same_cone(out.fiber, bd.apply_word_to_fiber(cone_action, w, p))
        assert np.all(lattice.violations(out.base) <= 1e-10)


def test_path_independence(lattice, cone_action, rng):
    p = cn.cone_point(1, -0.3 + 0.3j, math.sqrt(0.82))
    lp = bd.LeafPoint(0.0, p)
    for _ in range(10):
        target = cn.random_disc_point(rng, 0.9)
        via = cn.random_disc_point(rng, 0.9)
        straight, _ = bd.transport_path(lattice, cone_action, lp, [target])
        bent, _ = bd.transport_path(lattice, cone_action, lp, [via, target])
        assert abs(straight.base - bent.base) < 1e-8
        assert _same_cone(straight.fiber, bent.fiber)


def test_groupoid_law(lattice, cone_action):
    p = cn.cone_point(1, 0.2, math.sqrt(0.96))
    lp = bd.LeafPoint(0.1 + 0.1j, p)
    b, c = 0.8 * np.exp(0.4j), -0.7 + 0.5j
    direct = bd.holonomy_transport(lattice, cone_action, lp, c)
    mid, word = bd.transport_path(lattice, cone_action, lp, [b])
    # re-express c in the chart of the relocated lift
    c_chart = mb.apply_disc(fu.evaluate_word(lattice, word), c)
    assert abs(mb.apply_disc(fu.evaluate_word(lattice, word), b) - mid.base) < 1e-10
    two_step = bd.holonomy_transport(lattice, cone_action, mid, c_chart)
    assert abs(two_step.base - direct.base) < 1e-8
    assert _same_cone(two_step.fiber, direct.fiber)


def test_dbar_residual_examples(rng):
    lp = bd.LeafPoint(0.3 - 0.2j, None)
    assert bd.dbar_residual(bd.LeafwiseFunction(lambda z, v: z), lp, 1e-4) < 1e-10
    assert bd.dbar_residual(bd.LeafwiseFunction(lambda z, v: np.conj(z)), lp, 1e-4) == pytest.approx(1.0)
    for _ in range(20):
        p = cn.random_cone_point(rng, 0.3)
        z = cn.random_disc_point(rng, 0.7)
        assert bd.dbar_residual(CONE_F, bd.LeafPoint(z, p), 1e-4) < 1e-8


@pytest.mark.parametrize("h, z", [(1e-9, 0.0), (0.02, 0.0), (1e-3, 0.999)])
def test_dbar_step_guard(h, z):
    with pytest.raises(StepOutOfRange):
        bd.dbar_residual(CONE_F, bd.LeafPoint(z, cn.cone_point(1, 0, 1)), h)


def test_constancy_examples(lattice, cone_action):
    const = bd.LeafwiseFunction(lambda z, v: 0.25 + 0j)
    assert isinstance(bd.leafwise_constancy(const, bd.LeafPoint(0j, None), 8, 1, lattice, lambda x, v: v),
                      bd.Constant)
    flat = cn.cone_point(1, np.exp(0.6j), 0)
    res = bd.leafwise_constancy(CONE_F, bd.LeafPoint(0j, flat), 10, 2, lattice, cone_action)
    assert isinstance(res, bd.Constant) and res.spread < 1e-10
    res = bd.leafwise_constancy(CONE_F, bd.LeafPoint(0j, cn.cone_point(1, 0, 1)), 10, 2, lattice, cone_action)
    assert isinstance(res, bd.Witness) and res.delta >= 0.5
    # on this leaf F is the coordinate itself, so the witness values are the chart points
    assert res.delta == pytest.approx(abs(res.z1 - res.z2), abs=1e-9)


def test_cone_function_descends(lattice, cone_action, rng):
    pts = [(cn.random_disc_point(rng, 0.8), cn.random_cone_point(rng)) for _ in range(40)]
    assert bd.invariance_residual(CONE_F, lattice, cone_action, pts) < 1e-9


def test_leaf_grid_files(lattice, tmp_path):
    zz, vals = bd.leaf_grid(CONE_F, cn.cone_point(1, 0, 1), lattice, 33)
    inside = ~np.isnan(vals.real)
    assert inside.any() and (~inside).any()
    assert np.allclose(vals[inside], zz[inside])
    bd.write_grid_csv(tmp_path / "g.csv", zz, vals)
    lines = (tmp_path / "g.csv").read_text().splitlines()
    assert lines[0] == "re_z,im_z,re_F,im_F"
    assert len(lines) == 1 + inside.sum()
    bd.write_pgm(tmp_path / "g.pgm", vals)
    raw = (tmp_path / "g.pgm").read_bytes()
    header = b"P5\n33 33\n255\n"
    assert raw.startswith(header) and len(raw) == len(header) + 33 * 33
    pix = np.frombuffer(raw[len(header):], dtype=np.uint8).reshape(33, 33)
    assert np.array_equal(pix[inside], np.round(np.clip(np.abs(vals[inside]), 0, 1) * 255).astype(np.uint8))
