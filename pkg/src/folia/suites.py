"""Verification suites behind the command-line subcommands.

Each suite returns a ``Report`` whose records keep declaration order.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np

from . import bundle as bd
from . import cone as cn
from . import fuchsian as fu
from . import holspace as hs
from . import kahler as kh
from . import moebius as mb
from . import projdyn as pd
from .config import Config
from .errors import FoliaError

PASS, FAIL, UNDETERMINED = "pass", "fail", "undetermined"


def _jsonable(x: Any) -> Any:
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [_jsonable(x.real), _jsonable(x.imag)]
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


@dataclass
class Record:
    name: str
    status: str
    measured: Any
    threshold: Any
    witness: Any = None

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "measured": _jsonable(self.measured),
            "threshold": _jsonable(self.threshold),
            "witness": _jsonable(self.witness),
        }


@dataclass
class Report:
    command: str
    config: Config
    records: list[Record] = field(default_factory=list)
    wall_time: Optional[float] = None

    def add(self, name, status, measured, threshold, witness=None) -> Record:
        rec = Record(name, status, measured, threshold, witness)
        self.records.append(rec)
        return rec

    def below(self, name, measured, threshold, witness=None) -> Record:
        return self.add(name, PASS if measured < threshold else FAIL, measured, threshold, witness)

    @property
    def failed(self) -> bool:
        return any(r.status == FAIL for r in self.records)

    def to_json(self, timestamp: bool = True) -> dict:
        doc = {
            "command": self.command,
            "config": self.config.to_json(),
            "records": [r.to_json() for r in self.records],
            "summary": {
                s: sum(r.status == s for r in self.records) for s in (PASS, FAIL, UNDETERMINED)
            },
        }
        if timestamp:
            doc["wall_time"] = self.wall_time
        return doc


def _guarded(report: Report, name: str, threshold, fn):
    """Run one check; a library error becomes a failed record instead of aborting the suite."""
    try:
        return fn()
    except FoliaError as exc:
        report.add(name, FAIL, None, threshold, {"error": type(exc).__name__, "message": str(exc)})
        return None


def _leaf_fiber(cfg: Config) -> cn.ConePoint:
    a, b, c, d, t = cfg.leaf_fiber
    return cn.cone_point(complex(a, b), complex(c, d), t)


def run_verify_cone(cfg: Config) -> Report:
    t0 = time.perf_counter()
    rep_out = Report("verify-cone", cfg)
    rng = np.random.default_rng(cfg.seed)
    lattice = fu.genus2_octagon_representation(cfg.rel_tol)
    action = bd.su11_fiber_action(lattice, cn.cone_act)

    worst_pres, worst_inv = 0.0, 0.0
    for _ in range(cfg.samples):
        g = cn.random_su11(rng)
        p = cn.random_cone_point(rng)
        z = cn.random_disc_point(rng)
        q = cn.cone_act(g, p)
        worst_pres = max(worst_pres, abs(q.constraint))
        worst_inv = max(worst_inv, abs(cn.f_eval(mb.apply_disc(g, z), q) - cn.f_eval(z, p)))
    rep_out.below("cone_preservation", worst_pres, 1e-10)
    rep_out.below("cone_invariance", worst_inv, 1e-10)

    fibers = [cn.cone_point(1, 0, 1)] + [cn.random_cone_point(rng, 0.3) for _ in range(3)]
    F = bd.LeafwiseFunction(cn.f_eval, "cone f")
    grid = kh.disc_grid(cfg.grid_size, cfg.grid_radius)
    worst_dbar = max(
        bd.dbar_residual(F, bd.LeafPoint(complex(z), p), cfg.dbar_step) for p in fibers for z in grid
    )
    rep_out.below("dbar_sweep", worst_dbar, 1e-8)

    samples = [(cn.random_disc_point(rng, 0.7), cn.random_cone_point(rng)) for _ in range(50)]
    rep_out.below("descent_invariance", bd.invariance_residual(F, lattice, action, samples), 1e-9)

    def relator_loop():
        worst = 0.0
        z0 = 0.1 + 0.05j
        for p in fibers:
            lp = bd.LeafPoint(z0, p)
            out, _ = bd.transport_path(lattice, action, lp, bd.relator_loop(lattice, z0))
            va, vb = out.fiber.vector(), p.vector()
            worst = max(worst, min(np.max(np.abs(va - vb)), np.max(np.abs(va + vb))), abs(out.base - z0))
        return worst

    worst_loop = _guarded(rep_out, "relator_holonomy", 1e-8, relator_loop)
    if worst_loop is not None:
        rep_out.below("relator_holonomy", worst_loop, 1e-8)

    p1 = cn.cone_point(1, 0, 1)
    jump = abs(abs(cn.f_eval(0.0, p1) - cn.f_eval(0.5, p1)) - 0.5)
    rep_out.below("witness_values_t1", jump, 1e-12, {"f(0)": cn.f_eval(0.0, p1), "f(0.5)": cn.f_eval(0.5, p1)})

    leaf_seed = int(rng.integers(2**63))
    res = bd.leafwise_constancy(F, bd.LeafPoint(0j, p1), cfg.leaf_samples, leaf_seed, lattice, action,
                                cfg.const_tol)
    if isinstance(res, bd.Witness):
        rep_out.add("nonconstant_leaf_t_nonzero", PASS, res.delta, cfg.const_tol,
                    {"z1": res.z1, "z2": res.z2})
    else:
        # a t != 0 leaf reported constant means the tolerance made the test vacuous
        rep_out.add("nonconstant_leaf_t_nonzero", FAIL, res.spread, cfg.const_tol,
                    {"error": "self-test contradiction: t != 0 leaf reported constant"})

    worst_spread, bad = 0.0, None
    for _ in range(cfg.t_zero_leaves):
        p0 = cn.random_cone_point(rng, t_zero=True)
        res = bd.leafwise_constancy(F, bd.LeafPoint(0j, p0), cfg.leaf_samples, int(rng.integers(2**63)),
                                    lattice, action, cfg.const_tol)
        spread = res.spread if isinstance(res, bd.Constant) else res.delta
        worst_spread = max(worst_spread, spread)
        if isinstance(res, bd.Witness):
            bad = p0
    rep_out.add("constant_leaves_t_zero", PASS if bad is None and worst_spread < 1e-10 else FAIL,
                worst_spread, min(cfg.const_tol, 1e-10), None if bad is None else {"fiber": bad.vector()})

    rep_out.wall_time = time.perf_counter() - t0
    return rep_out


def _free_or_surface(rep: pd.LinearRep):
    if len(rep.matrices) == 4:
        return fu.genus2_presentation()
    return None


def run_classify(cfg: Config, rep_file: Path) -> Report:
    t0 = time.perf_counter()
    out = Report("classify", cfg)
    rep = pd.LinearRep.loads(Path(rep_file).read_text())
    pres = _free_or_surface(rep)
    cls = pd.classify_action(rep, pres, cfg.radius, cfg.prox_tol, cfg.comp_bound)
    status = UNDETERMINED if cls.verdict is pd.Plainness.UNDETERMINED else PASS
    out.add("classification", status, cls.verdict.value,
            {"prox_tol": cfg.prox_tol, "comp_bound": cfg.comp_bound}, cls.to_json())
    if cls.verdict is pd.Plainness.PROXIMAL:
        gap = pd.proximality_gap(rep.evaluate(cls.witness))
        out.add("witness_gap", PASS if gap > cfg.prox_tol else FAIL, gap, cfg.prox_tol,
                fu.format_word(cls.witness))
        probe = pd.convergence_probe(rep.evaluate(cls.witness), cfg.probe_samples, cfg.probe_iterations,
                                     cfg.seed, cfg.conv_tol, rep.field, fu.format_word(cls.witness))
        status = PASS if probe.converged_fraction >= 0.99 else UNDETERMINED
        out.add("convergence_probe", status, probe.converged_fraction, 0.99, probe.to_json())
    n = rep.dimension
    starts = [np.eye(n)[i] for i in range(n)] + [np.ones(n) / math.sqrt(n)]
    for i, p in enumerate(starts):
        size = pd.finite_orbit_search(rep, pres, p, cfg.orbit_bound)
        out.add(f"finite_orbit_{i}", PASS if size is not None else UNDETERMINED, size, cfg.orbit_bound,
                {"point": p})
    out.wall_time = time.perf_counter() - t0
    return out


def run_laplacian_check(cfg: Config) -> Report:
    t0 = time.perf_counter()
    out = Report("laplacian-check", cfg)
    s = cfg.laplacian_step
    val = kh.laplacian_dbar(lambda z: abs(z) ** 2, 0j, kh.POINCARE, s)
    out.below("point_value_at_0", abs(val + 0.5), 1e-6, {"value": val})
    p = _leaf_fiber(cfg) if cfg.leaf_fiber[4] != 0 else cn.cone_point(1, 0.3, math.sqrt(1 - 0.09))
    funcs = {"z": lambda z: z, "z^2": lambda z: z * z, "cone": lambda z: cn.f_eval(z, p)}
    grid = kh.disc_grid(cfg.grid_size, cfg.grid_radius)
    for name, f in funcs.items():
        worst = max(kh.identity_residual(f, z, kh.POINCARE, s) for z in grid)
        out.below(f"identity_grid_{name}", worst, 1e-5)
    worst_kernel = 0.0
    for f in funcs.values():
        for z in grid[:: max(1, len(grid) // 40)]:
            worst_kernel = max(worst_kernel, abs(kh.laplacian_dbar(f, z, kh.POINCARE, s)),
                               abs(kh.laplacian_dbar(lambda w: np.conj(f(w)), z, kh.POINCARE, s)))
    out.below("holomorphic_kernel", worst_kernel, 1e-6)
    z0 = 0.3 + 0.2j
    r1 = kh.identity_residual(funcs["z^2"], z0, kh.POINCARE, s)
    r2 = kh.identity_residual(funcs["z^2"], z0, kh.POINCARE, s / 2)
    ratio = r1 / r2
    out.add("second_order_convergence", PASS if 2.0 <= ratio <= 8.0 else FAIL, ratio, [2.0, 8.0])
    out.wall_time = time.perf_counter() - t0
    return out


def run_universal_orbit(cfg: Config) -> Report:
    t0 = time.perf_counter()
    out = Report("universal-orbit", cfg)
    rng = np.random.default_rng(cfg.seed)
    f = hs.identity_function(cfg.degree)
    worst = 0.0
    for _ in range(8):
        g, h = cn.random_su11(rng, 0.5), cn.random_su11(rng, 0.5)
        a = hs.precompose_action(mb.compose(g, h), f, tail_tol=cfg.tail_tol, sup_tol=cfg.sup_tol)
        b = hs.precompose_action(g, hs.precompose_action(h, f, tail_tol=cfg.tail_tol, sup_tol=cfg.sup_tol),
                                 tail_tol=cfg.tail_tol, sup_tol=cfg.sup_tol)
        worst = max(worst, hs.coefficient_distance(a, b))
    out.below("action_law", worst, 1e-9)

    worst_phi = 0.0
    for _ in range(8):
        g = cn.random_su11(rng, 0.5)
        z = cn.random_disc_point(rng, 0.6)
        worst_phi = max(worst_phi, abs(hs.tautological_phi(mb.apply_disc(g, z), hs.precompose_action(g, f))
                                       - hs.tautological_phi(z, f)))
    out.below("tautological_equivariance", worst_phi, 1e-9)

    gs = [mb.translation(n) for n in range(1, cfg.orbit_terms + 1)]
    res = hs.orbit_limit_probe(gs, f, 0.5)
    if isinstance(res, hs.LimitConstant):
        out.below("translation_limit", abs(res.value + 1), 1e-6,
                  {"limit": res.value, "on_circle": res.on_circle, "sup_distance": res.sup_distance})
    else:
        out.add("translation_limit", FAIL, res.sup_distance, 1e-6, {"result": "NoLimit"})
    rot = hs.orbit_limit_probe([mb.rotation(0.7 * n) for n in range(1, cfg.orbit_terms + 1)], f, 0.5)
    out.add("rotation_no_limit", PASS if isinstance(rot, hs.NoLimit) else FAIL, rot.sup_distance, 1e-6)

    worst_sup = 0.0
    for _ in range(6):
        worst_sup = max(worst_sup, hs.cone_embedding(cn.random_cone_point(rng, 0.6), sup_tol=cfg.sup_tol).certified_sup)
    out.add("cone_bridge_sup", PASS if worst_sup <= 1 + cfg.sup_tol else FAIL, worst_sup, 1 + cfg.sup_tol)
    out.wall_time = time.perf_counter() - t0
    return out


def run_leaf_grid(cfg: Config, out_dir: Optional[Path]) -> Report:
    t0 = time.perf_counter()
    out = Report("leaf-grid", cfg)
    lattice = fu.genus2_octagon_representation(cfg.rel_tol)
    p = _leaf_fiber(cfg)
    F = bd.LeafwiseFunction(cn.f_eval, "cone f")
    zz, vals = bd.leaf_grid(F, p, lattice, cfg.leaf_grid_size)
    inside = int(np.sum(~np.isnan(vals.real)))
    out.add("grid_points_in_domain", PASS if inside > 0 else FAIL, inside, cfg.leaf_grid_size**2)
    sup = float(np.nanmax(np.abs(vals)))
    out.add("grid_modulus_bound", PASS if sup <= 1 + 1e-12 else FAIL, sup, 1.0)
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        bd.write_grid_csv(out_dir / "leaf_grid.csv", zz, vals)
        bd.write_pgm(out_dir / "leaf_grid.pgm", vals, cfg.pgm_mode)
    out.wall_time = time.perf_counter() - t0
    return out
