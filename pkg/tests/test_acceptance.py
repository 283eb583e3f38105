"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

The summary is repeated at the end of the pytest run (see conftest).
"""

import json

import numpy as np
import pytest

from conftest import record
from micropolar.analysis import (
    check_gronwall_weak,
    continuous_dependence_experiment,
    derive_c2_c3,
    estimate_constant,
    galerkin_convergence_study,
)
from micropolar.checkpoint import load_checkpoint, save_checkpoint
from micropolar.cli import main
from micropolar.dynamics import Bases, State, StepperConfig, simulate
from micropolar.nonlinear import rotw_grad, trilinear_b, trilinear_bS
from micropolar.presets import PRESETS, get_preset
from micropolar.spectral_core import (
    DomainSpec,
    Resolution,
    ScalarField,
    SolenoidalField,
    apply_stokes,
    build_scalar_basis,
    laplacian_vector,
    leray_project,
    rot_rot_vector,
    rot_scalar,
    rot_vector,
    scalar_norms,
    sobolev_norm_direct,
    solenoidal_norms,
)

pytestmark = pytest.mark.slow


def report(n, ok, detail):
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
    record(n, bool(ok), detail)
    assert ok, detail


# ---------------------------------------------------------------------------- 1


def test_criterion_01_basis():
    worst_gram, worst_rq = 0.0, 0.0
    for l in (1.0, 2 * np.pi):
        b = build_scalar_basis(DomainSpec(l), Resolution(32, 32))
        g = b.grid
        # the basis is a tensor product, so the full Gram matrix is kron(Gx, Gy)
        Gx = b.X[0].T @ (g.wx[:, None] * b.X[0])
        Gy = b.S[0].T @ (g.wy[:, None] * b.S[0])
        gram = np.kron(Gx, Gy)
        worst_gram = max(worst_gram, np.max(np.abs(gram - np.eye(gram.shape[0]))))
        nx = g.wx @ b.X[0] ** 2
        ny = g.wy @ b.S[0] ** 2
        dx = g.wx @ b.X[1] ** 2
        dy = g.wy @ b.S[1] ** 2
        rq = (np.outer(dx, ny) + np.outer(nx, dy)) / np.outer(nx, ny)
        expected = (2 * b.n[:, None] * np.pi / l) ** 2 + (b.m[None, :] * np.pi) ** 2
        worst_rq = max(worst_rq, np.max(np.abs(rq - expected) / expected))
    report(1, worst_gram <= 1e-12 and worst_rq <= 1e-10, f"max|G-I|={worst_gram:.2e} max rel RQ err={worst_rq:.2e}")


# ---------------------------------------------------------------------------- 2


def test_criterion_02_structure_identities():
    bases = Bases.build(DomainSpec(1.0), Resolution(8, 8))
    sb, vb = bases.scalar, bases.vector
    grid = sb.grid
    rng = np.random.default_rng(2024)
    worst = dict.fromkeys(["bS(u,u,u)", "b(u,f,f)", "rot adjoint", "rotrot=-lap", "P^2=P", "P self-adjoint", "(A_S u,u)", "rotw_grad"], 0.0)

    def rel(key, err, scale):
        worst[key] = max(worst[key], abs(err) / scale)

    for _ in range(100):
        u = SolenoidalField(vb, rng.standard_normal(vb.shape) / vb.rayleigh)
        f = ScalarField(sb, rng.standard_normal(sb.shape) / sb.beta)
        w = ScalarField(sb, rng.standard_normal(sb.shape) / sb.beta)
        ug, G = u.grid(), u.gradient()
        umag = np.sqrt(np.sum(ug**2, axis=0))
        gmag = np.sqrt(np.sum(G**2, axis=(0, 1)))
        fg, fgrad = f.grid(), f.gradient()
        fgmag = np.sqrt(np.sum(fgrad**2, axis=0))

        rel("bS(u,u,u)", trilinear_bS(u, u, u), grid.integrate(umag**2 * gmag))
        rel("b(u,f,f)", trilinear_b(u, f, f), grid.integrate(umag * fgmag * np.abs(fg)))
        rw, ru = rot_scalar(w), rot_vector(u)
        a, b = grid.inner(rw, ug), grid.integrate(w.grid() * ru)
        rel("rot adjoint", a - b, grid.integrate(np.sqrt(np.sum(rw**2, axis=0)) * umag))
        lap = laplacian_vector(u)
        rel("rotrot=-lap", np.max(np.abs(rot_rot_vector(u) + lap)), np.max(np.abs(lap)))
        gfield = rng.standard_normal((2, *grid.shape))
        hfield = rng.standard_normal((2, *grid.shape))
        Pg = leray_project(gfield, vb)
        rel("P^2=P", np.linalg.norm(leray_project(Pg.grid(), vb).coeffs - Pg.coeffs), np.linalg.norm(Pg.coeffs))
        lhs, rhs = grid.inner(Pg.grid(), hfield), grid.inner(gfield, leray_project(hfield, vb).grid())
        rel("P self-adjoint", lhs - rhs, np.sqrt(grid.inner(gfield, gfield) * grid.inner(hfield, hfield)))
        _, h1, _ = solenoidal_norms(u)
        rel("(A_S u,u)", apply_stokes(u).inner(u) - h1**2, h1**2)
        rel("rotw_grad", rotw_grad(w, f).inner(f), grid.integrate(np.sqrt(np.sum(rw**2, axis=0)) * fgmag * np.abs(fg)))
    ok = all(v <= 1e-10 for v in worst.values())
    report(2, ok, " ".join(f"{k}:{v:.1e}" for k, v in worst.items()))


# ---------------------------------------------------------------------------- 3


def test_criterion_03_poincare():
    est = estimate_constant("k1", 100, Resolution(8, 8), seed=0)
    err = abs(est.value - est.exact) / est.exact
    report(3, err <= 1e-2 and est.alignment >= 0.99, f"k1={est.value:.12f} exact={est.exact:.12f} rel={err:.1e} alignment={est.alignment:.6f}")


# ---------------------------------------------------------------------------- 4


def test_criterion_04_fractional_power():
    sb = build_scalar_basis(DomainSpec(1.0), Resolution(8, 8))
    rng = np.random.default_rng(4)
    ratios = []
    for i in range(100):
        s = (0.0, 1.0, 2.0, 3.0)[i % 4]
        f = ScalarField(sb, rng.standard_normal(sb.shape) * sb.beta ** (-s / 2))
        ratios.append(scalar_norms(f)[3] / sobolev_norm_direct(f, 3))
    ratios = np.array(ratios)
    ok = np.all(np.isfinite(ratios)) and ratios.min() > 0 and ratios.max() <= 1 + 1e-12
    report(4, ok, f"|A^(3/2)f|/|f|_H3 in [{ratios.min():.6f}, {ratios.max():.6f}] spread={ratios.max() / ratios.min():.4f}")


# ---------------------------------------------------------------------------- 5


def _cnab2_slope(s0, p, nonlinear):
    dts = np.array([1e-3, 5e-4, 2.5e-4])

    def final(dt):
        cfg = StepperConfig(dt=dt, scheme="cnab2", t_end=0.1, ledger_stride=10**9)
        traj, _ = simulate(s0, p, cfg, nonlinear=nonlinear)
        return np.concatenate([c.ravel() for c in traj.final.coefficient_arrays()])

    ref = final(dts[-1] / 64)
    errs = np.array([np.linalg.norm(final(dt) - ref) for dt in dts])
    return np.polyfit(np.log(dts), np.log(errs), 1)[0], errs


def test_criterion_05_cnab2_order():
    bases = Bases.build(DomainSpec(1.0), Resolution(8, 8))
    lin_preset, nl_preset = get_preset("H1"), get_preset("smallRa")
    slope_lin, e_lin = _cnab2_slope(lin_preset.initial_state(bases, seed=0), lin_preset.physparams(), nonlinear=False)
    slope_nl, e_nl = _cnab2_slope(nl_preset.initial_state(bases, seed=0), nl_preset.physparams(), nonlinear=True)
    ok = abs(slope_lin - 2) <= 0.1 and abs(slope_nl - 2) <= 0.1
    report(5, ok, f"slope linear={slope_lin:.3f} smallRa={slope_nl:.3f} (errors {e_lin[-1]:.1e}, {e_nl[-1]:.1e})")


# ---------------------------------------------------------------------------- 6


def test_criterion_06_weak_gronwall():
    preset = get_preset("smallRa")
    p = preset.physparams()
    c2, c3 = derive_c2_c3(p)
    bases = Bases.build(DomainSpec(1.0), Resolution(16, 16))
    s0 = preset.initial_state(bases, seed=0, energy=1.0)
    cfg = StepperConfig(dt=2.5e-4, scheme="cnab2", t_end=1.0)
    _, led = simulate(s0, p, cfg)
    rep = check_gronwall_weak(led, p, tol=1e-6, dt=cfg.dt)
    env, diss = rep["envelope"], rep["dissipation_integral"]
    ok = (c2, c3) == (0.5, 2.0) and env.passed and diss.passed and env.asserted
    report(6, ok, f"c2={c2} c3={c3} y(0)={led['y'][0]:.6f} envelope margin={env.max_violation:.3e} dissipation margin={diss.max_violation:.3e}")


# ---------------------------------------------------------------------------- 7


def test_criterion_07_conduction_equilibrium():
    bases = Bases.build(DomainSpec(1.0), Resolution(4, 4))
    worst = 0.0
    for name, preset in PRESETS.items():
        p = preset.physparams()
        cfg = StepperConfig(dt=1e-3, scheme="cnab2", t_end=10.0, ledger_stride=1000)
        traj, led = simulate(State.zero(bases), p, cfg)
        assert traj.final.steps == 10_000
        worst = max(worst, max(np.max(np.abs(c)) for c in traj.final.coefficient_arrays()), np.max(led.array[:, 1:]))
    report(7, worst == 0.0, f"max |coefficient| after 1e4 steps over {len(PRESETS)} presets = {worst}")


# ---------------------------------------------------------------------------- 8


def test_criterion_08_continuous_dependence():
    preset = get_preset("smallRa")
    p = preset.physparams()
    bases = Bases.build(DomainSpec(1.0), Resolution(8, 8))
    s0 = preset.initial_state(bases, seed=0)
    rep = continuous_dependence_experiment(s0, [1e-6, 5e-7], p, StepperConfig(dt=1e-3, scheme="cnab2", t_end=0.5, ledger_stride=5), seed=0)
    lin = rep["linearity"]
    K = rep["runs"][0]["K"]
    lin_T = rep["linearity_final"]
    ok = abs(lin - 1) <= 0.05 and abs(lin_T - 1) <= 0.05 and np.isfinite(K) and np.isfinite(rep["runs"][0]["sup_ratio"])
    report(8, ok, f"sup-difference linearity={lin:.6f} at t=T {lin_T:.6f} K={K:.4f} sup/delta={rep['runs'][0]['sup_ratio']:.4f} N2L2<1={rep['uniqueness_condition']}")


# ---------------------------------------------------------------------------- 9


def test_criterion_09_galerkin_convergence():
    cfg = StepperConfig(dt=1e-4, scheme="cnab2", t_end=0.1, ledger_stride=10)
    details, ok = [], True
    for name in ("smallRa", "H1"):
        preset = get_preset(name)
        rep = galerkin_convergence_study(preset.initial_state, preset.physparams(), cfg, [8, 16, 32], seed=0)
        d = rep["sup_y_differences"]
        ok &= rep["strictly_decreasing"]
        details.append(f"{name}: {d[0]:.3e} > {d[1]:.3e}")
    report(9, ok, "; ".join(details))


# ---------------------------------------------------------------------------- 10


def test_criterion_10_determinism(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(
        json.dumps(
            {
                "params": {"Pr": 1, "Ra": 1, "Nsq": 0.5, "Lsq": 1, "D": 1},
                "stepper": {"dt": 1e-3, "t_end": 0.1, "scheme": "cnab2", "ledger_stride": 5},
                "initial": {"preset": "smallRa"},
            }
        )
    )
    for d in ("a", "b"):
        assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path / d), "--seed", "7"]) == 0
    same = (tmp_path / "a/ledger.csv").read_bytes() == (tmp_path / "b/ledger.csv").read_bytes()

    preset = get_preset("smallRa")
    p = preset.physparams()
    bases = Bases.build(DomainSpec(1.0), Resolution(8, 8))
    s0 = preset.initial_state(bases, seed=7)
    full_cfg = StepperConfig(dt=1e-3, scheme="cnab2", t_end=0.1, ledger_stride=5)
    _, full = simulate(s0, p, full_cfg)
    half, _ = simulate(s0, p, StepperConfig(dt=1e-3, scheme="cnab2", t_end=0.05, ledger_stride=5))
    save_checkpoint(tmp_path / "mid.ckpt", half.final, p, "cnab2")
    resumed, _ = load_checkpoint(tmp_path / "mid.ckpt", bases)
    _, rest = simulate(resumed, p, full_cfg)
    resume_ok = np.array_equal(rest.array, full.array[-len(rest) :])
    report(10, same and resume_ok, f"ledger CSVs identical={same} resume rows identical={resume_ok} ({len(rest)} rows)")
