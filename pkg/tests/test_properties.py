"""Property-based checks of the structural invariants."""

import json
import tempfile
from pathlib import Path

import numpy as np
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from micropolar.analysis import check_gronwall_weak, derive_c2_c3
from micropolar.checkpoint import load_checkpoint, save_checkpoint
from micropolar.config import apply_overrides
from micropolar.dynamics import Bases, PhysParams, State
from micropolar.ledger import COLUMNS, EnergyLedger
from micropolar.nonlinear import advect_scalar, rotw_grad, trilinear_b, trilinear_bS
from micropolar.spectral_core import (
    DomainSpec,
    Resolution,
    ScalarField,
    SolenoidalField,
    apply_A_frac,
    apply_stokes,
    leray_project,
    scalar_norms,
    sobolev_norm_direct,
    solenoidal_norms,
)

BASES = Bases.build(DomainSpec(1.3), Resolution(3, 4, 3))
SB, VB = BASES.scalar, BASES.vector

coef = st.floats(-1.0, 1.0, allow_nan=False, allow_subnormal=False, width=64)
scalar_coeffs = arrays(np.float64, SB.shape, elements=coef)
vector_coeffs = arrays(np.float64, VB.shape, elements=coef)
fast = settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])


def nonzero(a):
    return np.linalg.norm(a) > 1e-3


@fast
@given(scalar_coeffs)
def test_poincare_and_parseval(c):
    assume(nonzero(c))
    f = ScalarField(SB, c)
    l2, h1, a, a3 = scalar_norms(f)
    assert l2 <= SB.beta1**-0.5 * h1 * (1 + 1e-13)
    assert abs(np.sqrt(SB.grid.integrate(f.grid() ** 2)) - l2) <= 1e-12 * l2
    direct = sobolev_norm_direct(f, 3)
    assert a3 <= direct * (1 + 1e-12)


@fast
@given(scalar_coeffs)
def test_fractional_composition(c):
    f = ScalarField(SB, c)
    np.testing.assert_allclose(apply_A_frac(apply_A_frac(f, 1.5), 1.5).coeffs, apply_A_frac(f, 3).coeffs, rtol=1e-12)


@fast
@given(vector_coeffs, scalar_coeffs, scalar_coeffs)
def test_advective_cancellations(a, f, w):
    u = SolenoidalField(VB, a)
    F = ScalarField(SB, f)
    W = ScalarField(SB, w)
    scale = (1 + np.linalg.norm(a)) * (1 + np.linalg.norm(f)) ** 2 * (1 + np.linalg.norm(w)) * 1e3
    assert abs(trilinear_b(u, F, F)) <= 1e-12 * scale
    assert abs(advect_scalar(u, F).inner(F)) <= 1e-12 * scale
    assert abs(rotw_grad(W, F).inner(F)) <= 1e-12 * scale
    assert abs(trilinear_bS(u, u, u)) <= 1e-12 * scale


@fast
@given(vector_coeffs)
def test_stokes_and_projection(a):
    u = SolenoidalField(VB, a)
    _, h1, _ = solenoidal_norms(u)
    assert abs(apply_stokes(u).inner(u) - h1**2) <= 1e-10 * (h1**2 + 1)
    np.testing.assert_allclose(leray_project(u.grid(), VB).coeffs, a, atol=1e-10)
    assert np.max(np.abs(u.divergence())) <= 1e-10 * (1 + np.max(np.abs(u.grid(1, 0))))


positive = st.floats(0.01, 10.0)
nsq = st.floats(0.01, 0.99)


@settings(max_examples=100, deadline=None)
@given(positive, positive, nsq, nsq, positive, positive)
def test_c2_c3_monotone(Pr, Ra, n1, n2, Lsq, D):
    lo, hi = sorted((n1, n2))
    p_lo = PhysParams(Pr=Pr, Ra=Ra, Nsq=lo, Lsq=Lsq, D=D)
    p_hi = PhysParams(Pr=Pr, Ra=Ra, Nsq=hi, Lsq=Lsq, D=D)
    assert derive_c2_c3(p_hi)[0] <= derive_c2_c3(p_lo)[0]
    c3 = derive_c2_c3(p_lo)[1]
    assert derive_c2_c3(PhysParams(Pr=Pr, Ra=2 * Ra, Nsq=lo, Lsq=Lsq, D=D))[1] >= c3
    assert derive_c2_c3(PhysParams(Pr=Pr, Ra=Ra, Nsq=lo, Lsq=Lsq, D=2 * D))[1] >= c3


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.floats(0.0, 1.0), min_size=2, max_size=30),
    st.floats(0.1, 5.0),
    st.integers(1, 29),
    st.floats(1.01, 3.0),
)
def test_weak_monitor_sign_convention(fractions, y0, cross, factor):
    n = len(fractions)
    t = np.linspace(0, 1, n)
    c3 = 2.0
    env = y0 * np.exp(c3 * t)
    # below the envelope everywhere: no violation
    y = env * np.array(fractions)
    y[0] = y0
    arr = np.zeros((n, len(COLUMNS)))
    arr[:, 0] = t
    arr[:, COLUMNS.index("y")] = y
    p = PhysParams(Pr=1, Ra=1, Nsq=0.5, Lsq=1, D=1)
    assert check_gronwall_weak(EnergyLedger.from_array(arr), p, dt=0.0)["envelope"].passed
    # lift one row above: flagged exactly there
    k = min(cross, n - 1)
    y2 = y.copy()
    y2[k] = env[k] * factor
    arr[:, COLUMNS.index("y")] = y2
    chk = check_gronwall_weak(EnergyLedger.from_array(arr), p, dt=0.0)["envelope"]
    assert not chk.passed and chk.first_violation_row == k


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0, 10), min_size=1, max_size=20))
def test_ledger_requires_increasing_time(ts):
    led = EnergyLedger()
    ok = True
    last = -np.inf
    for t in ts:
        row = [t] + [0.0] * (len(COLUMNS) - 1)
        if t > last:
            led.append(row)
            last = t
        else:
            try:
                led.append(row)
                ok = False
            except ValueError:
                pass
    assert ok
    assert np.all(np.diff(led["t"]) > 0)


@fast
@given(vector_coeffs, scalar_coeffs, scalar_coeffs, st.floats(0, 100), st.integers(0, 10**6))
def test_checkpoint_round_trip(a, w, th, t, steps):
    s = State.zero(BASES).with_coeffs(a, w, th, t=t, steps=steps)
    with tempfile.TemporaryDirectory() as d:
        path = Path(d) / "s.ckpt"
        save_checkpoint(path, s)
        r, header = load_checkpoint(path, BASES)
    for x, y in zip(r.coefficient_arrays(), s.coefficient_arrays()):
        assert x.tobytes() == y.tobytes()
    assert (r.t, r.steps) == (t, steps) and header["has_history"] is False


@settings(max_examples=60, deadline=None)
@given(st.one_of(st.integers(), st.floats(allow_nan=False, allow_infinity=False), st.booleans()))
def test_override_scalar_round_trip(value):
    data = apply_overrides({"stepper": {"dt": 1.0}}, [f"stepper.dt={json.dumps(value)}"])
    assert data["stepper"]["dt"] == value
