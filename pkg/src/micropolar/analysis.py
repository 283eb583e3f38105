"""Inequality monitors, interpolation-constant estimates and paired-run experiments.

Monitors share one sign convention: a residual ``> 0`` means the bound is
broken.  Each monitor returns an :class:`InequalityReport` holding one
:class:`CheckResult` per inequality; checks flagged ``asserted=False`` are
informational and never fail a report.
"""

from __future__ import annotations

import io
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dynamics import Bases, PhysParams, State, StepperConfig, simulate
from .presets import ROUGH_H1, random_state, restrict_state, state_energy
from .spectral_core import (
    DomainSpec,
    Resolution,
    ScalarField,
    SolenoidalField,
    scalar_norms,
    sobolev_norm_direct,
    solenoidal_norms,
)

log = logging.getLogger(__name__)

EPS = np.finfo(float).eps


def worker_count(default: int = 2) -> int:
    """Worker cap from ``MICROPOLAR_THREADS`` (at least 1)."""
    raw = os.environ.get("MICROPOLAR_THREADS")
    if raw is None:
        return default
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValueError(f"MICROPOLAR_THREADS must be an integer, got {raw!r}") from None


# --------------------------------------------------------------------------- #
# reports
# --------------------------------------------------------------------------- #


@dataclass
class CheckResult:
    name: str
    max_violation: float
    t_at_max: float
    first_violation_row: int | None
    passed: bool
    asserted: bool = True
    detail: dict = field(default_factory=dict)


@dataclass
class InequalityReport:
    monitor: str
    checks: list[CheckResult] = field(default_factory=list)
    info: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if c.asserted)

    def __getitem__(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_lines(self) -> list[str]:
        """One ``key=value`` record per check, followed by the info record."""
        out = []
        for c in self.checks:
            parts = [
                f"monitor={self.monitor}",
                f"check={c.name}",
                f"max_violation={c.max_violation:.17g}",
                f"t_at_max={c.t_at_max:.17g}",
                f"first_violation_row={'' if c.first_violation_row is None else c.first_violation_row}",
                f"passed={int(c.passed)}",
                f"asserted={int(c.asserted)}",
            ]
            parts += [f"{k}={_fmt(v)}" for k, v in c.detail.items()]
            out.append(" ".join(parts))
        if self.info:
            out.append(" ".join([f"monitor={self.monitor}", "check=info"] + [f"{k}={_fmt(v)}" for k, v in self.info.items()]))
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("monitor,check,max_violation,t_at_max,first_violation_row,passed,asserted\n")
        for c in self.checks:
            row = "" if c.first_violation_row is None else str(c.first_violation_row)
            buf.write(
                f"{self.monitor},{c.name},{c.max_violation:.17g},{c.t_at_max:.17g},{row},{int(c.passed)},{int(c.asserted)}\n"
            )
        return buf.getvalue()


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v).replace(" ", "")


def _check(name, t, residual, scale, asserted, **detail) -> CheckResult:
    """Build a result from absolute residuals; ``scale`` normalises the reported maximum."""
    rel = residual / np.where(scale > 0, scale, 1.0)
    i = int(np.argmax(rel))
    bad = np.flatnonzero(residual > 0)
    first = int(bad[0]) if bad.size else None
    return CheckResult(name, float(rel[i]), float(t[i]), first, first is None, asserted, detail)


def _column(ledger, name):
    try:
        return np.asarray(ledger[name], dtype=float)
    except (KeyError, ValueError) as exc:
        raise ValueError(f"ledger is missing column {name!r}") from exc


def cumulative_trapezoid(f: np.ndarray, t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(f)
    if f.size > 1:
        out[1:] = np.cumsum(0.5 * (f[1:] + f[:-1]) * np.diff(t))
    return out


# --------------------------------------------------------------------------- #
# weak-solution energy envelope
# --------------------------------------------------------------------------- #


def derive_c2_c3(p: PhysParams) -> tuple[float, float]:
    """``c2 = min{(1-N^2)Pr, 2Pr/L^2, 1}``, ``c3 = max{Ra^2 Pr/(1-N^2), 2D^2, 2}``."""
    return p.c2, p.c3


def poincare_k1(domain: DomainSpec | None = None) -> float:
    """Exact Poincare constant ``beta_1^{-1/2}``; the lowest mode is ``(n, m) = (0, 1)``."""
    return 1.0 / np.pi


def check_gronwall_weak(
    ledger,
    p: PhysParams,
    tol: float = 1e-6,
    dt: float | None = None,
    dt_slack: float = 1.0,
    asserted: bool | None = None,
) -> InequalityReport:
    """Energy envelope ``y(s) <= e^{c3 s} y(0)`` and its integrated companions.

    The tolerance is ``tol + dt_slack * dt``; ``dt`` defaults to the smallest
    ledger spacing.  The envelope is asserted only when ``Ra >= 1`` (the
    absorption step of the velocity estimate needs it) unless overridden.
    """
    t = _column(ledger, "t")
    if t.size == 0:
        raise ValueError("empty ledger")
    y = _column(ledger, "y")
    alpha = _column(ledger, "y_strong")
    if dt is None:
        dt = float(np.min(np.diff(t))) if t.size > 1 else 0.0
    rel = tol + dt_slack * dt
    c2, c3 = derive_c2_c3(p)
    asserted = (p.Ra >= 1) if asserted is None else asserted
    s = t - t[0]
    y0 = y[0]
    env = np.exp(c3 * s) * y0
    report = InequalityReport("gronwall_weak", info=dict(c2=c2, c3=c3, tol=rel, rows=t.size))

    report.checks.append(_check("envelope", t, y - env * (1 + rel), env, asserted))
    integral = cumulative_trapezoid(alpha, t)
    bound = env / c2
    report.checks.append(_check("dissipation_integral", t, integral - bound * (1 + rel), bound, asserted))
    # y(s) + c2 int_0^s e^{c3(s-t)} alpha dt <= e^{c3 s} y(0)
    weighted = np.exp(c3 * s) * cumulative_trapezoid(np.exp(-c3 * s) * alpha, t)
    report.checks.append(_check("combined", t, y + c2 * weighted - env * (1 + rel), env, asserted))

    k1 = poincare_k1()
    c3k = max(k1**2 * p.Ra**2 * p.Pr / (1 - p.Nsq), 2 * p.D**2, 2.0)
    env_k = np.exp(c3k * s) * y0
    report.checks.append(
        _check("envelope_k1_corrected", t, y - env_k * (1 + rel), env_k, False, c3_corrected=c3k)
    )
    report.info["margin_min"] = float(np.min(env * (1 + rel) - y)) if y0 > 0 else 0.0
    return report


# --------------------------------------------------------------------------- #
# strong-solution differential inequalities
# --------------------------------------------------------------------------- #


def _integrated_gronwall(t, y, alpha, beta):
    """Right-hand side ``y0 exp(int beta) + int alpha exp(int_s^t beta)`` in log form."""
    B = cumulative_trapezoid(beta, t)
    J = cumulative_trapezoid(alpha * np.exp(-B), t)
    with np.errstate(divide="ignore"):
        return B + np.log(y[0] + J)


def _gronwall_residual(t, y, alpha_fn, beta_fn, C, tol):
    log_rhs = _integrated_gronwall(t, y, alpha_fn(C), beta_fn(C))
    with np.errstate(divide="ignore"):
        log_y = np.log(y)
    # residual > 0 where y exceeds the bound by more than tol (relative)
    return np.where(y > 0, log_y - log_rhs - np.log1p(tol), -np.inf)


def _fit_min_constant(t, y, alpha_fn, beta_fn, tol, c_max=1e8):
    """Smallest ``C >= 0`` making the integrated inequality hold at every row (bisection)."""
    ok = lambda C: np.all(_gronwall_residual(t, y, alpha_fn, beta_fn, C, tol) <= 0)  # noqa: E731
    if ok(0.0):
        return 0.0
    hi = 1e-6
    while not ok(hi):
        hi *= 2
        if hi > c_max:
            return np.inf
    lo = 0.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def chain_constants(p: PhysParams, k: dict) -> tuple[float, float]:
    """``C1``, ``C2`` obtained by carrying the Young's-inequality splits through
    with the supplied interpolation constants ``k = {'k4':..., 'k5':..., 'k7':...}``."""
    k4, k5, k7 = k["k4"], k["k5"], k["k7"]
    c1 = 729 / 32 * k7**4 / p.Pr**4
    c2 = 6 * p.Nsq**2
    c3 = 1.5 * p.Ra**2
    c4 = 27 * p.Lsq**3 * (k4 * k5) ** 4 / 4
    c5 = 4 * p.Nsq**2 * p.Lsq
    c7 = 54 * (k4 * k5) ** 4
    c8 = 2 * p.D**2
    c9 = 2.0
    c10 = 54 * p.D**4 * k5**8
    return 2 * p.Pr * max(c1, c2, c3, c4, c5), 2 * max(c7, c8, c9, c10)


def check_strong_differential(
    ledger,
    p: PhysParams,
    C1: float | None = None,
    C2: float | None = None,
    tol: float = 1e-6,
    asserted: bool = False,
) -> InequalityReport:
    """Integrated Gronwall bounds for ``||u||^2+||w||^2`` and ``||theta||^2``.

    The constants are never given numerically, so the report always carries
    the smallest constants consistent with the run (``C1_fit``, ``C2_fit``);
    when ``C1``/``C2`` are supplied their residuals are reported as well.
    """
    t = _column(ledger, "t")
    if t.size == 0:
        raise ValueError("empty ledger")
    ul2, uh1 = _column(ledger, "u_l2sq"), _column(ledger, "u_h1sq")
    wh1, wA = _column(ledger, "omega_h1sq"), _column(ledger, "omega_Asq")
    tl2, th1 = _column(ledger, "theta_l2sq"), _column(ledger, "theta_h1sq")

    y_uw = uh1 + wh1
    a_uw = lambda C: C * tl2  # noqa: E731
    b_uw = lambda C: C * (ul2 * uh1 + ul2 * wh1 + 1.0)  # noqa: E731
    a_th = lambda C: C * (wh1 + ul2)  # noqa: E731
    b_th = lambda C: C * (ul2 * uh1 + wh1 * wA)  # noqa: E731

    report = InequalityReport("strong_differential")
    C1_fit = _fit_min_constant(t, y_uw, a_uw, b_uw, tol) if y_uw[0] > 0 else 0.0
    C2_fit = _fit_min_constant(t, th1, a_th, b_th, tol) if th1[0] > 0 else 0.0
    report.info.update(C1_fit=C1_fit, C2_fit=C2_fit, rows=t.size)
    for label, y, a_fn, b_fn, C in (("u_omega", y_uw, a_uw, b_uw, C1), ("theta", th1, a_th, b_th, C2)):
        if C is None:
            continue
        if y[0] <= 0 and np.all(y <= 0):
            res = np.zeros_like(t)
        else:
            res = _gronwall_residual(t, y, a_fn, b_fn, C, tol)
            res = np.where(np.isfinite(res), res, -1.0)
        log_rhs = _integrated_gronwall(t, y, a_fn(C), b_fn(C)) if y[0] > 0 else np.full_like(t, -np.inf)
        chk = _check(f"integrated_{label}", t, res, np.ones_like(t), asserted, constant=C)
        chk.detail["log_envelope_final"] = float(log_rhs[-1])
        report.checks.append(chk)
    return report


# --------------------------------------------------------------------------- #
# interpolation constants
# --------------------------------------------------------------------------- #


@dataclass
class ConstantEstimate:
    name: str
    value: float
    trials: int
    maximizer: str
    coeffs: np.ndarray = field(repr=False)
    exact: float | None = None
    alignment: float | None = None


def _linf(g):
    return float(np.max(np.abs(g))) if g.ndim == 2 else float(np.max(np.sqrt(np.sum(g**2, axis=0))))


def _lp(grid, g, p):
    mag = np.abs(g) if g.ndim == 2 else np.sqrt(np.sum(g**2, axis=0))
    return grid.integrate(mag**p) ** (1.0 / p)


def _ratio_function(name: str, bases: Bases):
    """Map from a coefficient array to the defining ratio of constant ``name``."""
    sb, vb = bases.scalar, bases.vector
    grid = sb.grid

    def scalar(c):
        f = ScalarField(sb, c)
        l2, h1, a, _ = scalar_norms(f)
        return f, l2, h1, a

    if name == "k1":

        def r(c):
            _, l2, h1, _ = scalar(c)
            return l2 / h1

    elif name == "k2":

        def r(c):
            f, l2, h1, _ = scalar(c)
            return _lp(grid, f.grid(), 4) / np.sqrt(l2 * np.sqrt(l2**2 + h1**2))

    elif name == "k3":

        def r(c):
            f, l2, _, _ = scalar(c)
            return _linf(f.grid()) / np.sqrt(l2 * sobolev_norm_direct(f, 2))

    elif name == "k4":

        def r(c):
            f, l2, h1, _ = scalar(c)
            return _lp(grid, f.grid(), 4) / np.sqrt(l2 * h1)

    elif name == "k5":

        def r(c):
            f, _, h1, a = scalar(c)
            return _lp(grid, f.gradient(), 4) / np.sqrt(h1 * a)

    elif name == "k6":

        def r(c):
            f, l2, _, a = scalar(c)
            return _linf(f.grid()) / np.sqrt(l2 * a)

    elif name == "k7":

        def r(c):
            u = SolenoidalField(vb, c)
            l2, _, a = solenoidal_norms(u)
            return _linf(u.grid()) / np.sqrt(l2 * a)

    else:
        raise ValueError(f"unknown constant {name!r}; expected k1..k7")
    shape = vb.shape if name == "k7" else sb.shape
    return r, shape


def _hill_climb(ratio, c0, rng, iters):
    """(1+1) evolution strategy with 1/5th-rule step adaptation."""
    best, fbest = c0 / np.linalg.norm(c0), ratio(c0)
    sigma = 0.3
    for _ in range(iters):
        cand = best + sigma * rng.standard_normal(best.shape) / np.sqrt(best.size)
        nrm = np.linalg.norm(cand)
        if nrm == 0:
            continue
        cand = cand / nrm
        fc = ratio(cand)
        if np.isfinite(fc) and fc > fbest:
            best, fbest = cand, fc
            sigma *= 1.5
        else:
            sigma *= 0.9
        sigma = min(max(sigma, 1e-6), 1.0)
    return best, fbest


def estimate_constant(
    name: str,
    trials: int,
    res: Resolution,
    domain: DomainSpec | None = None,
    seed: int = 0,
    block: int = 25,
    climb_iters: int = 150,
) -> ConstantEstimate:
    """Empirical supremum of the defining ratio of ``name`` in ``k1..k7``.

    Candidates: every basis element, ``trials`` random band-limited fields
    (decay exponent cycling through 0, 1, 2, 3) and, for the basis elements
    and for every block of ``block`` consecutive trials, a hill climb from the
    block's best.  Blocks are fixed, so enlarging ``trials`` only adds
    candidates and the estimate never decreases.
    """
    domain = domain or DomainSpec()
    bases = Bases.build(domain, res)
    ratio, shape = _ratio_function(name, bases)
    beta = bases.vector.rayleigh if name == "k7" else bases.scalar.beta
    if name == "k7":
        beta = beta * np.einsum("njj->nj", bases.vector.mass)

    best_c, best_v, best_desc = None, -np.inf, ""

    def consider(c, v, desc):
        nonlocal best_c, best_v, best_desc
        if np.isfinite(v) and v > best_v:
            best_c, best_v, best_desc = c, v, desc

    # basis elements
    eye_best, eye_v = None, -np.inf
    for idx in np.ndindex(*shape):
        c = np.zeros(shape)
        c[idx] = 1.0
        v = ratio(c)
        consider(c, v, f"basis{tuple(int(i) for i in idx)}")
        if v > eye_v:
            eye_best, eye_v = c, v
    climb_rng = np.random.default_rng([seed, 0])
    c, v = _hill_climb(ratio, eye_best, climb_rng, climb_iters)
    consider(c, v, "climb(basis)")

    decays = (0.0, 1.0, 2.0, 3.0)
    trial_rng = np.random.default_rng([seed, 1])
    for start in range(0, trials, block):
        blk_best, blk_v = None, -np.inf
        for i in range(start, min(start + block, trials)):
            c = trial_rng.standard_normal(shape) * beta ** (-decays[i % 4] / 2)
            v = ratio(c)
            consider(c, v, f"trial{i}")
            if v > blk_v:
                blk_best, blk_v = c, v
        c, v = _hill_climb(ratio, blk_best, np.random.default_rng([seed, 2, start]), climb_iters)
        consider(c, v, f"climb(block{start // block})")

    est = ConstantEstimate(name, float(best_v), trials, best_desc, best_c / np.linalg.norm(best_c))
    if name == "k1":
        sb = bases.scalar
        est.exact = float(sb.beta1 ** -0.5)
        v1 = np.zeros(shape)
        v1.flat[sb.order[0]] = 1.0
        est.alignment = float(abs(np.sum(est.coeffs * v1)))
    return est


def estimate_constants(names=("k1", "k2", "k3", "k4", "k5", "k6", "k7"), trials=100, res=None, domain=None, seed=0):
    res = res or Resolution(4, 4)
    return {n: estimate_constant(n, trials, res, domain, seed) for n in names}


# --------------------------------------------------------------------------- #
# continuous dependence
# --------------------------------------------------------------------------- #


def fit_exponential_rate(t: np.ndarray, diff: np.ndarray, floor: np.ndarray | float) -> tuple[float, float]:
    """Least squares ``log diff = log C + K t`` over rows with ``diff > floor``."""
    mask = diff > floor
    if mask.sum() < 2:
        return float("nan"), float("nan")
    K, logC = np.polyfit(t[mask], np.log(diff[mask]), 1)
    return float(K), float(np.exp(logC))


def _difference_norms(traj_a, traj_b, bases: Bases):
    l2, h1 = [], []
    for sa, sb_ in zip(traj_a.snapshots, traj_b.snapshots):
        d = State(
            SolenoidalField(bases.vector, sb_[0] - sa[0]),
            ScalarField(bases.scalar, sb_[1] - sa[1]),
            ScalarField(bases.scalar, sb_[2] - sa[2]),
        )
        l2.append(np.sqrt(max(state_energy(d, "l2"), 0.0)))
        h1.append(np.sqrt(max(state_energy(d, "h1"), 0.0)))
    return np.array(l2), np.array(h1)


def _run(args):
    s0, p, cfg = args
    traj, _ = simulate(s0, p, cfg, keep_states=True)
    return traj


def continuous_dependence_experiment(s0: State, delta, p: PhysParams, cfg: StepperConfig, seed: int = 0) -> dict:
    """Paired runs from ``s0`` and ``s0 + delta * xi`` with ``xi`` a random unit H1 field.

    ``delta`` may be a single value or a sequence; all perturbed runs share
    the base run.  Differences are measured in H1 (``||.||`` summed over the
    three fields) and L2 at every ledger row.
    """
    deltas = [float(delta)] if np.isscalar(delta) else [float(d) for d in delta]
    if any(d < 0 for d in deltas):
        raise ValueError("delta must be >= 0")
    bases = s0.bases
    xi = random_state(bases, ROUGH_H1, ROUGH_H1, ROUGH_H1, seed=seed + 7919, energy=1.0, norm="h1")
    a0, w0, t0 = s0.coefficient_arrays()
    xa, xw, xt = xi.coefficient_arrays()
    starts = [s0] + [s0.with_coeffs(a0 + d * xa, w0 + d * xw, t0 + d * xt) for d in deltas]

    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        trajs = list(pool.map(_run, [(s, p, cfg) for s in starts]))
    base = trajs[0]
    t = np.asarray(base.times)
    base_h1 = np.array([np.sqrt(max(state_energy(State(
        SolenoidalField(bases.vector, snap[0]), ScalarField(bases.scalar, snap[1]), ScalarField(bases.scalar, snap[2])
    ), "h1"), 0.0)) for snap in base.snapshots])
    runs = []
    for d, traj in zip(deltas, trajs[1:]):
        l2, h1 = _difference_norms(base, traj, bases)
        floor = 1e3 * EPS * np.maximum(base_h1, EPS)
        K, C = fit_exponential_rate(t, h1, floor)
        runs.append(
            dict(
                delta=d,
                sup_h1=float(h1.max()),
                sup_l2=float(l2.max()),
                sup_ratio=float(h1.max() / d) if d > 0 else float("nan"),
                final_h1=float(h1[-1]),
                t_sup=float(t[int(np.argmax(h1))]),
                K=K,
                C=C / d if d > 0 and np.isfinite(C) else float("nan"),
                identical=bool(all(np.array_equal(x, y) for sa, sb_ in zip(base.snapshots, traj.snapshots) for x, y in zip(sa, sb_))),
            )
        )
    report = dict(
        runs=runs,
        times=t,
        NsqLsq=p.Nsq * p.Lsq,
        uniqueness_condition=bool(p.Nsq * p.Lsq < 1),
        seed=seed,
    )
    if len(runs) >= 2 and runs[1]["delta"] > 0:
        dratio = runs[0]["delta"] / runs[1]["delta"]
        report["linearity"] = (runs[0]["sup_h1"] / runs[1]["sup_h1"]) / dratio
        if runs[1]["final_h1"] > 0:
            report["linearity_final"] = (runs[0]["final_h1"] / runs[1]["final_h1"]) / dratio
    return report


# --------------------------------------------------------------------------- #
# Galerkin convergence
# --------------------------------------------------------------------------- #


def galerkin_convergence_study(initial, p: PhysParams, cfg: StepperConfig, resolutions, domain=None, seed=0) -> dict:
    """Sup-in-time differences of ``y`` between successive resolutions.

    ``initial`` is a callable ``bases -> State`` evaluated on the finest
    resolution (e.g. ``preset.initial_state``); coarser runs start from its
    exact L2 projection so the truncations are nested.
    """
    domain = domain or DomainSpec(p.l)
    resolutions = [r if isinstance(r, Resolution) else Resolution(r, r) for r in resolutions]
    finest = max(resolutions, key=lambda r: (r.Nx, r.My, r.Jy))
    fine_bases = Bases.build(domain, finest)
    s_fine = initial(fine_bases, seed=seed) if _takes_seed(initial) else initial(fine_bases)
    starts = []
    for r in resolutions:
        bases = fine_bases if r == finest else Bases.build(domain, r)
        starts.append(s_fine if r == finest else restrict_state(s_fine, bases))
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        ys = list(pool.map(lambda s0: simulate(s0, p, cfg)[1], starts))
    diffs = []
    for a, b in zip(ys[:-1], ys[1:]):
        if not np.array_equal(a["t"], b["t"]):
            raise RuntimeError("ledger times differ between resolutions")
        diffs.append(float(np.max(np.abs(a["y"] - b["y"]))))
    return dict(
        resolutions=[(r.Nx, r.My, r.Jy) for r in resolutions],
        sup_y_differences=diffs,
        sup_y=[float(led["y"].max()) for led in ys],
        strictly_decreasing=bool(all(d2 < d1 for d1, d2 in zip(diffs[:-1], diffs[1:]))),
        seed=seed,
    )


def _takes_seed(fn) -> bool:
    import inspect

    try:
        return "seed" in inspect.signature(fn).parameters
    except (TypeError, ValueError):
        return False


def report_lines(record: dict, prefix: str = "") -> list[str]:
    """Flatten an experiment dict into ``key=value`` records (arrays omitted)."""
    head = [f"{k}={_fmt(v)}" for k, v in record.items() if not isinstance(v, (list, dict, np.ndarray))]
    lines = [" ".join(([prefix] if prefix else []) + head)]
    for k, v in record.items():
        if isinstance(v, list) and v and isinstance(v[0], dict):
            for i, sub in enumerate(v):
                lines.append(" ".join(([prefix] if prefix else []) + [f"{k}_index={i}"] + [f"{a}={_fmt(b)}" for a, b in sub.items()]))
        elif isinstance(v, list):
            lines.append(" ".join(([prefix] if prefix else []) + [f"{k}={';'.join(_fmt(x) for x in v)}"]))
    return lines


__all__ = [
    "CheckResult",
    "ConstantEstimate",
    "InequalityReport",
    "check_gronwall_weak",
    "check_strong_differential",
    "chain_constants",
    "continuous_dependence_experiment",
    "derive_c2_c3",
    "estimate_constant",
    "estimate_constants",
    "fit_exponential_rate",
    "galerkin_convergence_study",
    "report_lines",
    "worker_count",
]
