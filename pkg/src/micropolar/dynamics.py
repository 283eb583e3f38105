"""Galerkin ODE system for the perturbation equations and its IMEX integration.

With ``theta = T - (1 - y)`` the unknowns ``(u, omega, theta)`` all vanish on
the walls.  The semi-discrete system, after multiplying the velocity equation
by ``Pr`` and eliminating pressure by projection, reads

    M du/dt   = -b_S(u, u, .) - Pr K u + 2 N^2 Pr (rot omega, .) + Ra Pr (theta e_2, .)
    domega/dt = -Pr (A/L^2 + 4 N^2) omega - P(u . grad omega) + 2 N^2 Pr P(rot u)
    dtheta/dt = -A theta - P(u . grad theta) + D P(rot omega . grad theta)
                + D d omega/dx + P(u_2)

The symmetric dissipative parts are treated implicitly, everything else
explicitly (``imex_euler`` or ``cnab2``).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .ledger import EnergyLedger, ledger_row
from .nonlinear import advect_grid
from .spectral_core import (
    DomainSpec,
    Resolution,
    ScalarBasis,
    ScalarField,
    SolenoidalBasis,
    SolenoidalField,
    build_scalar_basis,
    build_solenoidal_basis,
)

log = logging.getLogger(__name__)

SCHEMES = ("imex_euler", "cnab2")


class NumericalInstability(RuntimeError):
    """Raised when a term of the right-hand side stops being finite."""


class CFLViolation(ValueError):
    """Raised when the time step exceeds the advective limit."""


@dataclass(frozen=True)
class PhysParams:
    """Nondimensional numbers of the thermomicropolar system.

    ``strict=False`` skips the physical-range checks so degenerate test
    problems (e.g. ``Nsq = 0`` pure diffusion) can be built.
    """

    Pr: float
    Ra: float
    Nsq: float
    Lsq: float
    D: float
    l: float = 1.0
    strict: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        if self.strict:
            for problem in self.violations():
                raise ValueError(problem)

    def violations(self) -> list[str]:
        out = []
        for name in ("Pr", "Ra", "Lsq", "D", "l"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                out.append(f"parameter {name}={v} violates {name} > 0")
        if not (0 < self.Nsq < 1):
            out.append(f"parameter Nsq={self.Nsq} violates 0 < N² < 1")
        return out

    @property
    def c2(self) -> float:
        return min((1 - self.Nsq) * self.Pr, 2 * self.Pr / self.Lsq, 1.0)

    @property
    def c3(self) -> float:
        return max(self.Ra**2 * self.Pr / (1 - self.Nsq), 2 * self.D**2, 2.0)

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in ("Pr", "Ra", "Nsq", "Lsq", "D", "l")}


@dataclass(frozen=True)
class StepperConfig:
    dt: float
    scheme: str = "imex_euler"
    t_end: float = 1.0
    ledger_stride: int = 1
    cfl: float = 0.5

    def __post_init__(self):
        if not (np.isfinite(self.dt) and self.dt > 0):
            raise ValueError(f"time step must satisfy dt > 0, got {self.dt}")
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; choose from {SCHEMES}")
        if self.t_end < 0:
            raise ValueError("t_end must be >= 0")
        if int(self.ledger_stride) != self.ledger_stride or self.ledger_stride < 1:
            raise ValueError("ledger_stride must be a positive integer")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))


@dataclass(frozen=True, eq=False)
class Bases:
    scalar: ScalarBasis
    vector: SolenoidalBasis

    @classmethod
    def build(cls, domain: DomainSpec, res: Resolution) -> "Bases":
        sb = build_scalar_basis(domain, res)
        return cls(sb, build_solenoidal_basis(sb))

    @property
    def domain(self) -> DomainSpec:
        return self.scalar.domain

    @property
    def res(self) -> Resolution:
        return self.scalar.res


@dataclass
class State:
    """Velocity, microrotation, temperature perturbation and clock.

    ``history`` carries the explicit terms of the previous step for
    multistep schemes; ``steps`` counts completed steps.
    """

    u: SolenoidalField
    omega: ScalarField
    theta: ScalarField
    t: float = 0.0
    steps: int = 0
    history: tuple | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.omega.basis is not self.theta.basis or self.u.basis.scalar is not self.omega.basis:
            raise ValueError("state fields live on inconsistent bases")

    @property
    def bases(self) -> Bases:
        return Bases(self.omega.basis, self.u.basis)

    @classmethod
    def zero(cls, bases: Bases, t: float = 0.0) -> "State":
        return cls(bases.vector.zeros(), bases.scalar.zeros(), bases.scalar.zeros(), t)

    def coefficient_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.u.coeffs, self.omega.coeffs, self.theta.coeffs

    def with_coeffs(self, a, w, th, **changes) -> "State":
        return replace(
            self,
            u=SolenoidalField(self.u.basis, a),
            omega=ScalarField(self.omega.basis, w),
            theta=ScalarField(self.theta.basis, th),
            **changes,
        )


# --------------------------------------------------------------------------- #
# temperature lift
# --------------------------------------------------------------------------- #


def lift_temperature(T: np.ndarray, basis: ScalarBasis, return_residual: bool = False):
    """``theta = P(T - (1 - y))``; optionally also the max-norm projection residual."""
    g = T - (1.0 - basis.grid.y)[None, :]
    theta = ScalarField(basis, basis.analyze(g))
    if return_residual:
        return theta, float(np.max(np.abs(theta.grid() - g)))
    return theta


def unlift(theta: ScalarField) -> np.ndarray:
    return theta.grid() + (1.0 - theta.basis.grid.y)[None, :]


# --------------------------------------------------------------------------- #
# right-hand side
# --------------------------------------------------------------------------- #


def dx_coeffs(f: np.ndarray, basis: ScalarBasis) -> np.ndarray:
    """Coefficients of ``df/dx``: ``d/dx e_n = k_n e_{-n}``."""
    return -basis.k[:, None] * f[::-1]


def explicit_terms(s: State, p: PhysParams, nonlinear: bool = True):
    """Explicit parts ``(F_u load, F_omega, F_theta)`` plus the advecting speed.

    ``F_u`` is a load vector (left-multiplied by ``M^{-1}`` later); the scalar
    parts are Galerkin coefficients.
    """
    with np.errstate(over="ignore", invalid="ignore"):
        return _explicit_terms(s, p, nonlinear)


def _explicit_terms(s: State, p: PhysParams, nonlinear: bool):
    vb, sb = s.u.basis, s.omega.basis
    a, w, th = s.coefficient_arrays()
    ug = s.u.grid()
    du = s.u.gradient()
    wx, wy = sb.synthesize(w, 1, 0), sb.synthesize(w, 0, 1)
    rot_w = np.stack([wy, -wx])
    theta_g = sb.synthesize(th)
    rot_u = du[0, 1] - du[1, 0]

    Fu = 2 * p.Nsq * p.Pr * vb.load(rot_w) + p.Ra * p.Pr * vb.load(np.stack([np.zeros_like(theta_g), theta_g]))
    Fw = 2 * p.Nsq * p.Pr * sb.analyze(rot_u)
    Ft = p.D * dx_coeffs(w, sb) + sb.analyze(ug[1])
    terms = {"rot_coupling_u": Fu, "rot_coupling_omega": Fw, "linear_theta": Ft}
    if nonlinear:
        conv = ug[0] * du[0] + ug[1] * du[1]
        Nu = vb.load(conv)
        tx, ty = sb.synthesize(th, 1, 0), sb.synthesize(th, 0, 1)
        Nw = sb.analyze(ug[0] * wx + ug[1] * wy)
        Nt = sb.analyze(ug[0] * tx + ug[1] * ty - p.D * (rot_w[0] * tx + rot_w[1] * ty))
        terms.update(advect_u=Nu, advect_omega=Nw, advect_theta=Nt)
        Fu = Fu - Nu
        Fw = Fw - Nw
        Ft = Ft - Nt
    for name, val in terms.items():
        if not np.all(np.isfinite(val)):
            raise NumericalInstability(f"non-finite value in term '{name}' at t={s.t!r}")
    speed = max(float(np.max(np.abs(ug))) if ug.size else 0.0, p.D * float(np.max(np.abs(rot_w))))
    return (Fu, Fw, Ft), speed


def implicit_rates(s_or_bases, p: PhysParams):
    """Diagonal implicit rates for omega and theta."""
    sb = s_or_bases.scalar if isinstance(s_or_bases, Bases) else s_or_bases.omega.basis
    return p.Pr * (sb.beta / p.Lsq + 4 * p.Nsq), sb.beta


def assemble_rhs(s: State, p: PhysParams, nonlinear: bool = True):
    """Time derivatives of the coefficient arrays ``(du, domega, dtheta)``."""
    (Fu, Fw, Ft), _ = explicit_terms(s, p, nonlinear)
    vb = s.u.basis
    a, w, th = s.coefficient_arrays()
    lam_w, lam_t = implicit_rates(s, p)
    Ka = np.einsum("nji,ni->nj", vb.stiffness, a)
    du = vb.solve_mass(Fu - p.Pr * Ka)
    return du, Fw - lam_w * w, Ft - lam_t * th


def max_stable_dt(s: State, p: PhysParams, cfl: float = 0.5, speed: float | None = None) -> float:
    """Advective limit ``cfl * h / U`` with ``h`` the finest resolved length.

    ``U`` covers both the fluid velocity and the ``D rot omega`` field that
    advects temperature.  Diffusion is implicit, so no parabolic limit applies.
    """
    if speed is None:
        _, speed = explicit_terms(s, p, nonlinear=True)
    res = s.omega.basis.res
    h = min(s.omega.basis.domain.l / (2 * res.Nx), 1.0 / max(res.My, res.Jy))
    return np.inf if speed == 0 else cfl * h / speed


@lru_cache(maxsize=32)
def _velocity_solver(vb: SolenoidalBasis, c_impl: float, c_expl: float):
    """Inverse of ``M + c_impl K`` and the explicit matrix ``M - c_expl K``, per wavenumber."""
    lhs = vb.mass + c_impl * vb.stiffness
    return np.linalg.inv(lhs), vb.mass - c_expl * vb.stiffness


def step(s: State, p: PhysParams, cfg: StepperConfig, nonlinear: bool = True, check_cfl: bool = True) -> State:
    """Advance one IMEX step; deterministic for given inputs."""
    F, speed = explicit_terms(s, p, nonlinear)
    if check_cfl:
        limit = max_stable_dt(s, p, cfg.cfl, speed)
        if cfg.dt > limit:
            raise CFLViolation(f"dt={cfg.dt} exceeds advective limit {limit:.3e} at t={s.t!r}")
    dt = cfg.dt
    vb = s.u.basis
    a, w, th = s.coefficient_arrays()
    lam_w, lam_t = implicit_rates(s, p)
    Fu, Fw, Ft = F
    if cfg.scheme == "imex_euler":
        inv, rhs_mat = _velocity_solver(vb, dt * p.Pr, 0.0)
        a_new = np.einsum("nji,ni->nj", inv, np.einsum("nji,ni->nj", rhs_mat, a) + dt * Fu)
        w_new = (w + dt * Fw) / (1 + dt * lam_w)
        th_new = (th + dt * Ft) / (1 + dt * lam_t)
    else:
        Gu, Gw, Gt = F if s.history is None else s.history
        Eu, Ew, Et = 1.5 * Fu - 0.5 * Gu, 1.5 * Fw - 0.5 * Gw, 1.5 * Ft - 0.5 * Gt
        half = 0.5 * dt
        inv, rhs_mat = _velocity_solver(vb, half * p.Pr, half * p.Pr)
        a_new = np.einsum("nji,ni->nj", inv, np.einsum("nji,ni->nj", rhs_mat, a) + dt * Eu)
        w_new = ((1 - half * lam_w) * w + dt * Ew) / (1 + half * lam_w)
        th_new = ((1 - half * lam_t) * th + dt * Et) / (1 + half * lam_t)
    for name, arr in (("u", a_new), ("omega", w_new), ("theta", th_new)):
        if not np.all(np.isfinite(arr)):
            raise NumericalInstability(f"field {name} became non-finite at t={s.t + dt!r}")
    history = F if cfg.scheme == "cnab2" else None
    return s.with_coeffs(a_new, w_new, th_new, t=s.t + dt, steps=s.steps + 1, history=history)


@dataclass
class Trajectory:
    """Final state plus optional snapshots taken at ledger rows."""

    final: State
    times: list[float] = field(default_factory=list)
    snapshots: list[tuple] = field(default_factory=list)


def simulate(
    s0: State,
    p: PhysParams,
    cfg: StepperConfig,
    keep_states: bool = False,
    nonlinear: bool = True,
    ledger: EnergyLedger | None = None,
    check_cfl: bool = True,
) -> tuple[Trajectory, EnergyLedger]:
    """Integrate from ``s0.t`` to ``cfg.t_end`` emitting ledger rows every ``ledger_stride`` steps.

    Step counting continues from ``s0.steps`` so a resumed run emits the same
    rows as an uninterrupted one.
    """
    ledger = EnergyLedger() if ledger is None else ledger
    traj = Trajectory(final=s0)
    n_total = cfg.n_steps

    def emit(s):
        if not ledger.rows or s.t > ledger.rows[-1][0]:
            with np.errstate(over="ignore", invalid="ignore"):
                row = ledger_row(s)
            if not np.all(np.isfinite(row)):
                raise NumericalInstability(f"ledger norms became non-finite at t={s.t!r}")
            ledger.append(row)
        if keep_states:
            traj.times.append(s.t)
            traj.snapshots.append(tuple(c.copy() for c in s.coefficient_arrays()))

    s = s0
    if s.steps % cfg.ledger_stride == 0:
        emit(s)
    while s.steps < n_total:
        s = step(s, p, cfg, nonlinear=nonlinear, check_cfl=check_cfl)
        if s.steps % cfg.ledger_stride == 0 or s.steps == n_total:
            emit(s)
    traj.final = s
    log.debug("simulate finished at t=%s after %d steps", s.t, s.steps)
    return traj, ledger
