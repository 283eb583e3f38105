"""Random band-limited initial data and named run presets.

Random coefficients are drawn per mode from a generator keyed on
``(seed, field, n, j)``, so the same mode receives the same draw at every
resolution.  Each coefficient is a standard normal scaled by ``beta^{-s/2}``
where ``beta`` is the mode's eigenvalue (scalars) or diagonal Rayleigh
quotient (velocity, each mode first scaled to unit L2 norm).  In two
dimensions ``s > 1`` puts the field in L2 and ``s > 2`` in H1; the presets
sit half an exponent above those thresholds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import Bases, PhysParams, State
from .spectral_core import ScalarField, SolenoidalField

_FIELD_TAG = {"u": 1, "omega": 2, "theta": 3}
_OFFSET = 1 << 20

# decay exponents: coefficients ~ beta^{-s/2}
ROUGH_L2 = 1.5
ROUGH_H1 = 2.5


def _draws(seed: int, tag: int, shape: tuple[int, int], Nx: int) -> np.ndarray:
    out = np.empty(shape)
    for i in range(shape[0]):
        for j in range(shape[1]):
            rng = np.random.default_rng([seed, tag, i - Nx + _OFFSET, j + 1])
            out[i, j] = rng.standard_normal()
    return out


def random_scalar(bases: Bases, s: float, seed: int, name: str = "theta") -> ScalarField:
    sb = bases.scalar
    c = _draws(seed, _FIELD_TAG[name], sb.shape, sb.res.Nx) * sb.beta ** (-s / 2)
    return ScalarField(sb, c)


def random_velocity(bases: Bases, s: float, seed: int) -> SolenoidalField:
    vb = bases.vector
    unit = 1.0 / np.sqrt(np.einsum("njj->nj", vb.mass))  # unit L2 norm per mode
    a = _draws(seed, _FIELD_TAG["u"], vb.shape, vb.res.Nx) * unit * vb.rayleigh ** (-s / 2)
    return SolenoidalField(vb, a)


def random_state(
    bases: Bases,
    s_u: float,
    s_omega: float,
    s_theta: float,
    seed: int,
    energy: float | None = 1.0,
    norm: str = "l2",
) -> State:
    """Random state; ``energy`` rescales ``|u|^2+|w|^2+|theta|^2`` (``norm='l2'``) or the H1 sum."""
    u = random_velocity(bases, s_u, seed)
    w = random_scalar(bases, s_omega, seed, "omega")
    th = random_scalar(bases, s_theta, seed, "theta")
    state = State(u, w, th)
    if energy is not None:
        total = state_energy(state, norm)
        if total > 0:
            scale = np.sqrt(energy / total)
            state = state.with_coeffs(*(scale * c for c in state.coefficient_arrays()))
    return state


def state_energy(state: State, norm: str = "l2") -> float:
    """``y`` (``norm='l2'``) or ``y_strong`` (``norm='h1'``) of a state."""
    a, w, th = state.coefficient_arrays()
    vb, sb = state.u.basis, state.omega.basis
    if norm == "l2":
        return float(np.einsum("nj,nji,ni->", a, vb.mass, a) + np.sum(w**2) + np.sum(th**2))
    if norm == "h1":
        return float(np.einsum("nj,nji,ni->", a, vb.stiffness, a) + np.sum(sb.beta * (w**2 + th**2)))
    raise ValueError(f"unknown norm {norm!r}")


def restrict_state(state: State, coarse: Bases) -> State:
    """L2 projection of a state onto a coarser nested truncation.

    Scalars are truncated (orthonormal basis).  Velocity blocks solve the
    coarse Gram system against the fine Gram matrix; beam profiles are the
    same functions at every resolution, so this is the exact projection.
    """
    fine_res, cres = state.omega.basis.res, coarse.res
    if cres.Nx > fine_res.Nx or cres.My > fine_res.My or cres.Jy > fine_res.Jy:
        raise ValueError("target resolution is not coarser than the state's")
    a, w, th = state.coefficient_arrays()
    off = fine_res.Nx - cres.Nx
    xs = slice(off, off + cres.n_x_modes)
    w_c = w[xs, : cres.My]
    th_c = th[xs, : cres.My]
    M = state.u.basis.mass[xs]
    J = cres.Jy
    rhs = np.einsum("nji,ni->nj", M[:, :J, :], a[xs])
    a_c = np.linalg.solve(M[:, :J, :J], rhs[..., None])[..., 0]
    return State(
        SolenoidalField(coarse.vector, a_c),
        ScalarField(coarse.scalar, w_c),
        ScalarField(coarse.scalar, th_c),
        t=state.t,
    )


@dataclass(frozen=True)
class Preset:
    """Named parameter set plus initial-data recipe.

    ``decay`` holds the ``(s_u, s_omega, s_theta)`` exponents, ``None`` for
    zero data.  ``assert_monitors`` marks presets whose weak Gronwall monitor
    is a hard check.
    """

    name: str
    params: dict
    decay: tuple | None
    assert_monitors: bool
    description: str

    def physparams(self, l: float = 1.0, **overrides) -> PhysParams:
        return PhysParams(**{**self.params, "l": l, **overrides})

    def initial_state(self, bases: Bases, seed: int = 0, energy: float = 1.0) -> State:
        if self.decay is None:
            return State.zero(bases)
        return random_state(bases, *self.decay, seed=seed, energy=energy)


SMALL_RA = dict(Pr=1.0, Ra=1.0, Nsq=0.5, Lsq=1.0, D=1.0)

PRESETS = {
    "conduction": Preset("conduction", SMALL_RA, None, True, "zero perturbation: pure conduction state"),
    "smallRa": Preset(
        "smallRa", SMALL_RA, (ROUGH_L2,) * 3, True, "L2-rough random data of unit energy at Ra=1"
    ),
    "H1": Preset("H1", SMALL_RA, (ROUGH_H1,) * 3, True, "H1 random data of unit L2 energy at Ra=1"),
    "mixed-L2H1": Preset(
        "mixed-L2H1",
        SMALL_RA,
        (ROUGH_L2, ROUGH_H1, ROUGH_L2),
        False,
        "u0, theta0 L2-rough and omega0 in H1 (N^2 L^2 = 0.5 < 1); monitors report only",
    ),
}


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; available: {sorted(PRESETS)}") from None
