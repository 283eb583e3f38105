"""Pseudospectral evaluation of the trilinear forms and quadratic couplings.

Fields are synthesised on the padded quadrature grid, multiplied pointwise
and projected back.  The ``x`` grid carries at least ``3 Nx`` points, so
triple products of band-limited fields are integrated exactly in ``x``; in
``y`` the Gauss-Legendre rule is sized to resolve the same products to
round-off.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral_core import (
    GridQuadrature,
    ScalarBasis,
    ScalarField,
    SolenoidalBasis,
    SolenoidalField,
    rot_scalar,
)

__all__ = [
    "DealiasPlan",
    "trilinear_bS",
    "trilinear_b",
    "advect_scalar",
    "advect_vector_load",
    "rotw_grad",
]


@dataclass(frozen=True, eq=False)
class DealiasPlan:
    """Padded grid sizes next to the spectral band they serve."""

    band_x: int
    band_y: int
    grid: GridQuadrature

    @classmethod
    def for_basis(cls, basis: ScalarBasis | SolenoidalBasis) -> "DealiasPlan":
        res = basis.res
        plan = cls(res.Nx, max(res.My, res.Jy), basis.grid)
        qx, qy = plan.grid.shape
        if qx < 3 * plan.band_x or qy < 2 * plan.band_y + 8:
            raise ValueError(f"quadrature grid {qx}x{qy} too small for band ({plan.band_x}, {plan.band_y})")
        return plan


def _check(*fields):
    grid = fields[0].basis.grid
    for f in fields[1:]:
        if f.basis.grid is not grid:
            raise ValueError("fields are defined on different bases")
    return grid


def trilinear_bS(u: SolenoidalField, v: SolenoidalField, w: SolenoidalField) -> float:
    """``b_S(u, v, w) = sum_ij int u_i d_i v_j w_j``."""
    grid = _check(u, v, w)
    ug, wg = u.grid(), w.grid()
    G = v.gradient()
    conv = ug[0] * G[0] + ug[1] * G[1]  # (u . grad) v, shape (2, qx, qy)
    return grid.inner(conv, wg)


def trilinear_b(u: SolenoidalField, f: ScalarField, g: ScalarField) -> float:
    """``b(u, f, g) = int (u . grad f) g``."""
    grid = _check(u, f, g)
    ug = u.grid()
    return grid.integrate((ug[0] * f.grid(1, 0) + ug[1] * f.grid(0, 1)) * g.grid())


def advect_grid(ug: np.ndarray, f: ScalarField) -> np.ndarray:
    return ug[0] * f.grid(1, 0) + ug[1] * f.grid(0, 1)


def advect_scalar(u: SolenoidalField, f: ScalarField) -> ScalarField:
    """Galerkin projection of ``u . grad f`` onto the scalar basis."""
    _check(u, f)
    return ScalarField(f.basis, f.basis.analyze(advect_grid(u.grid(), f)))


def advect_vector_load(u: SolenoidalField, ug: np.ndarray | None = None) -> np.ndarray:
    """Load vector ``b_S(u, u, U_nj)`` against every velocity basis function."""
    ug = u.grid() if ug is None else ug
    G = u.gradient()
    conv = ug[0] * G[0] + ug[1] * G[1]
    return u.basis.load(conv)


def rotw_grad(f_omega: ScalarField, f_theta: ScalarField) -> ScalarField:
    """Galerkin projection of ``rot omega . grad theta``."""
    _check(f_omega, f_theta)
    r = rot_scalar(f_omega)
    return ScalarField(f_theta.basis, f_theta.basis.analyze(advect_grid(r, f_theta)))
