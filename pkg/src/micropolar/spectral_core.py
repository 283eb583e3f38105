"""Bases, quadrature, differential operators and projectors on the periodic channel.

The domain is ``(0, l) x (0, 1)``, periodic in ``x`` and bounded by walls at
``y = 0`` and ``y = 1``.  Scalars (microrotation, temperature perturbation)
live in the Dirichlet Laplacian eigenbasis

    v_nm(x, y) = sqrt(2/l) [sin(k_n x) + cos(k_n x)] sin(m pi y),  k_n = 2 n pi / l,

and velocities in a divergence-free basis built from a streamfunction
``psi = e_n(x) phi_j(y)`` with clamped-beam profiles ``phi_j`` (``k_n != 0``)
plus the mean-flow modes ``(sin(j pi y), 0)`` at ``k_n = 0``.

All transforms are dense matrix products against precomputed tables on the
quadrature grid; the grid is large enough that the products appearing in the
Galerkin projections are integrated to round-off.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import comb

import numpy as np
from scipy.optimize import bisect

__all__ = [
    "DomainSpec",
    "Resolution",
    "GridQuadrature",
    "ScalarBasis",
    "ScalarField",
    "SolenoidalBasis",
    "SolenoidalField",
    "beam_roots",
    "beam_profile",
    "build_scalar_basis",
    "build_solenoidal_basis",
    "apply_A",
    "apply_A_frac",
    "scalar_norms",
    "solenoidal_norms",
    "rot_scalar",
    "rot_vector",
    "leray_project",
    "apply_stokes",
    "basis_manifest",
]

SUPPORTED_POWERS = (Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2), Fraction(3))


# --------------------------------------------------------------------------- #
# configuration types
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class DomainSpec:
    """Horizontal period ``l``; the wall-normal extent is fixed to 1."""

    l: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.l) and self.l > 0):
            raise ValueError(f"domain period must satisfy l > 0, got l={self.l}")


@dataclass(frozen=True)
class Resolution:
    """Galerkin truncation and quadrature sizes.

    ``n`` runs over ``-Nx..Nx``, scalar wall-normal modes over ``1..My`` and
    streamfunction modes over ``1..Jy``.  Quadrature sizes default to values
    that integrate the triple products of the nonlinear terms to round-off.
    """

    Nx: int
    My: int
    Jy: int | None = None
    quad_x: int | None = None
    quad_y: int | None = None

    def __post_init__(self):
        if self.Jy is None:
            object.__setattr__(self, "Jy", self.My)
        if self.quad_x is None:
            object.__setattr__(self, "quad_x", 3 * self.Nx + 2)
        if self.quad_y is None:
            object.__setattr__(self, "quad_y", 3 * max(self.My, self.Jy) + 16)
        for name in ("Nx", "My", "Jy", "quad_x", "quad_y"):
            value = getattr(self, name)
            if int(value) != value or value <= 0:
                raise ValueError(f"resolution field {name} must be a positive integer, got {value}")
        if self.quad_x < 3 * self.Nx:
            raise ValueError(f"quad_x={self.quad_x} must be >= 3*Nx={3 * self.Nx}")
        if self.quad_y < 2 * max(self.My, self.Jy) + 8:
            raise ValueError(
                f"quad_y={self.quad_y} must be >= 2*max(My, Jy)+8={2 * max(self.My, self.Jy) + 8}"
            )

    @property
    def n_x_modes(self) -> int:
        return 2 * self.Nx + 1


# --------------------------------------------------------------------------- #
# one-dimensional building blocks
# --------------------------------------------------------------------------- #


def _cas_derivative(k: np.ndarray, x: np.ndarray, order: int) -> np.ndarray:
    """d^order/dx^order of cas(k x) = cos(k x) + sin(k x), tabulated as (len(x), len(k))."""
    phase = np.outer(x, k) + order * np.pi / 2
    return k[None, :] ** order * (np.cos(phase) + np.sin(phase))


def _sine_derivative(m: np.ndarray, y: np.ndarray, order: int) -> np.ndarray:
    """d^order/dy^order of sqrt(2) sin(m pi y), tabulated as (len(y), len(m))."""
    km = m * np.pi
    return np.sqrt(2.0) * km[None, :] ** order * np.sin(np.outer(y, km) + order * np.pi / 2)


def beam_roots(count: int, tol: float = 1e-15) -> np.ndarray:
    """First ``count`` positive roots of ``cos(lam) cosh(lam) = 1``.

    The equation is rewritten as ``cos(lam) - 1/cosh(lam) = 0`` which stays
    O(1) for large ``lam``; root ``j`` is bracketed in ``(j + 1/2) pi +- pi/4``.
    """

    def f(lam):
        return np.cos(lam) - 1.0 / np.cosh(lam)

    roots = np.empty(count)
    for j in range(1, count + 1):
        centre = (j + 0.5) * np.pi
        roots[j - 1] = bisect(f, centre - np.pi / 4, centre + np.pi / 4, xtol=tol, rtol=4 * np.finfo(float).eps)
    return roots


def _beam_shape(lam: float, y: np.ndarray, order: int) -> np.ndarray:
    """Unnormalised clamped-clamped beam mode and its derivatives.

    phi = [cosh z - s sinh z] - [cos z - s sin z],  z = lam y,
    s = (cosh lam - cos lam) / (sinh lam - sin lam).

    The hyperbolic part is evaluated as ``tau exp(lam (y-1)) + (1+s)/2 exp(-lam y)``
    so nothing overflows or cancels for large ``lam``.
    """
    em = np.exp(-lam)
    denom = 1.0 - em * em - 2.0 * np.sin(lam) * em
    s = (1.0 + em * em - 2.0 * np.cos(lam) * em) / denom
    tau = (np.cos(lam) - np.sin(lam) - em) / denom  # (1 - s) e^lam / 2
    z = lam * y
    hyper = tau * np.exp(lam * (y - 1.0)) + (-1.0) ** order * 0.5 * (1.0 + s) * np.exp(-z)
    shift = order * np.pi / 2
    trig = np.cos(z + shift) - s * np.sin(z + shift)
    return lam**order * (hyper - trig)


def beam_profile(lams: np.ndarray, y: np.ndarray, order: int, norms: np.ndarray | None = None) -> np.ndarray:
    """Tabulate the ``order``-th derivative of L2-normalised beam modes, shape (len(y), len(lams))."""
    table = np.stack([_beam_shape(lam, y, order) for lam in lams], axis=1)
    if norms is not None:
        table = table / norms[None, :]
    return table


def _beam_norms(lams: np.ndarray) -> np.ndarray:
    # per-root Gauss-Legendre rule, independent of the truncation so that the
    # same mode is normalised identically at every resolution
    norms = np.empty(lams.size)
    for i, lam in enumerate(lams):
        t, w = np.polynomial.legendre.leggauss(int(2 * lam / np.pi) + 64)
        y = 0.5 * (t + 1.0)
        norms[i] = np.sqrt(0.5 * w @ _beam_shape(lam, y, 0) ** 2)
    return norms


# --------------------------------------------------------------------------- #
# quadrature
# --------------------------------------------------------------------------- #


@dataclass(frozen=True, eq=False)
class GridQuadrature:
    """Tensor grid: uniform trapezoid in ``x`` and Gauss-Legendre in ``y``."""

    x: np.ndarray
    y: np.ndarray
    wx: np.ndarray
    wy: np.ndarray

    @classmethod
    def build(cls, domain: DomainSpec, res: Resolution) -> "GridQuadrature":
        x = domain.l * np.arange(res.quad_x) / res.quad_x
        wx = np.full(res.quad_x, domain.l / res.quad_x)
        t, w = np.polynomial.legendre.leggauss(res.quad_y)
        return cls(x=x, y=0.5 * (t + 1.0), wx=wx, wy=0.5 * w)

    @cached_property
    def weights(self) -> np.ndarray:
        return np.outer(self.wx, self.wy)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.x.size, self.y.size)

    def integrate(self, g: np.ndarray) -> float:
        # fixed-order reduction: weighted row sums then a single dot
        return float(np.sum(self.wx @ (g * self.wy[None, :])))

    def inner(self, f: np.ndarray, g: np.ndarray) -> float:
        """L2 inner product of two grid functions (vector fields: leading axis of size 2)."""
        if f.ndim == 3:
            return self.integrate(f[0] * g[0] + f[1] * g[1])
        return self.integrate(f * g)


# --------------------------------------------------------------------------- #
# scalar basis
# --------------------------------------------------------------------------- #


@dataclass(eq=False)
class ScalarBasis:
    """Dirichlet-Laplacian eigenbasis ``v_nm`` with precomputed grid tables.

    Coefficient arrays are indexed ``[n + Nx, m - 1]``.  ``order`` lists the
    flat indices sorted by eigenvalue (ties broken by ``|n|``, sign of ``n``,
    then ``m``), i.e. the renumbering ``v_1, v_2, ...``.
    """

    domain: DomainSpec
    res: Resolution
    grid: GridQuadrature
    n: np.ndarray
    m: np.ndarray
    k: np.ndarray
    beta: np.ndarray
    order: np.ndarray
    X: list = field(repr=False)
    S: list = field(repr=False)

    @property
    def shape(self) -> tuple[int, int]:
        return self.beta.shape

    @property
    def beta1(self) -> float:
        return float(self.beta.flat[self.order[0]])

    def mode_index(self, n: int, m: int) -> tuple[int, int]:
        if abs(n) > self.res.Nx or not 1 <= m <= self.res.My:
            raise IndexError(f"mode (n={n}, m={m}) outside the truncation")
        return (n + self.res.Nx, m - 1)

    def mode(self, n: int, m: int) -> "ScalarField":
        c = np.zeros(self.shape)
        c[self.mode_index(n, m)] = 1.0
        return ScalarField(self, c)

    def zeros(self) -> "ScalarField":
        return ScalarField(self, np.zeros(self.shape))

    def sorted_modes(self) -> list[tuple[int, int, float]]:
        nn, mm = np.meshgrid(self.n, self.m, indexing="ij")
        return [(int(nn.flat[i]), int(mm.flat[i]), float(self.beta.flat[i])) for i in self.order]

    def synthesize(self, coeffs: np.ndarray, dx: int = 0, dy: int = 0) -> np.ndarray:
        """Grid values of ``d^dx/dx^dx d^dy/dy^dy`` of the expansion."""
        return self.X[dx] @ coeffs @ self.S[dy].T

    def analyze(self, g: np.ndarray) -> np.ndarray:
        """Galerkin (L2) projection of a grid function onto the basis."""
        return self.X[0].T @ (g * self.grid.weights) @ self.S[0]


def build_scalar_basis(domain: DomainSpec, res: Resolution, grid: GridQuadrature | None = None) -> ScalarBasis:
    grid = grid if grid is not None else GridQuadrature.build(domain, res)
    n = np.arange(-res.Nx, res.Nx + 1)
    m = np.arange(1, res.My + 1)
    k = 2.0 * np.pi * n / domain.l
    beta = k[:, None] ** 2 + (np.pi * m[None, :]) ** 2
    nn, mm = np.meshgrid(n, m, indexing="ij")
    order = np.lexsort((mm.ravel(), np.sign(nn).ravel(), np.abs(nn).ravel(), beta.ravel()))
    # four derivative orders in each direction cover the H3 oracle and the rot/grad tables
    X = [_cas_derivative(k, grid.x, d) / np.sqrt(domain.l) for d in range(5)]
    S = [_sine_derivative(m, grid.y, d) for d in range(5)]
    return ScalarBasis(domain, res, grid, n, m, k, beta, order, X, S)


@dataclass
class ScalarField:
    basis: ScalarBasis
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        if self.coeffs.shape != self.basis.shape:
            raise ValueError(f"coefficient shape {self.coeffs.shape} does not match basis {self.basis.shape}")
        if not np.all(np.isfinite(self.coeffs)):
            raise ValueError("scalar field has non-finite coefficients")

    def __add__(self, other):
        _same_basis(self, other)
        return ScalarField(self.basis, self.coeffs + other.coeffs)

    def __sub__(self, other):
        _same_basis(self, other)
        return ScalarField(self.basis, self.coeffs - other.coeffs)

    def __mul__(self, a: float):
        return ScalarField(self.basis, a * self.coeffs)

    __rmul__ = __mul__

    def inner(self, other: "ScalarField") -> float:
        _same_basis(self, other)
        return float(np.dot(self.coeffs.ravel(), other.coeffs.ravel()))

    def grid(self, dx: int = 0, dy: int = 0) -> np.ndarray:
        return self.basis.synthesize(self.coeffs, dx, dy)

    def gradient(self) -> np.ndarray:
        return np.stack([self.grid(1, 0), self.grid(0, 1)])


def _same_basis(a, b):
    if a.basis is not b.basis:
        raise ValueError("fields live on different bases")


def apply_A(f: ScalarField) -> ScalarField:
    """Dirichlet ``-Laplacian``: multiply each coefficient by its eigenvalue."""
    return ScalarField(f.basis, f.basis.beta * f.coeffs)


def apply_A_frac(f: ScalarField, p) -> ScalarField:
    """Fractional power ``A^p`` for ``p`` in {1/2, 1, 3/2, 2, 3}."""
    p = Fraction(p).limit_denominator(8)
    if p not in SUPPORTED_POWERS:
        raise ValueError(f"unsupported exponent {p}; expected one of {[str(q) for q in SUPPORTED_POWERS]}")
    return ScalarField(f.basis, f.basis.beta ** float(p) * f.coeffs)


def scalar_norms(f: ScalarField) -> tuple[float, float, float, float]:
    """``(|f|, ||f||, |Af|, |A^{3/2} f|)`` from Parseval in the eigenbasis."""
    c2 = f.coeffs**2
    b = f.basis.beta
    return (
        float(np.sqrt(c2.sum())),
        float(np.sqrt((b * c2).sum())),
        float(np.sqrt((b**2 * c2).sum())),
        float(np.sqrt((b**3 * c2).sum())),
    )


def sobolev_norm_direct(f: ScalarField, order: int) -> float:
    """Full ``H^order`` norm: sum of L2 norms squared of every derivative up to ``order``.

    Evaluated by differentiating the basis tables exactly and integrating on
    the grid; independent of the eigenvalue bookkeeping.
    """
    grid = f.basis.grid
    total = 0.0
    for d in range(order + 1):
        for dx in range(d + 1):
            dy = d - dx
            # mixed partials appear binom(d, dx) times among the multi-indices
            mult = comb(d, dx)
            g = f.grid(dx, dy)
            total += mult * grid.integrate(g * g)
    return float(np.sqrt(total))


# --------------------------------------------------------------------------- #
# solenoidal basis
# --------------------------------------------------------------------------- #


@dataclass(eq=False)
class SolenoidalBasis:
    """Divergence-free, no-slip velocity basis, block-diagonal in ``n``.

    Mode ``(n, j)`` with ``n != 0`` has streamfunction ``e_n(x) phi_j(y)`` and
    velocity ``(e_n phi_j', -e_n' phi_j)``; at ``n = 0`` it is the mean flow
    ``(e_0 sqrt(2) sin(j pi y), 0)``.  ``U1[d][n, j, q]`` holds the d-th
    ``y``-derivative of the ``y``-profile of ``u_1``; ``U2`` likewise for the
    profile multiplying ``-e_n'(x)`` in ``u_2``.
    """

    domain: DomainSpec
    res: Resolution
    grid: GridQuadrature
    scalar: ScalarBasis
    lams: np.ndarray
    k: np.ndarray
    U1: list = field(repr=False)
    U2: list = field(repr=False)
    mass: np.ndarray = field(repr=False)
    stiffness: np.ndarray = field(repr=False)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.res.n_x_modes, self.res.Jy)

    @cached_property
    def stokes_matrix(self) -> np.ndarray:
        """Per-wavenumber ``M^{-1} K``, the coefficient action of ``A_S``."""
        return np.linalg.solve(self.mass, self.stiffness)

    @cached_property
    def rayleigh(self) -> np.ndarray:
        """Diagonal Rayleigh quotients ``K_jj / M_jj``; used to scale random fields."""
        return np.einsum("njj->nj", self.stiffness) / np.einsum("njj->nj", self.mass)

    def mode(self, n: int, j: int) -> "SolenoidalField":
        a = np.zeros(self.shape)
        a[n + self.res.Nx, j - 1] = 1.0
        return SolenoidalField(self, a)

    def zeros(self) -> "SolenoidalField":
        return SolenoidalField(self, np.zeros(self.shape))

    def solve_mass(self, rhs: np.ndarray) -> np.ndarray:
        return np.linalg.solve(self.mass, rhs[..., None])[..., 0]

    def synthesize(self, a: np.ndarray, dx: int = 0, dy: int = 0) -> np.ndarray:
        """Grid values of ``d^dx_x d^dy_y`` of the velocity, shape ``(2, qx, qy)``."""
        X = self.scalar.X
        p1 = np.einsum("nj,njq->nq", a, self.U1[dy])
        p2 = np.einsum("nj,njq->nq", a, self.U2[dy])
        return np.stack([X[dx] @ p1, -(X[dx + 1] @ p2)])

    def load(self, g: np.ndarray) -> np.ndarray:
        """Load vector ``(g, U_nj)`` of a grid vector field by quadrature."""
        X = self.scalar.X
        w = self.grid.weights
        g1 = X[0].T @ (g[0] * w)
        g2 = X[1].T @ (g[1] * w)
        return np.einsum("nq,njq->nj", g1, self.U1[0]) - np.einsum("nq,njq->nj", g2, self.U2[0])


def build_solenoidal_basis(scalar: ScalarBasis) -> SolenoidalBasis:
    res, grid = scalar.res, scalar.grid
    nmodes, J = res.n_x_modes, res.Jy
    lams = beam_roots(J)
    norms = _beam_norms(lams)
    jj = np.arange(1, J + 1)
    y = grid.y
    U1, U2 = [], []
    for d in range(4):
        beam_u1 = beam_profile(lams, y, d + 1, norms).T
        beam_u2 = beam_profile(lams, y, d, norms).T
        mean = _sine_derivative(jj, y, d).T
        t1 = np.broadcast_to(beam_u1, (nmodes, J, y.size)).copy()
        t2 = np.broadcast_to(beam_u2, (nmodes, J, y.size)).copy()
        t1[res.Nx] = mean
        t2[res.Nx] = 0.0
        U1.append(t1)
        U2.append(t2)
    k = scalar.k
    wy = grid.wy
    k2 = (k**2)[:, None, None]

    def gram(a, b):
        return np.einsum("njq,niq,q->nji", a, b, wy)

    mass = gram(U1[0], U1[0]) + k2 * gram(U2[0], U2[0])
    stiffness = (
        k2 * gram(U1[0], U1[0]) + gram(U1[1], U1[1]) + k2**2 * gram(U2[0], U2[0]) + k2 * gram(U2[1], U2[1])
    )
    mass = 0.5 * (mass + np.swapaxes(mass, 1, 2))
    stiffness = 0.5 * (stiffness + np.swapaxes(stiffness, 1, 2))
    return SolenoidalBasis(scalar.domain, res, grid, scalar, lams, k, U1, U2, mass, stiffness)


@dataclass
class SolenoidalField:
    basis: SolenoidalBasis
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        if self.coeffs.shape != self.basis.shape:
            raise ValueError(f"coefficient shape {self.coeffs.shape} does not match basis {self.basis.shape}")
        if not np.all(np.isfinite(self.coeffs)):
            raise ValueError("solenoidal field has non-finite coefficients")

    def __add__(self, other):
        _same_basis(self, other)
        return SolenoidalField(self.basis, self.coeffs + other.coeffs)

    def __sub__(self, other):
        _same_basis(self, other)
        return SolenoidalField(self.basis, self.coeffs - other.coeffs)

    def __mul__(self, a: float):
        return SolenoidalField(self.basis, a * self.coeffs)

    __rmul__ = __mul__

    def inner(self, other: "SolenoidalField") -> float:
        """L2 inner product through the per-wavenumber mass matrices."""
        _same_basis(self, other)
        return float(np.einsum("nj,nji,ni->", self.coeffs, self.basis.mass, other.coeffs))

    def grid(self, dx: int = 0, dy: int = 0) -> np.ndarray:
        return self.basis.synthesize(self.coeffs, dx, dy)

    def gradient(self) -> np.ndarray:
        """``G[i, j] = d u_j / d x_i`` on the grid, shape ``(2, 2, qx, qy)``."""
        return np.stack([self.grid(1, 0), self.grid(0, 1)])

    def divergence(self) -> np.ndarray:
        return self.grid(1, 0)[0] + self.grid(0, 1)[1]


def solenoidal_norms(u: SolenoidalField) -> tuple[float, float, float]:
    """``(|u|, ||u||, |A_S u|)``."""
    b = u.basis
    a = u.coeffs
    Ka = np.einsum("nji,ni->nj", b.stiffness, a)
    w = b.solve_mass(Ka)
    l2 = np.einsum("nj,nj->", a, np.einsum("nji,ni->nj", b.mass, a))
    h1 = np.einsum("nj,nj->", a, Ka)
    a2 = np.einsum("nj,nj->", w, Ka)  # w^T M w = w^T K a
    return float(np.sqrt(max(l2, 0.0))), float(np.sqrt(max(h1, 0.0))), float(np.sqrt(max(a2, 0.0)))


# --------------------------------------------------------------------------- #
# operators
# --------------------------------------------------------------------------- #


def rot_scalar(w: ScalarField) -> np.ndarray:
    """``rot w = (dw/dy, -dw/dx)`` on the grid, shape ``(2, qx, qy)``."""
    return np.stack([w.grid(0, 1), -w.grid(1, 0)])


def rot_vector(u: SolenoidalField) -> np.ndarray:
    """``rot u = du_2/dx - du_1/dy`` on the grid."""
    return u.grid(1, 0)[1] - u.grid(0, 1)[0]


def rot_rot_vector(u: SolenoidalField) -> np.ndarray:
    """``rot rot u`` evaluated from exact second derivatives of the basis."""
    dxy = u.grid(1, 1)
    return np.stack([dxy[1] - u.grid(0, 2)[0], -(u.grid(2, 0)[1] - dxy[0])])


def laplacian_vector(u: SolenoidalField) -> np.ndarray:
    return u.grid(2, 0) + u.grid(0, 2)


def leray_project(g: np.ndarray, basis: SolenoidalBasis) -> SolenoidalField:
    """Best L2 approximation of a grid vector field in the solenoidal basis."""
    if not np.all(np.isfinite(g)):
        raise ValueError("cannot project a non-finite field")
    try:
        coeffs = basis.solve_mass(basis.load(g))
    except np.linalg.LinAlgError as exc:  # pragma: no cover - signals a broken basis
        raise np.linalg.LinAlgError("singular velocity Gram matrix; basis construction is broken") from exc
    return SolenoidalField(basis, coeffs)


def apply_stokes(u: SolenoidalField) -> SolenoidalField:
    """Weak Stokes operator: ``M w = K u`` for each wavenumber."""
    b = u.basis
    w = b.solve_mass(np.einsum("nji,ni->nj", b.stiffness, u.coeffs))
    if not np.all(np.isfinite(w)):
        raise np.linalg.LinAlgError("Stokes solve produced non-finite values; reduce Jy")
    return SolenoidalField(b, w)


# --------------------------------------------------------------------------- #
# manifest
# --------------------------------------------------------------------------- #


def basis_manifest(sbasis: SolenoidalBasis) -> str:
    """Plain-text listing of scalar modes, eigenvalues and beam roots."""
    sc = sbasis.scalar
    lines = [
        "# micropolar basis manifest",
        f"l = {sc.domain.l!r}",
        f"Nx = {sc.res.Nx}",
        f"My = {sc.res.My}",
        f"Jy = {sc.res.Jy}",
        f"quad_x = {sc.res.quad_x}",
        f"quad_y = {sc.res.quad_y}",
        "",
        "[scalar_modes]  # rank n m beta",
    ]
    for rank, (n, m, beta) in enumerate(sc.sorted_modes(), start=1):
        lines.append(f"{rank} {n} {m} {beta:.17g}")
    lines += ["", "[beam_roots]  # j lambda_j"]
    lines += [f"{j} {lam:.17g}" for j, lam in enumerate(sbasis.lams, start=1)]
    return "\n".join(lines) + "\n"
