"""Spectral core on the interval (-L, L) with Dirichlet boundary data.

The discretization is spectral collocation on a uniform interior grid
xi_j = -L + j * h, h = 2L/(n+1), j = 1..n.  The zero-Dirichlet Laplacian is
diagonalized by the mixed sin/cos family

    e_k(xi) = sin(k pi xi / 2L) / sqrt(L)   (k even)
    e_k(xi) = cos(k pi xi / 2L) / sqrt(L)   (k odd)

with eigenvalues lambda_k = (k pi / 2L)^2.  On the shifted coordinate
xi + L this family is the standard sine basis up to signs, so forward and
inverse transforms reduce to a type-I DST, and composite-trapezoid inner
products on the grid are *exactly* orthonormal:

    h * sum_j e_k(xi_j) e_m(xi_j) = delta_km    for k, m <= n.

Two boundary classes are tracked on fields: zero-Dirichlet values (the
linear space of u with u(-L) = u(L) = 0) and ramp-Dirichlet values
(u(-L) = -1, u(L) = +1).  The ramp psi(xi) = xi/L converts between them.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.fft import dst

from .errors import ConfigurationError


class Boundary(enum.Enum):
    """Boundary class of a sampled field."""

    ZERO_DIRICHLET = "zero"
    RAMP_DIRICHLET = "ramp"


def _frozen_array(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Domain:
    """Immutable grid, eigenpairs, and ramp for the interval (-L, L).

    Attributes
    ----------
    L : half-length of the interval
    n : number of interior grid points
    modes : spectral truncation (N <= n)
    h : grid spacing 2L/(n+1)
    xi : interior grid coordinates, shape (n,)
    lambda_k : Dirichlet-Laplacian eigenvalues (k pi/2L)^2, shape (modes,)
    psi : ramp xi/L sampled on the grid, shape (n,)
    """

    L: float
    n: int
    modes: int
    h: float
    xi: np.ndarray
    lambda_k: np.ndarray
    psi: np.ndarray
    sign: np.ndarray  # sign relating e_k to the shifted sine basis

    def dealias_keep(self) -> int:
        """Number of low modes kept when de-aliasing a cubic nonlinearity."""
        return (2 * self.modes) // 3


@dataclass(frozen=True)
class Field:
    """Real-valued function sampled on the interior grid of one Domain."""

    values: np.ndarray
    bc: Boundary

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen_array(self.values))


def build_domain(L: float, n: int, modes: int) -> Domain:
    """Construct the discretized interval with its spectral data.

    Raises ConfigurationError for non-positive L, n < 8, or modes > n.
    """
    if not L > 0:
        raise ConfigurationError(f"half-length L must be positive, got {L}")
    if n < 8:
        raise ConfigurationError(f"need at least 8 interior grid points, got n={n}")
    if not 1 <= modes <= n:
        raise ConfigurationError(f"mode count must satisfy 1 <= modes <= n, got modes={modes}, n={n}")
    h = 2.0 * L / (n + 1)
    j = np.arange(1, n + 1)
    xi = -L + j * h
    k = np.arange(1, modes + 1)
    lam = (k * np.pi / (2.0 * L)) ** 2
    sign = np.where(np.isin(k % 4, (0, 1)), 1.0, -1.0)
    return Domain(
        L=float(L), n=int(n), modes=int(modes), h=h,
        xi=_frozen_array(xi), lambda_k=_frozen_array(lam),
        psi=_frozen_array(xi / L), sign=_frozen_array(sign),
    )


def basis_eval(d: Domain, k: int) -> Field:
    """Sample the k-th eigenfunction e_k on the grid (1 <= k <= modes)."""
    if not 1 <= k <= d.modes:
        raise ConfigurationError(f"basis index k={k} out of range 1..{d.modes}")
    arg = k * np.pi * d.xi / (2.0 * d.L)
    vals = (np.sin(arg) if k % 2 == 0 else np.cos(arg)) / np.sqrt(d.L)
    return Field(vals, Boundary.ZERO_DIRICHLET)


# ---------------------------------------------------------------------------
# transforms
#
# Raw-array variants (suffix _values) carry the hot loops; the Field-level
# wrappers add boundary-class checking.  All of them accept stacked inputs
# with the grid on the last axis, so chain ensembles vectorize for free.
# ---------------------------------------------------------------------------

def transform_values(d: Domain, values: np.ndarray) -> np.ndarray:
    """Mode coefficients c_k = <f, e_k>_{L^2} of grid values (trapezoid-exact)."""
    coeff = dst(values, type=1, axis=-1)[..., : d.modes]
    return (d.h / (2.0 * np.sqrt(d.L))) * d.sign * coeff


def inverse_transform_values(d: Domain, coeff: np.ndarray) -> np.ndarray:
    """Grid values of sum_k c_k e_k."""
    pad = np.zeros(coeff.shape[:-1] + (d.n,))
    pad[..., : d.modes] = d.sign * coeff / np.sqrt(d.L)
    return dst(pad, type=1, axis=-1) / 2.0


def spectral_transform(d: Domain, f: Field) -> np.ndarray:
    """Mode coefficients of a zero-Dirichlet Field."""
    if f.bc is not Boundary.ZERO_DIRICHLET:
        raise ConfigurationError("spectral transform needs zero-Dirichlet input; subtract psi first")
    return transform_values(d, f.values)


def inverse_spectral_transform(d: Domain, coeff: np.ndarray) -> Field:
    """Field reconstructed from mode coefficients."""
    coeff = np.asarray(coeff, dtype=float)
    if coeff.shape != (d.modes,):
        raise ConfigurationError(f"expected {d.modes} coefficients, got shape {coeff.shape}")
    return Field(inverse_transform_values(d, coeff), Boundary.ZERO_DIRICHLET)


def laplacian_apply(d: Domain, f: Field) -> Field:
    """Spectral zero-Dirichlet Laplacian (coefficients scaled by -lambda_k)."""
    c = spectral_transform(d, f)
    return Field(inverse_transform_values(d, -d.lambda_k * c), Boundary.ZERO_DIRICHLET)


def semigroup_apply(d: Domain, f: Field, t: float, lam: float = 0.0) -> Field:
    """Damped heat semigroup e^{-lam t} S(t): coefficients scaled by e^{-(lambda_k+lam)t}."""
    if t < 0:
        raise ConfigurationError(f"semigroup time must be nonnegative, got t={t}")
    if lam < 0:
        raise ConfigurationError(f"damping must be nonnegative, got {lam}")
    c = spectral_transform(d, f)
    return Field(inverse_transform_values(d, np.exp(-(d.lambda_k + lam) * t) * c), Boundary.ZERO_DIRICHLET)


# ---------------------------------------------------------------------------
# psi shifts
# ---------------------------------------------------------------------------

def add_psi(d: Domain, f: Field) -> Field:
    """u = ubar + psi: convert zero-Dirichlet to ramp-Dirichlet."""
    if f.bc is not Boundary.ZERO_DIRICHLET:
        raise ConfigurationError("add_psi expects a zero-Dirichlet field")
    return Field(f.values + d.psi, Boundary.RAMP_DIRICHLET)


def subtract_psi(d: Domain, f: Field) -> Field:
    """ubar = u - psi: convert ramp-Dirichlet to zero-Dirichlet."""
    if f.bc is not Boundary.RAMP_DIRICHLET:
        raise ConfigurationError("subtract_psi expects a ramp-Dirichlet field")
    return Field(f.values - d.psi, Boundary.ZERO_DIRICHLET)


def boundary_values(f: Field) -> tuple[float, float]:
    """Implied values of the field at -L and +L."""
    return (0.0, 0.0) if f.bc is Boundary.ZERO_DIRICHLET else (-1.0, 1.0)


def closure_values(d: Domain, f: Field) -> np.ndarray:
    """Values on the closed grid [-L, xi_1..xi_n, L] including boundary data."""
    lo, hi = boundary_values(f)
    return np.concatenate(([lo], f.values, [hi]))


# ---------------------------------------------------------------------------
# norms and inner products (composite trapezoid, boundary-aware)
# ---------------------------------------------------------------------------

def lp_norm_values(d: Domain, values: np.ndarray, p: float) -> np.ndarray:
    """Grid L^p norm of zero-boundary values; supports stacked inputs."""
    return (d.h * np.sum(np.abs(values) ** p, axis=-1)) ** (1.0 / p)


def lp_norm(d: Domain, f: Field, p: float = 2) -> float:
    """Trapezoid L^p norm on the closure (boundary terms weighted h/2)."""
    lo, hi = boundary_values(f)
    s = np.sum(np.abs(f.values) ** p) + 0.5 * (abs(lo) ** p + abs(hi) ** p)
    return float((d.h * s) ** (1.0 / p))


def l2_inner(d: Domain, f: Field, g: Field) -> float:
    """Trapezoid L^2 inner product (boundary products vanish for zero bc)."""
    blo = boundary_values(f)[0] * boundary_values(g)[0]
    bhi = boundary_values(f)[1] * boundary_values(g)[1]
    return float(d.h * (np.sum(f.values * g.values) + 0.5 * (blo + bhi)))


def sup_norm(f: Field) -> float:
    """Sup norm over the grid closure."""
    lo, hi = boundary_values(f)
    return float(max(np.max(np.abs(f.values)), abs(lo), abs(hi)))


def h1_distance(d: Domain, f: Field, g: Field) -> float:
    """Full H^1 norm of f - g for two fields of the same boundary class."""
    if f.bc is not g.bc:
        raise ConfigurationError("H^1 distance needs matching boundary classes")
    c = transform_values(d, f.values - g.values)
    return float(np.sqrt(np.sum((1.0 + d.lambda_k) * c * c)))


def sobolev_norm_values(d: Domain, values: np.ndarray, k_star: float, p_star: int) -> np.ndarray:
    """Raw-array fractional Sobolev norm; supports stacked inputs."""
    c = transform_values(d, values)
    rec = inverse_transform_values(d, c * d.lambda_k ** (k_star / 2.0))
    return lp_norm_values(d, rec, p_star)


def sobolev_norm(d: Domain, f: Field, k_star: float, p_star: int) -> float:
    """Spectral W^{k*,p*} norm: ||(-Laplacian)^{k*/2} f||_{L^{p*}}.

    k_star = 0 reduces to the plain L^{p*} norm of the mode-truncated field.
    """
    if p_star % 2 != 0 or p_star <= 0:
        raise ConfigurationError(f"p_star must be a positive even integer, got {p_star}")
    if k_star < 0:
        raise ConfigurationError(f"k_star must be nonnegative, got {k_star}")
    if f.bc is not Boundary.ZERO_DIRICHLET:
        raise ConfigurationError("sobolev_norm expects a zero-Dirichlet field")
    return float(sobolev_norm_values(d, f.values, k_star, p_star))
