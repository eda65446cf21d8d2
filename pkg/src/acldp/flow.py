"""Noiseless gradient flow and the controlled skeleton dynamics.

Both solve dz/dt = Laplacian(z) + F(z) [+ g(t, z+psi) f(t)] by exponential
Euler: the stiff linear part is advanced exactly through the semigroup
factor e^{-lambda_k dt} and the remaining drift enters through the
phi_1 weight (1 - e^{-lambda_k dt}) / lambda_k, mirroring the
variation-of-constants form term by term.  The cubic drift is evaluated
pointwise on the grid and projected to modes with the top third zeroed
(de-aliasing); the convergence certificate ||Laplacian(z) + F(z)||_{L^2}
uses the unfiltered projection.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .energy import energy_star_values, reaction_values
from .errors import ConfigurationError, InstabilityError
from .grid import (Boundary, Domain, Field, inverse_transform_values,
                   transform_values)
from .noise import NoiseModel
from .profile import Profile, compute_profile

BLOWUP_SUP = 10.0


@dataclass(frozen=True)
class Path:
    """Time-discretized sequence of same-boundary fields with uniform step."""

    values: np.ndarray            # (steps+1, n)
    bc: Boundary
    t0: float
    dt: float
    control: np.ndarray | None = None   # (steps, n) forcing f(t) on the grid

    def __post_init__(self):
        if self.values.ndim != 2 or self.values.shape[0] < 2:
            raise ConfigurationError("a path needs at least two time slices")
        if self.dt <= 0:
            raise ConfigurationError(f"path step must be positive, got {self.dt}")
        if self.control is not None and self.control.shape != (self.n_steps, self.values.shape[1]):
            raise ConfigurationError(
                f"control shape {self.control.shape} does not match {self.n_steps} steps "
                f"on {self.values.shape[1]} grid points")

    @property
    def n_steps(self) -> int:
        return self.values.shape[0] - 1

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.values.shape[0])

    def field(self, i: int) -> Field:
        return Field(self.values[i], self.bc)

    def terminal(self) -> Field:
        return Field(self.values[-1], self.bc)


@dataclass(frozen=True)
class FlowResult:
    """Integrated trajectory plus per-step diagnostics."""

    path: Path
    t: np.ndarray             # per-step times (length steps+1)
    energy_star: np.ndarray   # E*(z(t)) per step
    grad_norm: np.ndarray     # ||Laplacian z + F(z)||_{L^2} per step
    dist_sup: np.ndarray      # sup |z(t) - (m - psi)| per step
    stopped_early: bool

    def terminal(self) -> Field:
        return self.path.terminal()


def _step_weights(d: Domain, dt: float) -> tuple[np.ndarray, np.ndarray]:
    decay = np.exp(-d.lambda_k * dt)
    phi1 = (1.0 - decay) / d.lambda_k
    return decay, phi1


def _integrate(d: Domain, x: Field, dt: float, steps: int, *,
               control: np.ndarray | None, noise: NoiseModel | None,
               stop_tol: float, record_every: int,
               profile: Profile) -> FlowResult:
    if x.bc is not Boundary.ZERO_DIRICHLET:
        raise ConfigurationError("flow initial data must be zero-Dirichlet (work with z = u - psi)")
    decay, phi1 = _step_weights(d, dt)
    dealias = np.ones(d.modes)
    dealias[d.dealias_keep():] = 0.0
    mshift = profile.shifted_values(d)

    c = transform_values(d, x.values)
    z = inverse_transform_values(d, c)
    frames = [z]
    tgrid, e_series, g_series, d_series = [], [], [], []
    stopped = False

    for s in range(steps + 1):           # visit states 0..steps
        f_hat = transform_values(d, reaction_values(d, z))
        resid = -d.lambda_k * c + f_hat
        gnorm = float(np.sqrt(np.sum(resid * resid)))
        tgrid.append(s * dt)
        e_series.append(float(energy_star_values(d, z, profile)))
        g_series.append(gnorm)
        d_series.append(float(np.max(np.abs(z - mshift))))
        if s == steps:
            break
        if control is None and gnorm < stop_tol:
            stopped = True
            break
        drift_hat = f_hat
        if control is not None:
            drift_hat = f_hat + transform_values(
                d, noise.g(s * dt, z + d.psi) * control[s])
        c = decay * c + phi1 * (dealias * drift_hat)
        z = inverse_transform_values(d, c)
        if np.max(np.abs(z)) > BLOWUP_SUP:
            raise InstabilityError(
                f"flow left the physical range (sup |z| > {BLOWUP_SUP}) at t={(s + 1) * dt!r}; "
                f"dt={dt!r} likely too large")
        if (s + 1) % record_every == 0:
            frames.append(z)

    if frames[-1] is not z:
        frames.append(z)                 # terminal slice always present
    if len(frames) == 1:                 # stopped without taking a step
        frames.append(z)
    path = Path(np.asarray(frames), Boundary.ZERO_DIRICHLET, 0.0,
                dt * record_every, control=None)
    return FlowResult(path=path, t=np.asarray(tgrid),
                      energy_star=np.asarray(e_series),
                      grad_norm=np.asarray(g_series),
                      dist_sup=np.asarray(d_series),
                      stopped_early=stopped)


def gradient_flow(d: Domain, x: Field, dt: float, T: float,
                  stop_tol: float = 1e-8, record_every: int = 1,
                  profile: Profile | None = None) -> FlowResult:
    """Relax x under dz/dt = Laplacian(z) + F(z) until T or the gradient
    norm drops below stop_tol."""
    if dt <= 0 or T <= 0:
        raise ConfigurationError(f"need dt > 0 and T > 0, got dt={dt}, T={T}")
    profile = profile or compute_profile(d)
    steps = int(round(T / dt))
    return _integrate(d, x, dt, steps, control=None, noise=None,
                      stop_tol=stop_tol, record_every=record_every,
                      profile=profile)


def skeleton_solve(d: Domain, x: Field, control: np.ndarray, noise: NoiseModel,
                   dt: float, record_every: int = 1,
                   profile: Profile | None = None) -> FlowResult:
    """Integrate the controlled dynamics dz/dt = Laplacian z + F(z) + g(t, z+psi) f(t).

    The control is an array of shape (steps, n): one grid-sampled forcing
    slice per time step of length dt.
    """
    control = np.asarray(control, dtype=float)
    if control.ndim != 2 or control.shape[1] != d.n:
        raise ConfigurationError(
            f"control must have shape (steps, {d.n}), got {control.shape}")
    if dt <= 0:
        raise ConfigurationError(f"need dt > 0, got {dt}")
    profile = profile or compute_profile(d)
    return _integrate(d, x, dt, control.shape[0], control=control, noise=noise,
                      stop_tol=0.0, record_every=record_every, profile=profile)


_relaxation_cache: dict[tuple[float, int, int, float], float] = {}


def relaxation_time(d: Domain, threshold: float = 1e-2, dt: float = 5e-3,
                    T_max: float = 200.0, profile: Profile | None = None) -> float:
    """Time for the flow started at z = 0 to come within `threshold` of the
    equilibrium in H^1; used to calibrate burn-in schedules."""
    key = (d.L, d.n, d.modes, threshold)
    if key in _relaxation_cache:
        return _relaxation_cache[key]
    profile = profile or compute_profile(d)
    mshift = profile.shifted_values(d)
    res = gradient_flow(d, Field(np.zeros(d.n), Boundary.ZERO_DIRICHLET),
                        dt=dt, T=T_max, stop_tol=1e-6, record_every=1,
                        profile=profile)
    lam = d.lambda_k
    for i in range(res.path.values.shape[0]):
        c = transform_values(d, res.path.values[i] - mshift)
        if np.sqrt(np.sum((1.0 + lam) * c * c)) < threshold:
            _relaxation_cache[key] = i * dt
            return i * dt
    raise InstabilityError(f"flow failed to relax within T={T_max} at L={d.L}")
