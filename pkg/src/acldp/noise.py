"""Multiplicative noise intensities g(t, xi, theta), bounded below by g0 > 0.

Two time-homogeneous families are provided:

    constant:             g = g0
    smooth_bounded_below: g = g0 + c * theta^2 / (1 + theta^2)

Both satisfy inf g = g0 and are globally Lipschitz in the state theta; the
Lipschitz constant of the smooth family is c * 9 / (8 sqrt(3)) (the maximum
of |d/dtheta theta^2/(1+theta^2)| at theta = 1/sqrt(3)).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError

KINDS = ("constant", "smooth_bounded_below")

_SMOOTH_SLOPE = 9.0 / (8.0 * np.sqrt(3.0))


@dataclass(frozen=True)
class NoiseModel:
    """Noise intensity family with floor g0 and state-Lipschitz constant."""

    kind: str = "constant"
    g0: float = 1.0
    c: float = 0.0
    lip: float = field(init=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigurationError(f"unknown noise kind {self.kind!r}; choose from {KINDS}")
        if not self.g0 > 0:
            raise ConfigurationError(f"noise floor g0 must be positive, got {self.g0}")
        if self.c < 0:
            raise ConfigurationError(f"noise parameter c must be nonnegative, got {self.c}")
        lip = 0.0 if self.kind == "constant" else self.c * _SMOOTH_SLOPE
        object.__setattr__(self, "lip", lip)

    @property
    def is_constant(self) -> bool:
        return self.kind == "constant" or self.c == 0.0

    def g(self, t: float, theta: np.ndarray) -> np.ndarray:
        """Intensity evaluated at state theta (time-homogeneous families)."""
        theta = np.asarray(theta, dtype=float)
        if self.is_constant:
            return np.full_like(theta, self.g0)
        th2 = theta * theta
        return self.g0 + self.c * th2 / (1.0 + th2)

    def g_prime(self, t: float, theta: np.ndarray) -> np.ndarray:
        """State derivative of the intensity (for action-gradient adjoints)."""
        theta = np.asarray(theta, dtype=float)
        if self.is_constant:
            return np.zeros_like(theta)
        return self.c * 2.0 * theta / (1.0 + theta * theta) ** 2

    def linear_growth_constant(self) -> float:
        """Smallest C with |g(theta)| <= C (1 + |theta|) over the families."""
        if self.is_constant:
            return self.g0
        return self.g0 + self.c
