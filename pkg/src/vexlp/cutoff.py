"""Smooth radial localization with closed-form gradient and Laplacian.

The cutoff equals 1 on the ball |x| < R/2, vanishes for |x| >= R, and
transitions through the quintic smoothstep S(t) = 6t^5 - 15t^4 + 10t^3,
which is C^2 with S'(0) = S'(1) = S''(0) = S''(1) = 0.  Both derivatives
are therefore supported in the shell R/2 <= |x| <= R and obey the exact
scalings sup|grad| = 2 S'(1/2) / R and R^2 * Delta independent of R.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidRadiusError
from .regions import Annulus, Region


def transition(t: np.ndarray) -> np.ndarray:
    """Quintic smoothstep on [0, 1]."""
    return t**3 * (6.0 * t**2 - 15.0 * t + 10.0)


def transition_d1(t: np.ndarray) -> np.ndarray:
    return 30.0 * t**2 * (t - 1.0) ** 2


def transition_d2(t: np.ndarray) -> np.ndarray:
    return 60.0 * t * (2.0 * t - 1.0) * (t - 1.0)


# sup of S' on [0,1], attained at t = 1/2
_SUP_D1 = 30.0 / 16.0


@dataclass(frozen=True)
class RadialCutoff:
    """Radial plateau function: 1 inside |x| < R/2, 0 outside |x| >= R."""

    radius: float

    def __post_init__(self):
        if not self.radius > 1.0:
            raise InvalidRadiusError(f"cutoff radius must exceed 1, got {self.radius}")

    def _t(self, rho: np.ndarray) -> np.ndarray:
        return np.clip((2.0 * rho - self.radius) / self.radius, 0.0, 1.0)

    def __call__(self, x) -> np.ndarray | float:
        pts = np.asarray(x, dtype=float)
        single = pts.ndim == 1
        if single:
            pts = pts.reshape(1, 3)
        rho = np.linalg.norm(pts, axis=1)
        val = 1.0 - transition(self._t(rho))
        return float(val[0]) if single else val

    def grad(self, x) -> np.ndarray:
        pts = np.asarray(x, dtype=float)
        single = pts.ndim == 1
        if single:
            pts = pts.reshape(1, 3)
        rho = np.linalg.norm(pts, axis=1)
        inside = (rho > self.radius / 2.0) & (rho < self.radius)
        dtheta = np.where(
            inside, -(2.0 / self.radius) * transition_d1(self._t(rho)), 0.0
        )
        safe_rho = np.where(rho > 0, rho, 1.0)
        out = pts * (dtheta / safe_rho)[:, None]
        return out[0] if single else out

    def laplacian(self, x) -> np.ndarray | float:
        pts = np.asarray(x, dtype=float)
        single = pts.ndim == 1
        if single:
            pts = pts.reshape(1, 3)
        rho = np.linalg.norm(pts, axis=1)
        inside = (rho > self.radius / 2.0) & (rho < self.radius)
        t = self._t(rho)
        d1 = -(2.0 / self.radius) * transition_d1(t)
        d2 = -(4.0 / self.radius**2) * transition_d2(t)
        safe_rho = np.where(rho > 0, rho, 1.0)
        val = np.where(inside, d2 + 2.0 * d1 / safe_rho, 0.0)
        return float(val[0]) if single else val

    def sup_grad(self) -> float:
        """Exact sup of |grad|, attained mid-shell."""
        return 2.0 * _SUP_D1 / self.radius

    def support(self) -> Region:
        """Shell carrying both derivatives."""
        return Annulus(self.radius / 2.0, self.radius)

    def plateau_volume(self) -> float:
        return 4.0 / 3.0 * math.pi * (self.radius / 2.0) ** 3


def make_cutoff(radius: float) -> RadialCutoff:
    return RadialCutoff(float(radius))
