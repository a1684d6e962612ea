"""Smooth velocity and pressure fields with analytic derivatives.

Two families ship with the toolkit: an exact stationary flow built from a
quadratic potential (linear growth at infinity, useful as the canonical
non-decaying solution), and divergence-free manufactured fields obtained
by taking the curl of a vector potential, so incompressibility holds in
exact arithmetic rather than approximately.

Analytic derivatives are optional everywhere; central finite differences
fill the gaps.  ``membership_scan`` probes whether a field plausibly has
finite modular over all of R^3 by watching truncated modulars over growing
balls; the verdict is a trend heuristic, never a proof.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .exponents import ExponentField
from .norms import Quadrature, modular
from .regions import Annulus, Ball, Region

Array = np.ndarray

_FD_STEP = 1e-4


def _batch(x) -> tuple[Array, bool]:
    pts = np.asarray(x, dtype=float)
    if pts.ndim == 1:
        return pts.reshape(1, 3), True
    return pts, False


def fd_gradient(fn: Callable[[Array], Array], pts: Array, h: float = _FD_STEP) -> Array:
    out = np.empty_like(pts)
    for j in range(3):
        e = np.zeros(3)
        e[j] = h
        out[:, j] = (fn(pts + e) - fn(pts - e)) / (2.0 * h)
    return out

def fd_jacobian(fn: Callable[[Array], Array], pts: Array, h: float = _FD_STEP) -> Array:
    """J[n, i, j] = d u_i / d x_j by central differences."""
    n = pts.shape[0]
    out = np.empty((n, 3, 3))
    for j in range(3):
        e = np.zeros(3)
        e[j] = h
        out[:, :, j] = (fn(pts + e) - fn(pts - e)) / (2.0 * h)
    return out

def fd_laplacian(fn: Callable[[Array], Array], pts: Array, h: float = _FD_STEP) -> Array:
    center = fn(pts)
    out = np.zeros_like(center)
    for j in range(3):
        e = np.zeros(3)
        e[j] = h
        out += fn(pts + e) + fn(pts - e) - 2.0 * center
    return out / h**2


@dataclass(frozen=True)
class ScalarField3:
    fn: Callable[[Array], Array]
    analytic_gradient: Optional[Callable[[Array], Array]] = None
    name: str = ""

    def __call__(self, x):
        pts, single = _batch(x)
        vals = np.asarray(self.fn(pts), dtype=float)
        return float(vals[0]) if single else vals

    def gradient(self, x) -> Array:
        pts, single = _batch(x)
        g = (
            self.analytic_gradient(pts)
            if self.analytic_gradient is not None
            else fd_gradient(self.fn, pts)
        )
        return g[0] if single else g


@dataclass(frozen=True)
class VectorField3:
    fn: Callable[[Array], Array]
    analytic_jacobian: Optional[Callable[[Array], Array]] = None
    analytic_laplacian: Optional[Callable[[Array], Array]] = None
    name: str = ""
    decay_rate: Optional[float] = None
    divergence_free: bool = False

    def __call__(self, x):
        pts, single = _batch(x)
        vals = np.asarray(self.fn(pts), dtype=float)
        return vals[0] if single else vals

    def jacobian(self, x) -> Array:
        pts, single = _batch(x)
        j = (
            self.analytic_jacobian(pts)
            if self.analytic_jacobian is not None
            else fd_jacobian(self.fn, pts)
        )
        return j[0] if single else j

    def laplacian(self, x) -> Array:
        pts, single = _batch(x)
        l = (
            self.analytic_laplacian(pts)
            if self.analytic_laplacian is not None
            else fd_laplacian(self.fn, pts)
        )
        return l[0] if single else l

    def divergence(self, x) -> Array | float:
        pts, single = _batch(x)
        jac = (
            self.analytic_jacobian(pts)
            if self.analytic_jacobian is not None
            else fd_jacobian(self.fn, pts)
        )
        d = jac[:, 0, 0] + jac[:, 1, 1] + jac[:, 2, 2]
        return float(d[0]) if single else d


def zero_vector() -> VectorField3:
    return VectorField3(
        fn=lambda pts: np.zeros_like(pts),
        analytic_jacobian=lambda pts: np.zeros((pts.shape[0], 3, 3)),
        analytic_laplacian=lambda pts: np.zeros_like(pts),
        name="zero",
        decay_rate=math.inf,
        divergence_free=True,
    )


def zero_scalar() -> ScalarField3:
    return ScalarField3(
        fn=lambda pts: np.zeros(pts.shape[0]),
        analytic_gradient=lambda pts: np.zeros_like(pts),
        name="zero",
    )


def constant_scalar(c: float) -> ScalarField3:
    return ScalarField3(
        fn=lambda pts: np.full(pts.shape[0], float(c)),
        analytic_gradient=lambda pts: np.zeros_like(pts),
        name=f"constant({c})",
    )


def gaussian_scalar() -> ScalarField3:
    def fn(pts):
        return np.exp(-np.einsum("ij,ij->i", pts, pts))

    def grad(pts):
        return -2.0 * pts * fn(pts)[:, None]

    return ScalarField3(fn=fn, analytic_gradient=grad, name="gaussian")


def inverse_quadratic_scalar() -> ScalarField3:
    def fn(pts):
        return 1.0 / (1.0 + np.einsum("ij,ij->i", pts, pts))

    def grad(pts):
        return -2.0 * pts * (fn(pts) ** 2)[:, None]

    return ScalarField3(fn=fn, analytic_gradient=grad, name="inverse_quadratic")


def gradient_counterexample() -> tuple[VectorField3, ScalarField3]:
    """Exact stationary solution with linear growth.

    u = (x1, x2, -2*x3) is the gradient of the quadratic potential
    x1^2/2 + x2^2/2 - x3^2 and P = -|u|^2/2; the pair solves the
    stationary momentum equation pointwise while decaying nowhere, which
    is what makes it the canonical hypothesis-violating input.
    """

    def u_fn(pts):
        return np.stack([pts[:, 0], pts[:, 1], -2.0 * pts[:, 2]], axis=1)

    jac = np.diag([1.0, 1.0, -2.0])

    def u_jac(pts):
        return np.broadcast_to(jac, (pts.shape[0], 3, 3)).copy()

    def u_lap(pts):
        return np.zeros_like(pts)

    def p_fn(pts):
        return -0.5 * (pts[:, 0] ** 2 + pts[:, 1] ** 2 + 4.0 * pts[:, 2] ** 2)

    def p_grad(pts):
        return -np.stack([pts[:, 0], pts[:, 1], 4.0 * pts[:, 2]], axis=1)

    u = VectorField3(
        fn=u_fn,
        analytic_jacobian=u_jac,
        analytic_laplacian=u_lap,
        name="gradient_counterexample",
        divergence_free=True,
    )
    p = ScalarField3(fn=p_fn, analytic_gradient=p_grad, name="counterexample_pressure")
    return u, p


def decaying_solenoidal(rate: float) -> VectorField3:
    """Divergence-free field with sup_{|x|=R} |u| of order R^(-rate).

    Built as the curl of psi(|x|^2) * (-x2, x1, 0) with
    psi(s) = (1 + s)^(-rate/2), so incompressibility is exact and the
    decay exponent is the parameter itself.
    """
    if rate <= 0:
        raise ValueError(f"decay rate must be positive, got {rate}")
    a = float(rate)

    def parts(pts):
        s = np.einsum("ij,ij->i", pts, pts)
        psi = (1.0 + s) ** (-a / 2.0)
        dpsi = -(a / 2.0) * (1.0 + s) ** (-a / 2.0 - 1.0)
        d2psi = (a / 2.0) * (a / 2.0 + 1.0) * (1.0 + s) ** (-a / 2.0 - 2.0)
        return psi, dpsi, d2psi

    def u_fn(pts):
        x1, x2, x3 = pts[:, 0], pts[:, 1], pts[:, 2]
        psi, dpsi, _ = parts(pts)
        rho2 = x1**2 + x2**2
        return np.stack(
            [
                -2.0 * x1 * x3 * dpsi,
                -2.0 * x2 * x3 * dpsi,
                2.0 * psi + 2.0 * rho2 * dpsi,
            ],
            axis=1,
        )

    def u_jac(pts):
        x1, x2, x3 = pts[:, 0], pts[:, 1], pts[:, 2]
        _, dpsi, d2psi = parts(pts)
        rho2 = x1**2 + x2**2
        n = pts.shape[0]
        J = np.empty((n, 3, 3))
        J[:, 0, 0] = -2.0 * x3 * (dpsi + 2.0 * x1**2 * d2psi)
        J[:, 0, 1] = -4.0 * x1 * x2 * x3 * d2psi
        J[:, 0, 2] = -2.0 * x1 * (dpsi + 2.0 * x3**2 * d2psi)
        J[:, 1, 0] = J[:, 0, 1]
        J[:, 1, 1] = -2.0 * x3 * (dpsi + 2.0 * x2**2 * d2psi)
        J[:, 1, 2] = -2.0 * x2 * (dpsi + 2.0 * x3**2 * d2psi)
        J[:, 2, 0] = 8.0 * x1 * dpsi + 4.0 * x1 * rho2 * d2psi
        J[:, 2, 1] = 8.0 * x2 * dpsi + 4.0 * x2 * rho2 * d2psi
        J[:, 2, 2] = 4.0 * x3 * dpsi + 4.0 * x3 * rho2 * d2psi
        return J

    return VectorField3(
        fn=u_fn,
        analytic_jacobian=u_jac,
        name=f"decaying_solenoidal({rate:g})",
        decay_rate=a,
        divergence_free=True,
    )


def ns_residual(u: VectorField3, p: ScalarField3, x) -> Array:
    """Pointwise momentum residual: Laplacian(u) - (u . grad) u - grad P."""
    pts, single = _batch(x)
    lap = u.laplacian(pts)
    jac = u.jacobian(pts)
    vel = u(pts)
    advect = np.einsum("nij,nj->ni", jac, vel)
    res = lap - advect - p.gradient(pts)
    return res[0] if single else res


@dataclass(frozen=True)
class ScanResult:
    rows: tuple[tuple[float, float, float], ...]  # (radius, truncated modular, err)
    increments: tuple[float, ...]
    verdict: str  # "convergent" | "diverging"


def membership_scan(
    f,
    p: ExponentField,
    radii,
    quad: Optional[Quadrature] = None,
) -> ScanResult:
    """Truncated modulars over growing balls with a trend verdict.

    The verdict is "convergent" when the shell-by-shell increments decay
    under a fixed geometric envelope (ratio <= 0.9 over the last shells)
    or are identically zero, and "diverging" otherwise; increments that
    fail to decay clearly are treated as diverging, which is the
    conservative call for a hypothesis check.
    """
    radii = [float(r) for r in radii]
    if len(radii) < 3 or any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("need at least three strictly increasing radii")
    quad = quad or Quadrature(n=60_000)
    shells: list[Region] = [Ball(radius=radii[0])]
    shells += [Annulus(a, b) for a, b in zip(radii, radii[1:])]
    increments = []
    errors = []
    for shell in shells:
        val, err = modular(f, p, shell, quad)
        increments.append(val)
        errors.append(err)
    cums = np.cumsum(increments)
    rows = tuple(
        (r, float(c), float(e)) for r, c, e in zip(radii, cums, np.cumsum(errors))
    )
    verdict = _trend_verdict(increments)
    return ScanResult(rows, tuple(float(v) for v in increments), verdict)


def _trend_verdict(increments: list[float]) -> str:
    if any(math.isinf(v) for v in increments):
        return "diverging"
    scale = max(increments)
    if scale <= 1e-300:
        return "convergent"
    last = increments[-3:]
    slack = 1.0 + 1e-9
    if last[0] <= last[1] * slack and last[1] <= last[2] * slack and last[2] > 0:
        return "diverging"
    ratios = [
        b / a for a, b in zip(increments[-4:], increments[-3:]) if a > 1e-300
    ]
    if ratios and max(ratios) <= 0.9:
        return "convergent"
    if not ratios:  # tail already collapsed to zero
        return "convergent"
    return "diverging"
