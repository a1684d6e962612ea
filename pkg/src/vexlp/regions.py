"""Semi-algebraic subsets of R^3: membership, uniform sampling, volume.

Concrete descriptors cover the sets the decay estimates integrate over:
balls and annular shells around the origin, the infinite unit tube about
the x1 axis, solids of revolution whose cross-section radius follows a
power law in x1 (widening as x1^gamma or shrinking as x1^(-sigma/2)),
their finite truncations, and boolean combinations.

Membership treats boundary points as members (closed sets) so repeated
evaluation is deterministic.  Sampling and Monte Carlo volume run over an
axis-aligned *envelope*: a list of disjoint boxes covering the region,
stratified along x1 wherever the cross-section radius varies.  The
shrinking-cusp family flares near x1 = 0 (the cross-section radius
diverges), so its envelope uses geometrically refined strata toward 0 and
reports the volume of the omitted sliver as part of the error estimate.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import AnalyticUnavailableError, UnboundedRegionError

_GEOMETRIC_LEVELS = 120  # strata toward a diverging cross-section at x1 = 0
_UNIFORM_LEVELS = 16


def _as_points(x) -> tuple[np.ndarray, bool]:
    pts = np.asarray(x, dtype=float)
    if pts.ndim == 1:
        return pts.reshape(1, 3), True
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValueError(f"expected points of shape (3,) or (n, 3), got {pts.shape}")
    return pts, False


@dataclass(frozen=True)
class Box:
    """Axis-aligned box used as a sampling stratum."""

    lo: tuple[float, float, float]
    hi: tuple[float, float, float]

    def volume(self) -> float:
        return math.prod(h - l for l, h in zip(self.lo, self.hi))

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        lo = np.asarray(self.lo)
        hi = np.asarray(self.hi)
        return lo + rng.random((n, 3)) * (hi - lo)


@dataclass(frozen=True)
class Extent:
    """Axial description of a region used to build sampling envelopes.

    ``rho_bound(a, b)`` bounds the distance to the x1 axis over the slab
    a <= x1 <= b; it may return inf.  ``diverging_lo`` marks a bound that
    blows up as the lower axial end is approached, which triggers
    geometric stratification.  ``tail_volume(delta)`` bounds the region
    volume inside the slab x1 < lo + delta (used to account for the
    sliver the geometric strata omit).
    """

    x1_lo: float
    x1_hi: float
    rho_bound: Callable[[float, float], float]
    diverging_lo: bool = False
    tail_volume: Optional[Callable[[float], float]] = None


@dataclass(frozen=True)
class Envelope:
    boxes: tuple[Box, ...]
    tail_bound: float = 0.0

    def total_volume(self) -> float:
        return sum(b.volume() for b in self.boxes)


@dataclass(frozen=True)
class VolumeEstimate:
    value: float
    std_error: float


class Region(ABC):
    """Immutable point set in R^3 with deterministic membership."""

    @abstractmethod
    def _contains_batch(self, pts: np.ndarray) -> np.ndarray:
        ...

    @abstractmethod
    def _extent(self) -> Extent:
        ...

    def contains(self, x) -> np.ndarray | bool:
        """Membership test; accepts one point (3,) or a batch (n, 3)."""
        pts, single = _as_points(x)
        mask = self._contains_batch(pts)
        return bool(mask[0]) if single else mask

    def analytic_volume(self) -> float:
        raise AnalyticUnavailableError(
            f"{type(self).__name__} has no closed-form volume"
        )

    def envelope(self, strata: int = 0) -> Envelope:
        """Disjoint boxes covering the region, stratified along x1."""
        ext = self._extent()
        lo, hi = ext.x1_lo, ext.x1_hi
        if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
            raise UnboundedRegionError(
                f"{type(self).__name__} has no finite sampling envelope"
            )
        if ext.diverging_lo:
            edges = _geometric_edges(lo, hi, _GEOMETRIC_LEVELS)
            tail_delta = edges[0] - lo
            tail = _tail_bound(ext, tail_delta)
        else:
            k = strata if strata > 1 else (_UNIFORM_LEVELS if _rho_varies(ext) else 1)
            edges = np.linspace(lo, hi, k + 1)
            tail = 0.0
        boxes = []
        for a, b in zip(edges[:-1], edges[1:]):
            rho = ext.rho_bound(float(a), float(b))
            if not math.isfinite(rho):
                raise UnboundedRegionError(
                    f"{type(self).__name__} has unbounded cross-section on "
                    f"[{a:g}, {b:g}]"
                )
            if rho <= 0.0 or b <= a:
                continue
            boxes.append(Box((float(a), -rho, -rho), (float(b), rho, rho)))
        if not boxes:
            raise UnboundedRegionError(f"{type(self).__name__} envelope is empty")
        return Envelope(tuple(boxes), tail)

    def sample(self, n: int, seed: int) -> np.ndarray:
        """n points uniform over the region; deterministic for a fixed seed."""
        env = self.envelope()
        vols = np.array([b.volume() for b in env.boxes])
        weights = vols / vols.sum()
        los = np.array([b.lo for b in env.boxes])
        his = np.array([b.hi for b in env.boxes])
        rng = np.random.default_rng(np.random.SeedSequence(seed))
        out = np.empty((0, 3))
        chunk = max(4 * n, 1024)
        while out.shape[0] < n:
            idx = rng.choice(len(env.boxes), size=chunk, p=weights)
            u = rng.random((chunk, 3))
            pts = los[idx] + u * (his[idx] - los[idx])
            pts = pts[self._contains_batch(pts)]
            out = np.concatenate([out, pts]) if out.size else pts
        return out[:n]

    def volume(
        self,
        method: str = "analytic",
        n: int = 1_000_000,
        seed: int = 0,
        strata: int = 0,
    ) -> VolumeEstimate:
        """Region volume, exact or by stratified rejection counting."""
        if method == "analytic":
            return VolumeEstimate(self.analytic_volume(), 0.0)
        if method != "monte_carlo":
            raise ValueError(f"unknown volume method {method!r}")
        env = self.envelope(strata=strata)
        vols = np.array([b.volume() for b in env.boxes])
        alloc = np.maximum(1, np.round(n * vols / vols.sum()).astype(int))
        streams = np.random.SeedSequence(seed).spawn(len(env.boxes))
        total = 0.0
        var = 0.0
        for box, vol, n_i, ss in zip(env.boxes, vols, alloc, streams):
            rng = np.random.default_rng(ss)
            hits = int(np.count_nonzero(self._contains_batch(box.sample(rng, n_i))))
            p = hits / n_i
            total += vol * p
            var += vol**2 * p * (1.0 - p) / n_i
        return VolumeEstimate(total, math.sqrt(var) + env.tail_bound)


def _geometric_edges(lo: float, hi: float, levels: int) -> np.ndarray:
    span = hi - lo
    edges = [lo + span * 2.0 ** (-k) for k in range(levels, -1, -1)]
    return np.array(edges)


def _tail_bound(ext: Extent, delta: float) -> float:
    bounds = []
    if ext.tail_volume is not None:
        bounds.append(ext.tail_volume(delta))
    rho = ext.rho_bound(ext.x1_lo, ext.x1_lo + delta)
    if math.isfinite(rho):
        bounds.append(4.0 * rho**2 * delta)
    return min(bounds) if bounds else math.inf


def _rho_varies(ext: Extent) -> bool:
    lo, hi = ext.x1_lo, ext.x1_hi
    mid = 0.5 * (lo + hi)
    r1 = ext.rho_bound(lo, mid)
    r2 = ext.rho_bound(mid, hi)
    full = ext.rho_bound(lo, hi)
    return not (
        math.isclose(r1, full, rel_tol=1e-12) and math.isclose(r2, full, rel_tol=1e-12)
    )


def _axis_dist_sq(pts: np.ndarray) -> np.ndarray:
    return pts[:, 1] ** 2 + pts[:, 2] ** 2


@dataclass(frozen=True)
class Ball(Region):
    center: tuple[float, float, float] = (0.0, 0.0, 0.0)
    radius: float = 1.0

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("ball radius must be positive")

    def _contains_batch(self, pts):
        d = pts - np.asarray(self.center)
        return np.einsum("ij,ij->i", d, d) <= self.radius**2

    def analytic_volume(self):
        return 4.0 / 3.0 * math.pi * self.radius**3

    def _extent(self):
        c1 = self.center[0]
        off = math.hypot(self.center[1], self.center[2])
        return Extent(c1 - self.radius, c1 + self.radius, lambda a, b: off + self.radius)


@dataclass(frozen=True)
class Annulus(Region):
    """Origin-centered spherical shell r_inner <= |x| <= r_outer."""

    r_inner: float
    r_outer: float

    def __post_init__(self):
        if not 0 <= self.r_inner < self.r_outer:
            raise ValueError("annulus requires 0 <= r_inner < r_outer")

    def _contains_batch(self, pts):
        r2 = np.einsum("ij,ij->i", pts, pts)
        return (r2 >= self.r_inner**2) & (r2 <= self.r_outer**2)

    def analytic_volume(self):
        return 4.0 / 3.0 * math.pi * (self.r_outer**3 - self.r_inner**3)

    def _extent(self):
        r = self.r_outer
        return Extent(-r, r, lambda a, b: r)


@dataclass(frozen=True)
class Cylinder(Region):
    """Infinite tube of radius 1 about the x1 axis."""

    def _contains_batch(self, pts):
        return _axis_dist_sq(pts) <= 1.0

    def analytic_volume(self):
        raise UnboundedRegionError("the infinite tube has infinite volume")

    def _extent(self):
        return Extent(-math.inf, math.inf, lambda a, b: 1.0)


@dataclass(frozen=True)
class CylinderSegment(Region):
    """Unit tube clipped to |x1| <= half_length; volume 2*pi*half_length."""

    half_length: float

    def __post_init__(self):
        if self.half_length <= 0:
            raise ValueError("half_length must be positive")

    def _contains_batch(self, pts):
        return (_axis_dist_sq(pts) <= 1.0) & (np.abs(pts[:, 0]) <= self.half_length)

    def analytic_volume(self):
        return 2.0 * math.pi * self.half_length

    def _extent(self):
        return Extent(-self.half_length, self.half_length, lambda a, b: 1.0)


def _check_unit_interval(name: str, value: float):
    if not 0.0 < value < 1.0:
        raise ValueError(f"{name} must lie in (0, 1), got {value}")


@dataclass(frozen=True)
class PowerCusp(Region):
    """Solid of revolution sqrt(x2^2 + x3^2) <= x1^gamma, x1 > 0.

    The cross-section *radius* grows like x1^gamma, so a truncation to
    0 < x1 < L has volume pi * L^(2*gamma+1) / (2*gamma+1).
    """

    gamma: float

    def __post_init__(self):
        _check_unit_interval("gamma", self.gamma)

    def _contains_batch(self, pts):
        x1 = pts[:, 0]
        with np.errstate(invalid="ignore"):
            bound = np.where(x1 > 0, np.abs(x1) ** (2.0 * self.gamma), -1.0)
        return (x1 > 0) & (_axis_dist_sq(pts) <= bound)

    def analytic_volume(self):
        raise UnboundedRegionError("the widening cusp has infinite volume")

    def _extent(self):
        g = self.gamma
        return Extent(0.0, math.inf, lambda a, b: max(b, 0.0) ** g)


@dataclass(frozen=True)
class ShrinkCusp(Region):
    """Solid of revolution sqrt(x2^2 + x3^2) <= x1^(-sigma/2), x1 > 0.

    The cross-section radius shrinks along the axis but diverges as
    x1 -> 0+, so the set is unbounded in every direction near the plane
    x1 = 0 even though its truncations have finite volume.
    """

    sigma: float

    def __post_init__(self):
        _check_unit_interval("sigma", self.sigma)

    def _contains_batch(self, pts):
        x1 = pts[:, 0]
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            bound = np.where(x1 > 0, np.abs(x1) ** (-self.sigma), -1.0)
        return (x1 > 0) & (_axis_dist_sq(pts) <= bound)

    def analytic_volume(self):
        raise UnboundedRegionError("the shrinking cusp has infinite volume")

    def _rho(self, a: float, b: float) -> float:
        return math.inf if a <= 0 else a ** (-self.sigma / 2.0)

    def _tail(self, delta: float) -> float:
        return math.pi * delta ** (1.0 - self.sigma) / (1.0 - self.sigma)

    def _extent(self):
        return Extent(0.0, math.inf, self._rho, diverging_lo=True, tail_volume=self._tail)


@dataclass(frozen=True)
class TruncatedPowerCusp(Region):
    """Widening cusp clipped to 0 < x1 <= length."""

    gamma: float
    length: float

    def __post_init__(self):
        _check_unit_interval("gamma", self.gamma)
        if self.length <= 0:
            raise ValueError("length must be positive")

    def _contains_batch(self, pts):
        x1 = pts[:, 0]
        with np.errstate(invalid="ignore"):
            bound = np.where(x1 > 0, np.abs(x1) ** (2.0 * self.gamma), -1.0)
        return (x1 > 0) & (x1 <= self.length) & (_axis_dist_sq(pts) <= bound)

    def analytic_volume(self):
        e = 2.0 * self.gamma + 1.0
        return math.pi * self.length**e / e

    def _extent(self):
        g, L = self.gamma, self.length
        return Extent(0.0, L, lambda a, b: min(max(b, 0.0), L) ** g)


@dataclass(frozen=True)
class TruncatedShrinkCusp(Region):
    """Shrinking cusp clipped to 0 < x1 <= length.

    Finite volume pi * length^(1-sigma) / (1-sigma) but no finite
    bounding box: the cross-section radius diverges as x1 -> 0+.
    """

    sigma: float
    length: float

    def __post_init__(self):
        _check_unit_interval("sigma", self.sigma)
        if self.length <= 0:
            raise ValueError("length must be positive")

    def _contains_batch(self, pts):
        x1 = pts[:, 0]
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            bound = np.where(x1 > 0, np.abs(x1) ** (-self.sigma), -1.0)
        return (x1 > 0) & (x1 <= self.length) & (_axis_dist_sq(pts) <= bound)

    def analytic_volume(self):
        e = 1.0 - self.sigma
        return math.pi * self.length**e / e

    def _rho(self, a: float, b: float) -> float:
        return math.inf if a <= 0 else a ** (-self.sigma / 2.0)

    def _tail(self, delta: float) -> float:
        return math.pi * delta ** (1.0 - self.sigma) / (1.0 - self.sigma)

    def _extent(self):
        return Extent(
            0.0, self.length, self._rho, diverging_lo=True, tail_volume=self._tail
        )


@dataclass(frozen=True)
class Complement(Region):
    inner: Region

    def _contains_batch(self, pts):
        return ~self.inner._contains_batch(pts)

    def _extent(self):
        return Extent(-math.inf, math.inf, lambda a, b: math.inf)


@dataclass(frozen=True)
class Intersect(Region):
    first: Region
    second: Region

    def _contains_batch(self, pts):
        return self.first._contains_batch(pts) & self.second._contains_batch(pts)

    def _extent(self):
        e1, e2 = self.first._extent(), self.second._extent()
        lo = max(e1.x1_lo, e2.x1_lo)
        hi = min(e1.x1_hi, e2.x1_hi)

        def rho(a, b):
            return min(e1.rho_bound(a, b), e2.rho_bound(a, b))

        def tail(delta):
            parts = [
                e.tail_volume(delta)
                for e in (e1, e2)
                if e.tail_volume is not None and e.x1_lo == lo
            ]
            return min(parts) if parts else math.inf

        diverging = (e1.diverging_lo and e1.x1_lo == lo) or (
            e2.diverging_lo and e2.x1_lo == lo
        )
        return Extent(lo, hi, rho, diverging_lo=diverging, tail_volume=tail)


@dataclass(frozen=True)
class Diff(Region):
    keep: Region
    remove: Region

    def _contains_batch(self, pts):
        return self.keep._contains_batch(pts) & ~self.remove._contains_batch(pts)

    def _extent(self):
        return self.keep._extent()
