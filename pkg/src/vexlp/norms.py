"""Modular integrals and Luxemburg norms for piecewise variable exponents.

The modular of f is the integral of |f(x)|^p(x); the norm is the smallest
lambda making the modular of f/lambda at most 1, located by bracketing and
bisection on a map that is monotone in lambda by construction.  Where the
exponent is +inf the modular contributes nothing if the sampled sup of |f|
stays at or below the scale and +inf otherwise, so the norm on such a
piece degenerates to the sup norm, and the overall norm is the larger of
the bisection root and that sup.

Quadrature is either stratified rejection Monte Carlo over a region
envelope (works for any samplable region, piecewise integrands included)
or a spherical product rule (fast and accurate, but only for smooth
integrands over origin-centered balls and shells).

Fields enter as plain callables mapping (n, 3) point arrays to scalars or
vectors; vector values are reduced by the Euclidean magnitude.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import (
    ExponentRangeError,
    ExponentRelationError,
)
from .exponents import ExponentField
from .regions import Annulus, Ball, Region

_CAP = 1e30
_ESS_SUP_EXTRA = 10_000


@dataclass(frozen=True)
class Quadrature:
    """Integration scheme description; deterministic given its fields.

    ``scheme`` is "mc", "stratified_mc" or "radial".  ``n`` is the Monte
    Carlo sample budget; the radial rule uses the explicit node counts.
    ``truncation_radius`` stands in for all of R^3 when no domain is given.
    """

    scheme: str = "mc"
    n: int = 200_000
    seed: int = 0
    strata: int = 0
    rel_tol: float = 1e-4
    truncation_radius: float = 8.0
    n_radial: int = 96
    n_polar: int = 24
    n_azimuth: int = 24

    def __post_init__(self):
        if self.scheme not in ("mc", "stratified_mc", "radial"):
            raise ValueError(f"unknown quadrature scheme {self.scheme!r}")

    def with_seed(self, seed: int) -> "Quadrature":
        return replace(self, seed=seed)


@dataclass(frozen=True)
class NormResult:
    value: float
    abs_error: float
    status: str  # "finite" | "infinite" | "zero"
    evaluations: int


@dataclass
class _NodeSet:
    points: np.ndarray          # (n, 3)
    weights: np.ndarray         # (n,)
    inside: np.ndarray          # (n,) bool
    slices: tuple[tuple[int, int], ...]
    coarse: Optional["_NodeSet"] = None
    tail_bound: float = 0.0


def _resolve_domain(domain: Optional[Region], quad: Quadrature) -> Region:
    return domain if domain is not None else Ball(radius=quad.truncation_radius)


def _mc_nodes(domain: Region, quad: Quadrature) -> _NodeSet:
    strata = quad.strata if quad.scheme == "stratified_mc" and quad.strata > 1 else 0
    env = domain.envelope(strata=strata)
    vols = np.array([b.volume() for b in env.boxes])
    alloc = np.maximum(1, np.round(quad.n * vols / vols.sum()).astype(int))
    streams = np.random.SeedSequence(quad.seed).spawn(len(env.boxes))
    pts_list, w_list, slices = [], [], []
    start = 0
    for box, vol, n_i, ss in zip(env.boxes, vols, alloc, streams):
        rng = np.random.default_rng(ss)
        pts_list.append(box.sample(rng, int(n_i)))
        w_list.append(np.full(int(n_i), vol / n_i))
        slices.append((start, start + int(n_i)))
        start += int(n_i)
    points = np.concatenate(pts_list)
    weights = np.concatenate(w_list)
    inside = domain.contains(points)
    return _NodeSet(points, weights, inside, tuple(slices), tail_bound=env.tail_bound)


def _product_nodes(r0: float, r1: float, n_r: int, n_mu: int, n_phi: int) -> _NodeSet:
    xr, wr = np.polynomial.legendre.leggauss(n_r)
    r = 0.5 * (r0 + r1) + 0.5 * (r1 - r0) * xr
    wr = 0.5 * (r1 - r0) * wr
    xm, wm = np.polynomial.legendre.leggauss(n_mu)
    phi = (np.arange(n_phi) + 0.5) * (2.0 * math.pi / n_phi)
    wphi = 2.0 * math.pi / n_phi
    R, MU, PHI = np.meshgrid(r, xm, phi, indexing="ij")
    WR, WM, _ = np.meshgrid(wr, wm, phi, indexing="ij")
    s = np.sqrt(1.0 - MU**2)
    pts = np.stack(
        [(R * MU).ravel(), (R * s * np.cos(PHI)).ravel(), (R * s * np.sin(PHI)).ravel()],
        axis=1,
    )
    weights = (WR * WM * wphi * R**2).ravel()
    n = pts.shape[0]
    return _NodeSet(pts, weights, np.ones(n, dtype=bool), ((0, n),))


def _radial_nodes(domain: Region, quad: Quadrature) -> _NodeSet:
    if isinstance(domain, Ball) and domain.center == (0.0, 0.0, 0.0):
        r0, r1 = 0.0, domain.radius
    elif isinstance(domain, Annulus):
        r0, r1 = domain.r_inner, domain.r_outer
    else:
        raise ValueError(
            "the radial product rule needs an origin-centered ball or shell; "
            f"got {type(domain).__name__}"
        )
    fine = _product_nodes(r0, r1, quad.n_radial, quad.n_polar, quad.n_azimuth)
    coarse = _product_nodes(
        r0,
        r1,
        max(8, quad.n_radial // 2),
        max(6, quad.n_polar // 2),
        max(6, quad.n_azimuth // 2),
    )
    fine.coarse = coarse
    return fine


def _build_nodes(domain: Optional[Region], quad: Quadrature) -> _NodeSet:
    dom = _resolve_domain(domain, quad)
    if quad.scheme == "radial":
        return _radial_nodes(dom, quad)
    return _mc_nodes(dom, quad)


def _magnitude(f, pts: np.ndarray) -> np.ndarray:
    vals = np.asarray(f(pts), dtype=float)
    if vals.ndim == 2:
        return np.linalg.norm(vals, axis=1)
    return np.abs(vals)


def _stratified_se(nodes: _NodeSet, contrib: np.ndarray) -> float:
    """Standard error of sum(w * contrib) over the node strata."""
    var = 0.0
    for a, b in nodes.slices:
        block = contrib[a:b]
        n_i = b - a
        if n_i < 2:
            continue
        vol = float(nodes.weights[a] * n_i)
        var += vol**2 * float(np.var(block)) / n_i
    return math.sqrt(var)


def _weighted_sum(nodes: _NodeSet, contrib: np.ndarray) -> tuple[float, float]:
    value = float(np.sum(nodes.weights * contrib))
    return value, _stratified_se(nodes, contrib)


def _node_contrib(
    nodes: _NodeSet, f, p: ExponentField
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-node |f|, p and the finite-exponent mask (zero off-domain)."""
    n = nodes.points.shape[0]
    mag = np.zeros(n)
    pv = np.full(n, math.inf)
    idx = np.flatnonzero(nodes.inside)
    if idx.size:
        pts_in = nodes.points[idx]
        mag[idx] = _magnitude(f, pts_in)
        pv[idx] = p(pts_in)
    finite = nodes.inside & np.isfinite(pv)
    return mag, pv, finite


def _power_contrib(mag, pv, finite, lam: float) -> np.ndarray:
    """(|f|/lam)^p on the finite-exponent nodes, zero elsewhere."""
    out = np.zeros_like(mag)
    m = finite & (mag > 0.0)
    if m.any():
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            expo = pv[m] * (np.log(mag[m]) - math.log(lam))
            out[m] = np.exp(np.minimum(expo, 745.0))
    return out


def _infinite_piece_sup(
    f, p: ExponentField, domain: Optional[Region], quad: Quadrature,
    mag: np.ndarray, finite: np.ndarray, inside: np.ndarray,
) -> float:
    """Sampled ess-sup of |f| over the part of the domain where p = +inf."""
    if not p.has_infinite_piece:
        return 0.0
    sup = float(mag[inside & ~finite].max()) if (inside & ~finite).any() else 0.0
    dom = _resolve_domain(domain, quad)
    extra = dom.sample(_ESS_SUP_EXTRA, quad.seed + 9901)
    pv = p(extra)
    mask = ~np.isfinite(pv)
    if mask.any():
        sup = max(sup, float(_magnitude(f, extra[mask]).max()))
    return sup


def modular(
    f,
    p: ExponentField,
    domain: Optional[Region] = None,
    quad: Quadrature = Quadrature(),
) -> tuple[float, float]:
    """Integral of |f(x)|^p(x) over the domain, with standard error.

    Where p = +inf the integrand is replaced by the indicator convention:
    the contribution is 0 if the sampled sup of |f| there is at most 1 and
    +inf otherwise.  An overflowing power at any node reports +inf.
    """
    nodes = _build_nodes(domain, quad)
    mag, pv, finite = _node_contrib(nodes, f, p)
    contrib = _power_contrib(mag, pv, finite, 1.0)
    value, se = _weighted_sum(nodes, contrib)
    if nodes.coarse is not None:
        cmag, cpv, cfin = _node_contrib(nodes.coarse, f, p)
        cval = float(np.sum(nodes.coarse.weights * _power_contrib(cmag, cpv, cfin, 1.0)))
        se = abs(value - cval)
    se += nodes.tail_bound * float(np.max(contrib, initial=0.0))
    sup = _infinite_piece_sup(f, p, domain, quad, mag, finite, nodes.inside)
    if sup > 1.0 or math.isinf(value):
        return math.inf, se
    return value, se


def luxemburg_norm(
    f,
    p: ExponentField,
    domain: Optional[Region] = None,
    quad: Quadrature = Quadrature(),
) -> NormResult:
    """Smallest lambda with modular(f / lambda) <= 1.

    Brackets by doubling/halving and bisects the monotone map on frozen
    quadrature nodes; on infinite-exponent pieces the norm contribution is
    the sampled ess-sup of |f|.  Escaping the bracket above 1e30 reports
    status "infinite"; a vanishing modular reports status "zero".
    """
    nodes = _build_nodes(domain, quad)
    mag, pv, finite = _node_contrib(nodes, f, p)
    sup_inf_piece = _infinite_piece_sup(f, p, domain, quad, mag, finite, nodes.inside)
    evaluations = 0

    def rho(lam: float) -> float:
        nonlocal evaluations
        evaluations += 1
        return float(np.sum(nodes.weights * _power_contrib(mag, pv, finite, lam)))

    has_mass = bool((finite & (mag > 0.0)).any())
    root, bracket = 0.0, 0.0
    if has_mass:
        rho_1 = rho(1.0)
        lam = max(1.0, min(rho_1, _CAP))
        if rho(lam) > 1.0:
            lo = lam
            while True:
                lam *= 2.0
                if lam > _CAP:
                    return NormResult(math.inf, math.inf, "infinite", evaluations)
                if rho(lam) <= 1.0:
                    break
                lo = lam
            hi = lam
        else:
            hi = lam
            lo = None
            while lam > 1e-300:
                lam *= 0.5
                if rho(lam) > 1.0:
                    lo = lam
                    break
                hi = lam
            if lo is None:  # modular stays below 1 at every positive scale
                return _finish(0.0, 0.0, sup_inf_piece, 0.0, evaluations)
        while (hi - lo) > 0.25 * quad.rel_tol * hi:
            mid = 0.5 * (lo + hi)
            if rho(mid) > 1.0:
                lo = mid
            else:
                hi = mid
        root, bracket = hi, hi - lo
    quad_err = _root_uncertainty(nodes, mag, pv, finite, root) if root > 0 else 0.0
    return _finish(root, bracket, sup_inf_piece, quad_err, evaluations)


def _finish(root, bracket, sup, quad_err, evaluations) -> NormResult:
    value = max(root, sup)
    if value == 0.0:
        return NormResult(0.0, 0.0, "zero", evaluations)
    err = bracket + quad_err if value == root else bracket
    return NormResult(value, err, "finite", evaluations)


def _root_uncertainty(nodes, mag, pv, finite, lam: float) -> float:
    """Quadrature noise propagated through the root: se(rho) / |d rho / d lam|."""
    if nodes.coarse is not None:
        return 0.0  # deterministic product rule; the bracket width dominates
    contrib = _power_contrib(mag, pv, finite, lam)
    se = _stratified_se(nodes, contrib)
    deriv = float(np.sum(nodes.weights * np.where(finite, pv, 0.0) * contrib)) / lam
    return se / deriv if deriv > 0 else 0.0


def integrate(
    fn: Callable[[np.ndarray], np.ndarray],
    domain: Optional[Region] = None,
    quad: Quadrature = Quadrature(),
) -> tuple[float, float]:
    """Quadrature of a plain scalar integrand over a region."""
    values, errors = integrate_many([fn], domain, quad)
    return values[0], errors[0]


def integrate_many(
    fns: Sequence[Callable[[np.ndarray], np.ndarray]],
    domain: Optional[Region] = None,
    quad: Quadrature = Quadrature(),
) -> tuple[list[float], list[float]]:
    """Integrate several integrands on shared nodes.

    Sharing nodes keeps pointwise inequalities between integrands intact
    in the quadrature values, which the majorant checks rely on.
    """
    nodes = _build_nodes(domain, quad)
    idx = np.flatnonzero(nodes.inside)
    values, errors = [], []
    for fn in fns:
        contrib = np.zeros(nodes.points.shape[0])
        if idx.size:
            contrib[idx] = np.asarray(fn(nodes.points[idx]), dtype=float)
        value, se = _weighted_sum(nodes, contrib)
        if nodes.coarse is not None:
            cc = np.asarray(fn(nodes.coarse.points), dtype=float)
            se = abs(value - float(np.sum(nodes.coarse.weights * cc)))
        se += nodes.tail_bound * float(np.max(np.abs(contrib), initial=0.0))
        values.append(value)
        errors.append(se)
    return values, errors


# ---------------------------------------------------------------------------
# field wrappers (integration plumbing; fields stay plain callables)


def constant_one(pts: np.ndarray) -> np.ndarray:
    return np.ones(pts.shape[0])


def masked(f, region: Region):
    """f * indicator(region)."""

    def wrapped(pts):
        vals = np.asarray(f(pts), dtype=float)
        keep = region.contains(pts)
        return vals * (keep[:, None] if vals.ndim == 2 else keep)

    return wrapped


def magnitude_power(f, s: float):
    """|f|^s as a scalar field."""

    def wrapped(pts):
        return _magnitude(f, pts) ** s

    return wrapped


def pointwise_product(f, g):
    """f * g for scalars, the dot product for vector pairs."""

    def wrapped(pts):
        a = np.asarray(f(pts), dtype=float)
        b = np.asarray(g(pts), dtype=float)
        if a.ndim == 2 and b.ndim == 2:
            return np.einsum("ij,ij->i", a, b)
        if a.ndim == 2 or b.ndim == 2:
            raise ValueError("cannot multiply a vector field by a scalar field here")
        return a * b

    return wrapped


# ---------------------------------------------------------------------------
# executable lemma / identity checks


@dataclass(frozen=True)
class CheckReport:
    lhs: float
    rhs: float
    deviation: float
    tolerance: float
    passed: bool
    note: str = ""


def restriction_identity_check(
    f, p: ExponentField, region: Region, quad: Quadrature = Quadrature()
) -> CheckReport:
    """Norm over a region vs. norm of the masked field over a larger box."""
    lhs = luxemburg_norm(f, p, region, quad)
    env = region.envelope()
    radius = 1.25 * max(
        max(abs(v) for v in box.lo + box.hi) for box in env.boxes
    )
    rhs = luxemburg_norm(
        masked(f, region), p, Ball(radius=radius), quad.with_seed(quad.seed + 1)
    )
    tol = lhs.abs_error + rhs.abs_error
    dev = abs(lhs.value - rhs.value)
    return CheckReport(lhs.value, rhs.value, dev, tol, dev <= 3.0 * tol + 1e-12)


def lemma1_check(
    p: ExponentField, region: Region, quad: Quadrature = Quadrature()
) -> CheckReport:
    """Norm of the constant 1 vs. 2 * max(|O|^(1/p-), |O|^(1/p+))."""
    lhs = luxemburg_norm(constant_one, p, region, quad)
    bounds = p.essential_bounds(region, seed=quad.seed)
    try:
        vol = region.analytic_volume()
    except Exception:
        vol = region.volume("monte_carlo", n=quad.n, seed=quad.seed + 7).value
    inv_lo = 1.0 / bounds.lower
    inv_hi = 0.0 if math.isinf(bounds.upper) else 1.0 / bounds.upper
    rhs = 2.0 * max(vol**inv_lo, vol**inv_hi)
    tol = 3.0 * lhs.abs_error + 1e-9 * rhs
    return CheckReport(lhs.value, rhs, max(0.0, lhs.value - rhs), tol,
                       lhs.value <= rhs + tol)


def lemma2_check(
    f, p: ExponentField, region: Region, quad: Quadrature = Quadrature()
) -> CheckReport:
    """Norm of f vs. (sampled sup of |f|) * norm of 1, over a region."""
    lhs = luxemburg_norm(f, p, region, quad)
    one = luxemburg_norm(constant_one, p, region, quad)
    sup = float(_magnitude(f, region.sample(_ESS_SUP_EXTRA, quad.seed + 3)).max())
    rhs = sup * one.value
    tol = 3.0 * (lhs.abs_error + sup * one.abs_error) + 1e-6 * max(rhs, 1.0)
    return CheckReport(lhs.value, rhs, max(0.0, lhs.value - rhs), tol,
                       lhs.value <= rhs + tol)


def power_identity_check(
    f,
    p: ExponentField,
    s: int,
    domain: Optional[Region] = None,
    quad: Quadrature = Quadrature(),
) -> CheckReport:
    """Relative deviation of || |f|^s ||_{p/s} from ||f||_p^s, s in {2, 3}."""
    if s not in (2, 3):
        raise ValueError(f"power split must be 2 or 3, got {s}")
    if p.declared_lower <= s:
        raise ExponentRangeError(
            f"power identity with s={s} needs every exponent bound > {s}; "
            f"lowest declared bound is {p.declared_lower}"
        )
    lhs = luxemburg_norm(magnitude_power(f, s), p.divided_by(s), domain, quad)
    base = luxemburg_norm(f, p, domain, quad)
    rhs = base.value**s
    scale = max(abs(rhs), 1e-300)
    dev = abs(lhs.value - rhs) / scale
    tol = (lhs.abs_error + s * base.value ** (s - 1) * base.abs_error) / scale + 1e-12
    return CheckReport(lhs.value, rhs, dev, tol, dev <= 3.0 * tol)


def holder_check(
    f,
    g,
    p: ExponentField,
    q: ExponentField,
    r: ExponentField,
    domain: Optional[Region] = None,
    quad: Quadrature = Quadrature(),
    flag_threshold: float = 2.0,
) -> CheckReport:
    """Ratio ||f g||_p / (||f||_q ||g||_r) under 1/p = 1/q + 1/r."""
    dom = _resolve_domain(domain, quad)
    probe = dom.sample(4096, quad.seed + 17)
    with np.errstate(divide="ignore"):
        gap = np.abs(1.0 / p(probe) - 1.0 / q(probe) - 1.0 / r(probe))
    if float(gap.max()) > 1e-9:
        raise ExponentRelationError(
            "pointwise relation 1/p = 1/q + 1/r fails; "
            f"largest sampled gap {float(gap.max()):.3e}"
        )
    n_fg = luxemburg_norm(pointwise_product(f, g), p, domain, quad)
    n_f = luxemburg_norm(f, q, domain, quad)
    n_g = luxemburg_norm(g, r, domain, quad)
    denom = n_f.value * n_g.value
    if denom == 0.0 or n_fg.value == 0.0:
        return CheckReport(n_fg.value, denom, 0.0, 0.0, True, note="zero")
    ratio = n_fg.value / denom
    return CheckReport(
        n_fg.value, denom, ratio, flag_threshold, ratio <= flag_threshold,
        note="" if ratio <= flag_threshold else "ratio above threshold",
    )
