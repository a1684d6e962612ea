"""Modular and Luxemburg norm tests against closed forms and root oracles."""

import math

import numpy as np
import pytest

from vexlp.errors import ExponentRangeError, ExponentRelationError
from vexlp.exponents import PresetSpec, constant_field, preset, two_piece_field
from vexlp.fields import gaussian_scalar, zero_scalar
from vexlp.norms import (
    Quadrature,
    constant_one,
    holder_check,
    lemma1_check,
    lemma2_check,
    luxemburg_norm,
    magnitude_power,
    masked,
    modular,
    pointwise_product,
    power_identity_check,
    restriction_identity_check,
)
from vexlp.regions import Annulus, Ball, ShrinkCusp

MC = Quadrature(n=100_000, seed=0)
RADIAL = Quadrature(scheme="radial")


def bisect_oracle(fn, lo, hi, iters=200):
    """Plain scalar bisection, independent of the norm engine."""
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if fn(mid) > 1.0:
            lo = mid
        else:
            hi = mid
    return hi


# ---------------------------------------------------------------------------
# modular


def test_modular_constant_field():
    # c^p * |domain| for constant field and exponent
    val, err = modular(lambda pts: np.full(pts.shape[0], 2.0), constant_field(3.0),
                       Ball(radius=1), MC)
    exact = 8.0 * 4.0 / 3.0 * math.pi
    assert val == pytest.approx(exact, rel=5e-3)
    assert abs(val - exact) <= 4 * err


def test_modular_zero_field():
    val, _ = modular(zero_scalar(), constant_field(3.0), Ball(radius=1), MC)
    assert val == 0.0


def test_modular_infinite_piece_indicator_convention():
    # twice the indicator of the infinite-exponent region: sup exceeds 1
    shrink_field = preset(PresetSpec.make("shrink_cusp", outer=4, sigma="1/2"))
    f = lambda pts: 2.0 * ShrinkCusp(0.5).contains(pts)
    val, _ = modular(f, shrink_field, Annulus(1, 2), Quadrature(n=50_000, seed=1))
    assert math.isinf(val)
    # scaled below one the same field contributes nothing on that piece
    g = lambda pts: 0.5 * ShrinkCusp(0.5).contains(pts)
    val2, _ = modular(g, shrink_field, Annulus(1, 2), Quadrature(n=50_000, seed=1))
    assert math.isfinite(val2)


# ---------------------------------------------------------------------------
# Luxemburg norm


def test_norm_constant_field_closed_form():
    res = luxemburg_norm(constant_one, constant_field(3.0), Ball(radius=1), MC)
    exact = (4.0 * math.pi / 3.0) ** (1.0 / 3.0)
    assert res.status == "finite"
    assert abs(res.value - exact) <= 3 * res.abs_error + 1e-3 * exact


@pytest.mark.parametrize("p0", [2, 3, 4, 6])
def test_norm_gaussian_closed_form(p0):
    res = luxemburg_norm(gaussian_scalar(), constant_field(float(p0)), None, RADIAL)
    exact = (math.pi / p0) ** (3.0 / (2.0 * p0))
    assert res.value == pytest.approx(exact, rel=1e-3)


def test_norm_two_piece_root_oracle():
    # |O1| = 1 with exponent 2, |O2| = 2 with exponent 4: the norm solves
    # lam^-2 + 2 lam^-4 = 1, whose root is exactly sqrt(2)
    oracle = bisect_oracle(lambda lam: lam**-2 + 2 * lam**-4, 1.0, 4.0)
    assert oracle == pytest.approx(math.sqrt(2.0), abs=1e-12)

    r1 = (3.0 / (4.0 * math.pi)) ** (1.0 / 3.0)
    r2 = (9.0 / (4.0 * math.pi)) ** (1.0 / 3.0)
    field = two_piece_field(Ball(radius=r1), 2.0, 4.0)
    res = luxemburg_norm(constant_one, field, Ball(radius=r2),
                         Quadrature(n=200_000, seed=5))
    assert res.value == pytest.approx(math.sqrt(2.0), abs=0.01)


def test_norm_zero_field():
    res = luxemburg_norm(zero_scalar(), constant_field(3.0), Ball(radius=1), MC)
    assert res.status == "zero" and res.value == 0.0


def test_norm_unit_ball_property():
    res = luxemburg_norm(gaussian_scalar(), constant_field(2.0), None, RADIAL)
    val, _ = modular(lambda pts: gaussian_scalar()(pts) / res.value,
                     constant_field(2.0), None, RADIAL)
    assert val == pytest.approx(1.0, abs=5 * RADIAL.rel_tol)


def test_norm_infinite_piece_reduces_to_sup():
    # field supported only on the infinite-exponent piece: norm = sampled sup
    shrink_field = preset(PresetSpec.make("shrink_cusp", outer=4, sigma="1/2"))
    f = lambda pts: 2.0 * ShrinkCusp(0.5).contains(pts)
    res = luxemburg_norm(f, shrink_field, Annulus(1, 2), Quadrature(n=50_000, seed=2))
    assert res.status == "finite"
    assert res.value == pytest.approx(2.0)


def test_norm_counts_evaluations():
    res = luxemburg_norm(constant_one, constant_field(3.0), Ball(radius=1), MC)
    assert res.evaluations > 5


# ---------------------------------------------------------------------------
# restriction identity


def test_restriction_identity_constant():
    rep = restriction_identity_check(constant_one, constant_field(3.0),
                                     Ball(radius=1), MC)
    assert rep.passed


def test_restriction_identity_piecewise():
    cyl_field = preset(PresetSpec.make("cylinder", outer=4, inner=5))

    def poly(pts):
        return 1.0 + 0.3 * pts[:, 0] ** 2 + 0.1 * pts[:, 1] * pts[:, 2]

    rep = restriction_identity_check(poly, cyl_field, Annulus(1, 2),
                                     Quadrature(n=150_000, seed=3))
    assert rep.passed


def test_restriction_identity_zero():
    rep = restriction_identity_check(zero_scalar(), constant_field(3.0),
                                     Ball(radius=1), MC)
    assert rep.deviation == 0.0


def test_masked_wrapper():
    f = masked(constant_one, Ball(radius=1))
    pts = np.array([[0.5, 0, 0], [2.0, 0, 0]])
    np.testing.assert_array_equal(f(pts), [1.0, 0.0])


# ---------------------------------------------------------------------------
# the two norm lemmas


def test_lemma1_constant_exponent():
    rep = lemma1_check(constant_field(3.0), Ball(radius=1), MC)
    assert rep.passed
    assert rep.lhs == pytest.approx((4 * math.pi / 3) ** (1 / 3), rel=5e-3)


def test_lemma1_two_piece_frozen_values():
    # lhs = sqrt(2) from the root oracle; rhs = 2 max(3^(1/2), 3^(1/4)) = 2 sqrt(3)
    r1 = (3.0 / (4.0 * math.pi)) ** (1.0 / 3.0)
    r2 = (9.0 / (4.0 * math.pi)) ** (1.0 / 3.0)
    field = two_piece_field(Ball(radius=r1), 2.0, 4.0)
    rep = lemma1_check(field, Ball(radius=r2), Quadrature(n=150_000, seed=4))
    assert rep.passed
    assert rep.lhs == pytest.approx(math.sqrt(2.0), abs=0.02)
    assert rep.rhs == pytest.approx(2.0 * math.sqrt(3.0), rel=1e-9)


def test_lemma1_preset_over_annulus():
    cyl_field = preset(PresetSpec.make("cylinder", outer=4, inner=5))
    rep = lemma1_check(cyl_field, Annulus(2, 4), Quadrature(n=100_000, seed=5))
    assert rep.passed


def test_lemma2_constant_equality():
    rep = lemma2_check(lambda pts: np.full(pts.shape[0], 2.5), constant_field(3.0),
                       Ball(radius=1), MC)
    assert rep.passed
    assert rep.lhs == pytest.approx(rep.rhs, rel=1e-2)


def test_lemma2_radius_field():
    f = lambda pts: np.linalg.norm(pts, axis=1)
    rep = lemma2_check(f, constant_field(3.0), Ball(radius=1), MC)
    assert rep.passed


def test_lemma2_zero():
    rep = lemma2_check(zero_scalar(), constant_field(3.0), Ball(radius=1), MC)
    assert rep.passed and rep.lhs == 0.0


# ---------------------------------------------------------------------------
# power identity and Hoelder


def test_power_identity_gaussian():
    rep = power_identity_check(gaussian_scalar(), constant_field(4.0), 2,
                               None, RADIAL)
    assert rep.deviation <= 1e-3
    assert rep.passed


def test_power_identity_constant_s3():
    rep = power_identity_check(constant_one, constant_field(6.0), 3,
                               Ball(radius=1), MC)
    assert rep.lhs == pytest.approx(rep.rhs, rel=1e-3)


def test_power_identity_requires_margin():
    with pytest.raises(ExponentRangeError):
        power_identity_check(constant_one, constant_field(2.0), 2, Ball(radius=1), MC)


def test_power_identity_zero():
    rep = power_identity_check(zero_scalar(), constant_field(5.0), 2,
                               Ball(radius=1), MC)
    assert rep.deviation == 0.0


def test_holder_constant_fields_ratio_one():
    rep = holder_check(constant_one, constant_one, constant_field(2.0),
                       constant_field(4.0), constant_field(4.0), Ball(radius=1), MC)
    assert rep.deviation == pytest.approx(1.0, rel=5e-3)
    assert rep.passed


def test_holder_bump_fields():
    bump = gaussian_scalar()
    rep = holder_check(bump, bump, constant_field(2.0), constant_field(4.0),
                       constant_field(4.0), Ball(radius=3), MC)
    assert rep.deviation <= 2.0


def test_holder_zero_flag():
    rep = holder_check(constant_one, zero_scalar(), constant_field(2.0),
                       constant_field(4.0), constant_field(4.0), Ball(radius=1), MC)
    assert rep.note == "zero" and rep.deviation == 0.0


def test_holder_relation_violation():
    with pytest.raises(ExponentRelationError):
        holder_check(constant_one, constant_one, constant_field(2.0),
                     constant_field(3.0), constant_field(4.0), Ball(radius=1), MC)


def test_pointwise_product_vector_dot():
    f = lambda pts: np.stack([pts[:, 0], pts[:, 1], pts[:, 2]], axis=1)
    prod = pointwise_product(f, f)
    pts = np.array([[1.0, 2.0, 2.0]])
    assert prod(pts)[0] == pytest.approx(9.0)


def test_magnitude_power():
    f = lambda pts: np.stack([pts[:, 0], pts[:, 1], pts[:, 2]], axis=1)
    assert magnitude_power(f, 2)(np.array([[1.0, 2.0, 2.0]]))[0] == pytest.approx(9.0)


# ---------------------------------------------------------------------------
# quick property sweeps (the full 200-case suites live in the acceptance run)


def random_cases(rng, count):
    for _ in range(count):
        radius = rng.uniform(0.5, 2.5)
        if rng.random() < 0.5:
            p = constant_field(rng.uniform(1.5, 6.0))
        else:
            p = two_piece_field(
                Ball(radius=radius * 0.5), rng.uniform(1.5, 6.0), rng.uniform(1.5, 6.0)
            )
        c, a, d = rng.uniform(0.2, 5.0), rng.uniform(0.1, 1.5), rng.uniform(0.0, 1.0)
        f = (lambda pts, c=c, a=a, d=d:
             c * (1.0 + d * pts[:, 0] ** 2) * np.exp(-a * np.einsum("ij,ij->i", pts, pts)))
        yield f, p, Ball(radius=radius)


def test_homogeneity_quick():
    rng = np.random.default_rng(10)
    for i, (f, p, dom) in enumerate(random_cases(rng, 20)):
        quad = Quadrature(n=4096, seed=100 + i)
        c = rng.uniform(0.1, 10.0)
        base = luxemburg_norm(f, p, dom, quad).value
        scaled = luxemburg_norm(lambda pts: c * f(pts), p, dom, quad).value
        assert scaled == pytest.approx(c * base, rel=2 * quad.rel_tol)


def test_monotonicity_quick():
    rng = np.random.default_rng(11)
    for i, (f, p, dom) in enumerate(random_cases(rng, 20)):
        quad = Quadrature(n=4096, seed=200 + i)
        g = lambda pts: f(pts) + 0.5
        nf = luxemburg_norm(f, p, dom, quad).value
        ng = luxemburg_norm(g, p, dom, quad).value
        assert nf <= ng + 2 * quad.rel_tol * max(1.0, ng)


def test_dilation_invariance_constant_exponent():
    # ||f(./s)|| over the dilated ball equals s^(3/p) times the original:
    # exercises node generation and bisection jointly under rescaling
    p0, s = 3.0, 2.5
    f = gaussian_scalar()
    base = luxemburg_norm(f, constant_field(p0), Ball(radius=1.0), RADIAL)
    dil = luxemburg_norm(lambda pts: f(pts / s), constant_field(p0),
                         Ball(radius=s), RADIAL)
    assert dil.value == pytest.approx(s ** (3.0 / p0) * base.value, rel=1e-3)


def test_stratified_scheme():
    quad = Quadrature(scheme="stratified_mc", n=50_000, seed=1, strata=8)
    val, err = modular(constant_one, constant_field(2.0), Ball(radius=1), quad)
    assert val == pytest.approx(4 * math.pi / 3, rel=0.02)
    assert err > 0


def test_constant_exponent_reduction_randomized():
    # for constant p the Luxemburg norm is the classical one: modular^(1/p)
    rng = np.random.default_rng(12)
    for i in range(50):
        p0 = rng.uniform(1.2, 6.0)
        radius = rng.uniform(0.5, 2.5)
        c, a = rng.uniform(0.2, 5.0), rng.uniform(0.1, 1.5)
        f = (lambda pts, c=c, a=a:
             c * np.exp(-a * np.einsum("ij,ij->i", pts, pts)))
        quad = Quadrature(n=4096, seed=300 + i)
        dom = Ball(radius=radius)
        norm = luxemburg_norm(f, constant_field(p0), dom, quad).value
        classical = modular(f, constant_field(p0), dom, quad)[0] ** (1.0 / p0)
        assert norm == pytest.approx(classical, rel=2 * quad.rel_tol)
