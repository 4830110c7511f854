"""Tests for the universal two-marked-point Weierstrass family."""

import random
from fractions import Fraction

import pytest
import sympy

from torsionkit.algebra import GF
from torsionkit.curves import (EllipticCurve, compose_transforms,
                               invert_transform, transform_curve,
                               transform_point)
from torsionkit.family import (FamilyParams, apply_transform,
                               apply_transform_point, family_curve,
                               family_discriminant, jain_inverse,
                               jain_parameters, jain_roundtrip, normalize,
                               weierstrass_discriminant)

# ===== SYMBOLIC IDENTITIES ===== #


def test_discriminant_identity_full_expansion():
    b, c = sympy.symbols("b c")
    quartic_in_x_coeff = (1 - b - c) * b
    delta = weierstrass_discriminant((0, c, 0, quartic_in_x_coeff, 0))
    assert sympy.expand(delta - family_discriminant(b, c)) == 0
    # and the displayed product is genuinely the factorization
    assert sympy.factor(family_discriminant(b, c)) == (
        16 * b ** 2 * (b + c - 1) ** 2
        * (4 * b ** 2 + 4 * b * c - 4 * b + c ** 2))


def test_composition_law_symbolic():
    syms = sympy.symbols("a1 a2 a3 a4 a6 u1 r1 s1 t1 u2 r2 s2 t2")
    coeffs, first, second = syms[:5], syms[5:9], syms[9:13]
    sequential = apply_transform(apply_transform(coeffs, first), second)
    combined = apply_transform(coeffs, compose_transforms(first, second))
    assert all(sympy.simplify(x - y) == 0
               for x, y in zip(sequential, combined))


def test_discriminant_scaling_symbolic():
    a1, a2, a3, a4, a6, u, r, s, t = sympy.symbols("a1 a2 a3 a4 a6 u r s t")
    coeffs = (a1, a2, a3, a4, a6)
    moved = apply_transform(coeffs, (u, r, s, t))
    difference = (weierstrass_discriminant(moved)
                  - weierstrass_discriminant(coeffs) * u ** 12)
    assert sympy.expand(difference) == 0


# ===== AGREEMENT WITH THE CURVE MODULE ===== #


def test_transform_agrees_with_curve_module():
    rng = random.Random(20260815)
    for p, k in ((5, 1), (7, 1), (3, 2), (11, 1)):
        F = GF(p, k)
        elements = [F.from_int(i) for i in range(F.order)]
        units = [e for e in elements if e]
        for _ in range(8):
            coeffs = tuple(rng.choice(elements) for _ in range(5))
            curve = EllipticCurve(F, coeffs, check_smooth=False)
            quad = (rng.choice(units), rng.choice(elements),
                    rng.choice(elements), rng.choice(elements))
            moved = transform_curve(curve, quad, check_smooth=False)
            assert moved.a_invariants() == apply_transform(coeffs, quad)
            point = (rng.choice(elements), rng.choice(elements))
            assert transform_point(point, quad) == apply_transform_point(
                point, quad)


# ===== FAMILY MEMBERS AND MARKED POINTS ===== #


def test_family_member_frozen_example():
    params = FamilyParams(b=2, c=3)
    coeffs, P, Q = family_curve(params)
    assert coeffs == (0, 3, 0, -8, 0)
    assert P == (0, 0) and Q == (2, 2)
    assert weierstrass_discriminant(coeffs) == family_discriminant(
        Fraction(2), Fraction(3))


def test_marked_point_orders():
    rng = random.Random(11)
    produced = 0
    while produced < 25:
        b = Fraction(rng.randint(-9, 9), rng.randint(1, 6))
        c = Fraction(rng.randint(-9, 9), rng.randint(1, 6))
        try:
            params = FamilyParams(b=b, c=c)
        except ValueError:
            continue
        coeffs, P, Q = family_curve(params)
        a1, a2, a3, a4, a6 = coeffs
        for x, y in (P, Q):
            assert (y * y + a1 * x * y + a3 * y
                    == x ** 3 + a2 * x * x + a4 * x + a6)
        # P equals its own negative, Q does not
        assert 2 * P[1] + a1 * P[0] + a3 == 0
        assert 2 * Q[1] + a1 * Q[0] + a3 != 0
        produced += 1


def test_degenerate_parameters_rejected():
    for b, c in ((0, 5), (3, -2), (Fraction(1, 2), Fraction(1, 2)), (9, -12)):
        with pytest.raises(ValueError, match="degenerate parameters"):
            FamilyParams(b=b, c=c)
    F = GF(101, 1)
    with pytest.raises(ValueError, match="degenerate parameters"):
        FamilyParams(b=F.from_int(9), c=F.from_int(-12))


def test_characteristic_two_rejected():
    F2 = GF(2, 1)
    with pytest.raises(ValueError, match="2 must be invertible"):
        FamilyParams(b=F2.one(), c=F2.one())
    F4 = GF(2, 2)
    with pytest.raises(ValueError, match="2 must be invertible"):
        normalize((F4.one(), F4.zero(), F4.zero(), F4.zero(), F4.one()),
                  (F4.zero(), F4.zero()), (F4.one(), F4.one()))


# ===== NORMALIZATION ===== #


def _random_rational_params(rng):
    while True:
        b = Fraction(rng.randint(-12, 12), rng.randint(1, 8))
        c = Fraction(rng.randint(-12, 12), rng.randint(1, 8))
        try:
            return FamilyParams(b=b, c=c)
        except ValueError:
            continue


def test_normalize_is_identity_on_family_members():
    rng = random.Random(3)
    for _ in range(10):
        params = _random_rational_params(rng)
        coeffs, P, Q = family_curve(params)
        back, quad = normalize(coeffs, P, Q)
        assert (back.b, back.c) == (params.b, params.c)
        assert quad == (1, 0, 0, 0)


def test_normalize_roundtrip_rationals():
    rng = random.Random(65)
    done = 0
    while done < 50:
        params = _random_rational_params(rng)
        coeffs, P, Q = family_curve(params)
        quad = (Fraction(rng.randint(1, 9), rng.randint(1, 9)),
                Fraction(rng.randint(-6, 6)), Fraction(rng.randint(-6, 6)),
                Fraction(rng.randint(-6, 6)))
        moved = apply_transform(coeffs, quad)
        recovered, total = normalize(moved, apply_transform_point(P, quad),
                                     apply_transform_point(Q, quad))
        assert (recovered.b, recovered.c) == (params.b, params.c)
        # the composite of the scrambling and the recovery is the identity
        whole = compose_transforms(quad, total)
        assert apply_transform(coeffs, whole) == coeffs
        assert apply_transform(moved, invert_transform(quad)) == coeffs
        done += 1


def test_normalize_roundtrip_f101():
    F = GF(101, 1)
    elements = [F.from_int(i) for i in range(101)]
    units = elements[1:]
    rng = random.Random(101)
    done = 0
    while done < 50:
        try:
            params = FamilyParams(b=rng.choice(elements),
                                  c=rng.choice(elements))
        except ValueError:
            continue
        coeffs, P, Q = family_curve(params)
        quad = (rng.choice(units), rng.choice(elements),
                rng.choice(elements), rng.choice(elements))
        moved = apply_transform(coeffs, quad)
        recovered, total = normalize(moved, apply_transform_point(P, quad),
                                     apply_transform_point(Q, quad))
        assert (recovered.b, recovered.c) == (params.b, params.c)
        assert weierstrass_discriminant(moved) == (
            family_discriminant(params.b, params.c) * quad[0] ** 12)
        done += 1


def test_normalize_validations():
    params = FamilyParams(b=2, c=3)
    coeffs, P, Q = family_curve(params)
    with pytest.raises(ValueError, match="P must lie on the curve"):
        normalize(coeffs, (1, 1), Q)
    with pytest.raises(ValueError, match="Q must lie on the curve"):
        normalize(coeffs, P, (1, 1))
    with pytest.raises(ValueError, match="exact order 2"):
        normalize(coeffs, Q, Q)
    with pytest.raises(ValueError, match="order > 2 required"):
        normalize(coeffs, P, P)


def test_apply_transform_rejects_non_invertible_scale():
    coeffs = (0, 3, 0, -8, 0)
    with pytest.raises(ValueError, match="u must be invertible"):
        apply_transform(coeffs, (0, 1, 2, 3))
    F = GF(7, 1)
    with pytest.raises(ValueError, match="u must be invertible"):
        apply_transform(tuple(F.from_int(a) for a in coeffs),
                        (F.zero(), F.one(), F.one(), F.one()))


# ===== BIRATIONAL PARAMETER CHANGE ===== #


def test_jain_frozen_example():
    params = FamilyParams(b=2, c=3)
    t, q = jain_parameters(params)
    assert (t, q) == (-3, Fraction(10, 3))
    back = jain_inverse(t, q)
    assert (back.b, back.c) == (2, 3)


def test_jain_roundtrip_random():
    rng = random.Random(44)
    done = 0
    while done < 100:
        params = _random_rational_params(rng)
        try:
            back = jain_roundtrip(params)
        except ValueError as err:
            assert "degenerate" in str(err)
            continue
        assert (back.b, back.c) == (params.b, params.c)
        done += 1
    assert done == 100


def test_jain_degeneracies():
    with pytest.raises(ValueError, match="c = 1 degenerate"):
        jain_parameters(FamilyParams(b=3, c=1))
    # 2b + c - 1 = 0 forces t = 0
    with pytest.raises(ValueError, match="t = 0 degenerate"):
        jain_parameters(FamilyParams(b=Fraction(3), c=Fraction(-5)))
    with pytest.raises(ValueError, match="t = 0 degenerate"):
        jain_inverse(0, Fraction(5))
