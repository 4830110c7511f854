"""Universal Weierstrass family with a 2-torsion point and a higher-order point.

The family is y^2 = x^3 + c x^2 + (1 - b - c) b x with marked points
P = (0, 0) of exact order 2 and Q = (b, b) of order greater than 2; its
discriminant is 16 b^2 (b + c - 1)^2 (4 b^2 + 4 b c - 4 b + c^2).  Any
Weierstrass curve over a base with 2 invertible, carrying such a pair of
points, normalizes into the family by an explicit coordinate change.

Coordinate changes are quadruples (u, r, s, t) acting on coefficients by

    a1' = (a1 + 2 s) u,                       a2' = (a2 - a1 s + 3 r - s^2) u^2,
    a3' = (a3 + a1 r + 2 t) u^3,              a4' = (a4 + 2 a2 r - a1 (r s + t)
                                                     - a3 s + 3 r^2 - 2 s t) u^4,
    a6' = (a6 - a1 r t + a2 r^2 - a3 t + a4 r + r^3 - t^2) u^6,

and on points by (x, y) -> ((x - r) u^2, (y - s (x - r) - t) u^3).  Note the
convention: u multiplies (it is the inverse of the classical scaling), so
normalization picks u = v / w to carry Q = (v, w) to (b, b) with b = v^3/w^2.

All functions are exact and base-agnostic: Fraction, sympy expressions, and
the finite-field elements of the algebra module all work.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .curves import compose_transforms, invert_transform

# ===== DISCRIMINANTS ===== #


def family_discriminant(b, c):
    """16 b^2 (b + c - 1)^2 (4 b^2 + 4 b c - 4 b + c^2)."""
    return 16 * b ** 2 * (b + c - 1) ** 2 * (4 * b * b + 4 * b * c - 4 * b + c * c)


def weierstrass_discriminant(coeffs):
    """Discriminant of a general long Weierstrass equation."""
    a1, a2, a3, a4, a6 = coeffs
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    b8 = (a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3
          - a4 * a4)
    return -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6


# ===== FAMILY PARAMETERS ===== #


def _is_zero(x):
    return not x


def _in_char_two(x):
    return hasattr(x, "field") and x.field.p == 2


def _exact(x):
    """Promote plain ints to Fraction so division never produces floats."""
    return Fraction(x) if isinstance(x, int) else x


@dataclass(frozen=True)
class FamilyParams:
    """Exact parameters (b, c) with invertible family discriminant."""

    b: object
    c: object

    def __post_init__(self):
        object.__setattr__(self, "b", _exact(self.b))
        object.__setattr__(self, "c", _exact(self.c))
        if _in_char_two(self.b) or _in_char_two(self.c):
            raise ValueError("2 must be invertible in the base")
        if _is_zero(family_discriminant(self.b, self.c)):
            raise ValueError("degenerate parameters")


def family_curve(params):
    """Coefficients and marked points of the family member at (b, c).

    Returns:
        (coeffs, P, Q): the 5-tuple (a1, a2, a3, a4, a6) of
        y^2 = x^3 + c x^2 + (1 - b - c) b x, with P = (0, 0) and Q = (b, b).
    """
    b, c = params.b, params.c
    zero = b - b
    coeffs = (zero, c, zero, (1 - b - c) * b, zero)
    # Q lies on the curve identically: b^2 = b^3 + c b^2 + (1-b-c) b * b
    assert _is_zero(b * b - (b ** 3 + c * b * b + coeffs[3] * b))
    return coeffs, (zero, zero), (b, b)


# ===== TRANSFORMATION ALGEBRA ===== #


def apply_transform(coeffs, quad):
    """Coefficient change under (u, r, s, t); u must be invertible."""
    u, r, s, t = quad
    if _is_zero(u):
        raise ValueError("u must be invertible")
    a1, a2, a3, a4, a6 = coeffs
    return (
        (a1 + 2 * s) * u,
        (a2 - a1 * s + 3 * r - s * s) * u ** 2,
        (a3 + a1 * r + 2 * t) * u ** 3,
        (a4 + 2 * a2 * r - a1 * (r * s + t) - a3 * s + 3 * r * r - 2 * s * t)
        * u ** 4,
        (a6 - a1 * r * t + a2 * r * r - a3 * t + a4 * r + r ** 3 - t * t)
        * u ** 6,
    )


def apply_transform_point(point, quad):
    """Point map (x, y) -> ((x - r) u^2, (y - s (x - r) - t) u^3)."""
    u, r, s, t = quad
    x, y = point
    return ((x - r) * u ** 2, (y - s * (x - r) - t) * u ** 3)


def _on_curve(coeffs, point):
    a1, a2, a3, a4, a6 = coeffs
    x, y = point
    return _is_zero(y * y + a1 * x * y + a3 * y
                    - (x ** 3 + a2 * x * x + a4 * x + a6))


def _doubles_to_origin(coeffs, point):
    # a point is 2-torsion exactly when it equals its own negative
    a1, _, a3, _, _ = coeffs
    x, y = point
    return _is_zero(2 * y + a1 * x + a3)


def _halve(x):
    if hasattr(x, "field"):
        two = x.field.one() + x.field.one()
        return x * two ** -1
    return x / 2


# ===== NORMALIZATION ===== #


def normalize(coeffs, P, Q):
    """Coordinate change carrying (curve, P, Q) into the family.

    Args:
        coeffs: Weierstrass coefficients (a1, a2, a3, a4, a6).
        P: affine 2-torsion point.
        Q: affine point of order greater than 2.

    Returns:
        (FamilyParams, quad) such that applying quad maps the inputs exactly
        to (family_curve(params), (0, 0), (b, b)).

    Raises:
        ValueError: points off the curve, P not of exact order 2, Q of
            order at most 2, or a non-invertible normalized coordinate.
    """
    coeffs = tuple(_exact(a) for a in coeffs)
    P = tuple(_exact(x) for x in P)
    Q = tuple(_exact(x) for x in Q)
    if any(_in_char_two(a) for a in coeffs):
        raise ValueError("2 must be invertible in the base")
    if not _on_curve(coeffs, P):
        raise ValueError("P must lie on the curve")
    if not _on_curve(coeffs, Q):
        raise ValueError("Q must lie on the curve")
    if not _doubles_to_origin(coeffs, P):
        raise ValueError("P must have exact order 2")
    if _doubles_to_origin(coeffs, Q):
        raise ValueError("order > 2 required for Q")

    one = _one_like(coeffs[1] + P[0])
    zero = one - one

    # move P to the origin, then kill a1 with a shear
    quad = (one, P[0], zero, P[1])
    step = apply_transform(coeffs, quad)
    shear = (one, zero, -_halve(step[0]), zero)
    quad = compose_transforms(quad, shear)
    step = apply_transform(coeffs, quad)
    assert _is_zero(step[0]) and _is_zero(step[2]) and _is_zero(step[4])

    v, w = apply_transform_point(Q, quad)
    if _is_zero(v):
        raise ValueError("normalized x-coordinate of Q is not invertible")
    if _is_zero(w):
        raise ValueError("normalized y-coordinate of Q is not invertible")
    scale = (v / w, zero, zero, zero)
    quad = compose_transforms(quad, scale)

    final = apply_transform(coeffs, quad)
    params = FamilyParams(b=v ** 3 / w ** 2, c=final[1])
    expected, origin, marked = family_curve(params)
    assert all(_is_zero(x - y) for x, y in zip(final, expected))
    assert apply_transform_point(P, quad) == origin
    assert apply_transform_point(Q, quad) == marked
    return params, quad


def _one_like(x):
    if hasattr(x, "field"):
        return x.field.one()
    return x - x + 1


# ===== BIRATIONAL PARAMETER CHANGE ===== #


def jain_parameters(params):
    """Forward birational change (b, c) -> (t, q).

    Raises:
        ValueError: on the degeneracy loci c = 1 and t = 0.
    """
    b, c = params.b, params.c
    if _is_zero(c - 1):
        raise ValueError("c = 1 degenerate")
    t = (-2 * b - c + 1) / (c - 1)
    if _is_zero(t):
        raise ValueError("t = 0 degenerate")
    q = b + _halve(c) + _halve(_one_like(c)) - 2 * b / (2 * b + c - 1)
    return t, q


def jain_inverse(t, q):
    """Backward birational change (t, q) -> FamilyParams."""
    t, q = _exact(t), _exact(q)
    if _is_zero(t):
        raise ValueError("t = 0 degenerate")
    b = (t + 1) * (q * t + 1) / t ** 2
    c = (t * t - 2 * q * t - 2) / t ** 2
    return FamilyParams(b=b, c=c)


def jain_roundtrip(params):
    """Forward-then-backward change; the identity on its domain."""
    t, q = jain_parameters(params)
    return jain_inverse(t, q)


# ===== SMOKE TEST ===== #

if __name__ == "__main__":
    p = FamilyParams(b=Fraction(2), c=Fraction(3))
    coeffs, P, Q = family_curve(p)
    assert coeffs == (0, 3, 0, (1 - 2 - 3) * 2, 0)
    back, quad = normalize(coeffs, P, Q)
    assert (back.b, back.c) == (2, 3) and quad == (1, 0, 0, 0)
    t, q = jain_parameters(p)
    assert (t, q) == (-3, Fraction(10, 3))
    rt = jain_roundtrip(p)
    assert (rt.b, rt.c) == (p.b, p.c)
    ident = apply_transform(coeffs, (Fraction(1), 0, 0, 0))
    assert ident == coeffs
    print("family smoke test ok")
