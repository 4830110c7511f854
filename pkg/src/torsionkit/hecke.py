"""Hecke operators on moduli points and cusps of torsion-level problems.

T_q on a moduli point x = (E, [P,] Q) sums the q+1 quotients of E by its
cyclic order-q subgroups, computed over the minimal extension splitting
E[q], with explicit isogenies in every characteristic via Velu's formulas.
Outputs are formal divisors of canonically keyed moduli points, so
divisors computed through different routes compare exactly.

The characteristic-q operator on ordinary points returns
Frobenius(x) + q * (quotient by the canonical unramified order-q subgroup)
and asserts the reciprocity Frobenius(quotient) = <q> x.

Cusp Hecke action is symbolic and restricted to full-gon cusps:
T_q [c] = [c] + q [q c].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field

from .algebra import GF, embed
from .curves import (
    EllipticCurve,
    ModuliPoint,
    base_change,
    extension_order,
    point_count,
)

_MAX_HECKE_PRIME = 13
_MAX_ABS_DEGREE = 24

# ===== FORMAL DIVISORS ===== #


class FormalDivisor:
    """Integer combination of keyed points (moduli points or cusp symbols)."""

    def __init__(self, terms=()):
        self._terms = {}
        for point, mult in terms:
            self.add(point, mult)

    def add(self, point, mult=1):
        key = point.key
        if key in self._terms:
            obj, m = self._terms[key]
            m += mult
            if m:
                self._terms[key] = (obj, m)
            else:
                del self._terms[key]
        elif mult:
            self._terms[key] = (point, mult)
        return self

    def items(self):
        return [(obj, m) for _k, (obj, m) in sorted(self._terms.items())]

    def multiplicity(self, point):
        entry = self._terms.get(point.key)
        return entry[1] if entry else 0

    def degree(self):
        return sum(m for _obj, m in self._terms.values())

    def support(self):
        return [obj for _k, (obj, _m) in sorted(self._terms.items())]

    def map_points(self, fn):
        out = FormalDivisor()
        for _k, (obj, m) in self._terms.items():
            out.add(fn(obj), m)
        return out

    def __add__(self, other):
        out = FormalDivisor(self.items())
        for obj, m in other.items():
            out.add(obj, m)
        return out

    def __sub__(self, other):
        out = FormalDivisor(self.items())
        for obj, m in other.items():
            out.add(obj, -m)
        return out

    def __rmul__(self, k):
        out = FormalDivisor()
        for obj, m in self.items():
            out.add(obj, k * m)
        return out

    def __eq__(self, other):
        return isinstance(other, FormalDivisor) and {
            k: m for k, (_o, m) in self._terms.items()
        } == {k: m for k, (_o, m) in other._terms.items()}

    def __bool__(self):
        return bool(self._terms)

    def __repr__(self):
        if not self._terms:
            return "FormalDivisor(0)"
        parts = [f"{m}*[{k}]" for k, (_o, m) in sorted(self._terms.items())]
        return "FormalDivisor(" + " + ".join(parts) + ")"


def divisor_of(point):
    return FormalDivisor([(point, 1)])


# ===== VELU ISOGENIES ===== #


def exact_order_is(curve, P, n):
    """Check ord(P) = n without factoring the ambient group order."""
    if curve.mul(n, P) is not None:
        return False
    for ell in _prime_factors(n):
        if curve.mul(n // ell, P) is None:
            return False
    return True


def _prime_factors(n):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def velu_quotient(curve, kernel_nonzero):
    """Quotient isogeny with the given kernel (list of nonzero points).

    Returns (quotient_curve, point_map). The point map uses the
    translation sums X(P) = x + sum(x(P+K) - x(K)) and the analogous Y sum,
    and asserts its images lie on the quotient curve.
    """
    field = curve.field
    a1, a2, a3, a4, a6 = curve.a_invariants()
    b2, b4, _b6, _b8 = curve.b_invariants()
    # pick one representative per {K, -K}; 2-torsion represents itself
    reps = []
    seen = set()
    for K in kernel_nonzero:
        kkey = (K[0].code(), K[1].code())
        if kkey in seen:
            continue
        seen.add(kkey)
        negK = curve.neg(K)
        seen.add((negK[0].code(), negK[1].code()))
        reps.append(K)
    t = field.zero()
    w = field.zero()
    for K in reps:
        xK, yK = K
        gx = 3 * xK * xK + 2 * a2 * xK + a4 - a1 * yK
        gy = -2 * yK - a1 * xK - a3
        if curve.neg(K) == K:
            tK = gx
        else:
            tK = 2 * gx - a1 * gy
        uK = gy * gy
        t = t + tK
        w = w + uK + xK * tK
    quotient = EllipticCurve(field, (a1, a2, a3, a4 - 5 * t,
                                     a6 - b2 * t - 7 * w))

    def point_map(P):
        if P is None:
            return None
        for K in kernel_nonzero:
            if P == K:
                return None
        X = P[0]
        Y = P[1]
        for K in kernel_nonzero:
            S = curve.add(P, K)
            X = X + S[0] - K[0]
            Y = Y + S[1] - K[1]
        image = (X, Y)
        assert quotient.on_curve(image), "isogeny image left the curve"
        return image

    return quotient, point_map


# ===== SPLITTING FIELDS ===== #


def splitting_degree(base_count, q0, ell):
    """Least e with E[ell] rational over the degree-e extension of F_{q0},
    via the order of the Frobenius matrix on E[ell]."""
    beta = q0 + 1 - base_count
    a, b, c, d = 0, -q0 % ell, 1, beta % ell
    # order of [[0, -q0], [1, beta]] in GL_2(F_ell)
    m = (1, 0, 0, 1)
    cur = (a, b, c, d)
    for e in range(1, 2 * ell * ell + 1):
        if cur == m:
            return e
        cur = (
            (cur[0] * a + cur[1] * c) % ell,
            (cur[0] * b + cur[1] * d) % ell,
            (cur[2] * a + cur[3] * c) % ell,
            (cur[2] * b + cur[3] * d) % ell,
        )
    raise AssertionError("Frobenius matrix order not found")


_AMBIENT_CACHE = {}


def hecke_ambient(base_field, e):
    """(ambient, embedding) for the degree-e extension, cached per pair."""
    key = (base_field.p, base_field.k, e)
    if key not in _AMBIENT_CACHE:
        ambient = GF(base_field.p, base_field.k * e)
        _AMBIENT_CACHE[key] = (ambient, embed(base_field, ambient))
    return _AMBIENT_CACHE[key]


def _find_point_of_order(curve, ell, group_order, skip_span=None, start=0):
    """Deterministic scan for a point of exact order ell."""
    field = curve.field
    v = 0
    c = group_order
    while c % ell == 0:
        c //= ell
        v += 1
    assert v >= 1, "group order lacks the requested torsion"
    for code in range(start, field.order):
        x = field.from_code(code)
        ys = _y_solutions_generic(curve, x)
        if not ys:
            continue
        R = curve.mul(c, (x, ys[0]))
        if R is None:
            continue
        while curve.mul(ell, R) is not None:
            R = curve.mul(ell, R)
        if skip_span and (R[0].code(), R[1].code()) in skip_span:
            continue
        return R, code + 1
    return None, field.order


def _y_solutions_generic(curve, x):
    from .algebra import poly_roots
    f = x * x * x + curve.a2 * x * x + curve.a4 * x + curve.a6
    c1 = curve.a1 * x + curve.a3
    return poly_roots([-f, c1, curve.field.one()], curve.field)


def torsion_basis(curve, ell, group_order):
    """Two independent points R1, R2 spanning E[ell] over the given field."""
    span = set()
    R1, cursor = _find_point_of_order(curve, ell, group_order)
    assert R1 is not None, "no ell-torsion found"
    S = None
    for i in range(ell):
        S = curve.add(S, R1)
        if S is not None:
            span.add((S[0].code(), S[1].code()))
    while True:
        R2, cursor = _find_point_of_order(curve, ell, group_order,
                                          skip_span=span, start=cursor)
        assert R2 is not None, "E[ell] does not split over this field"
        if exact_order_is(curve, R2, ell):
            return R1, R2


# ===== THE T_q OPERATOR ===== #


_TQ_CACHE = {}


def hecke_Tq(x, q):
    """T_q of a moduli point as a formal divisor of degree q + 1.

    Raises:
        ValueError: "Hecke prime divides level", "Hecke prime equals
            characteristic", or range errors for unsupported q.
    """
    cache_key = (x.key, id(x.curve.field), q)
    if cache_key in _TQ_CACHE:
        return _TQ_CACHE[cache_key]
    result = _hecke_Tq(x, q)
    _TQ_CACHE[cache_key] = result
    return result


def _hecke_Tq(x, q):
    if q == 2:
        raise ValueError("Hecke prime 2 not supported")
    if q > _MAX_HECKE_PRIME or not _is_prime(q):
        raise ValueError("Hecke prime out of supported range")
    if (x.m * x.n) % q == 0:
        raise ValueError("Hecke prime divides level")
    base = x.curve.field
    if q == base.p:
        raise ValueError("Hecke prime equals characteristic")
    N_base = point_count(x.curve)
    e = splitting_degree(N_base, base.order, q)
    if base.k * e > _MAX_ABS_DEGREE:
        raise ValueError("splitting field exceeds internal bound")
    ambient, emb = hecke_ambient(base, e)
    E_big = base_change(x.curve, emb)
    Q_big = (emb(x.Q[0]), emb(x.Q[1]))
    P_big = None if x.P is None else (emb(x.P[0]), emb(x.P[1]))
    N_big = extension_order(N_base, base.order, e)
    assert N_big % (q * q) == 0, "splitting field misses full q-torsion"
    R1, R2 = torsion_basis(E_big, q, N_big)
    subgroup_gens = [R1] + [E_big.add(R2, E_big.mul(i, R1)) for i in range(q)]
    divisor = FormalDivisor()
    for gen in subgroup_gens:
        kernel = []
        K = None
        for _ in range(q - 1):
            K = E_big.add(K, gen)
            kernel.append(K)
        assert E_big.add(K, gen) is None, "kernel generator order mismatch"
        quotient, point_map = velu_quotient(E_big, kernel)
        Q2 = point_map(Q_big)
        P2 = point_map(P_big) if P_big is not None else None
        assert exact_order_is(quotient, Q2, x.n), "section order not preserved"
        if P2 is not None:
            assert exact_order_is(quotient, P2, x.m)
        divisor.add(ModuliPoint(x.m, x.n, quotient, Q2, P2))
    assert divisor.degree() == q + 1, "Hecke divisor degree mismatch"
    conj = divisor.map_points(lambda mp: mp.frobenius(times=base.k))
    assert conj == divisor, "Hecke divisor is not Galois stable"
    return divisor


def _is_prime(n):
    return n >= 2 and all(n % d for d in range(2, int(n ** 0.5) + 1))


def diamond(x, a):
    """<a> on a moduli point or formal divisor."""
    if isinstance(x, FormalDivisor):
        return x.map_points(lambda obj: obj.diamond(a))
    return x.diamond(a)


def averaging_operator(x, q):
    """A_q = T_q - q<q> - 1 applied to a moduli point (degree-0 output)."""
    D = divisor_of(x)
    out = hecke_Tq(x, q) - q * diamond(D, q) - D
    assert out.degree() == 0
    return out


# ===== CHARACTERISTIC-q OPERATOR ===== #


def hecke_Tq_char_q(x, q):
    """T_q on an ordinary point in characteristic q:
    Frobenius(x) + q * (quotient by the canonical order-q subgroup).

    Asserts Frobenius(quotient) = <q> x.

    Raises:
        ValueError: "ordinary point required" at supersingular points,
            "Hecke prime divides level" when q divides the level,
            "characteristic prime required" when q is not the field char.
    """
    base = x.curve.field
    if q != base.p:
        raise ValueError("characteristic prime required")
    if (x.m * x.n) % q == 0:
        raise ValueError("Hecke prime divides level")
    N_base = point_count(x.curve)
    beta = base.order + 1 - N_base
    if beta % q == 0:
        raise ValueError("ordinary point required")
    # the unramified order-q subgroup is rational over the extension where
    # the unit Frobenius eigenvalue (beta mod q) becomes trivial
    e = 1
    lam = beta % q
    acc = lam
    while acc != 1:
        acc = (acc * lam) % q
        e += 1
    ambient, emb = hecke_ambient(base, e)
    E_big = base_change(x.curve, emb)
    N_big = extension_order(N_base, base.order, e)
    R, _cursor = _find_point_of_order(E_big, q, N_big)
    assert R is not None, "unramified q-torsion not found"
    kernel = []
    K = None
    for _ in range(q - 1):
        K = E_big.add(K, R)
        kernel.append(K)
    quotient, point_map = velu_quotient(E_big, kernel)
    Q2 = point_map((emb(x.Q[0]), emb(x.Q[1])))
    P2 = None if x.P is None else point_map((emb(x.P[0]), emb(x.P[1])))
    assert exact_order_is(quotient, Q2, x.n)
    y_etale = ModuliPoint(x.m, x.n, quotient, Q2, P2)
    # reciprocity: Frobenius carries the quotient back to <q> x
    assert y_etale.frobenius(times=1).key == x.diamond(q).key, (
        "etale quotient fails Frobenius reciprocity")
    frob_x = x.frobenius(times=1)
    out = FormalDivisor([(frob_x, 1), (y_etale, q)])
    assert out.degree() == q + 1
    return out


# ===== DEGREE-2 LEVEL MAP ===== #


def two_torsion_quotient_map(x):
    """From level (1, 4n) to level (2, 2n): quotient by the order-2 multiple
    of the section, paired with the image of the remaining 2-torsion.

    The two choices of complementary 2-torsion point share one image, so the
    result is well defined and Galois-fixed even when E[2] needs a quadratic
    extension.
    """
    assert x.m == 1 and x.n % 4 == 0, "level must be (1, 4n)"
    half = x.n // 2
    curve = x.curve
    T0 = curve.mul(half, x.Q)  # the order-2 point inside <Q>
    assert T0 is not None and curve.add(T0, T0) is None
    # find a complementary 2-torsion point, extending the field if needed
    T = _complementary_two_torsion(curve, T0)
    if T is None:
        ambient, emb = hecke_ambient(curve.field, 2)
        curve = base_change(x.curve, emb)
        Qb = (emb(x.Q[0]), emb(x.Q[1]))
        T0 = curve.mul(half, Qb)
        T = _complementary_two_torsion(curve, T0)
        assert T is not None, "full 2-torsion missing over quadratic extension"
        x_rep = ModuliPoint(x.m, x.n, curve, Qb)
    else:
        x_rep = x
    quotient, point_map = velu_quotient(curve, [T0])
    Q2 = point_map(x_rep.Q)
    P2 = point_map(T)
    assert exact_order_is(quotient, Q2, half)
    assert P2 is not None and quotient.add(P2, P2) is None
    # both complementary choices map to the same point
    T_alt = curve.add(T, T0)
    assert point_map(T_alt) == P2, "pushforward depends on 2-torsion choice"
    result = ModuliPoint(2, half, quotient, Q2, P2)
    # Galois-fixed over the original base
    k0 = x.curve.field.k
    assert result.frobenius(times=k0).key == result.key
    return result


def _complementary_two_torsion(curve, T0):
    from .curves import _two_torsion_points
    for T in _two_torsion_points(curve):
        if T != T0:
            return T
    return None


# ===== CUSPS OF FULL-GON TYPE ===== #


@dataclass(frozen=True)
class CuspSymbol:
    """A full-n-gon cusp of the level-n problem, labeled by a unit class c
    modulo +/-. The diamond action is <a>[c] = [ac]."""

    n: int
    cls: int
    kind: str = "n-gon"

    def __post_init__(self):
        if math.gcd(self.cls, self.n) != 1:
            raise ValueError("unit required")
        c = self.cls % self.n
        object.__setattr__(self, "cls", min(c, (self.n - c) % self.n) or c)

    @property
    def key(self):
        return ("cusp", self.kind, self.n, self.cls)

    def diamond(self, a):
        if math.gcd(a, self.n) != 1:
            raise ValueError("unit required")
        return CuspSymbol(self.n, (a * self.cls) % self.n, self.kind)

    def __repr__(self):
        return f"CuspSymbol({self.n}, {self.cls})"


def cusp_Tq(cusp, q):
    """T_q on a full-gon cusp: [c] + q [q c].

    Raises:
        NotImplementedError: for cusps that are not full gons.
        ValueError: "Hecke prime divides level" unless gcd(q, 2n) = 1.
    """
    if cusp.kind != "n-gon":
        raise NotImplementedError("general cusp Hecke not implemented")
    if math.gcd(q, 2 * cusp.n) != 1:
        raise ValueError("Hecke prime divides level")
    return FormalDivisor([(cusp, 1),
                          (CuspSymbol(cusp.n, q * cusp.cls, cusp.kind), q)])


def cusp_averaging_is_zero(cusp, q):
    """A_q kills full-gon cusps: T_q[c] - q<q>[c] - [c] = 0."""
    D = divisor_of(cusp)
    out = cusp_Tq(cusp, q) - q * diamond(D, q) - D
    return not out


if __name__ == "__main__":
    from .curves import enumerate_moduli

    ms = enumerate_moduli(1, 5, 11)
    x = ms.points[0]
    D = hecke_Tq(x, 3)
    assert D.degree() == 4
    A = averaging_operator(x, 3)
    assert A.degree() == 0
    c = CuspSymbol(7, 1)
    assert cusp_Tq(c, 3).degree() == 4
    assert cusp_averaging_is_zero(c, 3)
    assert cusp_averaging_is_zero(CuspSymbol(20, 3), 7)
    print("hecke smoke OK")
