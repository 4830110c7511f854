"""Elliptic curves over finite fields: group structure, censuses, and moduli.

Provides:

  * long-Weierstrass curves with the full group law in every characteristic,
  * the coordinate-change law (u, r, s, t) used throughout the package
    (coefficients scale by powers of u; points map
    (x, y) -> ((x - r) u^2, (y - s(x - r) - t) u^3)),
  * Zech-logarithm tables and curve censuses that cover every isomorphism
    class over small fields (normal-form families per characteristic),
  * exact group structure (N, A, B) with baby-step giant-step order finding
    cross-checked by full point sweeps,
  * Tate normal form and canonical keys for points of modular moduli
    problems (a curve with a torsion section, plus an optional 2-torsion
    section), quotiented by curve automorphisms and the sign of the section,
  * enumeration of all moduli points of exact level (m, n) over F_q, tagged
    with prime-Frobenius orbit sizes and diamond orbits.

Point convention: points are (x, y) tuples of field elements; None is the
point at infinity.
"""

from __future__ import annotations

import math

import sympy

from .algebra import (
    GF,
    FFElement,
    embed,
    hasse_interval,
    linearized_roots,
    poly_roots,
)

ENUMERATION_BOUND = 2500
_CENSUS_SWEEP_MAX = 300
_ZECH_MAX = 4400

# ===== PRIME POWER PARSING ===== #


def prime_power(q):
    """Split q = p^k; raise ValueError if q is not a prime power."""
    if q < 2:
        raise ValueError("prime power required")
    fac = sympy.factorint(q)
    if len(fac) != 1:
        raise ValueError("prime power required")
    [(p, k)] = fac.items()
    return int(p), int(k)


# ===== ELLIPTIC CURVES ===== #


class EllipticCurve:
    """y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 over a finite field
    (or any exact coefficient ring when `field` is None, for symbolic work).
    """

    __slots__ = ("field", "a1", "a2", "a3", "a4", "a6")

    def __init__(self, field, a_invariants, check_smooth=True):
        a1, a2, a3, a4, a6 = a_invariants
        if field is not None:
            a1, a2, a3, a4, a6 = (field.coerce(v) for v in (a1, a2, a3, a4, a6))
        self.field = field
        self.a1, self.a2, self.a3, self.a4, self.a6 = a1, a2, a3, a4, a6
        if check_smooth and field is not None and not self.discriminant():
            raise ValueError("singular curve")

    # --- invariants --- #

    def a_invariants(self):
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    def b_invariants(self):
        a1, a2, a3, a4, a6 = self.a_invariants()
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        return b2, b4, b6, b8

    def discriminant(self):
        b2, b4, b6, b8 = self.b_invariants()
        return (-b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6
                + 9 * b2 * b4 * b6)

    def j_invariant(self):
        b2, b4, _b6, _b8 = self.b_invariants()
        c4 = b2 * b2 - 24 * b4
        return c4 * c4 * c4 / self.discriminant()

    # --- group law --- #

    def on_curve(self, P):
        if P is None:
            return True
        x, y = P
        lhs = y * y + self.a1 * x * y + self.a3 * y
        rhs = x * x * x + self.a2 * x * x + self.a4 * x + self.a6
        return lhs == rhs

    def neg(self, P):
        if P is None:
            return None
        x, y = P
        return (x, -y - self.a1 * x - self.a3)

    def add(self, P, Q):
        if P is None:
            return Q
        if Q is None:
            return P
        x1, y1 = P
        x2, y2 = Q
        if x1 == x2:
            if y2 == -y1 - self.a1 * x1 - self.a3:
                return None
            # doubling
            num = 3 * x1 * x1 + 2 * self.a2 * x1 + self.a4 - self.a1 * y1
            den = 2 * y1 + self.a1 * x1 + self.a3
            lam = num / den
        else:
            lam = (y2 - y1) / (x2 - x1)
        x3 = lam * lam + self.a1 * lam - self.a2 - x1 - x2
        y3 = lam * (x1 - x3) - y1 - self.a1 * x3 - self.a3
        return (x3, y3)

    def mul(self, k, P):
        if P is None:
            return None
        if k < 0:
            return self.mul(-k, self.neg(P))
        result = None
        base = P
        while k:
            if k & 1:
                result = self.add(result, base)
            base = self.add(base, base)
            k >>= 1
        return result

    def point_order(self, P, group_order):
        """Exact order of P given a multiple `group_order` of it."""
        assert self.mul(group_order, P) is None, "group_order must kill the point"
        o = group_order
        for ell in sympy.factorint(group_order):
            while o % ell == 0 and self.mul(o // ell, P) is None:
                o //= ell
        return o

    def frobenius_curve(self, power=1):
        """The conjugate curve with coefficients raised to p^power."""
        p = self.field.p
        return EllipticCurve(self.field,
                             tuple(a ** (p ** power) for a in self.a_invariants()),
                             check_smooth=False)

    def __eq__(self, other):
        return (isinstance(other, EllipticCurve)
                and self.field is other.field
                and self.a_invariants() == other.a_invariants())

    def __hash__(self):
        return hash(tuple(getattr(a, "c", a) for a in self.a_invariants()))

    def __repr__(self):
        return f"EllipticCurve({self.field!r}, {self.a_invariants()})"


# ===== COORDINATE CHANGES ===== #


def transform_curve(curve, quad, check_smooth=True):
    """Apply (u, r, s, t): coefficients scale by powers of u.

    a1' = (a1 + 2s) u
    a2' = (a2 - a1 s + 3r - s^2) u^2
    a3' = (a3 + a1 r + 2t) u^3
    a4' = (a4 + 2 a2 r - a1 (rs + t) - a3 s + 3 r^2 - 2 s t) u^4
    a6' = (a6 - a1 r t + a2 r^2 - a3 t + a4 r + r^3 - t^2) u^6
    """
    u, r, s, t = quad
    a1, a2, a3, a4, a6 = curve.a_invariants()
    b1 = (a1 + 2 * s) * u
    b2 = (a2 - a1 * s + 3 * r - s * s) * u ** 2
    b3 = (a3 + a1 * r + 2 * t) * u ** 3
    b4 = (a4 + 2 * a2 * r - a1 * (r * s + t) - a3 * s + 3 * r * r - 2 * s * t) * u ** 4
    b6 = (a6 - a1 * r * t + a2 * r * r - a3 * t + a4 * r + r ** 3 - t * t) * u ** 6
    return EllipticCurve(curve.field, (b1, b2, b3, b4, b6), check_smooth=check_smooth)


def transform_point(P, quad):
    """Point map (x, y) -> ((x - r) u^2, (y - s (x - r) - t) u^3)."""
    if P is None:
        return None
    u, r, s, t = quad
    x, y = P
    return ((x - r) * u ** 2, (y - s * (x - r) - t) * u ** 3)


def compose_transforms(first, second):
    """Quadruple equal to applying `first`, then `second`."""
    u1, r1, s1, t1 = first
    u2, r2, s2, t2 = second
    iu1 = u1 ** -1 if hasattr(u1, "field") else 1 / u1
    return (u1 * u2,
            r1 + r2 * iu1 * iu1,
            s1 + s2 * iu1,
            t1 + s1 * r2 * iu1 * iu1 + t2 * iu1 ** 3)


def invert_transform(quad):
    u, r, s, t = quad
    iu = u ** -1 if hasattr(u, "field") else 1 / u
    return (iu, -r * u * u, -s * u, u ** 3 * (s * r - t))


# ===== ZECH LOGARITHM TABLES ===== #


class ZechTables:
    """Log/antilog/Zech tables for F_q, q <= a few thousand.

    Elements are coded by their canonical integer code; LOG0 = q - 1 is the
    sentinel log of zero (so logs live in [0, q-1) and arrays have q slots).
    """

    _cache = {}

    def __new__(cls, field):
        key = (field.p, field.k)
        if key in cls._cache:
            return cls._cache[key]
        if field.order > _ZECH_MAX:
            raise ValueError("field too large for Zech tables")
        self = super().__new__(cls)
        self.field = field
        q = field.order
        self.q = q
        self.M = q - 1
        self.LOG0 = q - 1
        from .algebra import primitive_element
        g = primitive_element(field)
        self.gen = g
        exp_code = [0] * q            # log -> element code (last slot: zero)
        log_code = [0] * q            # element code -> log
        e = field.one()
        for i in range(q - 1):
            exp_code[i] = e.code()
            log_code[e.code()] = i
            e = e * g
        exp_code[self.LOG0] = 0
        log_code[0] = self.LOG0
        self.exp_code = exp_code
        self.log_code = log_code
        zech = [0] * q
        one = field.one()
        for i in range(q - 1):
            v = field.from_code(exp_code[i]) + one
            zech[i] = log_code[v.code()]
        zech[self.LOG0] = 0           # 0 + 1 = 1 = g^0
        self.zech = zech
        if field.p == 2:
            tr = [0] * q
            for code in range(q):
                el = field.from_code(code)
                acc = el
                cur = el
                for _ in range(field.k - 1):
                    cur = cur * cur
                    acc = acc + cur
                tr[log_code[code]] = 1 if acc else 0
            self.trace_by_log = tr
        cls._cache[key] = self
        return self

    # log-domain arithmetic (ints), LOG0 is zero
    def zmul(self, a, b):
        if a == self.LOG0 or b == self.LOG0:
            return self.LOG0
        return (a + b) % self.M

    def zadd(self, a, b):
        if a == self.LOG0:
            return b
        if b == self.LOG0:
            return a
        d = (b - a) % self.M
        z = self.zech[d]
        if z == self.LOG0:
            return self.LOG0
        return (a + z) % self.M

    def zneg(self, a):
        if a == self.LOG0 or self.field.p == 2:
            return a
        return (a + self.M // 2) % self.M

    def log_of(self, elem):
        return self.log_code[elem.code()]

    def elem_of(self, lg):
        return self.field.from_code(self.exp_code[lg])

    def sqrt_logs(self, lg):
        """Logs of the square roots of g^lg (possibly empty/two), odd q."""
        if lg == self.LOG0:
            return [self.LOG0]
        if self.field.p == 2:
            half = pow(2, self.field.k - 1, self.M)
            return [(lg * half) % self.M]
        if lg % 2:
            return []
        h = lg // 2
        return sorted({h, (h + self.M // 2) % self.M})


# ===== CURVE FAMILIES COVERING ALL ISO CLASSES ===== #


def _char2_trace_one(field):
    """Element of absolute trace 1, smallest by canonical code."""
    one = field.one()
    for e in field.elements():
        tr = sum((e ** (2 ** i) for i in range(1, field.k)), e)
        if tr == one:
            return e
    raise AssertionError("trace map must be onto the prime field")


def _cube_coset_reps(field):
    """Unit representatives of F_q^* modulo cubes, smallest codes first."""
    q = field.order
    if (q - 1) % 3:
        return [field.one()]
    reps = {}
    for e in field.elements():
        if not e:
            continue
        marker = (e ** ((q - 1) // 3)).code()
        if marker not in reps:
            reps[marker] = e
        if len(reps) == 3:
            break
    return [reps[m] for m in sorted(reps)]


def _family_curves(field):
    """Yield a-invariant tuples covering every isomorphism class over field.

    char >= 5: (0,0,0,a,b);  char 3: (0,a2,0,0,a6) with a2,a6 != 0 plus
    (0,0,0,a4,a6) with a4 != 0.  char 2 uses canonical slices: ordinary
    classes are exactly (1,a2,0,0,a6) with a6 != 0 and a2 in {0, g} for a
    fixed trace-1 element g (the x-square coefficient moves only within
    its Artin-Schreier coset), and every supersingular class reaches
    (0,0,a3,a4,a6) with a3 a unit-mod-cubes representative, since a3
    rescales by cubes. Singular tuples are skipped.
    """
    p = field.p
    els = list(field.elements())
    if p >= 5:
        for a in els:
            for b in els:
                if 4 * a * a * a + 27 * b * b:
                    yield (field.zero(), field.zero(), field.zero(), a, b)
    elif p == 3:
        for a2 in els:
            if not a2:
                continue
            for a6 in els:
                if a6:
                    yield (field.zero(), a2, field.zero(), field.zero(), a6)
        for a4 in els:
            if not a4:
                continue
            for a6 in els:
                yield (field.zero(), field.zero(), field.zero(), a4, a6)
    else:
        one = field.one()
        for a2 in (field.zero(), _char2_trace_one(field)):
            for a6 in els:
                if a6:
                    yield (one, a2, field.zero(), field.zero(), a6)
        for a3 in _cube_coset_reps(field):
            for a4 in els:
                for a6 in els:
                    yield (field.zero(), field.zero(), a3, a4, a6)


def point_count(curve):
    """#E(F_q) by an x-sweep (Zech tables when available, generic otherwise)."""
    field = curve.field
    q = field.order
    if q <= _ZECH_MAX:
        return _point_count_zech(curve)
    count = 1
    for code in range(q):  # pragma: no cover - big fields use the recursion
        x = field.from_code(code)
        count += len(_y_solutions(curve, x))
    return count


def _point_count_zech(curve):
    z = ZechTables(curve.field)
    q = z.q
    L0 = z.LOG0
    a1, a2, a3, a4, a6 = (z.log_of(a) for a in curve.a_invariants())
    p = curve.field.p
    count = 1
    if p != 2:
        # complete the square: g = 4 f + (a1 x + a3)^2 counts solutions
        l4 = z.log_of(curve.field.from_int(4))
        for lx in range(q):
            lx_ = lx if lx < L0 else L0
            x3 = z.zmul(z.zmul(lx_, lx_), lx_)
            f = z.zadd(z.zadd(z.zmul(a2, z.zmul(lx_, lx_)), x3),
                       z.zadd(z.zmul(a4, lx_), a6))
            lin = z.zadd(z.zmul(a1, lx_), a3)
            g = z.zadd(z.zmul(l4, f), z.zmul(lin, lin))
            if g == L0:
                count += 1
            elif g % 2 == 0:
                count += 2
            if lx_ == L0:
                break
    else:
        tr = z.trace_by_log
        for lx in range(q):
            lx_ = lx if lx < L0 else L0
            x3 = z.zmul(z.zmul(lx_, lx_), lx_)
            f = z.zadd(z.zadd(z.zmul(a2, z.zmul(lx_, lx_)), x3),
                       z.zadd(z.zmul(a4, lx_), a6))
            h = z.zadd(z.zmul(a1, lx_), a3)
            if h == L0:
                count += 1  # squaring is bijective: y^2 = f has one root
            else:
                # substitute y = h z:  z^2 + z = f / h^2, solvable iff trace 0
                w = L0 if f == L0 else (f - 2 * h) % z.M
                if tr[w] == 0:
                    count += 2
            if lx_ == L0:
                break
    return count


def _y_solutions(curve, x):
    """All y with (x, y) on the curve, via deterministic root finding."""
    field = curve.field
    f = x * x * x + curve.a2 * x * x + curve.a4 * x + curve.a6
    c1 = curve.a1 * x + curve.a3
    if field.p != 2 and field.order <= _ZECH_MAX:
        # complete the square: (2y + c1)^2 = 4f + c1^2
        z = ZechTables(field)
        g = 4 * f + c1 * c1
        inv2 = field.from_int(2).inverse()
        ys = [(z.elem_of(lw) - c1) * inv2 for lw in z.sqrt_logs(z.log_of(g))]
        return sorted(set(ys), key=lambda e: e.code())
    return poly_roots([-f, c1, field.one()], field)


def all_points(curve):
    """Every affine point plus None, for fields inside the Zech range."""
    field = curve.field
    pts = [None]
    for code in range(field.order):
        x = field.from_code(code)
        for y in _y_solutions(curve, x):
            pts.append((x, y))
    return pts


# ===== TRACE CENSUS (FULL SWEEPS OVER SMALL FIELDS) ===== #

_TRACE_CENSUS_CACHE = {}


def trace_census(q):
    """Set of Frobenius traces realized by curves over F_q (full sweep).

    Covers every isomorphism class via the normal-form families; only
    available for q <= 300 (the sweep is cubic in q).
    """
    if q in _TRACE_CENSUS_CACHE:
        return _TRACE_CENSUS_CACHE[q]
    p, k = prime_power(q)
    if q > _CENSUS_SWEEP_MAX:
        raise ValueError("enumeration bound")
    field = GF(p, k)
    traces = set()
    for a_inv in _family_curves(field):
        curve = EllipticCurve(field, a_inv, check_smooth=False)
        traces.add(q + 1 - point_count(curve))
    out = frozenset(traces)
    _TRACE_CENSUS_CACHE[q] = out
    return out


# ===== GROUP STRUCTURE ===== #


def bsgs_point_order(curve, P):
    """Order of P via baby-step giant-step inside the Hasse interval."""
    field = curve.field
    q = field.order
    lo, hi = hasse_interval(q)
    m = math.isqrt(hi - lo) + 1
    baby = {}
    R = None
    for j in range(m):
        key = R if R is None else (R[0].code(), R[1].code())
        baby.setdefault(key, j)
        R = curve.add(R, P)
    giant_step = curve.mul(m, P)
    # find n in [lo, hi + m] with nP = 0: (lo + im)P = -(jP) gives n = lo+im+j
    cur = curve.mul(lo, P)
    found = None
    for i in range((hi - lo) // m + 2):
        negc = curve.neg(cur)
        neg_key = negc if negc is None else (negc[0].code(), negc[1].code())
        if neg_key in baby:
            n = lo + i * m + baby[neg_key]
            if n > 0 and curve.mul(n, P) is None:
                found = n
                break
        cur = curve.add(cur, giant_step)
    assert found is not None, "BSGS failed to find a multiple"
    return curve.point_order(P, found)


_STRUCTURE_CACHE = {}


def group_structure(curve):
    """(N, A, B): #E(F_q) = N with E(F_q) isomorphic to Z/A x Z/B, A | B.

    N comes from BSGS point orders (Hasse disambiguation) with a full
    point-sweep fallback; A and B from the exponent of the full point set.

    Raises:
        ValueError: on singular input.
    """
    if not curve.discriminant():
        raise ValueError("singular curve")
    cache_key = (id(curve.field), tuple(a.code() for a in curve.a_invariants()))
    if cache_key in _STRUCTURE_CACHE:
        return _STRUCTURE_CACHE[cache_key]
    field = curve.field
    q = field.order
    if q > _ZECH_MAX:
        raise ValueError("enumeration bound")
    lo, hi = hasse_interval(q)
    # BSGS pass: lcm of a few point orders often pins N down
    lam = 1
    N = None
    tried = 0
    for code in range(q):
        x = field.from_code(code)
        ys = _y_solutions(curve, x)
        if not ys:
            continue
        P = (x, ys[0])
        o = bsgs_point_order(curve, P)
        lam = lam * o // math.gcd(lam, o)
        tried += 1
        multiples = range(((lo + lam - 1) // lam) * lam, hi + 1, lam)
        if len(multiples) == 1:
            N = multiples[0]
            break
        if tried >= 6:
            break
    exact = point_count(curve)
    assert N is None or N == exact, "BSGS order disagrees with the point sweep"
    N = exact
    # exponent via lcm of all point orders
    lam = 1
    for P in all_points(curve):
        if P is None:
            continue
        o = curve.point_order(P, N)
        lam = lam * o // math.gcd(lam, o)
        if lam == N:
            break
    A = N // lam
    B = lam
    assert A * B == N and B % A == 0 and (q - 1) % A == 0, "invalid invariant factors"
    out = (N, A, B)
    _STRUCTURE_CACHE[cache_key] = out
    return out


def torsion_embeds(m, n, curve):
    """Whether Z/m x Z/n embeds in E(F_q).

    Raises:
        ValueError: "p divides level" when char divides m*n.
    """
    if curve.field.p and (m * n) % curve.field.p == 0:
        raise ValueError("p divides level")
    mm, nn = min(m, n), max(m, n)
    g = math.gcd(mm, nn)
    m1, n1 = g, mm // g * nn
    _N, A, B = group_structure(curve)
    return A % m1 == 0 and B % n1 == 0


# ===== ISOMORPHISM TESTING ===== #


def _short_form(curve):
    """Reduce to y^2 = x^3 + Ax + B (char >= 5), returning (A, B)."""
    b2, b4, b6, _b8 = curve.b_invariants()
    c4 = b2 * b2 - 24 * b4
    c6 = -b2 ** 3 + 36 * b2 * b4 - 216 * b6
    field = curve.field
    A = field.coerce(-27) * c4
    B = field.coerce(-54) * c6
    return A, B


def is_isomorphic(E1, E2):
    """Exact isomorphism test over the common (small) base field."""
    if E1.field is not E2.field:
        raise ValueError("curves must share a base field")
    field = E1.field
    if E1.j_invariant() != E2.j_invariant():
        return False
    p = field.p
    if p >= 5:
        A1, B1 = _short_form(E1)
        A2, B2 = _short_form(E2)
        if (not A1) != (not A2) or (not B1) != (not B2):
            return False
        if A1 and B1:
            for u2 in poly_roots([-(B2 * A1) / (B1 * A2), field.one()], field):
                # u^2 = (B2 A1)/(B1 A2) combining u^4, u^6 relations
                if A2 * u2 * u2 == A1 and B2 * u2 * u2 * u2 == B1:
                    return True
            # also try all u^4 roots directly (covers automorphism edge cases)
            for u in _nth_roots(A1 / A2, 4, field):
                if B2 * u ** 6 == B1:
                    return True
            return False
        if A1:  # j = 1728
            return bool(_nth_roots(A1 / A2, 4, field))
        return bool(_nth_roots(B1 / B2, 6, field))
    if p == 3:
        return _is_isomorphic_char3(E1, E2)
    return _is_isomorphic_char2(E1, E2)


def _nth_roots(c, nth, field):
    coeffs = [-c] + [field.zero()] * (nth - 1) + [field.one()]
    return poly_roots(coeffs, field)


def _char3_normalize(E):
    """(a2, a4, a6) with a1 = a3 = 0 and (j != 0: a4 = 0)."""
    field = E.field
    # y-shift kills a1, a3 (char != 2)
    half = field.from_int(2).inverse()
    s = -E.a1 * half
    t = -E.a3 * half
    E = transform_curve(E, (field.one(), field.zero(), s, t))
    assert not E.a1 and not E.a3
    if E.a2:
        r = -E.a4 / (2 * E.a2)  # kills a4 (char 3: x-shift leaves a2 alone)
        E = transform_curve(E, (field.one(), r, field.zero(), field.zero()))
        assert not E.a4
    return E


def _is_isomorphic_char3(E1, E2):
    field = E1.field
    N1, N2 = _char3_normalize(E1), _char3_normalize(E2)
    if bool(N1.a2) != bool(N2.a2):
        return False
    if N1.a2:
        for u in _nth_roots(N1.a2 / N2.a2, 2, field):
            if N2.a6 * u ** 6 == N1.a6:
                return True
        return False
    # j = 0: scale then cubic shift
    for u in _nth_roots(N1.a4 / N2.a4, 4, field):
        # need r: u^6 (a6_2 + a4_2 r + r^3) = a6_1
        target = N1.a6 / u ** 6 - N2.a6
        if poly_roots([-target, N2.a4, field.zero(), field.one()], field):
            return True
    return False


def _is_isomorphic_char2(E1, E2):
    """Isomorphism test in characteristic 2 by solving the transform system.

    With doubled terms vanishing, the coefficient equations for
    transform_curve(E1, (u, r, s, t)) == E2 reduce to small polynomial
    solves: u is pinned by the a1 (or a3) ratio, then r, s, t follow from
    the remaining equations.
    """
    field = E1.field
    one, zero = field.one(), field.zero()
    if bool(E1.a1) != bool(E2.a1):
        return False

    def _verify(u, r, s, t):
        return transform_curve(E1, (u, r, s, t),
                               check_smooth=False).a_invariants() == E2.a_invariants()

    if E1.a1:
        u = E2.a1 / E1.a1
        r = (E2.a3 / u ** 3 + E1.a3) / E1.a1
        for s in linearized_roots([(one, 1), (E1.a1, 0)],
                                  E1.a2 + r + E2.a2 / u ** 2, field):
            t = (E2.a4 / u ** 4 + E1.a4 + E1.a1 * (r * s) + E1.a3 * s + r * r) / E1.a1
            if _verify(u, r, s, t):
                return True
        return False
    # a1 = 0: smoothness forces a3 != 0 and u is a cube root of the a3 ratio
    assert E1.a3 and E2.a3, "char-2 curve with a1 = 0 must have a3 != 0"
    for u in _nth_roots(E2.a3 / E1.a3, 3, field):
        shift = E1.a2 + E2.a2 / u ** 2
        for s in linearized_roots([(one, 2), (E1.a3, 0)],
                                  E1.a4 + shift * shift + E2.a4 / u ** 4, field):
            r = shift + s * s
            const = E1.a6 + E1.a2 * r * r + E1.a4 * r + r ** 3 + E2.a6 / u ** 6
            for t in linearized_roots([(one, 1), (E1.a3, 0)], const, field):
                if _verify(u, r, s, t):
                    return True
    return False


def _is_isomorphic_brute(E1, E2):
    field = E1.field
    assert field.order <= 64, "brute isomorphism search only for tiny fields"
    els = list(field.elements())
    for u in els:
        if not u:
            continue
        for r in els:
            for s in els:
                for t in els:
                    if transform_curve(E1, (u, r, s, t),
                                       check_smooth=False).a_invariants() == E2.a_invariants():
                        return True
    return False


# ===== CENSUS BY TARGET ORDER ===== #


def _char2_ordinary_key(curve):
    """Exact isomorphism-class key for char-2 curves with a1 != 0.

    Normalizing to y^2 + xy = x^3 + a2 x^2 + a6 leaves a6 fixed and a2
    movable only within its Artin-Schreier coset, so (trace bit of a2, a6)
    classifies the curve.
    """
    field = curve.field
    E = transform_curve(curve, (curve.a1.inverse(), field.zero(),
                                field.zero(), field.zero()), check_smooth=False)
    E = transform_curve(E, (field.one(), E.a3, field.zero(), field.zero()),
                        check_smooth=False)
    E = transform_curve(E, (field.one(), field.zero(), field.zero(), E.a4),
                        check_smooth=False)
    assert E.a1 == field.one() and not E.a3 and not E.a4
    trace_bit = sum((E.a2 ** (2 ** i) for i in range(field.k)), field.zero())
    assert trace_bit * trace_bit == trace_bit, "trace must land in the prime field"
    return (bool(trace_bit), E.a6.code())


def isogeny_census(q, target_orders):
    """Representatives of every iso class over F_q with #E in target_orders.

    Full sweep; requires q <= 300.
    """
    p, k = prime_power(q)
    if q > _CENSUS_SWEEP_MAX:
        raise ValueError("enumeration bound")
    field = GF(p, k)
    targets = set(target_orders)
    found = []
    keyed = set()
    for a_inv in _family_curves(field):
        curve = EllipticCurve(field, a_inv, check_smooth=False)
        N = point_count(curve)
        if N not in targets:
            continue
        if p == 2 and curve.a1:
            key = (N,) + _char2_ordinary_key(curve)
            if key not in keyed:
                keyed.add(key)
                found.append((curve, N))
            continue
        if not any(N == N0 and is_isomorphic(curve, c0) for c0, N0 in found):
            found.append((curve, N))
    return found


_WITNESS_CACHE = {}


def witness_search(m, n, q):
    """A verified witness (curve, P, Q) with <P, Q> = Z/m x Z/n inside
    E(F_q) (P is None when m = 1), or None if the early-exit scan finds
    nothing. The scan samples point orders per candidate, so a None result
    is not an emptiness proof; use emptiness_certified for that.
    """
    if (m, n, q) in _WITNESS_CACHE:
        return _WITNESS_CACHE[(m, n, q)]
    result = _witness_search(m, n, q)
    _WITNESS_CACHE[(m, n, q)] = result
    return result


def _witness_search(m, n, q):
    p, k = prime_power(q)
    if q > ENUMERATION_BOUND:
        raise ValueError("enumeration bound")
    if m not in (1, 2):
        raise ValueError("witness search supports m in {1, 2}")
    field = GF(p, k)
    lo, hi = hasse_interval(q)
    mn = m * n
    wanted = {N for N in range(lo, hi + 1) if N % mn == 0}
    if not wanted:
        return None
    for a_inv in _family_curves(field):
        curve = EllipticCurve(field, a_inv, check_smooth=False)
        N = point_count(curve)
        if N not in wanted:
            continue
        witness = _certify_witness(curve, N, m, n)
        if witness is not None:
            return witness
    return None


def _two_torsion_points(curve):
    """All affine 2-torsion points (roots of 2y + a1x + a3 on the curve)."""
    field = curve.field
    out = []
    if field.p != 2:
        # x-coordinates: roots of 4f + (a1 x + a3)^2
        a1, a2, a3, a4, a6 = curve.a_invariants()
        coeffs = [4 * a6 + a3 * a3, 4 * a4 + 2 * a1 * a3, 4 * a2 + a1 * a1,
                  field.from_int(4)]
        inv2 = field.from_int(2).inverse()
        for x in poly_roots(coeffs, field):
            out.append((x, -(a1 * x + a3) * inv2))
    else:
        for code in range(field.order):
            x = field.from_code(code)
            for y in _y_solutions(curve, x):
                Ppt = (x, y)
                if curve.add(Ppt, Ppt) is None:
                    out.append(Ppt)
    return out


def _certify_witness(curve, N, m, n, samples=16):
    """(curve, P, Q) with verified orders/independence, else None."""
    field = curve.field
    two = None
    if m == 2:
        # cheap screen first: full 2-torsion is required
        two = _two_torsion_points(curve)
        if len(two) < 3:
            return None
    Q_found = None
    tried = 0
    for code in range(field.order):
        if tried >= samples:
            break
        x = field.from_code(code)
        ys = _y_solutions(curve, x)
        if not ys:
            continue
        tried += 1
        o = curve.point_order((x, ys[0]), N)
        if o % n == 0:
            Q_found = curve.mul(o // n, (x, ys[0]))
            break
    if Q_found is None:
        return None
    assert curve.point_order(Q_found, N) == n
    if m == 1:
        return (curve, None, Q_found)
    half_Q = curve.mul(n // 2, Q_found) if n % 2 == 0 else None
    for Ppt in two:
        if Ppt != half_Q:
            assert _independent(curve, Ppt, Q_found, 2, n)
            return (curve, Ppt, Q_found)
    return None


_EMPTINESS_CACHE = {}


def emptiness_certified(m, n, q):
    """True iff NO curve over F_q contains Z/m x Z/n (full sweep, q <= 300)."""
    if (m, n, q) in _EMPTINESS_CACHE:
        return _EMPTINESS_CACHE[(m, n, q)]
    result = _emptiness_certified(m, n, q)
    _EMPTINESS_CACHE[(m, n, q)] = result
    return result


def _emptiness_certified(m, n, q):
    p, k = prime_power(q)
    if q > _CENSUS_SWEEP_MAX:
        raise ValueError("enumeration bound")
    field = GF(p, k)
    lo, hi = hasse_interval(q)
    mn = m * n
    wanted = {N for N in range(lo, hi + 1) if N % mn == 0}
    for a_inv in _family_curves(field):
        curve = EllipticCurve(field, a_inv, check_smooth=False)
        if point_count(curve) in wanted:
            _N, A, B = group_structure(curve)
            if A % m == 0 and B % n == 0:
                return False
    return True


# ===== TATE NORMAL FORM AND CANONICAL MODULI KEYS ===== #


def tate_normal_form(curve, Q):
    """Tate normal form for a section of order >= 4.

    Returns (b, c, quad) with quad the coordinate change carrying
    (curve, Q) to  y^2 + (1-c) xy - b y = x^3 - b x^2  with Q -> (0, 0).
    """
    field = curve.field
    x0, y0 = Q
    q1 = (field.one(), x0, field.zero(), y0)
    E1 = transform_curve(curve, q1)
    assert not E1.a6, "translation must kill a6"
    if not E1.a3:
        raise ValueError("order > 3 required for Tate normal form")
    s = E1.a4 / E1.a3
    q2 = (field.one(), field.zero(), s, field.zero())
    E2 = transform_curve(E1, q2)
    assert not E2.a4 and not E2.a6
    if not E2.a2:
        raise ValueError("order > 3 required for Tate normal form")
    u = E2.a2 / E2.a3
    q3 = (u, field.zero(), field.zero(), field.zero())
    E3 = transform_curve(E2, q3)
    b = -E3.a3
    c = field.one() - E3.a1
    assert E3.a2 == -b and not E3.a4 and not E3.a6, "Tate shape violated"
    quad = compose_transforms(compose_transforms(q1, q2), q3)
    return b, c, quad


_KEY_LATTICE_MAX = 12


def _canonical_codes(elements, ambient):
    """Serialize ambient elements through their joint minimal subfield.

    Returns (D, codes): D the common field degree, codes the canonical
    integer codes in GF(p, D). Stable across flows for lattice ambients,
    and per cached embedding otherwise.
    """
    p = ambient.p
    D = 1
    for el in elements:
        d = el.minimal_degree()
        D = D * d // math.gcd(D, d)
    if D > _KEY_LATTICE_MAX:
        raise ValueError("canonical key field degree exceeds lattice bound")
    sub = GF(p, D)
    if sub is ambient:
        return D, tuple(el.code() for el in elements)
    emb = embed(sub, ambient)
    return D, tuple(emb.pullback(el).code() for el in elements)


def moduli_key(curve, Q, P=None):
    """Canonical hashable key of a moduli point (E, [P,] Q).

    Quotients by curve isomorphisms (Tate-form uniqueness) and by the sign
    of Q. Requires ord(Q) >= 4; small orders use a coarse convention.
    """
    field = curve.field
    candidates = []
    for sign_Q in (Q, curve.neg(Q)):
        try:
            b, c, quad = tate_normal_form(curve, sign_Q)
        except ValueError:
            return _coarse_moduli_key(curve, Q, P)
        elements = [b, c]
        if P is not None:
            Pi = transform_point(P, quad)
            assert Pi is not None
            elements.extend([Pi[0], Pi[1]])
        D, codes = _canonical_codes(elements, field)
        candidates.append((D,) + codes)
    return min(candidates)


def _coarse_moduli_key(curve, Q, P=None):
    """Documented coarse convention for sections of order <= 3.

    Translate Q to the origin when affine, then minimize the serialized
    a-invariants (plus section images) over all scalings u != 0 and both
    signs of Q. Only exercised by toy levels (mn <= 4 or order-3 sections).
    """
    field = curve.field
    best = None
    for sign_Q in (Q, curve.neg(Q)):
        if sign_Q is None:
            quads = [(field.one(), field.zero(), field.zero(), field.zero())]
        else:
            quads = [(field.one(), sign_Q[0], field.zero(), sign_Q[1])]
        base = quads[0]
        for ucode in range(1, field.order):
            u = field.from_code(ucode)
            quad = compose_transforms(base, (u, field.zero(), field.zero(), field.zero()))
            E2 = transform_curve(curve, quad, check_smooth=False)
            elements = list(E2.a_invariants())
            if P is not None:
                Pi = transform_point(P, quad)
                elements.extend([Pi[0], Pi[1]])
            try:
                D, codes = _canonical_codes(elements, field)
            except ValueError:
                continue
            cand = (D,) + codes
            if best is None or cand < best:
                best = cand
    assert best is not None
    return ("coarse",) + best


class ModuliPoint:
    """A point of the exact-level-(m, n) moduli problem over a finite field.

    Carries an explicit representative (curve, P, Q) over an ambient field;
    identity is by canonical key, which quotients by curve isomorphism and
    the sign of Q.
    """

    __slots__ = ("m", "n", "curve", "P", "Q", "_key")

    def __init__(self, m, n, curve, Q, P=None):
        self.m = m
        self.n = n
        self.curve = curve
        self.Q = Q
        self.P = P
        self._key = None

    @property
    def key(self):
        if self._key is None:
            self._key = (self.m, self.n, self.curve.field.p) + tuple(
                [moduli_key(self.curve, self.Q, self.P)])
        return self._key

    def diamond(self, a):
        """<a>: scale the order-n section by a (the order-m part is fixed
        automatically since a is prime to the level)."""
        if math.gcd(a, self.m * self.n) != 1:
            raise ValueError("unit required")
        Q2 = self.curve.mul(a % self.n, self.Q)
        P2 = self.curve.mul(a % max(self.m, 1), self.P) if self.P is not None else None
        return ModuliPoint(self.m, self.n, self.curve, Q2, P2)

    def frobenius(self, times=1):
        """Conjugate by the p-power Frobenius of the ambient field."""
        p = self.curve.field.p
        E2 = self.curve.frobenius_curve(times)
        conj = lambda pt: None if pt is None else (pt[0] ** p ** times, pt[1] ** p ** times)
        return ModuliPoint(self.m, self.n, E2, conj(self.Q), conj(self.P))

    def __eq__(self, other):
        return isinstance(other, ModuliPoint) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"ModuliPoint(level=({self.m},{self.n}), key={self.key})"


class ModuliSet:
    """All exact-level (m, n) moduli points over F_q with orbit tags."""

    def __init__(self, m, n, q, points, frobenius_orbits, diamond_orbits):
        self.m = m
        self.n = n
        self.q = q
        self.points = points                      # sorted by key
        self.frobenius_orbits = frobenius_orbits  # list of key tuples (p-power Frobenius)
        self.diamond_orbits = diamond_orbits      # list of key tuples

    def __len__(self):
        return len(self.points)

    def frobenius_orbit_size(self, point):
        for orbit in self.frobenius_orbits:
            if point.key in orbit:
                return len(orbit)
        raise KeyError("point not in set")

    def diamond_orbit_index(self, point):
        for i, orbit in enumerate(self.diamond_orbits):
            if point.key in orbit:
                return i
        raise KeyError("point not in set")


_MODULI_CACHE = {}


def enumerate_moduli(m, n, q, bound=ENUMERATION_BOUND):
    """Every moduli point of exact level (m, n) over F_q.

    Enumeration goes by isomorphism classes (normal-form families, deduped)
    and their torsion sections, never by raw coefficient pairs. Points are
    tagged with prime-Frobenius orbit sizes and diamond orbits.

    Raises:
        ValueError: "enumeration bound" above the bound;
            "p divides level" in bad characteristic.
    """
    if (m, n, q, bound) in _MODULI_CACHE:
        return _MODULI_CACHE[(m, n, q, bound)]
    result = _enumerate_moduli(m, n, q, bound)
    _MODULI_CACHE[(m, n, q, bound)] = result
    return result


def _enumerate_moduli(m, n, q, bound):
    p, k = prime_power(q)
    if q > min(bound, _CENSUS_SWEEP_MAX):
        # classes need a full sweep; witness-style scans handle bigger q
        raise ValueError("enumeration bound")
    if (m * n) % p == 0:
        raise ValueError("p divides level")
    if m > n or n % m != 0:
        raise ValueError("level must satisfy m | n")
    field = GF(p, k)
    lo, hi = hasse_interval(q)
    mn = m * n
    targets = {N for N in range(lo, hi + 1) if N % mn == 0}
    classes = isogeny_census(q, targets)
    seen = {}
    for curve, N in classes:
        _, A, B = group_structure(curve)
        if A % m or B % n:
            continue
        pts = [pt for pt in all_points(curve) if pt is not None]
        order_n = [pt for pt in pts if curve.point_order(pt, N) == n]
        if m == 1:
            for Qpt in order_n:
                mp = ModuliPoint(m, n, curve, Qpt)
                seen.setdefault(mp.key, mp)
        else:
            order_m = [pt for pt in pts if curve.point_order(pt, N) == m]
            for Qpt in order_n:
                span = _cyclic_span(curve, Qpt, n)
                for Ppt in order_m:
                    pkey = (Ppt[0].code(), Ppt[1].code())
                    if pkey in span:
                        continue
                    if m > 2 and not _independent(curve, Ppt, Qpt, m, n):
                        continue
                    mp = ModuliPoint(m, n, curve, Qpt, Ppt)
                    seen.setdefault(mp.key, mp)
    points = sorted(seen.values(), key=lambda mp: mp.key)
    frob_orbits = _orbits(points, lambda mp: mp.frobenius())
    units = [a for a in range(1, mn + 1) if math.gcd(a, mn) == 1]
    diam_orbits = _orbits_multi(points, [lambda mp, a=a: mp.diamond(a) for a in units])
    return ModuliSet(m, n, q, points, frob_orbits, diam_orbits)


def _cyclic_span(curve, Q, n):
    span = set()
    R = None
    for _ in range(n):
        R = curve.add(R, Q)
        if R is not None:
            span.add((R[0].code(), R[1].code()))
    return span


def _independent(curve, P, Q, m, n):
    """Whether <P, Q> has order exactly m*n."""
    seen = set()
    Ri = None
    for _i in range(m):
        Rj = Ri
        for _j in range(n):
            key = None if Rj is None else (Rj[0].code(), Rj[1].code())
            if key in seen:
                return False
            seen.add(key)
            Rj = curve.add(Rj, Q)
        Ri = curve.add(Ri, P)
    return True


def _orbits(points, step):
    by_key = {mp.key: mp for mp in points}
    remaining = set(by_key)
    orbits = []
    for mp in points:
        if mp.key not in remaining:
            continue
        orbit = []
        cur = mp
        while cur.key in remaining:
            remaining.discard(cur.key)
            orbit.append(cur.key)
            cur = step(cur)
            assert cur.key in by_key, "orbit left the moduli set"
        orbits.append(tuple(sorted(orbit)))
    return orbits


def _orbits_multi(points, steps):
    by_key = {mp.key: mp for mp in points}
    remaining = set(by_key)
    orbits = []
    for mp in points:
        if mp.key not in remaining:
            continue
        orbit = set()
        frontier = [mp]
        while frontier:
            cur = frontier.pop()
            if cur.key in orbit:
                continue
            orbit.add(cur.key)
            remaining.discard(cur.key)
            for step in steps:
                nxt = step(cur)
                assert nxt.key in by_key, "orbit left the moduli set"
                if nxt.key not in orbit:
                    frontier.append(nxt)
        orbits.append(tuple(sorted(orbit)))
    return orbits


def diamond_stable_pair_classes(mset):
    """Diamond-stable configurations D1 + D2 of two distinct prime-Frobenius
    orbits, up to diamond action (each stable configuration is its own
    class; the function returns the sorted configurations).
    """
    by_key = {mp.key: mp for mp in mset.points}
    divisors = [frozenset(orbit) for orbit in mset.frobenius_orbits]
    units = [a for a in range(1, mset.m * mset.n + 1)
             if math.gcd(a, mset.m * mset.n) == 1]

    def apply_diamond(config, a):
        return frozenset(by_key[k].diamond(a).key for k in config)

    stable = []
    for i in range(len(divisors)):
        for j in range(i + 1, len(divisors)):
            config = divisors[i] | divisors[j]
            if len(config) != len(divisors[i]) + len(divisors[j]):
                continue
            if all(apply_diamond(config, a) == config for a in units):
                # the configuration must still split into two orbit-divisors
                stable.append(tuple(sorted(config)))
    # distinct stable configurations are inequivalent under diamonds
    return sorted(set(stable))


# ===== EXTENSION ORDERS ===== #


def extension_order(base_count, q, d):
    """#E(F_{q^d}) from #E(F_q) via the trace recursion."""
    t1 = q + 1 - base_count
    t_prev, t_cur = 2, t1
    for _ in range(d - 1):
        t_prev, t_cur = t_cur, t1 * t_cur - q * t_prev
    if d == 0:
        return 2
    return q ** d + 1 - t_cur


def base_change(curve, embedding):
    """The same curve over a larger field through `embedding`."""
    return EllipticCurve(embedding.dst,
                         tuple(embedding(a) for a in curve.a_invariants()),
                         check_smooth=False)


if __name__ == "__main__":
    F5 = GF(5, 1)
    E = EllipticCurve(F5, (0, 0, 0, 1, 0))  # y^2 = x^3 + x over F_5
    assert group_structure(E) == (4, 2, 2)
    ms = enumerate_moduli(1, 5, 7)
    assert len(ms) == 6, len(ms)
    assert trace_census(7) == frozenset(range(-5, 6))
    F7 = GF(7, 1)
    E1 = EllipticCurve(F7, (0, 0, 0, 1, 1))
    E2 = transform_curve(E1, (F7.from_int(3), F7.from_int(2), F7.zero(), F7.from_int(5)))
    assert is_isomorphic(E1, E2)
    assert not is_isomorphic(E1, EllipticCurve(F7, (0, 0, 0, 0, 1)))
    print("curves smoke OK")
