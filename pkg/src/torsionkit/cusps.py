"""Cusp inventories for the torsion moduli curves and their reductions.

Boundary points of the curve classifying pairs (P, Q) of torsion sections
with orders (m, n), m | n, correspond to Neron k-gons with m | k | n that
carry an ample level structure.  A level structure on a k-gon is recorded
in exponent coordinates on (multiplicative group) x (Z/k), quotiented by
the polygon automorphisms: the k root-of-unity twists and the inversion.
Galois acts through units modulo n on the root-of-unity coordinates only,
so orbit stabilizers determine fields of definition and residue degrees
of every cusp class, and in turn the congruence conditions an auxiliary
Hecke prime must satisfy for cuspidal parts of reduced divisors to vanish
in the Jacobian.

No pairing normalization is imposed on the level structures; for m <= 2
the normalization is automatic, while for m = 3 the inventory counts the
level structures with both possible pairing values.
"""

from dataclasses import dataclass
from functools import lru_cache
from math import gcd, lcm

from sympy import totient


# ===== BASIC HELPERS ===== #


def _divisors(n):
    out = [d for d in range(1, n + 1) if n % d == 0]
    return out


def _units(n):
    if n == 1:
        return (0,)
    return tuple(s for s in range(1, n) if gcd(s, n) == 1)


def closed_form_cusp_count(n):
    """Closed-form count of geometric cusps for the order-n moduli curve.

    Equals (1/2) * sum over d | n of phi(d) * phi(n/d); valid for n > 4,
    where the inversion acts freely on level structures.

    Args:
        n: integer level, n > 4.

    Returns:
        The number of geometric cusps as an int.

    Raises:
        ValueError: if n <= 4 (the formula needs a free inversion action).
    """
    if n <= 4:
        raise ValueError("closed form requires n > 4")
    total = sum(int(totient(d)) * int(totient(n // d)) for d in _divisors(n))
    assert total % 2 == 0, "cusp count formula must be even"
    return total // 2


# ===== RAW LEVEL STRUCTURES ON POLYGONS ===== #
#
# A level structure on a k-gon (m | k | n) is a tuple (a, c, b, q2):
#   first section  P:  root-of-unity exponent a (mod m), component c (mod m)
#                      sitting at c * (k/m) in Z/k,
#   second section Q:  root-of-unity exponent b (mod n), component q2 (mod k).
#
# Twist by t (mod k):  a -> a + t*c (mod m),  b -> b + t*(n/k)*q2 (mod n).
# Inversion: negate all four coordinates.
# Galois through s in (Z/n)*: a -> s*a (mod m), b -> s*b (mod n).


def _canonical(m, n, k, a, c, b, q2):
    shift = n // k
    if c % m == 0:
        best = None
        for sign in (1, -1):
            aa = (sign * a) % m
            bb = (sign * b) % n
            qq = (sign * q2) % k
            step = gcd(shift * qq, n)
            cand = (aa, 0, bb % step, qq)
            if best is None or cand < best:
                best = cand
        return best
    best = None
    for sign in (1, -1):
        aa = (sign * a) % m
        cc = (sign * c) % m
        bb = (sign * b) % n
        qq = (sign * q2) % k
        for t in range(k):
            cand = ((aa + t * cc) % m, cc, (bb + t * shift * qq) % n, qq)
            if best is None or cand < best:
                best = cand
    return best


def _span_size(m, n, k, a, c, b, q2):
    v_p = ((n // m) * a % n, (k // m) * c % k)
    v_q = (b % n, q2 % k)
    seen = set()
    for i in range(m):
        base = (i * v_p[0] % n, i * v_p[1] % k)
        for j in range(n):
            seen.add(((base[0] + j * v_q[0]) % n, (base[1] + j * v_q[1]) % k))
    return len(seen)


def _validate_level(m, n):
    if m not in (1, 2, 3):
        raise ValueError("m must be 1, 2, or 3")
    if n % m != 0 or n < 1:
        raise ValueError("m must divide n")


@lru_cache(maxsize=None)
def _raw_cusps(m, n):
    """All geometric cusps, keyed by gon size.

    Returns:
        Dict-like tuple of (k, reps) pairs where reps is a sorted tuple of
        canonical (a, c, b, q2) coordinates, one per geometric cusp on a
        k-gon.
    """
    _validate_level(m, n)
    per_gon = []
    for k in _divisors(n):
        if k % m != 0:
            continue
        reps = set()
        if m == 1:
            for q2 in range(k):
                if gcd(q2, k) != 1:
                    continue
                for b in range(n):
                    if lcm(n // gcd(b, n), k) != n:
                        continue
                    reps.add(_canonical(1, n, k, 0, 0, b, q2))
        else:
            for a in range(m):
                for c in range(m):
                    if lcm(m // gcd(a, m), m // gcd(c, m)) != m:
                        continue
                    for q2 in range(k):
                        if gcd(gcd((k // m) * c, q2), k) != 1:
                            continue
                        ord_comp = k // gcd(q2, k)
                        for b in range(n):
                            if lcm(n // gcd(b, n), ord_comp) != n:
                                continue
                            if _span_size(m, n, k, a, c, b, q2) != m * n:
                                continue
                            reps.add(_canonical(m, n, k, a, c, b, q2))
        per_gon.append((k, tuple(sorted(reps))))
    return tuple(per_gon)


# ===== GALOIS ORBITS ===== #


@dataclass(frozen=True)
class CuspOrbit:
    """One closed cusp: a Galois orbit of geometric cusps.

    Attributes:
        m, n: the level.
        gon: polygon size k, with m | k | n.
        rep: canonical coordinates of one geometric cusp in the orbit.
        degree: number of geometric cusps in the orbit (degree of the
            closed point over the base).
        stabilizer: frozenset of units s modulo n fixing each point of
            the orbit.
    """

    m: int
    n: int
    gon: int
    rep: tuple
    degree: int
    stabilizer: frozenset

    def residue_degree(self, p):
        """Residue degree of the reduction of this cusp modulo p.

        The reduction splits into closed points that all share the same
        residue degree: the least f >= 1 with p^f in the stabilizer.
        """
        if gcd(p, self.n) != 1:
            raise ValueError("p divides level")
        f = 1
        power = p % self.n
        while power not in self.stabilizer:
            power = power * p % self.n
            f += 1
            assert f <= self.degree, "residue degree exceeds orbit degree"
        return f


@lru_cache(maxsize=None)
def _cusp_orbits(m, n):
    units = _units(n)
    orbits = []
    for k, reps in _raw_cusps(m, n):
        rep_set = set(reps)
        unassigned = set(reps)
        while unassigned:
            rep = min(unassigned)
            orbit = set()
            stab = []
            for s in units:
                a, c, b, q2 = rep
                image = _canonical(m, n, k, s * a, c, s * b, q2)
                assert image in rep_set, "Galois image must be a known cusp"
                orbit.add(image)
                if image == rep:
                    stab.append(s)
            for x in orbit:
                unassigned.discard(x)
            degree = len(orbit)
            assert degree * len(stab) == max(len(units), 1), (
                "orbit size times stabilizer size must equal group order"
            )
            orbits.append(
                CuspOrbit(
                    m=m,
                    n=n,
                    gon=k,
                    rep=rep,
                    degree=degree,
                    stabilizer=frozenset(stab),
                )
            )
    return tuple(orbits)


def cusp_orbits(m, n):
    """All closed cusps of the (m, n) moduli curve as Galois orbits."""
    return list(_cusp_orbits(m, n))


# ===== INVENTORY ===== #


@dataclass(frozen=True)
class CuspDatum:
    """Aggregate data for the cusps living on k-gons.

    Attributes:
        m, n: the level.
        gon: polygon size k with m | k | n.
        zeta_order: normalized root-of-unity order n // gon; the twist
            action reduces the second section's root-of-unity part to a
            primitive root of this order.
        real_subfield: True when gon <= 2 and zeta_order > 2, in which
            case inversion folds the root of unity into its inverse and
            fields of definition drop to the real cyclotomic subfield.
        geometric_count: number of geometric cusps on k-gons.
        orbit_degrees: sorted degrees of the Galois orbits.
    """

    m: int
    n: int
    gon: int
    zeta_order: int
    real_subfield: bool
    geometric_count: int
    orbit_degrees: tuple

    @property
    def closed_count(self):
        return len(self.orbit_degrees)


def cusp_inventory(m, n):
    """Cusp inventory of the (m, n) moduli curve, one entry per gon size.

    Args:
        m: order of the first torsion section, in {1, 2, 3}.
        n: order of the second torsion section, divisible by m.

    Returns:
        List of CuspDatum, largest gon first.  The sum of the
        geometric_count fields matches closed_form_cusp_count(n) whenever
        m == 1 and n > 4.

    Raises:
        ValueError: if m is unsupported or m does not divide n.
    """
    _validate_level(m, n)
    orbits = _cusp_orbits(m, n)
    data = []
    for k, reps in _raw_cusps(m, n):
        degrees = tuple(sorted(o.degree for o in orbits if o.gon == k))
        assert sum(degrees) == len(reps), "orbit degrees must cover raw cusps"
        e = n // k
        data.append(
            CuspDatum(
                m=m,
                n=n,
                gon=k,
                zeta_order=e,
                real_subfield=(k <= 2 and e > 2),
                geometric_count=len(reps),
                orbit_degrees=degrees,
            )
        )
    data.sort(key=lambda d: -d.gon)
    return data


def total_cusps(m, n):
    """Total number of geometric cusps of the (m, n) moduli curve."""
    return sum(d.geometric_count for d in cusp_inventory(m, n))


def rational_cusp_count(m, n, q):
    """Number of cusps fixed by the q-power Frobenius, q a prime power.

    A geometric cusp is rational over the field with q elements exactly
    when multiplication by q mod n lies in its orbit stabilizer.

    Args:
        m, n: the level.
        q: prime power with characteristic not dividing n.

    Returns:
        Count of fixed geometric cusps.
    """
    if gcd(q, n) != 1:
        raise ValueError("p divides level")
    count = 0
    for orbit in _cusp_orbits(m, n):
        if q % n in orbit.stabilizer or n == 1:
            count += orbit.degree
    return count


# ===== RESIDUE DEGREES ===== #


def cusp_residue_degrees(m, n, p):
    """Residue degrees of the reductions of all cusp classes modulo p.

    Args:
        m, n: the level.
        p: prime not dividing n.

    Returns:
        Dict mapping gon size k to the sorted tuple of distinct residue
        degrees of the mod-p reductions of the k-gon cusps.

    Raises:
        ValueError: if p divides n.
    """
    _validate_level(m, n)
    if gcd(p, n) != 1:
        raise ValueError("p divides level")
    out = {}
    for orbit in _cusp_orbits(m, n):
        out.setdefault(orbit.gon, set()).add(orbit.residue_degree(p))
    return {k: tuple(sorted(v)) for k, v in out.items()}


# ===== CONGRUENCE CONDITIONS ON THE AUXILIARY PRIME ===== #


@dataclass(frozen=True)
class CongruenceCondition:
    """A congruence condition q = r (mod modulus), r in residues.

    modulus 1 encodes the empty condition satisfied by every prime.
    """

    modulus: int
    residues: tuple

    @property
    def trivial(self):
        return self.modulus == 1

    def satisfied_by(self, q):
        return q % self.modulus in self.residues

    def describe(self):
        if self.trivial:
            return "no condition"
        res = ", ".join(str(r) for r in self.residues)
        return "q = %s (mod %d)" % (res, self.modulus)


def _conductor_reduce(n, subgroup):
    units = _units(n)
    member = set(subgroup)
    for e in _divisors(n):
        kernel_inside = all(s in member for s in units if s % e == 1 % max(e, 1))
        if not kernel_inside:
            continue
        image = sorted({s % e for s in member})
        preimage = {s for s in units if s % e in set(image)}
        if preimage == member:
            return CongruenceCondition(modulus=e, residues=tuple(image))
    raise AssertionError("conductor reduction must terminate at e = n")


def cc_condition(m, n, p, cusp_part_degree):
    """Congruence condition on an auxiliary prime q for cuspidal vanishing.

    When a degree-4 divisor reduces modulo p to a non-cuspidal part of
    degree 3 (cusp_part_degree 1) or degree 2 (cusp_part_degree 2), the
    leftover cuspidal part is killed by the averaged Hecke operator at q
    provided q splits completely in the fields of definition of:

      degree 1: every cusp whose reduction modulo p is rational,
      degree 2: every cusp whose reduction modulo p has residue degree
        at most 2 while the cusp itself has strictly larger degree.

    The intersection of the corresponding orbit stabilizers is reduced to
    its conductor and returned as a congruence condition on q mod n.

    Args:
        m, n: the level.
        p: reduction prime, not dividing n.
        cusp_part_degree: 1 or 2, the degree of the cuspidal part.

    Returns:
        CongruenceCondition; .trivial is True when no condition is needed.

    Raises:
        ValueError: if p divides n or cusp_part_degree is not 1 or 2.
    """
    _validate_level(m, n)
    if gcd(p, n) != 1:
        raise ValueError("p divides level")
    if cusp_part_degree not in (1, 2):
        raise ValueError("cusp part degree must be 1 or 2")
    units = set(_units(n))
    intersection = set(units)
    for orbit in _cusp_orbits(m, n):
        f = orbit.residue_degree(p)
        if cusp_part_degree == 1:
            relevant = f == 1
        else:
            relevant = f <= 2 and orbit.degree > f
        if relevant:
            intersection &= orbit.stabilizer
    return _conductor_reduce(n, frozenset(intersection))


# ===== SMOKE CHECKS ===== #

if __name__ == "__main__":
    inv5 = cusp_inventory(1, 5)
    assert total_cusps(1, 5) == 4
    assert sorted(d for c in inv5 for d in c.orbit_degrees) == [1, 1, 2]

    assert total_cusps(3, 15) == 64

    table = cusp_residue_degrees(1, 63, 2)
    assert table[63] == (1,) and table[21] == (2,) and table[9] == (3,)
    assert all(min(table[k]) >= 5 for k in (7, 3, 1))

    cond = cc_condition(1, 28, 5, 1)
    assert (cond.modulus, cond.residues) == (4, (1,))
    assert cc_condition(1, 26, 7, 1).trivial

    for n in range(5, 40):
        assert total_cusps(1, n) == closed_form_cusp_count(n)

    print("cusps smoke checks passed")
