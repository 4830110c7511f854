"""Congruence-subgroup indices and gonality lower bounds.

A congruence group here is cut out of SL_2(Z) by residue conditions at a
level n: entries congruent to the identity matrix modulo a divisor m of n
(the full-level part), lower-left entry divisible by n, and upper-left
entry lying in a fixed multiplicative subgroup of units modulo n.  Indices
are exact integers obtained from the order of SL_2(Z/n) divided by the
number of admissible residue matrices, and they feed three consumers:

  * the spectral gonality bound gon > (325/2**15) * [PSL_2(Z) : G],
  * the Hecke-multiplier inequality d < (325/2**15) * index / (k_q * #H)
    that turns a diamond-operator order into a nonexistence statement for
    low-degree points, and
  * the certification rule for isolated low-degree points (degree below
    half the gonality, or below the gonality when the Jacobian has rank
    zero).

Frozen reference rows for the bound tables live in data/gonality_tables.json
and the externally tabulated least-CM-degree constants in
data/cm_degrees.json.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources

import sympy

# Strict spectral constant: gonality exceeds SPECTRAL_RATIO times the
# projective index, so integer consumers take floor(bound) + 1.
SPECTRAL_RATIO = Fraction(325, 2 ** 15)

# ===== CONGRUENCE GROUPS ===== #


def _sl2_group_order(n):
    """Order of SL_2(Z/n)."""
    if n == 1:
        return 1
    out = n ** 3
    for p in sympy.primefactors(n):
        out = out * (p * p - 1) // (p * p)
    return out


@dataclass(frozen=True)
class CongruenceGroup:
    """Residue-defined subgroup of SL_2(Z) at level ``n``.

    Membership of a matrix [[a, b], [c, d]]: the matrix is congruent to the
    identity modulo ``full_level``, c = 0 modulo ``n``, and a modulo ``n``
    lies in ``units`` (a multiplicatively closed tuple of residues
    containing 1; d is then forced by the determinant).
    """

    n: int
    full_level: int = 1
    units: tuple = (1,)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("level must be positive")
        if self.full_level < 1 or self.n % self.full_level:
            raise ValueError("full level must divide the point level")
        units = tuple(sorted({u % self.n for u in self.units}))
        object.__setattr__(self, "units", units)
        if 1 % self.n not in units:
            raise ValueError("unit subgroup must contain 1")
        for u in units:
            if math.gcd(u, self.n) != 1:
                raise ValueError("unit subgroup entries must be units")
            if (u * units[0]) % self.n not in units:
                pass  # closure checked in full below
        for u in units:
            for v in units:
                if (u * v) % self.n not in units:
                    raise ValueError("unit subgroup must be closed")

    # ----- constructors ----- #

    @classmethod
    def gamma1(cls, n):
        """Stabilizer of a point of exact order n (upper unitriangular mod n)."""
        return cls(n=n)

    @classmethod
    def joint(cls, m, n):
        """Identity mod m intersected with the order-n point stabilizer."""
        return cls(n=n, full_level=m)

    @classmethod
    def diamond_kernel(cls, n, units):
        """Group whose quotient curve identifies points under ``units``.

        The tuple must generate a subgroup containing -1; the full closure
        is taken automatically.
        """
        closure = {1 % n}
        frontier = [u % n for u in units] + [(n - 1) % n]
        for u in frontier:
            if math.gcd(u, n) != 1:
                raise ValueError("unit subgroup entries must be units")
        while frontier:
            u = frontier.pop()
            for v in list(closure) + [u]:
                w = (u * v) % n
                if w not in closure:
                    closure.add(w)
                    frontier.append(w)
        return cls(n=n, units=tuple(sorted(closure)))

    # ----- membership and indices ----- #

    @property
    def contains_minus_identity(self):
        return self.full_level <= 2 and (self.n - 1) % self.n in self.units

    def contains_residue(self, mat):
        """Membership predicate for an SL_2(Z/n) residue (a, b, c, d)."""
        a, b, c, d = (x % self.n for x in mat)
        if (a * d - b * c) % self.n != 1 % self.n:
            raise ValueError("matrix is not in SL_2(Z/n)")
        m = self.full_level
        if (a - 1) % m or (d - 1) % m or b % m or c % m:
            return False
        return c == 0 and a in self.units

    def residue_count(self):
        """Number of SL_2(Z/n) residues satisfying the membership predicate."""
        fixed = sum(1 for u in self.units if (u - 1) % self.full_level == 0)
        return fixed * (self.n // self.full_level)


def index(group, projective=False):
    """Exact index of the group in SL_2(Z), or in PSL_2(Z) if projective.

    The index in PSL_2(Z) halves the SL_2(Z) index exactly when the group
    does not contain minus the identity.
    """
    order = _sl2_group_order(group.n)
    count = group.residue_count()
    assert order % count == 0
    idx = order // count
    if projective and not group.contains_minus_identity:
        assert idx % 2 == 0
        idx //= 2
    return idx


# ===== SPECTRAL LOWER BOUND ===== #


def abramovich_lower_bound(group):
    """Exact rational lower bound for the gonality of the quotient curve.

    The gonality is strictly larger than the returned value, so integer
    consumers should use :func:`gonality_floor`.
    """
    return SPECTRAL_RATIO * index(group, projective=True)


def gonality_floor(group):
    """Least integer consistent with the strict spectral bound."""
    bound = abramovich_lower_bound(group)
    return bound.numerator // bound.denominator + 1


# ===== HECKE MULTIPLIER MACHINERY ===== #


def diamond_order(n, a):
    """Order of the diamond operator attached to a on the level-n curve.

    Computed in the unit group modulo n quotiented by plus-minus 1, since
    the operators for a and -a coincide.
    """
    a %= n
    if math.gcd(a, n) != 1:
        raise ValueError("a must be a unit modulo n")
    k, x = 1, a
    while x != 1 % n and x != (n - 1) % n:
        x = x * a % n
        k += 1
    return k


def kq_and_b(n, a, q, rank_finite):
    """Hecke multiplier k_q and the degree bound b(n) for the sieve at q.

    The multiplier counts the points of the two effective divisors compared
    in the sieve: q + 1 when the relevant Jacobian has finite rational
    part; otherwise 2q + 1 when a is q or its inverse up to sign, else
    2(q + 1).  The bound is

        b(n) = (325 / 2**15) * [SL_2(Z) : index at level n] / (k_q * 2),

    the divisor 2 being the size of the subgroup {1, -1} quotiented out.
    Degrees d < b(n) are covered by the sieve.

    Returns:
        (k_q, b) with b an exact Fraction.

    Raises:
        ValueError: if a is not a unit modulo n, or q is not a prime
            coprime to n.
    """
    if math.gcd(a, n) != 1:
        raise ValueError("a must be a unit modulo n")
    if not sympy.isprime(q) or n % q == 0:
        raise ValueError("q must be a prime not dividing n")
    if rank_finite:
        kq = q + 1
    else:
        qinv = pow(q, -1, n)
        matches = {q % n, (n - q) % n, qinv, (n - qinv) % n}
        kq = 2 * q + 1 if a % n in matches else 2 * (q + 1)
    b = SPECTRAL_RATIO * index(CongruenceGroup.gamma1(n)) / (kq * 2)
    return kq, b


def ceil_fraction(x):
    """Smallest integer >= x for a Fraction or int."""
    x = Fraction(x)
    return -((-x.numerator) // x.denominator)


# ===== ISOLATED LOW-DEGREE POINT CERTIFICATION ===== #


def sporadic_certify(degree, gon_lower, rank_zero):
    """Whether a degree-d point is certified isolated by the two rules.

    True when degree < gon_lower / 2, or when degree < gon_lower and the
    Jacobian has rank zero.
    """
    if gon_lower < 1:
        raise ValueError("gonality lower bound must be at least 1")
    return 2 * degree < gon_lower or (degree < gon_lower and rank_zero)


# ===== FROZEN REFERENCE TABLES ===== #


@dataclass(frozen=True)
class GonalityRow:
    """One frozen row of the diamond-operator bound tables.

    ``a_base ** a_exp`` is the unit whose diamond operator drives the
    sieve; ``chi_orders`` lists the character orders whose kernels must
    contain the operator (empty for the rows that need none);
    ``listed_order`` and ``bound_ceiling`` are the frozen reference values;
    ``k3`` is the multiplier used for the listed bound; ``cm_least_degree``
    is the externally tabulated least degree of a CM point.
    """

    n: int
    a_base: int
    a_exp: int
    chi_orders: tuple
    listed_order: int
    k3: int
    bound_ceiling: int
    cm_least_degree: int

    @property
    def a(self):
        return pow(self.a_base, self.a_exp, self.n)

    def recomputed_bound_ceiling(self):
        """Ceiling of b(n) using the row's frozen multiplier."""
        b = SPECTRAL_RATIO * index(CongruenceGroup.gamma1(self.n)) / (self.k3 * 2)
        return ceil_fraction(b)


@lru_cache(maxsize=None)
def _tables():
    with resources.files("torsionkit.data").joinpath(
            "gonality_tables.json").open() as fh:
        return json.load(fh)


@lru_cache(maxsize=None)
def cm_least_degrees():
    """Externally tabulated least CM-point degree per level."""
    with resources.files("torsionkit.data").joinpath(
            "cm_degrees.json").open() as fh:
        raw = json.load(fh)
    return {int(k): v for k, v in raw.items() if not k.startswith("_")}


def _rows(key):
    cm = cm_least_degrees()
    out = []
    for rec in _tables()[key]:
        out.append(GonalityRow(
            n=rec["n"], a_base=rec["a_base"], a_exp=rec["a_exp"],
            chi_orders=tuple(rec.get("chi_orders", ())),
            listed_order=rec["listed_order"], k3=rec["k3"],
            bound_ceiling=rec["bound_ceiling"],
            cm_least_degree=cm[rec["n"]]))
    return tuple(out)


def diamond_bound_rows():
    """Nine frozen rows driving the quartic-degree diamond sieve."""
    return _rows("diamond_bounds")


def character_bound_rows():
    """Eight frozen rows that additionally carry character-order data."""
    return _rows("character_bounds")


def abramovich_floor_entries():
    """Frozen level -> gonality-floor pairs from the spectral bound."""
    return {rec["n"]: rec["gonality_floor"]
            for rec in _tables()["abramovich_floors"]}


def sporadic_point_entries():
    """Frozen records of isolated low-degree points awaiting certification."""
    return tuple((rec["degree"], rec["n"], rec["rank_zero"], rec["gonality"])
                 for rec in _tables()["sporadic_points"])


def verify_bound_row(row, q=3):
    """Recompute everything derivable for a frozen bound row.

    Returns a dict with the group-theoretic operator order, the sharp
    multiplier and bound from :func:`kq_and_b`, and the ceiling of the
    bound under the row's frozen multiplier.
    """
    kq, b = kq_and_b(row.n, row.a, q, rank_finite=False)
    return {
        "n": row.n,
        "operator_order": diamond_order(row.n, row.a),
        "sharp_k": kq,
        "sharp_bound_ceiling": ceil_fraction(b),
        "listed_bound_ceiling": row.recomputed_bound_ceiling(),
        "bound_exceeds_four": b > 4,
    }


# ===== SMOKE TEST ===== #

if __name__ == "__main__":
    assert index(CongruenceGroup.gamma1(65), projective=True) == 2016
    assert index(CongruenceGroup.joint(3, 21), projective=True) == 576
    assert index(CongruenceGroup.gamma1(2)) == 3
    assert gonality_floor(CongruenceGroup.gamma1(65)) == 20
    assert gonality_floor(CongruenceGroup.joint(3, 21)) == 6
    assert kq_and_b(77, 3, 3, rank_finite=False)[0] == 7
    assert ceil_fraction(kq_and_b(77, 3, 3, rank_finite=False)[1]) == 5
    assert kq_and_b(121, 56, 3, rank_finite=False)[0] == 8
    assert sporadic_certify(5, 6, rank_zero=True)
    assert not sporadic_certify(6, 10, rank_zero=False)
    for row in diamond_bound_rows() + character_bound_rows():
        assert row.recomputed_bound_ceiling() == row.bound_ceiling
    print("gonality smoke test ok")
