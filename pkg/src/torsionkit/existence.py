"""Which torsion groups occur over finite fields.

Admissible Frobenius traces follow the classical classification of isogeny
classes of elliptic curves over F_q = F_{p^a}:

  (1) gcd(beta, p) = 1 and beta^2 <= 4q          (ordinary)
  (2) a even: beta = +/- 2 sqrt(q)
  (3) a even, p != 1 mod 3: beta = +/- sqrt(q)
  (4) a odd, p in {2, 3}: beta = +/- p^((a+1)/2)
  (5) a odd: beta = 0
  (6) a even, p != 1 mod 4: beta = 0

For ordinary N = q + 1 - beta the realizable group shapes Z/A x Z/B
(A | B, AB = N) are exactly those with A | q - 1. Supersingular classes are
settled by exhaustive curve censuses within the enumeration bound; the
package never extrapolates them.
"""

from __future__ import annotations

import math

import sympy

from .algebra import hasse_interval
from .curves import (
    _CENSUS_SWEEP_MAX,
    ENUMERATION_BOUND,
    emptiness_certified,
    group_structure,
    point_count,
    witness_search,
)

# ===== ADMISSIBLE TRACES ===== #


def admissible_traces(p, a):
    """Sorted list of Frobenius traces of elliptic curves over F_{p^a}."""
    if not sympy.isprime(p) or a < 1:
        raise ValueError("prime power required")
    q = p ** a
    bound = math.isqrt(4 * q)
    traces = set()
    for beta in range(-bound, bound + 1):
        if math.gcd(beta, p) == 1:
            traces.add(beta)                                   # (1)
    if a % 2 == 0:
        root = p ** (a // 2)
        traces.update({2 * root, -2 * root})                   # (2)
        if p % 3 != 1:
            traces.update({root, -root})                       # (3)
        if p % 4 != 1:
            traces.add(0)                                      # (6)
    else:
        if p in (2, 3):
            s = p ** ((a + 1) // 2)
            traces.update({s, -s})                             # (4)
        traces.add(0)                                          # (5)
    return sorted(traces)


def is_ordinary_trace(beta, p):
    return math.gcd(beta, p) == 1


def ordinary_group_exists(N, m, n, q):
    """Whether Z/m x Z/n embeds in some Z/A x Z/B with AB = N, A | B,
    A | q - 1 (the ordinary realizability condition)."""
    for A in sympy.divisors(N):
        if A * A > N:
            break
        if N % (A * A):
            continue
        if (q - 1) % A:
            continue
        B = N // A
        if A % m == 0 and B % n == 0:
            return True
    return False


# ===== EXISTENCE DECISIONS ===== #

_EXISTS_CACHE = {}


def torsion_group_exists(m, n, p, d):
    """Whether some elliptic curve over F_{p^d} contains Z/m x Z/n.

    Ordinary isogeny classes are decided by the trace classification plus
    the A | q-1 criterion; supersingular possibilities are settled by
    exhaustive enumeration, which is only available within the bound.

    Raises:
        ValueError: "p divides level" if p | m*n; "enumeration bound" when
            the answer would rest on supersingular classes beyond the
            enumerable range.
    """
    key = (m, n, p, d)
    if key in _EXISTS_CACHE:
        return _EXISTS_CACHE[key]
    result = _torsion_group_exists(m, n, p, d)
    _EXISTS_CACHE[key] = result
    return result


def _torsion_group_exists(m, n, p, d):
    if (m * n) % p == 0:
        raise ValueError("p divides level")
    g = math.gcd(m, n)
    m, n = g, (m // g) * n
    q = p ** d
    if m > 1 and (q - 1) % m:
        return False  # Weil pairing needs the m-th roots of unity
    mn = m * n
    lo, hi = hasse_interval(q)
    admissible = {q + 1 - b for b in admissible_traces(p, d)}
    candidates = sorted(N for N in admissible
                        if lo <= N <= hi and N % mn == 0)
    if not candidates:
        return False
    for N in candidates:
        beta = q + 1 - N
        if is_ordinary_trace(beta, p) and ordinary_group_exists(N, m, n, q):
            return True
    # only supersingular candidates remain: decide by enumeration
    if q <= _CENSUS_SWEEP_MAX:
        return not emptiness_certified(m, n, q)
    if q <= ENUMERATION_BOUND:
        witness = witness_search(m, n, q)
        if witness is not None:
            return True
    raise ValueError("enumeration bound")


def existence_certificate(m, n, p, d):
    """Details behind torsion_group_exists, for reports and the CLI.

    Returns a dict with keys: exists (bool or None when undecidable),
    method, q, and (when a witness curve is enumerable) the witness
    a-invariant codes and section orders.
    """
    q = p ** d
    out = {"m": m, "n": n, "p": p, "d": d, "q": q}
    try:
        exists = torsion_group_exists(m, n, p, d)
    except ValueError as err:
        if str(err) == "enumeration bound":
            out.update(exists=None, method="bound")
            return out
        raise
    out["exists"] = exists
    if not exists:
        out["method"] = ("hasse" if not _has_candidates(m, n, p, d)
                         else "census")
        return out
    # classify the route that proved existence
    lo, hi = hasse_interval(q)
    mn = m * n
    ordinary = False
    for N in range(lo, hi + 1):
        beta = q + 1 - N
        if (N % mn == 0 and beta in set(admissible_traces(p, d))
                and is_ordinary_trace(beta, p)
                and ordinary_group_exists(N, m, n, q)):
            ordinary = True
            break
    out["method"] = "ordinary" if ordinary else "census"
    if q <= ENUMERATION_BOUND and m in (1, 2):
        witness = witness_search(m, n, q)
        if witness is not None:
            curve, P, Q = witness
            N = point_count(curve)
            out["witness"] = {
                "a_invariants": [a.code() for a in curve.a_invariants()],
                "field": [p, curve.field.k],
                "curve_order": N,
                "section_orders": [m, n],
                "group_structure": list(group_structure(curve))[1:],
            }
    return out


def _has_candidates(m, n, p, d):
    q = p ** d
    lo, hi = hasse_interval(q)
    mn = m * n
    admissible = {q + 1 - b for b in admissible_traces(p, d)}
    return any(lo <= N <= hi and N % mn == 0 for N in admissible)


def reduction_report(m, n, p):
    """Existence of Z/m x Z/n over F_{p^d} for d = 1..4.

    Returns {d: certificate-dict}; undecidable entries carry exists=None.
    """
    return {d: existence_certificate(m, n, p, d) for d in (1, 2, 3, 4)}


if __name__ == "__main__":
    assert set(admissible_traces(2, 2)) == {0, 1, -1, 2, -2, 3, -3, 4, -4}
    assert set(admissible_traces(3, 1)) == {0, 1, -1, 2, -2, 3, -3}
    t81 = set(admissible_traces(3, 4))
    assert t81 == set(range(-18, 19)) - {3, -3, 6, -6, 12, -12, 15, -15}
    assert torsion_group_exists(1, 15, 13, 1) is True
    assert torsion_group_exists(1, 27, 2, 4) is False
    assert torsion_group_exists(1, 85, 3, 4) is False
    assert torsion_group_exists(1, 36, 5, 2) is False
    assert torsion_group_exists(1, 42, 11, 4) is True
    print("existence smoke OK")
