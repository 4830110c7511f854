"""Boundary-point inventories, residue degrees, and congruence conditions."""

import math
import random

import pytest

from torsionkit.cusps import (
    CongruenceCondition,
    cc_condition,
    closed_form_cusp_count,
    cusp_inventory,
    cusp_orbits,
    cusp_residue_degrees,
    rational_cusp_count,
    total_cusps,
)

# ===== COUNTS AND CLOSED FORM ===== #


def test_small_level_inventory():
    inv = cusp_inventory(1, 5)
    assert total_cusps(1, 5) == 4
    by_gon = {d.gon: d for d in inv}
    assert by_gon[5].orbit_degrees == (1, 1)
    assert by_gon[1].orbit_degrees == (2,)


def test_closed_form_matches_enumeration():
    for n in range(5, 101):
        assert closed_form_cusp_count(n) == total_cusps(1, n)


def test_closed_form_formula_shape():
    # the count is a divisor-sum convolution of unit counts, halved
    for n in (5, 12, 30, 49):
        conv = sum(_phi(d) * _phi(n // d) for d in range(1, n + 1) if n % d == 0)
        assert closed_form_cusp_count(n) == conv // 2


def test_closed_form_rejects_small_levels():
    for n in (1, 2, 3, 4):
        with pytest.raises(ValueError, match="closed form requires n > 4"):
            closed_form_cusp_count(n)


def _phi(n):
    return sum(1 for a in range(1, n + 1) if math.gcd(a, n) == 1)


# ===== FULL-LEVEL-PLUS-POINT STRUCTURES ===== #


def test_joint_level_three_fifteen():
    inv = cusp_inventory(3, 15)
    assert total_cusps(3, 15) == 64
    by_gon = {d.gon: d for d in inv}
    # width-15 boundary points are quadratic, width-3 ones need the full
    # cyclotomic field of the level
    assert by_gon[15].geometric_count == 32
    assert by_gon[15].orbit_degrees == (2,) * 16
    assert by_gon[3].geometric_count == 32
    assert by_gon[3].orbit_degrees == (8,) * 4


def test_joint_level_totals():
    assert total_cusps(2, 20) == 32
    assert {d.gon: d.geometric_count for d in cusp_inventory(2, 20)} == {
        20: 8, 10: 8, 4: 8, 2: 8}
    assert total_cusps(2, 24) == 40
    assert {d.gon: d.geometric_count for d in cusp_inventory(2, 24)} == {
        24: 8, 12: 4, 8: 8, 6: 8, 4: 4, 2: 8}


def test_level_validation():
    with pytest.raises(ValueError, match="m must be 1, 2, or 3"):
        cusp_inventory(4, 8)
    with pytest.raises(ValueError, match="m must divide n"):
        cusp_inventory(2, 15)


# ===== FIELDS OF DEFINITION ===== #


def test_orbit_degrees_follow_cyclotomic_rule():
    # orbits of width k inside level n come in Galois orbits whose size is
    # phi(n/k), halved when complex conjugation already stabilises
    for n in range(5, 61):
        for datum in cusp_inventory(1, n):
            e = n // datum.gon
            expect = _phi(e)
            if datum.real_subfield and expect > 1:
                expect //= 2
            assert set(datum.orbit_degrees) == {expect}
            assert datum.geometric_count == expect * len(datum.orbit_degrees)


def test_residue_degree_tables_frozen():
    assert cusp_residue_degrees(1, 63, 2) == {
        63: (1,), 21: (2,), 9: (3,), 7: (6,), 3: (6,), 1: (6,)}
    assert cusp_residue_degrees(1, 65, 3) == {
        65: (1,), 13: (4,), 5: (3,), 1: (12,)}
    assert cusp_residue_degrees(1, 65, 2) == {
        65: (1,), 13: (4,), 5: (12,), 1: (6,)}


def test_residue_degree_validation():
    with pytest.raises(ValueError, match="p divides level"):
        cusp_residue_degrees(1, 65, 5)


def test_rational_cusp_counts_vs_stabilizers():
    rng = random.Random(7)
    for _ in range(40):
        n = rng.randrange(5, 40)
        q = rng.choice([2, 3, 4, 5, 7, 8, 9, 11, 13])
        if math.gcd(q, n) != 1:
            continue
        manual = 0
        for orbit in cusp_orbits(1, n):
            if q % n in orbit.stabilizer:
                manual += orbit.degree
        assert rational_cusp_count(1, n, q) == manual


def test_moduli_plus_cusps_fill_the_line():
    # genus-zero level: noncuspidal moduli and rational boundary points
    # together must give exactly q + 1 points
    from torsionkit.curves import enumerate_moduli

    for q in (2, 3, 4, 7, 8, 9, 11, 13, 16, 27, 29, 49):
        if q % 5 == 0:
            continue
        pts = len(enumerate_moduli(1, 5, q))
        assert pts + rational_cusp_count(1, 5, q) == q + 1


# ===== CONGRUENCE CONDITIONS ===== #


def test_congruence_condition_api():
    cond = CongruenceCondition(4, (1,))
    assert not cond.trivial
    assert cond.satisfied_by(13)
    assert not cond.satisfied_by(7)
    assert cond.describe() == "q = 1 (mod 4)"
    assert CongruenceCondition(1, (0,)).trivial
    assert CongruenceCondition(1, (0,)).describe() == "no condition"


def test_cc_conditions_frozen():
    assert cc_condition(1, 28, 5, 1) == CongruenceCondition(4, (1,))
    assert cc_condition(1, 28, 5, 2) == CongruenceCondition(4, (1,))
    assert cc_condition(1, 36, 5, 1) == CongruenceCondition(4, (1,))
    assert cc_condition(2, 24, 5, 1) == CongruenceCondition(4, (1,))


def test_cc_conditions_trivial_rows():
    for (m, n, p) in [(1, 26, 7), (2, 20, 7), (1, 42, 11)]:
        assert cc_condition(m, n, p, 1).trivial
        assert cc_condition(m, n, p, 2).trivial
    for (m, n, p) in [(1, 32, 3), (1, 34, 3), (1, 25, 3)]:
        assert cc_condition(m, n, p, 1).trivial


def test_cc_condition_validation():
    with pytest.raises(ValueError, match="cusp part degree must be 1 or 2"):
        cc_condition(1, 28, 5, 3)


def test_cc_condition_matches_direct_stabilizer_scan():
    # the published congruence is the intersection of stabilizers of the
    # boundary points that a low-degree place is forced to hit
    for (m, n, p, part) in [(1, 28, 5, 1), (1, 36, 5, 2), (2, 24, 5, 2),
                            (1, 32, 3, 2)]:
        cond = cc_condition(m, n, p, part)
        good = set(range(1, 2 * n))
        for orbit in cusp_orbits(m, n):
            f = orbit.residue_degree(p)
            hit = (f == 1) if part == 1 else (f <= 2 and orbit.degree > f)
            if hit:
                good &= {s for s in range(1, 2 * n)
                         if math.gcd(s, n) == 1 and s % n in orbit.stabilizer}
        for q in range(1, 200):
            if math.gcd(q, n) != 1:
                continue
            assert cond.satisfied_by(q) == (q % n in {g % n for g in good})
