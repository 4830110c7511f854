"""Admissible traces and torsion-group existence over finite fields."""

import pytest

from torsionkit.curves import prime_power, trace_census
from torsionkit.existence import (
    admissible_traces,
    existence_certificate,
    ordinary_group_exists,
    reduction_report,
    torsion_group_exists,
)

# ===== ADMISSIBLE TRACES ===== #


def test_admissible_traces_frozen():
    assert set(admissible_traces(2, 2)) == {0, 1, -1, 2, -2, 3, -3, 4, -4}
    assert set(admissible_traces(3, 1)) == {0, 1, -1, 2, -2, 3, -3}
    assert set(admissible_traces(3, 4)) == (
        set(range(-18, 19)) - {3, -3, 6, -6, 12, -12, 15, -15})


def test_admissible_traces_match_census():
    # every admissible trace is realized and vice versa (full curve sweeps)
    for q in [2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 25, 27, 32, 49, 64, 81]:
        p, a = prime_power(q)
        assert set(admissible_traces(p, a)) == set(trace_census(q)), q


def test_admissible_traces_validation():
    with pytest.raises(ValueError):
        admissible_traces(6, 1)


# ===== ORDINARY SHAPES ===== #


def test_ordinary_group_exists():
    # N = 15 over F_13: cyclic works
    assert ordinary_group_exists(15, 1, 15, 13)
    # N = 16 over F_7: (Z/4)^2 needs 4 | q-1; 4 | 6 fails, but (2,8) works
    assert ordinary_group_exists(16, 2, 8, 7)
    assert not ordinary_group_exists(16, 4, 4, 7)
    # over F_13 (q-1 = 12) the (4,4) shape is allowed
    assert ordinary_group_exists(16, 4, 4, 13)


# ===== EXISTENCE DECISIONS ===== #


def test_torsion_group_exists_frozen():
    assert torsion_group_exists(1, 15, 13, 1) is True
    assert torsion_group_exists(1, 27, 2, 4) is False
    assert torsion_group_exists(1, 85, 3, 4) is False


def test_supersingular_only_case_decided_by_census():
    # over F_25 the only curve order divisible by 36 is the supersingular
    # N = 36 class, whose group is (Z/6)^2: no point of order 36
    assert torsion_group_exists(1, 36, 5, 2) is False
    # the same class does provide (Z/6)^2 torsion
    assert torsion_group_exists(6, 6, 5, 2) is True


def test_beyond_bound_ordinary_still_decided():
    # q = 11^4 exceeds the enumeration bound, but an ordinary class decides
    assert torsion_group_exists(1, 42, 11, 4) is True


def test_char_divides_level_rejected():
    with pytest.raises(ValueError, match="p divides level"):
        torsion_group_exists(1, 10, 5, 2)


def test_weil_pairing_constraint():
    # full m-torsion needs mu_m in the field: (3,3) over F_5 (q-1=4) fails
    assert torsion_group_exists(3, 3, 5, 1) is False
    assert torsion_group_exists(3, 3, 7, 1) is True


def test_reduction_report_structure():
    rep = reduction_report(1, 26, 7)
    assert [rep[d]["exists"] for d in (1, 2, 3, 4)] == [False, True, True, True]
    for d in (2, 3, 4):
        assert rep[d]["method"] == "ordinary"
        w = rep[d]["witness"]
        assert w["curve_order"] % 26 == 0
        assert w["group_structure"][1] % 26 == 0


def test_certificate_for_empty_cell():
    cert = existence_certificate(1, 36, 5, 2)
    assert cert["exists"] is False and cert["method"] == "census"
    cert = existence_certificate(1, 27, 2, 4)
    assert cert["exists"] is False and cert["method"] == "hasse"
