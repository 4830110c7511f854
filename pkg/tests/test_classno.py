"""Reduced-form class numbers and the isolated-point degree search."""

import math
import random

import numpy
import pytest

from torsionkit.classno import (
    AUTOMATIC_DEGREE,
    EXISTENCE_LIMIT,
    class_number,
    class_number_array,
    existence_report,
    fundamental_mask,
    is_fundamental,
    minkowski_ok,
    missing_class_numbers,
    quadratic_field,
    realized_witness_table,
    sporadic_search,
)

# ===== SCALAR COUNTS ===== #


def test_frozen_class_numbers():
    assert class_number(3) == 1
    assert class_number(4) == 1
    assert class_number(163) == 1
    assert class_number(23) == 3
    assert class_number(39) == 4
    # non-fundamental: the imprimitive (2, 2, 2) of disc -12 is excluded
    assert class_number(12) == 1


def test_invalid_discriminants():
    for disc in (-4, 0, 1, 2, 5, 6, 13):
        with pytest.raises(ValueError, match="invalid discriminant"):
            class_number(disc)


def test_exactly_nine_class_number_one_fields():
    ones = [disc for disc in range(3, 10 ** 4)
            if is_fundamental(disc) and class_number(disc) == 1]
    assert ones == [3, 4, 7, 8, 11, 19, 43, 67, 163]


def test_quadratic_field_factory():
    assert quadratic_field(1).disc == 4
    assert quadratic_field(3).disc == 3
    assert quadratic_field(5) == quadratic_field(5)
    assert quadratic_field(5).h == 2
    with pytest.raises(ValueError, match="squarefree"):
        quadratic_field(12)
    with pytest.raises(ValueError, match="squarefree"):
        quadratic_field(0)


def test_reduced_form_count_against_literal_enumeration():
    # literal scan over all (a, b, c) boxes as the independent oracle
    rng = random.Random(11)
    discs = [d for d in range(3, 400) if d % 4 in (0, 3)]
    for disc in rng.sample(discs, 40) + [39, 163, 23]:
        literal = 0
        amax = int(math.isqrt(disc // 3)) + 1
        for a in range(1, amax + 1):
            for b in range(-a, a + 1):
                if (b * b + disc) % (4 * a):
                    continue
                c = (b * b + disc) // (4 * a)
                if c < a:
                    continue
                if (abs(b) == a or a == c) and b < 0:
                    continue
                if math.gcd(math.gcd(a, b), c) == 1:
                    literal += 1
        assert class_number(disc) == literal, disc


# ===== BULK SIEVE ===== #


def test_bulk_matches_scalar_at_fundamentals():
    bound = 30000
    counts = class_number_array(bound)
    mask = fundamental_mask(bound)
    for disc in numpy.nonzero(mask)[0][::7].tolist():
        assert counts[disc] == class_number(int(disc))


def test_fundamental_mask_matches_predicate():
    mask = fundamental_mask(3000)
    for disc in range(3001):
        assert bool(mask[disc]) == is_fundamental(disc)


def test_printed_minkowski_inequality_has_known_violations():
    # the (2/pi) sqrt(disc) inequality bounds least ideal norms, not class
    # counts; it fails first at disc 39 and holds at the nine h = 1 fields
    assert not minkowski_ok(39, class_number(39))
    assert not minkowski_ok(47, class_number(47))
    for disc in (3, 4, 7, 8, 11, 19, 43, 67, 163):
        assert minkowski_ok(disc, 1)


# ===== DEGREE SEARCH ===== #


def test_search_automatic_branch():
    rec = sporadic_search(202)
    assert rec == {"kind": "automatic", "d": 202,
                   "threshold_degree": AUTOMATIC_DEGREE}
    assert sporadic_search(2167)["kind"] == "automatic"


def test_search_failure_for_degree_one():
    rec = sporadic_search(1)
    assert rec["kind"] == "failure"
    assert [c["n"] for c in rec["candidates"]] == [3, 1, 7, 2, 11, 19, 43, 67, 163]
    assert max(c["n"] for c in rec["candidates"]) == 163
    # threshold 65536/325 ~ 201.65 exceeds every candidate
    num, den = rec["threshold"]
    assert all(c["n"] * den < num for c in rec["candidates"])


def test_search_certificates_small_degrees():
    for d in (2, 3, 5, 10, 25, 100, 201):
        rec = sporadic_search(d)
        assert rec["kind"] == "certificate"
        assert rec["h"] == d
        assert class_number(rec["disc"]) == d
        assert is_fundamental(rec["disc"])
        lhs_num, lhs_den = rec["bound_lhs"]
        rhs_num, rhs_den = rec["bound_rhs"]
        assert lhs_num * rhs_den > rhs_num * lhs_den
        n = rec["n"]
        assert rec["disc"] in (n, 4 * n)
        assert 325 * n > 65536 * d


def test_search_validation():
    with pytest.raises(ValueError, match="at least 1"):
        sporadic_search(0)


def test_missing_class_numbers():
    assert missing_class_numbers([1, 2, 4], 5) == [3, 5]
    assert missing_class_numbers(range(1, 100), 99) == []


# ===== REALIZED-CLASS-NUMBER WITNESSES ===== #


def test_witness_table_covers_existence_claim():
    table = realized_witness_table()
    assert EXISTENCE_LIMIT == 2166
    assert missing_class_numbers(table, EXISTENCE_LIMIT) == []
    assert sorted(table) == list(range(1, EXISTENCE_LIMIT + 1))
    for h, (disc, n) in table.items():
        assert is_fundamental(disc)
        assert disc == (n if n % 4 == 3 else 4 * n)
    report = existence_report()
    assert report["missing"] == []
    assert report["limit"] == EXISTENCE_LIMIT
    assert existence_report(100)["missing"] == []
    with pytest.raises(ValueError, match="witness table"):
        existence_report(EXISTENCE_LIMIT + 1)


def test_witness_spot_recounts():
    # each sampled witness is independently recounted form by form
    table = realized_witness_table()
    rng = random.Random(2166)
    sample = set(rng.sample(range(1, EXISTENCE_LIMIT + 1), 24))
    sample |= {1, 2, 3, 97, 2166}
    for h in sorted(sample):
        disc, _ = table[h]
        assert class_number(disc) == h, (h, disc)


def test_witnesses_are_least_in_sieve_range():
    # witnesses below 250000 are the least fundamental disc with that h
    table = realized_witness_table()
    bound = 250_000
    counts = class_number_array(bound)
    mask = fundamental_mask(bound)
    seen = set()
    for disc in numpy.nonzero(mask)[0].tolist():
        h = int(counts[disc])
        if h not in seen:
            seen.add(h)
            if h in table and table[h][0] <= bound:
                assert table[h][0] == disc, (h, disc, table[h])
