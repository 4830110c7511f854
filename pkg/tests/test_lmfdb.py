"""Tests for the offline newform rank/character audit module.

The dimension data in the shipped fixtures is recomputed here from scratch
(character orbits, exact weight-2 dimension formula, new/old recursion) and
cross-checked against genus numbers obtained by a second, independent route
(index count plus cusp count). Rank bounds are imported facts; the tests
verify the audit logic around them, not the bounds themselves.
"""

import json
import math
import os
import random

import pytest
from sympy import divisor_count, divisors, totient

from torsionkit import lmfdb
from torsionkit.lmfdb import (
    AuditResult,
    CharacterOrbit,
    NewformOrbitRecord,
    RankClaim,
    block_dimension,
    canonical_query,
    character_orbits,
    claim_manifest,
    fetch_orbits,
    fixture_document,
    fixture_name,
    genus_x1,
    new_block_dimensions,
    parse_label,
    rank_audit,
    run_manifest,
    synthesized_records,
    validate_records,
)

FIXTURE_LEVELS = [63, 65, 77, 85, 91, 95, 119, 121, 125, 133, 143, 169, 187,
                  209, 221, 247, 289, 323, 361]

PACKAGED_FIXTURES = os.path.join(os.path.dirname(lmfdb.__file__), "fixtures")


# ===== CHARACTER ORBITS ===== #


def test_character_orbit_letters_match_public_database():
    # spot values verified by hand against the public database tables
    mod13 = {o.letter: (o.order, o.conductor) for o in character_orbits(13)}
    assert mod13 == {"a": (1, 1), "b": (2, 13), "c": (3, 13), "d": (4, 13),
                     "e": (6, 13), "f": (12, 13)}
    mod143 = {o.letter: (o.order, o.conductor) for o in character_orbits(143)}
    assert mod143["h"] == (5, 11)
    assert mod143["d"] == (2, 143)
    mod187 = {o.letter: (o.order, o.conductor) for o in character_orbits(187)}
    assert mod187["g"] == (5, 11)
    # no order-3 characters exist modulo 187 (unit group C10 x C16)
    assert 3 not in {o.order for o in character_orbits(187)}


def test_character_orbit_group_invariants():
    rng = random.Random(20260815)
    for n in rng.sample(range(3, 120), 14) + [63, 65, 143]:
        orbits = character_orbits(n)
        assert sum(o.size for o in orbits) == totient(n)
        assert len({o.letter for o in orbits}) == len(orbits)
        even_count = sum(o.size for o in orbits if o.is_even)
        assert even_count == (totient(n) if n <= 2 else totient(n) // 2)
        for o in orbits:
            assert n % o.conductor == 0
            assert o.size == totient(o.order)
            assert (o.conductor == 1) == (o.order == 1)


def test_character_values_are_multiplicative():
    rng = random.Random(7)
    for n in [13, 63, 65, 143, 187]:
        units = [u for u in range(1, n) if math.gcd(u, n) == 1]
        for orbit in character_orbits(n):
            x, y = rng.choice(units), rng.choice(units)
            vx = orbit.value_exponent(x)
            vy = orbit.value_exponent(y)
            assert (vx + vy) % 1 == orbit.value_exponent(x * y % n)
            # character order is the exact order of the value group
            assert (vx * orbit.order) % 1 == 0
        with pytest.raises(ValueError):
            character_orbits(n)[0].value_exponent(n)


# ===== DIMENSIONS ===== #


def test_block_dimensions_sum_to_genus_across_levels():
    # dual route: dimension formula vs index/cusp genus, every level 5..80
    for n in range(5, 81):
        total = sum(block_dimension(o, n) for o in character_orbits(n)
                    if o.is_even)
        assert total == genus_x1(n), n


def test_trivial_block_equals_classical_genus():
    # frozen classical genus values for the trivial-character curve
    expected = {11: 1, 21: 1, 37: 2, 63: 5, 65: 5, 143: 13}
    for n, genus in expected.items():
        trivial = character_orbits(n)[0]
        assert trivial.order == 1
        assert block_dimension(trivial, n) == genus


def test_new_old_recursion_bookkeeping():
    for n in [63, 65, 91, 143]:
        total = 0
        for orbit in character_orbits(n):
            if not orbit.is_even:
                continue
            for level, new_dim in new_block_dimensions(orbit).items():
                assert new_dim >= 0
                total += new_dim * divisor_count(n // level)
        assert total == genus_x1(n)


def test_frozen_new_space_splits():
    # level 65: 117 new, plus the level-13 order-6 orbit counted twice
    new65 = sum(d for o in character_orbits(65) if o.is_even
                for lvl, d in new_block_dimensions(o).items() if lvl == 65)
    assert new65 == 117
    order6 = [o for o in character_orbits(13) if o.order == 6][0]
    assert new_block_dimensions(order6) == {13: 2}
    assert genus_x1(65) == 121 == 117 + 2 * 2
    # level 63: 87 new, the rest from level 21 with multiplicity two
    new63 = sum(d for o in character_orbits(63) if o.is_even
                for lvl, d in new_block_dimensions(o).items() if lvl == 63)
    assert new63 == 87
    old_total = genus_x1(63) - new63
    assert old_total == 10  # 5 dimensions at level 21, each counted twice


def test_genus_frozen_values():
    assert [genus_x1(n) for n in [1, 4, 13, 21, 25, 63, 65, 121]] == \
        [0, 0, 2, 5, 12, 97, 121, 526]


# ===== RECORDS AND LABELS ===== #


def test_label_parse_roundtrip():
    assert parse_label("65.2.a.a") == (65, 2, "a")
    assert parse_label("143.2.h.a") == (143, 2, "h")
    for bad in ["65.2.a", "65.2.a.a.a", "65.two.a.a", "65.2.3.a", "", "a.b"]:
        with pytest.raises(ValueError):
            parse_label(bad)


def test_record_validation():
    rec = NewformOrbitRecord(label="65.2.a.a", level=65, weight=2,
                             char_orbit="a", char_order=1, dim=1,
                             rank_bound=1, fricke=1)
    assert NewformOrbitRecord.from_json(rec.to_json()) == rec
    with pytest.raises(ValueError):
        NewformOrbitRecord(label="65.2.a.a", level=63, weight=2,
                           char_orbit="a", char_order=1, dim=1, rank_bound=0)
    with pytest.raises(ValueError):
        NewformOrbitRecord(label="65.3.a.a", level=65, weight=3,
                           char_orbit="a", char_order=1, dim=1, rank_bound=0)
    with pytest.raises(ValueError):
        NewformOrbitRecord.from_json({"label": "65.2.a.a"})


def test_synthesized_records_frozen_level_65():
    records = {r.label: r for r in synthesized_records(65)}
    assert records["13.2.e.a"].dim == 2
    assert records["13.2.e.a"].char_order == 6
    assert records["65.2.a.a"].dim == 1
    assert records["65.2.a.a"].rank_bound == 1
    assert records["65.2.a.a"].fricke == 1
    assert records["65.2.a.b"].dim == 2
    assert records["65.2.a.b"].fricke == -1
    assert sum(r.dim for r in records.values() if r.char_order == 1) == 5
    assert len(records) == 15


def test_validate_records_catches_corruption():
    records = synthesized_records(65)
    assert validate_records(records, 65)

    def tweak(index, **changes):
        doc = records[index].to_json()
        doc.update(changes)
        out = list(records)
        out[index] = NewformOrbitRecord.from_json(doc)
        return out

    with pytest.raises(ValueError):  # genus total broken
        validate_records(tweak(1, dim=2), 65)
    with pytest.raises(ValueError):  # character order broken
        validate_records(tweak(0, char_order=3), 65)
    with pytest.raises(ValueError):  # Fricke sign on a nontrivial character
        validate_records(tweak(0, fricke=1), 65)
    with pytest.raises(ValueError):  # level does not divide
        validate_records(records, 77)


# ===== FIXTURES ===== #


def test_fixture_files_replay_byte_identical():
    for n in FIXTURE_LEVELS:
        path = os.path.join(PACKAGED_FIXTURES, fixture_name(n))
        with open(path, "r", encoding="utf-8") as handle:
            shipped = handle.read()
        regenerated = json.dumps(fixture_document(n), indent=1,
                                 sort_keys=True) + "\n"
        assert shipped == regenerated, f"fixture for {n} drifted"


def test_fixture_name_is_content_addressed():
    assert fixture_name(65) != fixture_name(63)
    assert json.loads(canonical_query(65)) == {"level_divides": 65,
                                               "weight": 2}
    # canonical query serialization is key-sorted and compact
    assert canonical_query(65) == '{"level_divides":65,"weight":2}'


def test_fetch_orbits_offline_reads_fixture():
    records = fetch_orbits(65)
    assert [r.label for r in records] == [r.label for r in
                                          synthesized_records(65)]
    explicit = fetch_orbits(65, fixtures_dir=PACKAGED_FIXTURES)
    assert explicit == records


def test_fetch_orbits_error_contracts(tmp_path):
    with pytest.raises(ValueError, match="coverage"):
        fetch_orbits(1001)
    with pytest.raises(RuntimeError, match="offline and no fixture"):
        fetch_orbits(999)
    # schema drift: wrong query embedded in an otherwise valid file
    doc = fixture_document(65)
    doc["query"]["level_divides"] = 63
    path = tmp_path / fixture_name(65)
    path.write_text(json.dumps(doc))
    with pytest.raises(ValueError, match="schema"):
        fetch_orbits(65, fixtures_dir=str(tmp_path))
    # record-level corruption is caught by validation
    doc = fixture_document(65)
    doc["records"][1]["dim"] = 3
    path.write_text(json.dumps(doc))
    with pytest.raises(ValueError):
        fetch_orbits(65, fixtures_dir=str(tmp_path))


# ===== AUDITS ===== #


def _rec(label, order, dim, rank, fricke=None):
    level, weight, char = parse_label(label)
    return NewformOrbitRecord(label=label, level=level, weight=weight,
                              char_orbit=char, char_order=order, dim=dim,
                              rank_bound=rank, fricke=fricke)


def test_rank_audit_kinds_on_synthetic_records():
    records = [
        _rec("5.2.a.a", 1, 1, 0, fricke=-1),
        _rec("65.2.a.a", 1, 1, 1, fricke=1),
        _rec("65.2.b.a", 2, 6, 0),
        _rec("65.2.e.a", 3, 8, None),
    ]
    zero = RankClaim(claim_id="t1", kind="all_rank_zero", level_divides=65,
                     description="", char_orders=[2])
    assert rank_audit(zero, records=records).passed
    # a null bound is not a proof of rank zero
    zero_all = RankClaim(claim_id="t2", kind="all_rank_zero",
                         level_divides=65, description="",
                         char_orders="nontrivial")
    result = rank_audit(zero_all, records=records)
    assert not result.passed
    assert "65.2.e.a" in result.evidence

    unique = RankClaim(claim_id="t3", kind="unique_positive",
                       level_divides=65, description="",
                       expected_label="65.2.a.a")
    assert not rank_audit(unique, records=records).passed  # null counts
    bounded = records[:3]
    assert rank_audit(unique, records=bounded).passed

    sum_claim = RankClaim(claim_id="t4", kind="weighted_rank_sum",
                          level_divides=65, description="",
                          char_orders=[1], expected_sum=1)
    assert rank_audit(sum_claim, records=bounded).passed
    sum_all = RankClaim(claim_id="t5", kind="weighted_rank_sum",
                        level_divides=65, description="", expected_sum=1)
    result = rank_audit(sum_all, records=records)
    assert not result.passed and "no imported bound" in result.detail

    orders = RankClaim(claim_id="t6", kind="positive_char_orders",
                       level_divides=65, description="",
                       expected_orders=(5,))
    assert not rank_audit(orders, records=bounded).passed

    with pytest.raises(ValueError, match="unknown claim kind"):
        rank_audit(RankClaim(claim_id="t7", kind="nope", level_divides=65,
                             description=""), records=records)
    with pytest.raises(ValueError, match="uncovered"):
        rank_audit(RankClaim(claim_id="t8", kind="all_rank_zero",
                             level_divides=2002, description=""))


def test_weighted_sum_counts_oldform_multiplicity():
    # a rank-1 orbit at level 13 appears with multiplicity 2 inside level 65
    records = [_rec("13.2.e.a", 6, 2, 1)]
    claim = RankClaim(claim_id="t", kind="weighted_rank_sum",
                      level_divides=65, description="", expected_sum=4)
    assert rank_audit(claim, records=records).passed


def test_claim_manifest_covers_all_hypotheses_and_passes():
    claims = claim_manifest()
    assert len(claims) == 23
    assert {c.level_divides for c in claims} == set(FIXTURE_LEVELS)
    assert {c.kind for c in claims} == {"all_rank_zero", "unique_positive",
                                        "weighted_rank_sum",
                                        "positive_char_orders"}
    results = run_manifest()
    assert len(results) == len(claims)
    for result in results:
        assert isinstance(result, AuditResult)
        assert result.passed, (result.claim.claim_id, result.detail)


def test_level_65_rank_chain():
    by_id = {c.claim_id: c for c in claim_manifest()}
    records = fetch_orbits(65)
    assert rank_audit(by_id["65-unique-positive"], records=records).passed
    assert rank_audit(by_id["65-full-rank-one"], records=records).passed
    assert rank_audit(by_id["65-trivial-rank-one"], records=records).passed
    assert rank_audit(by_id["65-fricke-plus-rank-one"],
                      records=records).passed
    assert rank_audit(by_id["65-nontrivial-rank-zero"],
                      records=records).passed


def test_order_five_confinement_claims():
    by_id = {c.claim_id: c for c in claim_manifest()}
    for level, letter in [(143, "h"), (187, "g")]:
        claim = by_id[f"{level}-positive-confined"]
        assert claim.expected_char_orbit == letter
        records = fetch_orbits(level)
        positives = [r for r in records
                     if r.char_order > 1 and r.rank_bound != 0]
        assert len(positives) == 1
        assert positives[0].char_orbit == letter
        assert positives[0].char_order == 5
        assert rank_audit(claim, records=records).passed


def test_character_order_scope_at_level_63():
    records = fetch_orbits(63)
    for rec in records:
        if rec.char_order in (1, 3):
            assert rec.rank_bound == 0
        if rec.char_order == 6 and rec.level == 63:
            # no fact imported for the order-6 part: bound stays open
            assert rec.rank_bound is None
    by_id = {c.claim_id: c for c in claim_manifest()}
    assert rank_audit(by_id["63-order-le-3-rank-zero"],
                      records=records).passed


# ===== SMOKE ===== #


def test_all_fixture_levels_validate():
    for n in FIXTURE_LEVELS:
        records = fetch_orbits(n)
        assert validate_records(records, n)
        assert sum(r.dim * divisor_count(n // r.level) for r in records) == \
            genus_x1(n)
        assert all(n % r.level == 0 for r in records)
        assert all(r.level in divisors(n) for r in records)
