"""Offline-capable audit of newform analytic-rank and character-order inputs.

The classification argument imports a handful of facts about weight-2 newform
Galois orbits of level dividing certain composite moduli: which orbits can
have positive analytic rank, what the orders of their nebentypus characters
are, and dimension-weighted rank sums for specific Jacobian quotients.  This
module stores those facts in content-addressed fixture files, recomputes all
dimension bookkeeping independently (character orbits, exact weight-2
dimension formula, new/old decomposition, genus cross-checks), and evaluates
a declarative claim manifest against the fixture records.

Analytic ranks themselves are not computable at desk scale; the fixture rank
fields are treated as upper bounds sourced from the public database, and an
audit of "rank 0" passes only when the stored upper bound is 0.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from itertools import product
from math import gcd, lcm

from sympy import divisor_count, divisors, factorint, mobius, primitive_root, totient

from .cusps import closed_form_cusp_count
from .gonality import CongruenceGroup, index

MAX_COVERED_LEVEL = 1000

# ===== DIRICHLET CHARACTER ORBITS ===== #


@lru_cache(maxsize=None)
def _unit_group(n):
    """CRT generators of (Z/n)* as ((generator, order), ...)."""
    if n == 1:
        return ()
    gens = []
    fact = factorint(n)
    for p in sorted(fact):
        r = fact[p]
        q = p ** r
        rest = n // q
        if p == 2:
            local = [] if r == 1 else ([(q - 1, 2)] if r == 2
                                       else [(q - 1, 2), (5, 2 ** (r - 2))])
        else:
            local = [(int(primitive_root(q)), int(totient(q)))]
        for g, order in local:
            if rest == 1:
                gens.append((g % n, order))
            else:
                # lift: congruent to g at this prime power, to 1 elsewhere
                inv = pow(q, -1, rest)
                lifted = (g * rest * pow(rest, -1, q) + q * inv) % n
                gens.append((lifted, order))
    return tuple(gens)


@lru_cache(maxsize=None)
def _dlog_table(n):
    """Map each unit mod n to its exponent tuple over _unit_group(n)."""
    gens = _unit_group(n)
    table = {}
    for exps in product(*(range(order) for _, order in gens)):
        value = 1
        for (g, _), e in zip(gens, exps):
            value = value * pow(g, e, n) % n
        table[value] = exps
    assert len(table) == int(totient(n))
    return table


def _letter_code(i):
    """0 -> a, 25 -> z, 26 -> ba, 27 -> bb, ... (database letter scheme)."""
    if i < 26:
        return chr(97 + i)
    q, r = divmod(i, 26)
    return chr(97 + q) + chr(97 + r)


@dataclass(frozen=True)
class CharacterOrbit:
    """Galois orbit of Dirichlet characters mod `modulus`.

    `exponents` is the lexicographically least member, written with respect
    to the CRT generators of the unit group; `size` is the orbit length
    (the Euler phi of `order`).
    """

    modulus: int
    letter: str
    order: int
    conductor: int
    is_even: bool
    exponents: tuple
    size: int

    def value_exponent(self, x):
        """chi(x) = exp(2 pi i v) for the orbit representative; v in [0,1)."""
        if gcd(x, self.modulus) != 1:
            raise ValueError("argument must be a unit modulo the modulus")
        gens = _unit_group(self.modulus)
        dlog = _dlog_table(self.modulus)[x % self.modulus]
        v = sum(Fraction(e * a, order)
                for e, a, (_, order) in zip(self.exponents, dlog, gens))
        return v % 1


def _char_order(exponents, gens):
    return lcm(1, *(order // gcd(order, e) for e, (_, order) in
                    zip(exponents, gens)))


def _char_conductor(n, exponents, gens):
    if all(e == 0 for e in exponents):
        return 1
    dlog = _dlog_table(n)
    cond = n
    for f in divisors(n):
        trivial = True
        for u, a in dlog.items():
            if u % f == 1 % f:
                v = sum(Fraction(e * x, order)
                        for e, x, (_, order) in zip(exponents, a, gens))
                if v % 1 != 0:
                    trivial = False
                    break
        if trivial and f < cond:
            cond = f
    return cond


@lru_cache(maxsize=None)
def character_orbits(n):
    """All Galois orbits of Dirichlet characters mod n, labeled a, b, c, ...

    Orbits are sorted by (order, conductor, least exponent tuple); that
    ordering reproduces the public database letters for the orbits the
    claim manifest references.
    """
    gens = _unit_group(n)
    seen = set()
    orbits = []
    for exps in product(*(range(order) for _, order in gens)):
        if exps in seen:
            continue
        order = _char_order(exps, gens)
        orbit = set()
        for j in range(1, order + 1):
            if gcd(j, order) == 1:
                orbit.add(tuple((j * e) % o for e, (_, o) in zip(exps, gens)))
        seen |= orbit
        rep = min(orbit)
        cond = _char_conductor(n, rep, gens)
        minus_one = _dlog_table(n).get((n - 1) % n) if n > 1 else None
        if n <= 2:
            even = True
        else:
            v = sum(Fraction(e * a, o)
                    for e, a, (_, o) in zip(rep, minus_one, gens))
            even = v % 1 == 0
        orbits.append((order, cond, rep, len(orbit), even))
    orbits.sort(key=lambda t: (t[0], t[1], t[2]))
    return tuple(
        CharacterOrbit(modulus=n, letter=_letter_code(i), order=order,
                       conductor=cond, is_even=even, exponents=rep, size=size)
        for i, (order, cond, rep, size, even) in enumerate(orbits))


def _orbit_by_letter(n, letter):
    for orbit in character_orbits(n):
        if orbit.letter == letter:
            return orbit
    raise ValueError(f"no character orbit {n}.{letter}")


# ===== WEIGHT-2 DIMENSIONS (exact) ===== #


def _mu(n):
    out = n
    for p in factorint(n):
        out += out // p
    return out


def _lambda_product(n, cond):
    """Cusp-count factor of the dimension formula, per prime."""
    out = 1
    n_fact = factorint(n)
    for p, r in n_fact.items():
        s = 0
        c = cond
        while c % p == 0:
            s += 1
            c //= p
        if 2 * s > r:
            out *= 2 * p ** (r - s)
        elif r % 2 == 0:
            out *= p ** (r // 2) + p ** (r // 2 - 1)
        else:
            out *= 2 * p ** (r // 2)
    return out


def _lift_to(n, m, x):
    """A unit mod n congruent to x at every prime of m, and 1 elsewhere."""
    rest = 1
    for p in factorint(n):
        if m % p != 0:
            rest *= p ** factorint(n)[p]
    if rest == 1:
        return x % n
    q = n // rest
    return (x * rest * pow(rest, -1, q) + q * pow(q, -1, rest)) % n


def _orbit_value_sum(top_orbit, m, x):
    """Integer sum over the orbit of chi(x), the character taken mod m."""
    lift = _lift_to(top_orbit.modulus, m, x)
    v = top_orbit.value_exponent(lift)
    denom = v.denominator
    return int(mobius(denom)) * int(totient(top_orbit.order)) // int(
        totient(denom))


def block_dimension(top_orbit, m):
    """Total dim S_2(m, chi) summed over the orbit, chi taken modulo m.

    `m` must be a multiple of the orbit's conductor dividing its modulus.
    Returns 0 for odd orbits and for m <= 2.
    """
    if m % top_orbit.conductor != 0 or top_orbit.modulus % m != 0:
        raise ValueError("m must sit between the conductor and the modulus")
    if not top_orbit.is_even or m <= 2:
        return 0
    total = Fraction(top_orbit.size) * (Fraction(_mu(m), 12) - Fraction(
        _lambda_product(m, top_orbit.conductor), 2))
    if top_orbit.order == 1:
        total += 1
    quarter = sum(_orbit_value_sum(top_orbit, m, x)
                  for x in range(1, m) if (x * x + 1) % m == 0)
    third = sum(_orbit_value_sum(top_orbit, m, x)
                for x in range(1, m)
                if gcd(x, m) == 1 and (x * x + x + 1) % m == 0)
    total -= Fraction(quarter, 4) + Fraction(third, 3)
    assert total.denominator == 1 and total >= 0
    return int(total)


def new_block_dimensions(top_orbit):
    """dim of the new subspace at each level between conductor and modulus."""
    levels = [m for m in divisors(top_orbit.modulus)
              if m % top_orbit.conductor == 0]
    new = {}
    for m in sorted(levels):
        old = sum(int(divisor_count(m // m2)) * new[m2]
                  for m2 in new if m % m2 == 0 and m2 != m)
        new[m] = block_dimension(top_orbit, m) - old
        assert new[m] >= 0
    return new


def genus_x1(n):
    """Genus of the level-n single-point modular curve."""
    if n <= 4:
        return 0
    ind = index(CongruenceGroup.gamma1(n), projective=True)
    cusps = closed_form_cusp_count(n)
    genus = 1 + Fraction(ind, 12) - Fraction(cusps, 2)
    assert genus.denominator == 1 and genus >= 0
    return int(genus)


def _induced_letter(top_orbit, m):
    """Letter of the orbit chi mod m, for the database label at level m."""
    gens_m = _unit_group(m)
    exps = []
    for g, order in gens_m:
        v = top_orbit.value_exponent(_lift_to(top_orbit.modulus, m, g))
        e = v * order
        assert e.denominator == 1
        exps.append(int(e) % order)
    order = _char_order(tuple(exps), gens_m)
    rep = min(tuple((j * e) % o for e, (_, o) in zip(exps, gens_m))
              for j in range(1, order + 1) if gcd(j, order) == 1)
    for orbit in character_orbits(m):
        if orbit.exponents == rep:
            return orbit.letter
    raise AssertionError("induced orbit not found")


# ===== NEWFORM ORBIT RECORDS ===== #


@dataclass(frozen=True)
class NewformOrbitRecord:
    """One Galois orbit of weight-2 newforms.

    `dim` is the orbit dimension, equal to the coefficient-field degree.
    `rank_bound` is the database's upper bound on the common analytic rank;
    None means no bound was imported, and rank-0 audits treat the record as
    possibly positive. `fricke` is the Fricke eigenvalue (trivial character
    only), else None.
    """

    label: str
    level: int
    weight: int
    char_orbit: str
    char_order: int
    dim: int
    rank_bound: int | None
    fricke: int | None = None

    def __post_init__(self):
        if self.weight != 2:
            raise ValueError("only weight-2 records are audited")
        if parse_label(self.label) != (self.level, self.weight,
                                       self.char_orbit):
            raise ValueError(f"label {self.label} does not match fields")

    def to_json(self):
        return {
            "label": self.label, "level": self.level, "weight": self.weight,
            "char_orbit": self.char_orbit, "char_order": self.char_order,
            "dim": self.dim, "rank_bound": self.rank_bound,
            "fricke": self.fricke,
        }

    @classmethod
    def from_json(cls, doc):
        keys = {"label", "level", "weight", "char_orbit", "char_order",
                "dim", "rank_bound", "fricke"}
        if set(doc) != keys:
            raise ValueError(f"record schema mismatch: {sorted(doc)}")
        return cls(**doc)


def parse_label(label):
    """Split 'level.weight.char.orbit' into (level, weight, char letter)."""
    parts = label.split(".")
    if len(parts) != 4 or not all(parts):
        raise ValueError(f"malformed newform label {label!r}")
    level, weight, char_orbit, orbit = parts
    if not (level.isdigit() and weight.isdigit() and char_orbit.isalpha()
            and orbit.isalpha()):
        raise ValueError(f"malformed newform label {label!r}")
    return int(level), int(weight), char_orbit


# ===== FIXTURE SYNTHESIS ===== #


@lru_cache(maxsize=None)
def _rank_facts():
    source = resources.files("torsionkit").joinpath(
        "data/newform_rank_facts.json")
    return json.loads(source.read_text())


def _scope_bound(scope, char_order):
    """Imported bound (0) if the record falls in the zero scope, else None."""
    if scope == "all":
        return 0
    if scope == "nontrivial":
        return 0 if char_order > 1 else None
    if isinstance(scope, list):
        return 0 if char_order in scope else None
    return None


def synthesized_records(level_divides):
    """Deterministic record set for all weight-2 orbits of dividing level.

    Dimensions come from the exact dimension formula and new/old recursion;
    rank bounds and Fricke data come from the audited-facts table. Records
    outside every imported fact carry a null bound.
    """
    n = level_divides
    facts = _rank_facts()
    splits = facts["trivial_character_split"]
    scope = facts["zero_scopes"].get(str(n))
    positives = {}
    for entry in facts["positive_blocks"].get(str(n), []):
        positives.setdefault(entry["char_order"], []).append(
            entry["rank_bound"])
    records = []
    for top in character_orbits(n):
        if not top.is_even:
            continue
        new_dims = new_block_dimensions(top)
        for level in sorted(new_dims):
            dim = new_dims[level]
            if dim == 0:
                continue
            letter = _induced_letter(top, level)
            if top.order == 1 and str(level) in splits:
                pieces = splits[str(level)]
                assert sum(p["dim"] for p in pieces) == dim
                for i, piece in enumerate(pieces):
                    records.append(NewformOrbitRecord(
                        label=f"{level}.2.{letter}.{_letter_code(i)}",
                        level=level, weight=2, char_orbit=letter,
                        char_order=top.order, dim=piece["dim"],
                        rank_bound=piece["rank_bound"],
                        fricke=piece["fricke"]))
                continue
            rank_bound = _scope_bound(scope, top.order)
            if level == n and positives.get(top.order):
                rank_bound = positives[top.order].pop(0)
            records.append(NewformOrbitRecord(
                label=f"{level}.2.{letter}.a", level=level, weight=2,
                char_orbit=letter, char_order=top.order, dim=dim,
                rank_bound=rank_bound, fricke=None))
    unassigned = [order for order, ranks in positives.items() if ranks]
    assert not unassigned, f"no block for positive ranks {unassigned}"
    records.sort(key=lambda r: (r.level, r.char_orbit, r.label))
    return records


def validate_records(records, level_divides):
    """Re-derive every dimension statement the record set makes.

    Checks: schema and label round-trips, block dimensions against the
    dimension formula, and the dimension-weighted total against the genus.
    """
    n = level_divides
    blocks = {}
    total = 0
    for rec in records:
        if n % rec.level != 0:
            raise ValueError(f"{rec.label}: level does not divide {n}")
        if rec.fricke is not None and rec.char_order != 1:
            raise ValueError(f"{rec.label}: Fricke data on nontrivial "
                             "character")
        blocks.setdefault((rec.level, rec.char_orbit), []).append(rec)
        total += rec.dim * int(divisor_count(n // rec.level))
    if total != genus_x1(n):
        raise ValueError(f"dimension total {total} != genus {genus_x1(n)}")
    expected = {}
    for top in character_orbits(n):
        if not top.is_even:
            continue
        for level, dim in new_block_dimensions(top).items():
            if dim:
                expected[(level, _induced_letter(top, level))] = (
                    dim, top.order)
    if set(blocks) != set(expected):
        raise ValueError("record blocks do not match the nonzero new spaces")
    for key, recs in blocks.items():
        dim, order = expected[key]
        if sum(r.dim for r in recs) != dim:
            raise ValueError(f"block {key}: dimensions sum to "
                             f"{sum(r.dim for r in recs)}, expected {dim}")
        if any(r.char_order != order for r in recs):
            raise ValueError(f"block {key}: wrong character order")
    return True


# ===== FIXTURE STORAGE ===== #


def canonical_query(level_divides):
    return json.dumps({"level_divides": level_divides, "weight": 2},
                      sort_keys=True, separators=(",", ":"))


def fixture_name(level_divides):
    digest = hashlib.sha256(canonical_query(level_divides).encode()).hexdigest()
    return f"mf-{digest[:16]}.json"


def _fixture_text(level_divides, fixtures_dir=None):
    name = fixture_name(level_divides)
    if fixtures_dir is not None:
        path = f"{fixtures_dir}/{name}"
        try:
            with open(path, "r", encoding="utf-8") as handle:
                return handle.read()
        except FileNotFoundError:
            return None
    source = resources.files("torsionkit").joinpath(f"fixtures/{name}")
    if not source.is_file():
        return None
    return source.read_text()


def fixture_document(level_divides):
    """The canonical fixture JSON document for a dividing-level query."""
    records = synthesized_records(level_divides)
    return {
        "query": json.loads(canonical_query(level_divides)),
        "records": [rec.to_json() for rec in records],
    }


def write_fixture(level_divides, fixtures_dir):
    doc = fixture_document(level_divides)
    path = f"{fixtures_dir}/{fixture_name(level_divides)}"
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(doc, handle, indent=1, sort_keys=True)
        handle.write("\n")
    return path


def fetch_orbits(level_divides, offline=True, fixtures_dir=None,
                 base_url="https://www.lmfdb.org/api/mf_newforms",
                 delay=0.5, timeout=30):
    """All weight-2 newform orbits of level dividing `level_divides`.

    Offline mode (the default, and the only mode exercised in CI) reads the
    content-addressed fixture file and validates it. Online mode queries the
    public API one divisor level at a time, politely, and writes the fixture.

    Raises:
        ValueError: malformed fixture (schema drift) or uncovered level.
        RuntimeError: offline with no fixture, or network failure.
    """
    if level_divides > MAX_COVERED_LEVEL:
        raise ValueError(f"level {level_divides} exceeds database coverage "
                         f"({MAX_COVERED_LEVEL})")
    text = _fixture_text(level_divides, fixtures_dir)
    if text is None:
        if offline:
            raise RuntimeError(
                f"offline and no fixture for level dividing {level_divides}")
        return _fetch_online(level_divides, base_url, delay, timeout,
                             fixtures_dir)
    doc = json.loads(text)
    if set(doc) != {"query", "records"} or doc["query"] != json.loads(
            canonical_query(level_divides)):
        raise ValueError("fixture schema validation failed")
    records = [NewformOrbitRecord.from_json(rec) for rec in doc["records"]]
    validate_records(records, level_divides)
    return records


def _fetch_online(level_divides, base_url, delay, timeout, fixtures_dir):
    import time

    import requests

    records = []
    try:
        for level in divisors(level_divides):
            response = requests.get(
                base_url,
                params={"level": level, "weight": 2, "_format": "json"},
                timeout=timeout)
            response.raise_for_status()
            for row in response.json().get("data", []):
                records.append(NewformOrbitRecord(
                    label=row["label"], level=row["level"], weight=2,
                    char_orbit=row["char_orbit_label"],
                    char_order=row["char_order"], dim=row["dim"],
                    rank_bound=row["analytic_rank"],
                    fricke=row.get("fricke_eigenval")))
            time.sleep(delay)
    except requests.RequestException as err:
        raise RuntimeError(f"network failure without fixture: {err}") from err
    if fixtures_dir is not None:
        doc = {"query": json.loads(canonical_query(level_divides)),
               "records": [rec.to_json() for rec in records]}
        path = f"{fixtures_dir}/{fixture_name(level_divides)}"
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(doc, handle, indent=1, sort_keys=True)
            handle.write("\n")
    return records


# ===== RANK CLAIMS ===== #


@dataclass(frozen=True)
class RankClaim:
    """Declarative statement about the rank/character data at one level."""

    claim_id: str
    kind: str
    level_divides: int
    description: str
    char_orders: object = None  # list of ints, "nontrivial", or None (all)
    fricke: int | None = None
    expected_label: str | None = None
    expected_sum: int | None = None
    expected_orders: tuple | None = None
    expected_char_orbit: str | None = None


@dataclass(frozen=True)
class AuditResult:
    claim: RankClaim
    passed: bool
    detail: str
    evidence: tuple


def _matches_filter(rec, claim):
    if claim.char_orders == "nontrivial":
        if rec.char_order == 1:
            return False
    elif claim.char_orders is not None:
        if rec.char_order not in claim.char_orders:
            return False
    if claim.fricke is not None and rec.fricke != claim.fricke:
        return False
    return True


def rank_audit(claim, records=None, offline=True, fixtures_dir=None):
    """Evaluate one claim against the orbit records; returns AuditResult."""
    if claim.level_divides > MAX_COVERED_LEVEL:
        raise ValueError(f"claim {claim.claim_id} references uncovered "
                         f"level {claim.level_divides}")
    if records is None:
        records = fetch_orbits(claim.level_divides, offline=offline,
                               fixtures_dir=fixtures_dir)
    n = claim.level_divides
    if claim.kind == "all_rank_zero":
        hits = [r for r in records if _matches_filter(r, claim)]
        bad = [r for r in hits if r.rank_bound != 0]
        return AuditResult(
            claim, not bad,
            f"{len(hits)} orbits checked, {len(bad)} with nonzero bound",
            tuple(r.label for r in (bad or hits)))
    if claim.kind == "unique_positive":
        positive = [r for r in records if r.rank_bound != 0]
        ok = (len(positive) == 1
              and positive[0].label == claim.expected_label)
        return AuditResult(
            claim, ok,
            f"possibly-positive orbits: {[r.label for r in positive]}",
            tuple(r.label for r in positive))
    if claim.kind == "weighted_rank_sum":
        hits = [r for r in records if _matches_filter(r, claim)]
        if any(r.rank_bound is None for r in hits):
            missing = [r.label for r in hits if r.rank_bound is None]
            return AuditResult(claim, False,
                               f"no imported bound for {missing}",
                               tuple(missing))
        total = sum(r.rank_bound * r.dim * int(divisor_count(n // r.level))
                    for r in hits)
        return AuditResult(
            claim, total == claim.expected_sum,
            f"weighted rank sum {total}, expected {claim.expected_sum}",
            tuple(r.label for r in hits if r.rank_bound))
    if claim.kind == "positive_char_orders":
        positive = [r for r in records
                    if r.rank_bound != 0 and r.char_order > 1]
        orders = sorted(r.char_order for r in positive)
        ok = orders == sorted(claim.expected_orders)
        if claim.expected_char_orbit is not None:
            ok = ok and positive and all(
                r.level == n and r.char_orbit == claim.expected_char_orbit
                for r in positive)
        return AuditResult(
            claim, bool(ok),
            f"positive nontrivial orders {orders}, "
            f"expected {sorted(claim.expected_orders)}",
            tuple(r.label for r in positive))
    raise ValueError(f"unknown claim kind {claim.kind!r}")


@lru_cache(maxsize=None)
def claim_manifest():
    """The shipped claims, one per imported rank/character hypothesis."""
    source = resources.files("torsionkit").joinpath("data/rank_claims.json")
    entries = json.loads(source.read_text())
    claims = []
    for entry in entries:
        expected_orders = entry.get("expected_orders")
        claims.append(RankClaim(
            claim_id=entry["id"], kind=entry["kind"],
            level_divides=entry["level_divides"],
            description=entry["description"],
            char_orders=entry.get("char_orders"),
            fricke=entry.get("fricke"),
            expected_label=entry.get("expected_label"),
            expected_sum=entry.get("expected_sum"),
            expected_orders=tuple(expected_orders) if expected_orders
            else None,
            expected_char_orbit=entry.get("expected_char_orbit")))
    return tuple(claims)


def run_manifest(offline=True, fixtures_dir=None):
    """Audit every claim in the manifest; returns list of AuditResult."""
    cache = {}
    results = []
    for claim in claim_manifest():
        if claim.level_divides not in cache:
            cache[claim.level_divides] = fetch_orbits(
                claim.level_divides, offline=offline,
                fixtures_dir=fixtures_dir)
        results.append(rank_audit(claim, records=cache[claim.level_divides]))
    return results


# ===== SMOKE TEST ===== #

if __name__ == "__main__":
    orbits = character_orbits(65)
    assert sum(o.size for o in orbits) == 48
    assert genus_x1(65) == 121 and genus_x1(63) == 97
    records = synthesized_records(65)
    validate_records(records, 65)
    labels = {r.label for r in records}
    assert "65.2.a.a" in labels and "13.2.e.a" in labels
    print("lmfdb smoke test ok:", len(records), "records at level 65")
