"""Hecke operators: Velu quotients, T_q divisors, char-q action, cusps."""

import pytest

from torsionkit.algebra import GF
from torsionkit.curves import EllipticCurve, enumerate_moduli, point_count
from torsionkit.hecke import (
    CuspSymbol,
    FormalDivisor,
    averaging_operator,
    cusp_Tq,
    cusp_averaging_is_zero,
    diamond,
    divisor_of,
    hecke_Tq,
    hecke_Tq_char_q,
    splitting_degree,
    two_torsion_quotient_map,
    velu_quotient,
)

# ===== FORMAL DIVISORS ===== #


def test_formal_divisor_algebra():
    a = CuspSymbol(7, 1)
    b = CuspSymbol(7, 2)
    D = FormalDivisor([(a, 2), (b, 1)])
    E = FormalDivisor([(a, 1)])
    assert (D - E).degree() == 2
    assert (D - 2 * E) == FormalDivisor([(b, 1)])
    assert (D - 2 * E + E) == FormalDivisor([(a, 1), (b, 1)])
    assert not (D - D)
    assert D.multiplicity(a) == 2


# ===== VELU QUOTIENTS ===== #


def test_velu_hand_worked_quotient():
    # y^2 = x^3 + 1 over F_7, kernel = <(0, 1)> of order 3:
    # quotient y^2 = x^3 - 27 and (2, 3) maps to (3, 0)
    F7 = GF(7, 1)
    E = EllipticCurve(F7, (0, 0, 0, 0, 1))
    K = (F7.zero(), F7.one())
    quotient, phi = velu_quotient(E, [K, E.neg(K)])
    assert [a.code() for a in quotient.a_invariants()] == [0, 0, 0, 0, (-27) % 7]
    assert phi((F7.from_int(2), F7.from_int(3))) == (F7.from_int(3), F7.zero())


def test_velu_preserves_point_count():
    # isogenous curves over the same field share their point count
    ms = enumerate_moduli(1, 5, 11)
    x = ms.points[0]
    N = point_count(x.curve)
    kernel = []
    K = None
    for _ in range(4):
        K = x.curve.add(K, x.Q)
        kernel.append(K)
    quotient, _phi = velu_quotient(x.curve, kernel)
    assert point_count(quotient) == N


# ===== T_q ===== #


def test_hecke_divisor_degree_and_stability():
    ms = enumerate_moduli(1, 5, 11)
    for x in ms.points[:2]:
        for q in (3, 7):
            D = hecke_Tq(x, q)
            assert D.degree() == q + 1
            conj = D.map_points(lambda mp: mp.frobenius(times=1))
            assert conj == D


def test_hecke_commutes_with_diamond():
    ms = enumerate_moduli(1, 7, 11)
    x = ms.points[0]
    q = 3
    left = diamond(hecke_Tq(x, q), 2)
    right = hecke_Tq(x.diamond(2), q)
    assert left == right


def test_averaging_operator_degree_zero():
    ms = enumerate_moduli(1, 5, 11)
    A = averaging_operator(ms.points[0], 3)
    assert A.degree() == 0


def test_hecke_validation_errors():
    ms = enumerate_moduli(1, 5, 11)
    x = ms.points[0]
    with pytest.raises(ValueError, match="Hecke prime divides level"):
        hecke_Tq(x, 5)
    with pytest.raises(ValueError, match="Hecke prime equals characteristic"):
        hecke_Tq(x, 11)
    with pytest.raises(ValueError, match="Hecke prime 2 not supported"):
        hecke_Tq(x, 2)
    with pytest.raises(ValueError, match="out of supported range"):
        hecke_Tq(x, 17)


def test_splitting_degree_matches_matrix_order():
    # E with N = 10 over F_11 (beta = 2): order of [[0,-11],[1,2]] mod 3 is 8
    assert splitting_degree(10, 11, 3) == 8
    # beta = 0: matrix [[0,-11],[1,0]] = [[0,1],[1,0]] mod 3 has order 2
    assert splitting_degree(12, 11, 3) == 2


# ===== CHARACTERISTIC q ===== #


def test_char_q_operator_on_ordinary_points():
    ms = enumerate_moduli(1, 5, 9)
    checked = 0
    for x in ms.points:
        beta = 10 - point_count(x.curve)
        if beta % 3 == 0:
            with pytest.raises(ValueError, match="ordinary point required"):
                hecke_Tq_char_q(x, 3)
            continue
        D = hecke_Tq_char_q(x, 3)
        assert D.degree() == 4
        # one point with multiplicity 1 (Frobenius) and one with q
        mults = sorted(m for _obj, m in D.items())
        assert mults == [1, 3]
        checked += 1
    assert checked >= 2


def test_char_q_wrong_prime_rejected():
    ms = enumerate_moduli(1, 5, 9)
    with pytest.raises(ValueError, match="characteristic prime required"):
        hecke_Tq_char_q(ms.points[0], 5)


# ===== DEGREE-2 LEVEL MAP ===== #


def test_two_torsion_quotient_fibers():
    ms = enumerate_moduli(1, 20, 13)
    images = {}
    for x in ms.points:
        y = two_torsion_quotient_map(x)
        assert (y.m, y.n) == (2, 10)
        images[y.key] = images.get(y.key, 0) + 1
    assert sorted(images.values()) == [2, 2]


def test_two_torsion_quotient_intertwines_hecke():
    ms = enumerate_moduli(1, 20, 13)
    x = ms.points[0]
    left = hecke_Tq(x, 3).map_points(two_torsion_quotient_map)
    right = hecke_Tq(two_torsion_quotient_map(x), 3)
    assert left == right


# ===== CUSPS ===== #


def test_cusp_symbol_normalization():
    assert CuspSymbol(7, 6).cls == CuspSymbol(7, 1).cls  # -1 ~ 1
    assert CuspSymbol(20, 13).cls == 7
    with pytest.raises(ValueError, match="unit required"):
        CuspSymbol(20, 5)


def test_cusp_hecke_formula():
    c = CuspSymbol(7, 1)
    D = cusp_Tq(c, 3)
    assert D.degree() == 4
    assert D.multiplicity(c) == 1
    assert D.multiplicity(CuspSymbol(7, 3)) == 3
    with pytest.raises(ValueError, match="Hecke prime divides level"):
        cusp_Tq(CuspSymbol(9, 1), 3)
    with pytest.raises(ValueError, match="Hecke prime divides level"):
        cusp_Tq(CuspSymbol(5, 1), 2)  # q must be odd
    with pytest.raises(NotImplementedError, match="general cusp Hecke"):
        cusp_Tq(CuspSymbol(7, 1, kind="other"), 3)


def test_cusp_averaging_identity_sweep():
    for n in (5, 7, 9, 10, 20):
        for q in (3, 5, 7):
            if q % 2 == 0 or (2 * n) % q == 0:
                continue
            for c in range(1, n):
                from math import gcd
                if gcd(c, n) != 1:
                    continue
                assert cusp_averaging_is_zero(CuspSymbol(n, c), q)
