import random

import pytest

from charp_orbits.errors import ValidationError, ZeroDenominator
from charp_orbits.ffield import FieldSpec, parse_scalar
from charp_orbits.linrec import (
    BudgetExceeded, NotGeometric, PolyaDecomposition, RationalSeries, XPoly, coefficient_at,
    parse_xpoly, polya_decompose, reconstruct_and_verify, return_set_of_series, section,
    series_to_linrec,
)
from charp_orbits.multgroup import GroupSpec, membership

from factories import random_decomposition, random_series
from oracles import series_expand

F3 = FieldSpec(3)


def R(text, F=F3):
    return parse_scalar(F, text)


def S(num, den="1", F=F3):
    return RationalSeries.from_strings(F, num, den)


def G(*texts, F=F3):
    return GroupSpec.from_strings(F, list(texts))


def expand(series, order):
    return series_expand(series.num.coeffs, series.den.coeffs, order)


TWO_FOLD = S("x", "(1-x)^2")


# -- series and recurrences ----------------------------------------------------

def test_series_is_reduced_with_unit_constant_term():
    s = S("2*(1-x)", "2*(1-x)^2")
    assert s == S("1", "1-x") and s.den.coeff(0) == R("1")


def test_invalid_denominators():
    with pytest.raises(ValidationError):
        S("1", "x")
    with pytest.raises(ValidationError):
        S("1", "0")
    with pytest.raises(ZeroDenominator):
        parse_xpoly(F3, "1/(t-t)")


def test_non_constant_division_rejected():
    with pytest.raises(ValidationError):
        parse_xpoly(F3, "1/x")


def test_coefficients_match_naive_inversion():
    rng = random.Random(1)
    for p in (2, 3, 5):
        F = FieldSpec(p)
        for _ in range(10):
            s = random_series(rng, F, rng.randint(1, 4))
            assert s.coefficients(15) == expand(s, 15)


def test_linrec_examples():
    geo = S("1", "1-t*x")
    L = series_to_linrec(geo)
    assert L.order == 1 and [L.coefficient(n) for n in range(6)] == [R("t") ** n for n in range(6)]
    L = series_to_linrec(TWO_FOLD)
    assert L.order == 2
    assert [L.coefficient(n) for n in range(9)] == [R(str(n % 3)) for n in range(9)]
    poly = series_to_linrec(S("1+x"))
    assert [poly.coefficient(n) for n in range(5)] == [R("1"), R("1"), R("0"), R("0"), R("0")]


def test_linrec_state_matches_stream():
    rng = random.Random(2)
    for _ in range(15):
        s = random_series(rng, F3, rng.randint(1, 5))
        L = series_to_linrec(s)
        assert [L.coefficient(n) for n in range(20)] == s.coefficients(20)


def test_coefficient_at_examples():
    assert coefficient_at(S("1", "1-t*x"), 5) == R("t^5")
    assert coefficient_at(TWO_FOLD, 7) == R("1")
    s = S("2+t*x", "1+x")
    assert coefficient_at(s, 0) == R("2")


def test_coefficient_at_far_index_uses_periodicity():
    # 1/(1-x)^3 over F_3 equals 1/(1-x^3)
    assert coefficient_at(S("1", "(1-x)^3"), 10 ** 9) == R("0")
    assert coefficient_at(S("1", "(1-x)^3"), 3 * 10 ** 9) == R("1")


# -- sections ----------------------------------------------------------------------

def test_section_examples():
    assert section(S("1", "1-t*x"), 2, 1) == S("t", "1-t^2*x")
    assert section(TWO_FOLD, 3, 0) == S("0")
    assert section(S("2+t*x"), 2, 0) == S("2")


def test_section_bad_arguments():
    with pytest.raises(ValueError):
        section(TWO_FOLD, 2, 2)


def test_section_consistency():
    rng = random.Random(3)
    for _ in range(20):
        s = random_series(rng, F3, rng.randint(1, 6))
        M = rng.randint(1, 5)
        b = rng.randrange(M)
        sec = section(s, M, b)
        a = s.coefficients(M * 61 + b)
        assert sec.coefficients(61) == [a[M * n + b] for n in range(61)]
        assert all(coefficient_at(sec, n) == a[M * n + b] for n in (0, 17, 60))


@pytest.mark.parametrize("p", [2, 3, 5])
def test_frobenius_collapse_of_n_alpha_n(p):
    # a_n = n * alpha^n, so a_{pn+k} = k * alpha^k * (alpha^p)^n
    F = FieldSpec(p)
    alpha = R("t+1", F)
    s = RationalSeries(XPoly(F, [F.const(0), alpha]),
                       XPoly(F, [F.const(1), -alpha]) ** 2)
    for k in range(p):
        sec = section(s, p, k)
        assert sec.order <= 1
        c = F.const_from_int(k) * alpha ** k
        assert sec.coefficients(12) == [c * alpha ** (p * n) for n in range(12)]


# -- Polya decomposition -----------------------------------------------------------

def test_polya_worked_instance():
    D = polya_decompose(TWO_FOLD, G("2"))
    assert isinstance(D, PolyaDecomposition)
    assert (D.M, D.N, D.P) == (3, 0, XPoly(F3))
    assert [str(m) for m in D.mu] == ["0", "1", "2"]
    assert [str(d) for d in D.delta] == ["1", "1", "1"]
    assert reconstruct_and_verify(D) == TWO_FOLD
    assert expand(S("x+2*x^2", "1-x^3"), 12) == expand(TWO_FOLD, 12)


def test_polya_geometric_series():
    D = polya_decompose(S("1", "1-t*x"), G("t"))
    assert (D.M, D.N, [str(m) for m in D.mu], [str(d) for d in D.delta]) == (1, 0, ["1"], ["t"])
    assert D.memberships["all"] is True


def test_polya_two_independent_ratios():
    F = S("1", "1-t*x") + S("1", "1-(t+1)*x")
    out = polya_decompose(F, G("t", "t+1"), M_max=12)
    assert isinstance(out, NotGeometric)
    assert sorted({w[0] for w in out.witnesses}) == list(range(1, 13))
    a = F.coefficients(40 * 12 + 12)
    for M in range(1, 13):
        for b in range(M):
            sec = [a[M * n + b] for n in range(40)]
            ratios = {sec[n + 1] / sec[n] for n in range(30, 39)}
            assert len(ratios) > 1


def test_polya_budget_exceeded():
    # polynomial part of degree 6 forces N >= 7 for M = 1
    F = S("x^6", "1") + S("1", "1-t*x")
    out = polya_decompose(F, M_max=1, N_max=2)
    assert isinstance(out, BudgetExceeded)


def test_reconstruct_examples():
    D = PolyaDecomposition(1, 0, XPoly(F3), (R("1"),), (R("t"),))
    assert reconstruct_and_verify(D) == S("1", "1-t*x")
    D = PolyaDecomposition(2, 1, parse_xpoly(F3, "1+t*x"), (R("0"), R("0")), (R("1"), R("1")))
    assert reconstruct_and_verify(D) == S("1+t*x")


def test_round_trip_small_sample():
    rng = random.Random(4)
    gens = [R("2"), R("t"), R("t+1")]
    group = GroupSpec(gens, F3)
    for _ in range(30):
        D = random_decomposition(rng, gens)
        F = reconstruct_and_verify(D)
        out = polya_decompose(F, group)
        span = 3 * D.M * D.N + 10 * D.M
        assert isinstance(out, PolyaDecomposition)
        assert out.stream(span + 1) == D.stream(span + 1)
        assert reconstruct_and_verify(out) == F


def test_successful_memberships_imply_coefficients_in_g0():
    rng = random.Random(5)
    gens = [R("2"), R("t"), R("t+1")]
    group = GroupSpec(gens, F3)
    checked = 0
    for _ in range(3):
        F = reconstruct_and_verify(random_decomposition(rng, gens, M_max=3, N_max=2))
        D = polya_decompose(F, group)
        if D.memberships["all"]:
            checked += 1
            for c in F.coefficients(501):
                assert c.is_zero() or membership(c, group) is not None
    assert checked > 0


# -- return sets of series ------------------------------------------------------------

def test_return_set_examples():
    out = return_set_of_series(S("1", "1-t*x"), G("t"), 100)
    assert out.N == out.N0 == list(range(101))
    F = S("1", "1-t*x") + S("1", "1-x")
    assert return_set_of_series(F, G("t"), 100).N == []
    out = return_set_of_series(TWO_FOLD, G("2"), 99)
    assert out.N == [n for n in range(100) if n % 3] and out.N0 == list(range(100))
