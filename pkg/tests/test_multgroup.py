import itertools
import random

import pytest

from charp_orbits.errors import DimensionMismatch, RankZero, ZeroArgument
from charp_orbits.ffield import FieldSpec, Place, Poly, parse_scalar, valuation, weil_height
from charp_orbits.multgroup import (
    GroupSpec, check_assignment, height_bound_constant, membership, recurrence_membership_pattern,
    select_places,
)
from charp_orbits.recurrence import IntRecurrence

from factories import as_rat, irreducibles, random_group

F3 = FieldSpec(3)


def group(*texts, F=F3):
    return GroupSpec.from_strings(F, list(texts))


def R(text, F=F3):
    return parse_scalar(F, text)


# -- membership ---------------------------------------------------------------

def test_membership_example():
    G = group("2", "t", "t+1")
    cert = membership(R("2*t^2*(t+1)^(-3)"), G)
    assert cert.to_list() == [1, 2, -3]


def test_identity_is_member():
    assert membership(R("1"), group("t")).to_list() == [0]


def test_constant_outside_free_group():
    assert membership(R("2"), group("t")) is None


def test_zero_rejected():
    with pytest.raises(ZeroArgument):
        membership(R("0"), group("t"))


def test_membership_uses_torsion_congruence():
    # over F_5 the constant 2 generates F_5^*, so 3 = 2^3 is a member
    F5 = FieldSpec(5)
    G = group("2*t", "t", F=F5)
    cert = membership(R("3", F5), G)
    assert cert is not None and G.element(cert) == R("3", F5)


def test_planted_members_and_non_members():
    rng = random.Random(11)
    pool = irreducibles(F3, 3)
    for trial in range(100):
        G = random_group(rng, F3, pool[:8], rng.randint(1, 3))
        exps = [rng.randint(-8, 8) for _ in G.gens]
        x = G.element(exps)
        cert = membership(x, G)
        assert cert is not None and G.element(cert) == x
        fresh = next(f for f in pool[8:] if Place.finite(f) not in G.support)
        assert membership(x * as_rat(fresh), G) is None


# -- place selection -----------------------------------------------------------

def test_select_places_for_two_linear_generators():
    G = group("t", "t+1")
    A = select_places(G)
    assert set(map(str, A.basis)) == {"1/t", "1/(1+t)"}
    assert {str(p) for p in A.places} == {str(Place.finite(Poly(F3, [0, 1]))),
                                          str(Place.finite(Poly(F3, [1, 1])))}
    assert check_assignment(A)
    assert height_bound_constant(G, A) == 1


def test_select_places_single_square():
    G = group("t^2")
    A = select_places(G)
    assert [str(b) for b in A.basis] == ["1/t^2"]
    assert height_bound_constant(G, A) == 2


def test_torsion_group_has_rank_zero():
    with pytest.raises(RankZero):
        select_places(group("2"))


def test_height_bound_instance():
    assert weil_height(R("t^2*(t+1)^(-3)")) == 3


@pytest.mark.parametrize("seed", range(25))
def test_place_invariants_and_height_bound(seed):
    rng = random.Random(seed)
    F = FieldSpec(rng.choice([2, 3]))
    pool = irreducibles(F, 3)
    r = rng.randint(1, 3)
    G = random_group(rng, F, pool, r)
    A = select_places(G)
    assert len(A.basis) == G.rank
    for i, v in enumerate(A.places):
        for j, b in enumerate(A.basis):
            val = valuation(b, v)
            assert (val < 0) if i == j else (val == 0)
    c = height_bound_constant(G, A)
    assert c > 0
    bound = 6 if G.rank <= 2 else 3
    for n in itertools.product(range(-bound, bound + 1), repeat=G.rank):
        x = F.const(1)
        for b, k in zip(A.basis, n):
            x = x * b ** k
        assert weil_height(x) >= c * max(map(abs, n))


# -- recurrence membership -------------------------------------------------------

def brute(recs, generators, horizon):
    from charp_orbits.lattice import in_lattice, hnf
    basis = [row for row in hnf([list(g) for g in generators])[0] if any(row)]
    values = [rec.values(horizon + 1) for rec in recs]
    return [n for n in range(horizon + 1) if in_lattice([v[n] for v in values], basis)]


def test_identity_sequence_mod_two():
    pat = recurrence_membership_pattern([IntRecurrence((2, -1), (0, 1))], [[2]], 20)
    assert pat.certified and pat.period == 2 and pat.preperiod == 0 and pat.residues == [0]


def test_fibonacci_mod_two():
    pat = recurrence_membership_pattern([IntRecurrence((1, 1), (0, 1))], [[2]], 30)
    assert pat.certified and pat.period == 3
    assert all(pat.contains(n) == (n % 3 == 0) for n in range(60))


def test_infinite_index_is_uncertified():
    rec = IntRecurrence.from_terms([2 ** n - n - 1 for n in range(10)])
    pat = recurrence_membership_pattern([rec], [], 30)
    assert not pat.certified and pat.members == [0, 1]


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        recurrence_membership_pattern([IntRecurrence((1,), (1,))], [[1, 2]], 5)


def test_periodic_pattern_matches_brute_force():
    rng = random.Random(5)
    for _ in range(40):
        m = rng.randint(1, 2)
        recs = []
        for _ in range(m):
            k = rng.randint(1, 3)
            recs.append(IntRecurrence(tuple(rng.randint(-3, 3) for _ in range(k)),
                                      tuple(rng.randint(-5, 5) for _ in range(k))))
        gens = [[rng.randint(-4, 4) for _ in range(m)] for _ in range(m)]
        index = rng.choice([2, 3, 4, 6])
        gens.extend([[index * (i == j) for j in range(m)] for i in range(m)])
        pat = recurrence_membership_pattern(recs, gens, 10)
        assert pat.certified
        span = 3 * (pat.preperiod + pat.period)
        expected = brute(recs, gens, span)
        assert [n for n in range(span + 1) if pat.contains(n)] == expected
