import random

import pytest

from charp_orbits.errors import ZeroArgument
from charp_orbits.ffield import FieldSpec, parse_scalar
from charp_orbits.multdep import dichotomy_threshold, functional_dependence, mult_dependence
from charp_orbits.multgroup import GroupSpec

from factories import random_group_element
from oracles import has_small_relation

F3 = FieldSpec(3)


def R(text, F=F3):
    return parse_scalar(F, text)


def product(gs, k):
    out = gs[0].field.const(1)
    for g, e in zip(gs, k):
        out = out * g ** e
    return out


def test_planted_three_term_relation():
    res = mult_dependence([R("t"), R("t+1"), R("t^2*(t+1)")])
    assert res.verdict == "Dependent" and res.relation == (2, 1, -1)


def test_two_coprime_linears_are_independent():
    gs = [R("t"), R("t+1")]
    assert not mult_dependence(gs).dependent
    assert has_small_relation(gs, 5) is None


def test_torsion_relation():
    # 4 = 1 in F_3, so the shortest relation is (0, 1); (2, -1) is also valid
    res = mult_dependence([R("2"), R("2^2")])
    assert res.relation == (0, 1)
    assert product([R("2"), R("2^2")], (2, -1)).is_one()


def test_zero_rejected():
    with pytest.raises(ZeroArgument):
        mult_dependence([R("t"), R("0")])


def test_threshold_examples():
    assert dichotomy_threshold(1, 1, 2) == 9
    assert dichotomy_threshold(3, 2, 0) == 1
    assert dichotomy_threshold(2, 1, 1) == 4


def test_planted_relations_are_found():
    rng = random.Random(12)
    base = [R("t"), R("t+1"), R("t^2+1"), R("2")]
    for _ in range(100):
        n = rng.randint(2, 4)
        gs = [random_group_element(rng, base) for _ in range(n - 1)]
        k = [rng.randint(-4, 4) for _ in range(n - 1)]
        # last element closes the relation prod g_i^{k_i} * g_n^{-1} = 1
        gs.append(product(gs, k))
        res = mult_dependence(gs)
        assert res.dependent and product(gs, res.relation).is_one()


@pytest.mark.parametrize("seed", range(10))
def test_verdicts_agree_with_exhaustive_search(seed):
    rng = random.Random(seed)
    F = FieldSpec(rng.choice([2, 3, 5]))
    pool = [R(s, F) for s in ("t", "t+1", "t^2+t+1", "t^3+t+1")]
    if F.q > 2:
        pool.append(F.const(F.q - 1))
    for _ in range(4):
        n = rng.randint(1, 4)
        gs = [random_group_element(rng, rng.sample(pool, 2), bound=2) for _ in range(n)]
        gs = [g for g in gs if not g.is_zero()] or [R("t", F)]
        res = mult_dependence(gs)
        small = has_small_relation(gs, 5)
        if res.dependent:
            assert product(gs, res.relation).is_one()
        else:
            assert small is None
        if small is not None:
            assert res.dependent


def test_many_monomial_functions_are_dependent():
    rng = random.Random(4)
    for _ in range(20):
        gens = rng.choice([["t"], ["t", "t+1"], ["2"], ["2", "t"]])
        G = GroupSpec.from_strings(F3, gens)
        d = rng.randint(1, 2)
        N = dichotomy_threshold(d, 1, G.rank)
        kappas = [[rng.randint(-3, 3) for _ in gens] for _ in range(N)]
        powers = [[rng.randint(-3, 3) for _ in range(d)] for _ in range(N)]
        res = functional_dependence(G, kappas, powers)
        assert res.dependent
        rel = res.relation
        assert product([G.element(k) for k in kappas], rel).is_one()
        # on the torsion group <2> of order 2 exponents only matter mod 2
        modulus = 2 if G.rank == 0 else 0
        for i in range(d):
            e = sum(k * p[i] for k, p in zip(rel, powers))
            assert (e % modulus if modulus else e) == 0


def test_independent_functionals():
    G = GroupSpec.from_strings(F3, ["t"])
    assert not functional_dependence(G, [[1], [0]], [[0], [1]]).dependent
