import random

import pytest

from charp_orbits.errors import DimensionMismatch, NotDominant
from charp_orbits.ffield import FieldSpec, parse_scalar
from charp_orbits.multgroup import ExponentVector, GroupSpec
from charp_orbits.torusdyn import (
    MonomialFunctional, MonomialMap, TorusPoint, eval_functional_values, eval_monomial_functional,
    iterate_monomial, monoid_values, orbit_exponents, residue_recurrences,
)

from factories import random_bounded_system
from oracles import brute_orbit

F3 = FieldSpec(3)
GT = GroupSpec.from_strings(F3, ["t"])
G3 = GroupSpec.from_strings(F3, ["2", "t", "t+1"])


def R(text):
    return parse_scalar(F3, text)


def doubling():
    return MonomialMap.build(GT, [[2]], [[1]]), TorusPoint.from_exponents(GT, [[1]])


def test_doubling_orbit():
    phi, x0 = doubling()
    assert iterate_monomial(phi, x0, 3).materialize() == [R("t^15")]
    assert iterate_monomial(phi, x0, 0) == x0
    direct = brute_orbit([[2]], [R("t")], [R("t")], 3)
    assert direct[3] == [R("t^15")]


def test_identity_map_fixes_points():
    ident = MonomialMap.build(G3, [[1, 0], [0, 1]])
    x = TorusPoint.from_exponents(G3, [[1, 2, -1], [0, 0, 3]])
    assert iterate_monomial(ident, x, 7) == x


def test_far_iterate_matches_stepwise():
    phi = MonomialMap.build(G3, [[1, 1], [1, 2]], [[0, 1, 0], [1, 0, -1]])
    x0 = TorusPoint.from_exponents(G3, [[0, 1, 0], [0, 0, 1]])
    steps = orbit_exponents(phi, x0, 41)
    assert iterate_monomial(phi, x0, 40).matrix() == steps[40]
    assert iterate_monomial(phi, x0, 10 ** 4).dim == 2


def test_singular_matrix_rejected():
    with pytest.raises(NotDominant):
        MonomialMap.build(G3, [[1, 2], [2, 4]])


def test_functional_examples():
    x = TorusPoint.from_exponents(GT, [[3]])
    assert eval_monomial_functional(MonomialFunctional((0,), (1,)), x).to_list() == [3]
    assert eval_monomial_functional(MonomialFunctional((5,), (0,)), x).to_list() == [5]
    G2 = GroupSpec.from_strings(F3, ["t", "t+1"])
    pt = TorusPoint.from_values(G2, [R("t^2"), R("t*(t+1)")])
    g = MonomialFunctional((0, 0), (1, -1))
    assert eval_monomial_functional(g, pt).to_list() == [1, -1]
    assert eval_functional_values(g, G2, pt.materialize()) == R("t/(t+1)")
    with pytest.raises(DimensionMismatch):
        eval_monomial_functional(MonomialFunctional((0, 0), (1,)), pt)


def test_residue_recurrence_examples():
    phi, x0 = doubling()
    f = MonomialFunctional.coordinate(GT, 1)
    rr = residue_recurrences(phi, x0, f)
    rec = rr.recurrences[0][0]
    assert (rr.L, rr.preperiod, rec.coeffs, rec.initial) == (1, 0, (3, -2), (1, 3))
    rr2 = residue_recurrences(phi, x0, f, L=2)
    assert [r[0].initial for r in rr2.recurrences] == [(1, 7), (3, 15)]
    assert all(r[0].coeffs == (5, -4) for r in rr2.recurrences)
    assert [rr2.recurrences[0][0].at(n) for n in range(5)] == [2 ** (2 * n + 1) - 1 for n in range(5)]
    ident = MonomialMap.build(GT, [[1]])
    assert residue_recurrences(ident, x0, f).exponents(50).to_list() == [1]


@pytest.mark.parametrize("seed", range(8))
def test_exponents_agree_with_direct_iteration(seed):
    rng = random.Random(seed)
    phi, x0, f = random_bounded_system(rng, G3)
    direct = brute_orbit(phi.expo, [G3.element(c) for c in phi.coeff], x0.materialize(), 60)
    rr = residue_recurrences(phi, x0, f, L=rng.randint(1, 3))
    for n, E in enumerate(orbit_exponents(phi, x0, 61)):
        assert TorusPoint.from_exponents(G3, E).materialize() == direct[n]
        assert G3.element(rr.exponents(n)) == eval_functional_values(f, G3, direct[n])


def test_monoid_example():
    maps = [MonomialMap.build(GT, [[2]], [[1]]), MonomialMap.build(GT, [[3]])]
    x0 = TorusPoint.from_exponents(GT, [[1]])
    f = MonomialFunctional.coordinate(GT, 1)
    out = monoid_values(maps, x0, f, 2)
    assert [w for w, _ in out] == [(), (0,), (1,), (0, 0), (0, 1), (1, 0), (1, 1)]
    assert [v[0] for _, v in out] == [1, 3, 3, 7, 9, 7, 9]
    assert monoid_values(maps, x0, f, 0) == [((), ExponentVector((1,)))]


def test_cyclic_monoid_matches_iteration():
    phi, x0 = doubling()
    f = MonomialFunctional.coordinate(GT, 1)
    vals = [v for w, v in monoid_values([phi], x0, f, 5)]
    assert vals == [eval_monomial_functional(f, iterate_monomial(phi, x0, n)) for n in range(6)]


def test_monoid_closed_under_concatenation():
    rng = random.Random(9)
    maps = [MonomialMap.build(G3, [[1, 1], [0, -1]], [[1, 0, 0], [0, 1, 0]]),
            MonomialMap.build(G3, [[0, 1], [1, 0]], [[0, 0, 1], [0, 0, 0]])]
    x0 = TorusPoint.from_exponents(G3, [[0, 1, 0], [0, 0, 1]])
    f = MonomialFunctional((0, 0, 0), (1, 2))
    table = dict(monoid_values(maps, x0, f, 4))
    for _ in range(20):
        a = tuple(rng.randrange(2) for _ in range(rng.randint(0, 2)))
        b = tuple(rng.randrange(2) for _ in range(rng.randint(0, 2)))
        E = x0.matrix()
        for i in a + b:
            E = maps[i].apply_exponents(E)
        assert table[a + b] == eval_monomial_functional(f, TorusPoint.from_exponents(G3, E))
