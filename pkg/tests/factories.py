"""Seeded generators of random inputs shared by the unit and acceptance tests."""

from __future__ import annotations

import random

from charp_orbits.ffield import FieldSpec, Poly, RatFunc, is_irreducible, parse_scalar
from charp_orbits.linrec import PolyaDecomposition, RationalSeries, XPoly
from charp_orbits.multgroup import ExponentVector, GroupSpec
from charp_orbits.torusdyn import MonomialFunctional, MonomialMap, TorusPoint

from oracles import all_polys


def random_group_element(rng: random.Random, gens: list[RatFunc], bound: int = 2) -> RatFunc:
    x = gens[0].field.const(1)
    for g in gens:
        x = x * g ** rng.randint(-bound, bound)
    return x


def random_decomposition(rng: random.Random, gens: list[RatFunc], M_max: int = 6,
                         N_max: int = 3) -> PolyaDecomposition:
    """P, mu and delta drawn from G u {0}, with mu_b = 0 about a fifth of the time."""
    F = gens[0].field
    zero = F.const(0)
    M = rng.randint(1, M_max)
    N = rng.randint(0, N_max)
    P = XPoly(F, [zero if rng.random() < 0.3 else random_group_element(rng, gens)
                  for _ in range(M * N)])
    mu = tuple(zero if rng.random() < 0.2 else random_group_element(rng, gens) for _ in range(M))
    delta = tuple(random_group_element(rng, gens) for _ in range(M))
    return PolyaDecomposition(M, N, P, mu, delta)


def random_series(rng: random.Random, F: FieldSpec, order: int, scalar_degree: int = 1) -> RationalSeries:
    """num/den with den(0) = 1, deg den <= order and deg num < order."""
    def scalar():
        coeffs = [rng.randrange(F.q) for _ in range(scalar_degree + 1)]
        x = F.const(0)
        for i, c in enumerate(coeffs):
            x = x + F.const(c) * F.t() ** i
        return x

    while True:
        den = XPoly(F, [F.const(1)] + [scalar() for _ in range(order)])
        num = XPoly(F, [scalar() for _ in range(rng.randint(1, order))])
        if num:
            return RationalSeries(num, den)


def random_bounded_matrix(rng: random.Random, d: int) -> list[list[int]]:
    """A signed permutation, or a permuted conjugate of D*U with D = diag(+-1)
    and U unipotent upper triangular with one off-diagonal entry.

    Every eigenvalue is a root of unity, so powers grow polynomially and the
    orbit exponents stay small enough for direct evaluation in F_q(t).
    """
    perm = list(range(d))
    rng.shuffle(perm)
    signs = [rng.choice([1, -1]) for _ in range(d)]
    if d == 1 or rng.random() < 0.3:
        return [[signs[i] * int(perm[i] == j) for j in range(d)] for i in range(d)]
    B = [[signs[i] * int(i == j) for j in range(d)] for i in range(d)]
    i, j = sorted(rng.sample(range(d), 2))
    B[i][j] = signs[i] * rng.choice([1, -1])
    # conjugate by the permutation: A[perm[i]][perm[j]] = B[i][j]
    A = [[0] * d for _ in range(d)]
    for i in range(d):
        for j in range(d):
            A[perm[i]][perm[j]] = B[i][j]
    return A


def random_bounded_system(rng: random.Random, group: GroupSpec, max_dim: int = 3):
    """(phi, x0, f) with a bounded-growth exponent matrix and small data in G."""
    m = len(group)
    d = rng.randint(1, max_dim)
    coeff = [[rng.randint(-1, 1) for _ in range(m)] for _ in range(d)]
    phi = MonomialMap.build(group, random_bounded_matrix(rng, d), coeff)
    x0 = TorusPoint.from_exponents(group, [[rng.randint(-1, 1) for _ in range(m)] for _ in range(d)])
    f = MonomialFunctional(ExponentVector(tuple(rng.randint(-1, 1) for _ in range(m))),
                           tuple(rng.randint(-2, 2) for _ in range(d)))
    return phi, x0, f


def irreducibles(F: FieldSpec, max_degree: int) -> list[Poly]:
    return [f for f in all_polys(F, max_degree) if is_irreducible(f)]


def as_rat(f: Poly) -> RatFunc:
    return parse_scalar(f.field, str(f))


def random_group(rng: random.Random, F: FieldSpec, pool: list[Poly], rank: int) -> GroupSpec:
    """Generators built from distinct irreducibles, with occasional redundancy and constants."""
    chosen = rng.sample(pool, rank)
    gens: list[RatFunc] = []
    for f in chosen:
        g = as_rat(f) ** rng.choice([1, 1, 2, -1])
        if rng.random() < 0.5 and gens:
            g = g * gens[-1]
        gens.append(g)
    if F.q > 2 and rng.random() < 0.5:
        gens.append(F.const(rng.randrange(1, F.q)))
    return GroupSpec(gens, F)
