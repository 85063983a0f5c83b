"""Multiplicative dependence of elements of F_q(t)* and of monomial functions,
plus the size threshold that forces dependence."""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Sequence

from . import lattice
from .errors import DimensionMismatch, ZeroArgument
from .ffield import FieldSpec, RatFunc
from .multgroup import GroupSpec


@dataclass(frozen=True)
class DependenceResult:
    """``relation`` is None exactly when the list is independent."""

    relation: tuple[int, ...] | None
    lattice_basis: tuple[tuple[int, ...], ...] = ()

    @property
    def dependent(self) -> bool:
        return self.relation is not None

    @property
    def verdict(self) -> str:
        return "Dependent" if self.dependent else "Independent"

    def to_dict(self) -> dict:
        out = {"verdict": self.verdict}
        if self.dependent:
            out["relation"] = list(self.relation)
            out["lattice_basis"] = [list(r) for r in self.lattice_basis]
        return out


def _canonical_relation(basis: Sequence[Sequence[int]]) -> tuple[int, ...]:
    """Shortest (L1, then lexicographic) vector among the basis rows and
    their pairwise sums and differences, first nonzero entry positive."""
    cands = [list(b) for b in basis]
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            cands.append([x + y for x, y in zip(basis[i], basis[j])])
            cands.append([x - y for x, y in zip(basis[i], basis[j])])
    best = None
    for v in cands:
        if not any(v):
            continue
        if next(x for x in v if x) < 0:
            v = [-x for x in v]
        key = (sum(abs(x) for x in v), v)
        if best is None or key < best:
            best = key
    return tuple(best[1])


def _power_product(gs: Sequence[RatFunc], k: Sequence[int], field: FieldSpec) -> RatFunc:
    out = field.const(1)
    for g, e in zip(gs, k):
        if e:
            out = out * g ** e
    return out


def mult_dependence(gs: Sequence[RatFunc], field: FieldSpec | None = None) -> DependenceResult:
    """Is there k != 0 with prod g_i^{k_i} = 1?

    The relation lattice is the projection of the left kernel of
    [divisor matrix | discrete logs of constant parts ; 0 | q - 1].  The
    reported relation is a short lattice vector, re-multiplied to 1 before
    it is returned.
    """
    if any(g.is_zero() for g in gs):
        raise ZeroArgument("multiplicative dependence needs nonzero elements")
    if not gs:
        return DependenceResult(None)
    field = field or gs[0].field
    G = GroupSpec(gs, field=field)
    basis = G.relations
    if not basis:
        return DependenceResult(None)
    rel = _canonical_relation(basis)
    if not _power_product(gs, rel, field).is_one():
        raise AssertionError(f"relation {rel} does not multiply to 1")
    return DependenceResult(rel, tuple(tuple(r) for r in basis))


def functional_dependence(G: GroupSpec, kappas: Sequence[Sequence[int]],
                          powers: Sequence[Sequence[int]]) -> DependenceResult:
    """Dependence of the functions f_j = kappa_j * prod_i x_i^{powers[j][i]}
    restricted to points with all coordinates in G.

    When G is infinite, G^d is Zariski dense in the torus and the exponent
    parts must cancel exactly.  When G is finite of exponent o they only
    need to cancel modulo o.
    """
    if len(kappas) != len(powers):
        raise DimensionMismatch("need one kappa per functional")
    if not kappas:
        return DependenceResult(None)
    d = len(powers[0])
    if any(len(p) != d for p in powers):
        raise DimensionMismatch("functionals must share the dimension d")
    values = [G.element(k) for k in kappas]
    H = GroupSpec(values, field=G.field)
    rows = [list(p) + r for p, r in zip(powers, H._augmented())]
    modulus = 0
    if G.rank == 0:
        modulus = _torsion_exponent(G)
    tail = H._augmented()[-1]
    extra = [[0] * d + tail]
    if modulus:
        extra += [[modulus * int(i == j) for j in range(d)] + [0] * len(tail) for i in range(d)]
    kernel = lattice.left_kernel(rows + extra)
    n = len(values)
    proj = [row[:n] for row in kernel if any(row[:n])]
    if not proj:
        return DependenceResult(None)
    basis = [row for row in lattice.hnf(proj)[0] if any(row)]
    rel = _canonical_relation(basis)
    kappa_part = _power_product(values, rel, G.field)
    exps = [sum(k * p[i] for k, p in zip(rel, powers)) for i in range(d)]
    if not kappa_part.is_one() or any(e % modulus if modulus else e for e in exps):
        raise AssertionError(f"functional relation {rel} does not cancel")
    return DependenceResult(rel, tuple(tuple(r) for r in basis))


def _torsion_exponent(G: GroupSpec) -> int:
    """Exponent of a finite G: the order of the cyclic group of its constants."""
    q1 = G.field.q - 1
    g = q1
    for lam in G.constant_logs:
        g = gcd(g, lam)
    return q1 // g


def dichotomy_threshold(d: int, e: int, r: int) -> int:
    """(d + e + 1)^r: that many monomial functions with values in a group of
    rank r on a d-dimensional torus over a field of transcendence degree e
    are always dependent."""
    if d < 0 or e < 0 or r < 0:
        raise ValueError("d, e and r must be nonnegative")
    return (d + e + 1) ** r
