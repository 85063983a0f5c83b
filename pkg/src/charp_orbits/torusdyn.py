"""Monomial self-maps of the torus G_m^d with coefficients in a group G.

A point whose coordinates lie in G = <h_1, ..., h_m> is stored as its
d x m exponent matrix E (row i holds the exponents of coordinate i).  The
map x_i -> c_i * prod_j x_j^{a_ij} acts on exponents affinely,
E -> A E + C, so orbits are integer computations and field elements are
only materialized for cross-checks.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Sequence

from . import lattice
from .errors import DimensionMismatch, NotDominant, ValidationError
from .ffield import RatFunc
from .multgroup import ExponentVector, GroupSpec, membership
from .recurrence import IntRecurrence


def _vec(v, m: int) -> ExponentVector:
    ev = v if isinstance(v, ExponentVector) else ExponentVector(tuple(v))
    if len(ev) != m:
        raise DimensionMismatch(f"exponent vector {list(ev)} has length {len(ev)}, expected {m}")
    return ev


@dataclass(frozen=True)
class MonomialMap:
    """x_i -> c_i * prod_j x_j^{expo[i][j]}, with c_i given by exponents over G."""

    group: GroupSpec
    expo: tuple[tuple[int, ...], ...]
    coeff: tuple[ExponentVector, ...]

    def __post_init__(self):
        d = len(self.expo)
        if d == 0 or any(len(row) != d for row in self.expo):
            raise DimensionMismatch("exponent matrix must be square and nonempty")
        if len(self.coeff) != d:
            raise DimensionMismatch(f"need {d} coefficient vectors, got {len(self.coeff)}")
        m = len(self.group)
        object.__setattr__(self, "expo", tuple(tuple(int(a) for a in row) for row in self.expo))
        object.__setattr__(self, "coeff", tuple(_vec(c, m) for c in self.coeff))
        if lattice.det([list(r) for r in self.expo]) == 0:
            raise NotDominant("exponent matrix is singular; the map is not dominant")

    @classmethod
    def build(cls, group: GroupSpec, expo: Sequence[Sequence[int]],
              coeff: Sequence[Sequence[int]] | None = None) -> "MonomialMap":
        d = len(expo)
        if coeff is None:
            coeff = [[0] * len(group)] * d
        return cls(group, tuple(tuple(r) for r in expo), tuple(_vec(c, len(group)) for c in coeff))

    @property
    def dim(self) -> int:
        return len(self.expo)

    def apply_exponents(self, E: Sequence[Sequence[int]]) -> list[list[int]]:
        """A E + C."""
        AE = lattice.matmul(self.expo, E)
        return [[x + c for x, c in zip(row, cv)] for row, cv in zip(AE, self.coeff)]

    def apply_values(self, coords: Sequence[RatFunc]) -> list[RatFunc]:
        """The map evaluated directly on field elements."""
        if len(coords) != self.dim:
            raise DimensionMismatch(f"point has {len(coords)} coordinates, map has dimension {self.dim}")
        out = []
        for row, c in zip(self.expo, self.coeff):
            val = self.group.element(c)
            for a, x in zip(row, coords):
                if a:
                    val = val * x ** a
            out.append(val)
        return out

    def affine_matrix(self) -> list[list[int]]:
        """[[A, C], [0, I_m]], acting on the stacked state [E; I_m]."""
        d, m = self.dim, len(self.group)
        top = [list(row) + list(c) for row, c in zip(self.expo, self.coeff)]
        bottom = [[0] * d + [int(i == j) for j in range(m)] for i in range(m)]
        return top + bottom


@dataclass(frozen=True)
class TorusPoint:
    group: GroupSpec
    coords: tuple[ExponentVector, ...]

    def __post_init__(self):
        m = len(self.group)
        object.__setattr__(self, "coords", tuple(_vec(c, m) for c in self.coords))

    @classmethod
    def from_exponents(cls, group: GroupSpec, rows: Sequence[Sequence[int]]) -> "TorusPoint":
        return cls(group, tuple(ExponentVector(tuple(r)) for r in rows))

    @classmethod
    def from_values(cls, group: GroupSpec, values: Sequence[RatFunc]) -> "TorusPoint":
        rows = []
        for v in values:
            cert = membership(v, group)
            if cert is None:
                raise ValidationError(f"coordinate {v} is not in the group")
            rows.append(cert)
        return cls(group, tuple(rows))

    @property
    def dim(self) -> int:
        return len(self.coords)

    def matrix(self) -> list[list[int]]:
        return [c.to_list() for c in self.coords]

    def materialize(self) -> list[RatFunc]:
        return [self.group.element(c) for c in self.coords]

    def to_dict(self) -> dict:
        return {"exponents": self.matrix(), "values": [str(v) for v in self.materialize()]}


@dataclass(frozen=True)
class MonomialFunctional:
    """kappa * prod_j x_j^{powers[j]} with kappa given by exponents over G."""

    kappa: ExponentVector
    powers: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "powers", tuple(int(p) for p in self.powers))
        if not isinstance(self.kappa, ExponentVector):
            object.__setattr__(self, "kappa", ExponentVector(tuple(self.kappa)))

    @classmethod
    def coordinate(cls, group: GroupSpec, d: int, i: int = 0) -> "MonomialFunctional":
        return cls(ExponentVector((0,) * len(group)), tuple(int(j == i) for j in range(d)))


def _check_point(phi: MonomialMap, x: TorusPoint):
    if x.dim != phi.dim:
        raise DimensionMismatch(f"point has dimension {x.dim}, map has dimension {phi.dim}")
    if x.group is not phi.group and len(x.group) != len(phi.group):
        raise DimensionMismatch("point and map use different groups")


def iterate_monomial(phi: MonomialMap, x: TorusPoint, n: int) -> TorusPoint:
    """phi^n(x) on exponents, by square-and-multiply on the affine matrix."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    _check_point(phi, x)
    if n <= 16:
        E = x.matrix()
        for _ in range(n):
            E = phi.apply_exponents(E)
        return TorusPoint.from_exponents(x.group, E)
    T = phi.affine_matrix()
    R = lattice.identity(len(T))
    while n:
        if n & 1:
            R = lattice.matmul(R, T)
        n >>= 1
        if n:
            T = lattice.matmul(T, T)
    m = len(x.group)
    state = x.matrix() + lattice.identity(m)
    return TorusPoint.from_exponents(x.group, lattice.matmul(R, state)[:phi.dim])


def orbit_exponents(phi: MonomialMap, x: TorusPoint, count: int) -> list[list[list[int]]]:
    """Exponent matrices of x, phi(x), ..., phi^{count-1}(x)."""
    _check_point(phi, x)
    out = []
    E = x.matrix()
    for _ in range(count):
        out.append(E)
        E = phi.apply_exponents(E)
    return out


def _functional_exponents(g: MonomialFunctional, E: Sequence[Sequence[int]]) -> list[int]:
    acc = list(g.kappa)
    for p, row in zip(g.powers, E):
        if p:
            acc = [a + p * e for a, e in zip(acc, row)]
    return acc


def eval_monomial_functional(g: MonomialFunctional, x: TorusPoint) -> ExponentVector:
    if len(g.powers) != x.dim or len(g.kappa) != len(x.group):
        raise DimensionMismatch("functional does not match the point's dimension or group")
    return ExponentVector(tuple(_functional_exponents(g, x.matrix())))


def eval_functional_values(g: MonomialFunctional, group: GroupSpec, coords: Sequence[RatFunc]) -> RatFunc:
    """The functional evaluated directly on field elements."""
    if len(g.powers) != len(coords):
        raise DimensionMismatch("functional does not match the point's dimension")
    val = group.element(g.kappa)
    for p, x in zip(g.powers, coords):
        if p:
            val = val * x ** p
    return val


@dataclass(frozen=True)
class ResidueRecurrence:
    """For n >= preperiod, f(phi^{L n + j}(x0)) = prod_i h_i^{b[j][i](n)}."""

    L: int
    preperiod: int
    recurrences: tuple[tuple[IntRecurrence, ...], ...]

    def exponents(self, n: int) -> ExponentVector:
        """Exponent vector of f(phi^n(x0)) read off the recurrences."""
        if n < self.preperiod:
            raise ValueError("index lies in the preperiod")
        j = (n - self.preperiod) % self.L
        k = (n - self.preperiod) // self.L
        return ExponentVector(tuple(rec.at(k) for rec in self.recurrences[j]))

    def to_dict(self) -> dict:
        return {"L": self.L, "preperiod": self.preperiod,
                "residues": [[rec.to_dict() for rec in row] for row in self.recurrences]}


def residue_recurrences(phi: MonomialMap, x0: TorusPoint, f: MonomialFunctional,
                        L: int = 1, verify_upto: int = 60) -> ResidueRecurrence:
    """Minimal integer recurrences for the exponents of f(phi^{Ln+j}(x0)).

    The exponents follow E -> A E + C, so every coordinate satisfies the
    recurrence with characteristic polynomial charpoly(A) * (z - 1), of
    order d + 1; taking every L-th term keeps the order.  The minimal
    recurrence is recovered by Berlekamp-Massey and checked against the
    exponent orbit for every index up to ``verify_upto``.
    """
    if L < 1:
        raise ValueError("L must be at least 1")
    d = phi.dim
    per_residue = 2 * (d + 1) + 2
    count = max(L * per_residue, verify_upto + 1)
    orbit = [_functional_exponents(f, E) for E in orbit_exponents(phi, x0, count)]
    m = len(phi.group)
    rows = []
    for j in range(L):
        sub = orbit[j::L]
        rows.append(tuple(IntRecurrence.from_terms([v[i] for v in sub[:per_residue]]) for i in range(m)))
    rr = ResidueRecurrence(L, 0, tuple(rows))
    for n in range(min(count, verify_upto + 1)):
        if list(rr.exponents(n)) != orbit[n]:
            raise AssertionError(f"recurrence disagrees with the orbit at n = {n}")
    return rr


def monoid_values(maps: Sequence[MonomialMap], x0: TorusPoint, f: MonomialFunctional,
                  depth: int, audit: bool = True) -> list[tuple[tuple[int, ...], ExponentVector]]:
    """f at w(x0) for every word w of length <= depth, breadth first.

    The word (i_1, ..., i_k) applies maps[i_1] first.  With ``audit`` each
    value is materialized and its certificate re-checked by membership.
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    for phi in maps:
        _check_point(phi, x0)
    out = []
    queue = deque([((), x0.matrix())])
    while queue:
        word, E = queue.popleft()
        ev = ExponentVector(tuple(_functional_exponents(f, E)))
        if audit and membership(x0.group.element(ev), x0.group) is None:
            raise AssertionError(f"value for word {word} left the group")
        out.append((word, ev))
        if len(word) < depth:
            for i, phi in enumerate(maps):
                queue.append((word + (i,), phi.apply_exponents(E)))
    return out
