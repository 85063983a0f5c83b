"""Finitely generated subgroups of F_q(t)*.

A generator h is stored through its divisor (valuations at the finite
places of the joint support) and its constant part c(h), the leading
coefficient after the support primes are divided out, so that
``h = c(h) * prod(pi ** v_pi(h))``.  Membership becomes an integer linear
system on divisors plus one congruence modulo q - 1 on discrete logs of
constant parts.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from . import lattice
from .errors import DimensionMismatch, NoPlaceAssignment, RankZero, ZeroArgument
from .ffield import FieldSpec, Place, RatFunc, parse_scalar, support, split_over, valuation
from .recurrence import IntRecurrence


@dataclass(frozen=True)
class ExponentVector:
    """Coordinates of a group element in the generators h_1, ..., h_m."""

    exps: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "exps", tuple(int(e) for e in self.exps))

    def __len__(self):
        return len(self.exps)

    def __iter__(self):
        return iter(self.exps)

    def __getitem__(self, i):
        return self.exps[i]

    def __add__(self, other: "ExponentVector") -> "ExponentVector":
        return ExponentVector(tuple(a + b for a, b in zip(self.exps, other.exps)))

    def scaled(self, k: int) -> "ExponentVector":
        return ExponentVector(tuple(k * a for a in self.exps))

    def to_list(self) -> list[int]:
        return list(self.exps)


class GroupSpec:
    """G = <h_1, ..., h_m> inside F_q(t)*, with divisor data computed eagerly.

    ``rank`` is the rank of the free part of G, i.e. the rank of the divisor
    matrix; constant generators only contribute torsion.
    """

    def __init__(self, gens: Sequence[RatFunc], field: FieldSpec | None = None, seed: int = 0):
        gens = tuple(gens)
        if field is None:
            if not gens:
                raise ValueError("an empty generator list needs an explicit field")
            field = gens[0].field
        for h in gens:
            if h.is_zero():
                raise ZeroArgument("group generators must be nonzero")
        self.field = field
        self.gens = gens
        places: set[Place] = set()
        for h in gens:
            places.update(support(h, seed))
        self.support: tuple[Place, ...] = tuple(sorted(places, key=Place.sort_key))
        rows = []
        consts = []
        for h in gens:
            vals, cof = split_over(h, self.support)
            rows.append(vals)
            consts.append(cof.constant_value())
        self.divisor_matrix: list[list[int]] = rows
        self.infinity_valuations: list[int] = [valuation(h, Place.infinity()) for h in gens]
        self.constant_parts: tuple[int, ...] = tuple(consts)
        self.constant_logs: tuple[int, ...] = tuple(field.log(c) for c in consts)
        self.rank = lattice.rank(rows) if rows and self.support else 0
        # relation lattice {e : prod h_i^e_i == 1} in Hermite form
        self.relations: list[list[int]] = _relation_lattice(self._augmented())

    @classmethod
    def from_strings(cls, field: FieldSpec, texts: Sequence[str], seed: int = 0) -> "GroupSpec":
        return cls([parse_scalar(field, s) for s in texts], field=field, seed=seed)

    def __len__(self):
        return len(self.gens)

    def __repr__(self):
        return "GroupSpec<" + ", ".join(str(h) for h in self.gens) + ">"

    def _augmented(self) -> list[list[int]]:
        s = len(self.support)
        rows = [list(r) + [lam] for r, lam in zip(self.divisor_matrix, self.constant_logs)]
        rows.append([0] * s + [self.field.q - 1])
        return rows

    def element(self, exps: Sequence[int] | ExponentVector) -> RatFunc:
        """prod h_i ** exps[i] as an explicit rational function."""
        exps = tuple(exps)
        if len(exps) != len(self.gens):
            raise DimensionMismatch(f"expected {len(self.gens)} exponents, got {len(exps)}")
        out = self.field.const(1)
        for h, e in zip(self.gens, exps):
            if e:
                out = out * h ** e
        return out

    def canonical(self, exps: Sequence[int]) -> ExponentVector:
        """Canonical representative of the coset ``exps + relations``."""
        return ExponentVector(tuple(lattice.reduce_mod(list(exps), self.relations)))

    def divisor_of(self, exps: Sequence[int]) -> list[int]:
        """Valuations over ``support`` of the element with exponents ``exps``."""
        return lattice.vecmat(list(exps), self.divisor_matrix) if self.gens else []

    def same_element(self, a: Sequence[int], b: Sequence[int]) -> bool:
        return lattice.in_lattice([x - y for x, y in zip(a, b)], self.relations)


def _relation_lattice(augmented: list[list[int]]) -> list[list[int]]:
    kernel = lattice.left_kernel(augmented)
    m = len(augmented) - 1
    proj = [row[:m] for row in kernel if any(row[:m])]
    if not proj:
        return []
    return [row for row in lattice.hnf(proj)[0] if any(row)]


def membership(x: RatFunc, G: GroupSpec, verify: bool = True) -> ExponentVector | None:
    """Exponent certificate of ``x`` in G, or ``None`` when x is not in G.

    The certificate is the canonical coset representative (reduced modulo
    the relation lattice).  With ``verify`` the product is re-multiplied and
    compared to ``x`` before returning.
    """
    if x.is_zero():
        raise ZeroArgument("0 is never in a multiplicative group")
    vals, cof = split_over(x, G.support)
    if not cof.is_constant():
        return None
    F = G.field
    target = vals + [F.log(cof.constant_value())]
    if not G.gens:
        return ExponentVector(()) if not any(target) else None
    sol = lattice.solve_left(G._augmented(), target)
    if sol is None:
        return None
    cert = G.canonical(sol[:len(G.gens)])
    if verify and G.element(cert) != x:
        raise AssertionError(f"membership certificate for {x} failed re-multiplication")
    return cert


def membership_by_divisor(vals: Sequence[int], const_log: int, G: GroupSpec) -> ExponentVector | None:
    """Membership from precomputed divisor data (no field arithmetic)."""
    sol = lattice.solve_left(G._augmented(), list(vals) + [const_log])
    if sol is None:
        return None
    return G.canonical(sol[:len(G.gens)])


# -- place selection ------------------------------------------------------------

@dataclass(frozen=True)
class PlaceAssignment:
    """A basis of the free part of G paired with places.

    ``valuation(basis[i], places[i]) == pairing[i] < 0`` and
    ``valuation(basis[j], places[i]) == 0`` for ``j != i``.
    ``basis_exps[i]`` expresses ``basis[i]`` in the generators of G.
    """

    basis: tuple[RatFunc, ...]
    places: tuple[Place, ...]
    pairing: tuple[int, ...]
    basis_exps: tuple[ExponentVector, ...]

    def to_pairs(self) -> list[tuple[str, str]]:
        return [(str(b), str(v)) for b, v in zip(self.basis, self.places)]


def select_places(G: GroupSpec, max_combinations: int = 20000) -> PlaceAssignment:
    """Change basis of the free part of G so that each basis element is a
    pole at its own place and a unit at the others.

    Candidate places are the support of G plus infinity, tried as r-subsets
    in canonical order; the first subset whose "unit at the others"
    directions form a unimodular basis of the divisor lattice wins.
    """
    r = G.rank
    if r == 0:
        raise RankZero("G is a torsion group; there are no places to select")
    places = list(G.support) + [Place.infinity()]
    full = [row + [vi] for row, vi in zip(G.divisor_matrix, G.infinity_valuations)]
    H, U, pivots = lattice.hnf(full)
    B = H[:r]          # basis of the divisor lattice (rows over places)
    C = U[:r]          # C @ full == B, i.e. exponents of the basis over G
    tried = 0
    for combo in combinations(range(len(places)), r):
        tried += 1
        if tried > max_combinations:
            break
        sub = [[B[i][c] for c in combo] for i in range(r)]
        if lattice.det(sub) == 0:
            continue
        directions = []
        for i in range(r):
            others = [[row[j] for j in range(r) if j != i] for row in sub]
            if r == 1:
                a = [1]
            else:
                ker = lattice.left_kernel(others)
                if len(ker) != 1:
                    break
                a = lattice.primitive(ker[0])
            directions.append(a)
        else:
            if abs(lattice.det(directions)) != 1:
                continue
            basis, exps_list, pairing = [], [], []
            for i, a in enumerate(directions):
                div = lattice.vecmat(a, B)
                if div[combo[i]] > 0:
                    a = [-x for x in a]
                    div = [-x for x in div]
                exps = G.canonical(lattice.vecmat(a, C))
                basis.append(G.element(exps))
                exps_list.append(exps)
                pairing.append(div[combo[i]])
            return PlaceAssignment(tuple(basis), tuple(places[c] for c in combo),
                                   tuple(pairing), tuple(exps_list))
    raise NoPlaceAssignment(f"no diagonalizing places among {len(places)} candidates")


def check_assignment(A: PlaceAssignment) -> bool:
    """Exact valuation check of both PlaceAssignment invariants."""
    for i, v in enumerate(A.places):
        for j, b in enumerate(A.basis):
            val = valuation(b, v)
            if i == j and not (val < 0 and val == A.pairing[i]):
                return False
            if i != j and val != 0:
                return False
    return True


def height_bound_constant(G: GroupSpec, A: PlaceAssignment) -> Fraction:
    """c > 0 with h(prod basis[i]**n_i) >= c * max|n_i| for all integer n.

    The height dominates deg(v) * |v(f)| at every place v, and at
    ``places[i]`` the valuation of the product is ``n_i * pairing[i]``.
    """
    if len(A.basis) != G.rank:
        raise DimensionMismatch("assignment does not match the rank of G")
    return Fraction(min(v.degree * abs(c) for v, c in zip(A.places, A.pairing)))


# -- eventually periodic membership of recurrence vectors -----------------------

@dataclass
class PeriodicPattern:
    """The set {n : b(n) in Lambda}.

    When ``certified``, the set is exactly
    ``preperiod_members  U  {preperiod + j + k*period : j in residues, k >= 0}``.
    ``members`` always lists the elements up to ``horizon``.
    """

    certified: bool
    horizon: int
    members: list[int]
    preperiod: int | None = None
    period: int | None = None
    preperiod_members: list[int] = dc_field(default_factory=list)
    residues: list[int] = dc_field(default_factory=list)
    index: int | None = None

    def contains(self, n: int) -> bool:
        if not self.certified:
            if n > self.horizon:
                raise ValueError("uncertified pattern: n beyond horizon is undecided")
            return n in set(self.members)
        if n < self.preperiod:
            return n in self.preperiod_members
        return (n - self.preperiod) % self.period in self.residues

    def to_dict(self) -> dict:
        return {
            "certified": self.certified, "horizon": self.horizon, "members": self.members,
            "preperiod": self.preperiod, "period": self.period,
            "preperiod_members": self.preperiod_members, "residues": self.residues,
            "index": self.index,
        }


def recurrence_membership_pattern(b: Sequence[IntRecurrence], generators: Sequence[Sequence[int]],
                                  horizon: int) -> PeriodicPattern:
    """Decide {n : (b_1(n), ..., b_m(n)) in Lambda} for Lambda = span(generators).

    For finite-index Lambda the coordinates are tracked modulo the index N
    (N Z^m lies in Lambda); the first repeated state certifies preperiod and
    period.  For infinite index only the horizon-bounded set is returned.
    """
    m = len(b)
    for g in generators:
        if len(g) != m:
            raise DimensionMismatch(f"lattice generator of length {len(g)} in Z^{m}")
    rows = [list(g) for g in generators if any(g)]
    basis = [row for row in lattice.hnf(rows)[0] if any(row)] if rows else []
    if len(basis) < m:
        values = [rec.values(horizon + 1) for rec in b]
        members = [n for n in range(horizon + 1)
                   if lattice.in_lattice([vals[n] for vals in values], basis)]
        return PeriodicPattern(False, horizon, members)
    N = 1
    for i, row in enumerate(basis):
        N *= row[i]

    def step(window: tuple[int, ...], rec: IntRecurrence) -> tuple[int, ...]:
        if not window:
            return window
        nxt = sum(c * window[-1 - j] for j, c in enumerate(rec.coeffs)) % N
        return window[1:] + (nxt,)

    state = tuple(tuple(x % N for x in rec.initial) for rec in b)
    seen: dict[tuple, int] = {}
    flags: list[bool] = []
    n = 0
    while state not in seen:
        seen[state] = n
        current = [w[0] if w else 0 for w in state]
        flags.append(lattice.in_lattice(current, basis))
        state = tuple(step(w, rec) for w, rec in zip(state, b))
        n += 1
    pre = seen[state]
    per = n - pre
    # shrink the period, then the preperiod, to the set's own minimal values
    for d in range(1, per + 1):
        if per % d == 0 and all(flags[pre + j] == flags[pre + (j + d) % per] for j in range(per)):
            per = d
            break
    while pre > 0 and flags[pre - 1] == flags[pre - 1 + per]:
        pre -= 1
    pre_members = [k for k in range(pre) if flags[k]]
    residues = [j for j in range(per) if flags[pre + j]]
    pattern = PeriodicPattern(True, horizon, [], pre, per, pre_members, residues, index=N)
    pattern.members = [k for k in range(horizon + 1) if pattern.contains(k)]
    return pattern
