"""Return sets of rational self-maps, their structure as progressions plus
a sparse part, windowed Banach density, and the sparse sets built from
powers of p (sums d_i p^{k_i n_i} and squares that are sums of r powers).
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Sequence

from . import grammar
from .errors import DimensionMismatch, ValidationError
from .ffield import FieldSpec, RatFunc, is_prime, parse_scalar
from .multgroup import GroupSpec, membership

DEFAULT_HEIGHT_BUDGET = 10 ** 6
B_MAX = 24
TAIL_FRACTION = Fraction(1, 4)
MIN_TAIL = 3
FINITE_CUT = Fraction(1, 2)


# -- rational systems -----------------------------------------------------------

@dataclass(frozen=True)
class RationalSystem:
    """phi: A^d -> A^d and f: A^d -> P^1 given as expressions in x1..xd."""

    field: FieldSpec
    phi: tuple
    f: object
    x0: tuple[RatFunc, ...]
    phi_text: tuple[str, ...] = ()
    f_text: str = ""

    @property
    def dim(self) -> int:
        return len(self.phi)

    @classmethod
    def from_strings(cls, field: FieldSpec, phi: Sequence[str], f: str,
                     x0: Sequence[str]) -> "RationalSystem":
        if len(phi) != len(x0):
            raise DimensionMismatch(f"phi has {len(phi)} coordinates but x0 has {len(x0)}")
        names = _names(len(phi))
        phi_ast = tuple(grammar.parse_expr(s) for s in phi)
        f_ast = grammar.parse_expr(f)
        for node in phi_ast + (f_ast,):
            grammar.check_variables(node, set(names) | _scalar_names(field))
        point = tuple(parse_scalar(field, s) for s in x0)
        return cls(field, phi_ast, f_ast, point, tuple(phi), f)

    def env(self, point: Sequence[RatFunc]) -> dict:
        env = {name: v for name, v in zip(_names(self.dim), point)}
        if self.dim == 1:
            env["x"] = point[0]
        env["t"] = self.field.t()
        if not self.field.prime:
            env["u"] = self.field.const(self.field.u)
        return env

    def step(self, point: Sequence[RatFunc]) -> list[RatFunc]:
        env = self.env(point)
        return [grammar.evaluate(node, env, self.field.const_from_int) for node in self.phi]

    def observe(self, point: Sequence[RatFunc]) -> RatFunc:
        return grammar.evaluate(self.f, self.env(point), self.field.const_from_int)


def _names(d: int) -> list[str]:
    names = [f"x{i + 1}" for i in range(d)]
    if d == 1:
        names.append("x")
    return names


def _scalar_names(field: FieldSpec) -> set[str]:
    return {"t"} if field.prime else {"t", "u"}


class IndeterminacyHit(Exception):
    """The orbit meets a pole or an indeterminacy point at ``step``."""

    def __init__(self, step: int, where: str = "phi"):
        super().__init__(f"indeterminacy of {where} at step {step}")
        self.step = step
        self.where = where

    def __eq__(self, other):
        return isinstance(other, IndeterminacyHit) and (self.step, self.where) == (other.step, other.where)

    def __hash__(self):
        return hash((self.step, self.where))


class HeightBudgetExceeded(Exception):
    """Direct iteration stopped because coordinates grew past the budget."""

    def __init__(self, step: int, height: int, budget: int):
        super().__init__(f"height {height} exceeds budget {budget} at step {step}")
        self.step = step
        self.height = height
        self.budget = budget


def _height(point: Sequence[RatFunc]) -> int:
    return max((v.height() for v in point), default=0)


def iterate_rational(S: RationalSystem, n: int, height_budget: int = DEFAULT_HEIGHT_BUDGET
                     ) -> list[RatFunc] | IndeterminacyHit:
    """phi^n(x0), or an IndeterminacyHit naming the first failing step."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    point = list(S.x0)
    for step in range(1, n + 1):
        try:
            point = S.step(point)
        except ZeroDivisionError:
            return IndeterminacyHit(step)
        h = _height(point)
        if h > height_budget:
            raise HeightBudgetExceeded(step, h, height_budget)
    return point


def orbit_values(S: RationalSystem, H: int, height_budget: int = DEFAULT_HEIGHT_BUDGET):
    """Yield (n, f(phi^n(x0)) or None when f has a pole there) for n <= H."""
    point = list(S.x0)
    for n in range(H + 1):
        if n:
            try:
                point = S.step(point)
            except ZeroDivisionError:
                raise IndeterminacyHit(n) from None
            h = _height(point)
            if h > height_budget:
                raise HeightBudgetExceeded(n, h, height_budget)
        try:
            yield n, S.observe(point)
        except ZeroDivisionError:
            yield n, None


def return_set(S: RationalSystem, G: GroupSpec, H: int,
               height_budget: int = DEFAULT_HEIGHT_BUDGET) -> list[int]:
    """{n <= H : f(phi^n(x0)) is defined, nonzero and lies in G}.

    Monomial systems whose data lie in G are iterated on exponents instead
    (every value is then in G with a known certificate), which keeps large
    horizons exact where direct iteration would outgrow the height budget.
    """
    if H < 0:
        raise ValueError("horizon must be nonnegative")
    mono = monomial_form(S, G)
    if mono is not None:
        return list(range(H + 1))
    out = []
    for n, val in orbit_values(S, H, height_budget):
        if val is not None and not val.is_zero() and membership(val, G) is not None:
            out.append(n)
    return out


def _monomial(node, names: list[str], field: FieldSpec):
    """(coefficient, exponents) if ``node`` is c * prod x_j^{e_j}, else None."""
    kind = node[0]
    d = len(names) - (names[-1] == "x")
    if not (grammar.variables(node) & set(names)):
        env = {"t": field.t()}
        if not field.prime:
            env["u"] = field.const(field.u)
        try:
            return grammar.evaluate(node, env, field.const_from_int), [0] * d
        except ZeroDivisionError:
            return None
    if kind == "var":
        idx = 0 if node[1] == "x" else int(node[1][1:]) - 1
        return field.const(1), [int(i == idx) for i in range(d)]
    if kind == "neg":
        inner = _monomial(node[1], names, field)
        return None if inner is None else (-inner[0], inner[1])
    if kind == "pow":
        inner = _monomial(node[1], names, field)
        if inner is None or inner[0].is_zero():
            return None
        return inner[0] ** node[2], [e * node[2] for e in inner[1]]
    if kind in ("mul", "div"):
        a = _monomial(node[1], names, field)
        b = _monomial(node[2], names, field)
        if a is None or b is None:
            return None
        if kind == "mul":
            return a[0] * b[0], [x + y for x, y in zip(a[1], b[1])]
        if b[0].is_zero():
            return None
        return a[0] / b[0], [x - y for x, y in zip(a[1], b[1])]
    return None


def monomial_form(S: RationalSystem, G: GroupSpec):
    """(map, point, functional) when phi and f are monomials with all
    coefficients and coordinates of x0 in G, otherwise None."""
    from .torusdyn import MonomialFunctional, MonomialMap, TorusPoint
    from .errors import NotDominant

    names = _names(S.dim)
    rows, coeffs = [], []
    for node in S.phi:
        mono = _monomial(node, names, S.field)
        if mono is None or mono[0].is_zero():
            return None
        cert = membership(mono[0], G)
        if cert is None:
            return None
        rows.append(mono[1])
        coeffs.append(cert)
    fm = _monomial(S.f, names, S.field)
    if fm is None or fm[0].is_zero():
        return None
    kappa = membership(fm[0], G)
    if kappa is None:
        return None
    point = []
    for v in S.x0:
        if v.is_zero():
            return None
        cert = membership(v, G)
        if cert is None:
            return None
        point.append(cert)
    try:
        phi = MonomialMap(G, tuple(tuple(r) for r in rows), tuple(coeffs))
    except NotDominant:
        return None
    return phi, TorusPoint(G, tuple(point)), MonomialFunctional(kappa, tuple(fm[1]))


# -- structure fitting -------------------------------------------------------------

@dataclass
class ReturnSetReport:
    horizon: int
    members: list[int]
    progressions: list[tuple[int, int]]
    residual: list[int]
    density_estimate: Fraction
    window_schedule: str

    def covered(self) -> set[int]:
        out = set()
        for a, b in self.progressions:
            if b == 0:
                out.add(a)
            else:
                out.update(range(a, self.horizon + 1, b))
        return out

    def to_dict(self) -> dict:
        return {
            "horizon": self.horizon,
            "members": len(self.members),
            "progressions": [list(p) for p in self.progressions],
            "residual": self.residual,
            "density_estimate": str(self.density_estimate),
            "window_schedule": self.window_schedule,
        }


def structure_fit(members: Sequence[int], H: int, b_max: int = B_MAX,
                  window: int | None = None) -> ReturnSetReport:
    """Greedy split of ``members`` into progressions and a residual.

    For b = 1..b_max and each residue a, the class {a, a+b, ...} on [0, H]
    becomes a progression when its last quarter (at least three elements)
    is entirely present; the progression starts at the least class element
    from which every later class element is present.  Classes already
    covered are skipped.  A residual with no element in the upper half of
    [0, H] is finite on the evidence available and is emitted as
    singletons (b = 0).

    The residual's density is estimated with windows of width
    ``window`` (default isqrt(H)) placed in the upper half of [0, H], so
    that small initial elements do not dominate a finite-horizon estimate.
    """
    mem = sorted(set(members))
    if mem and (mem[0] < 0 or mem[-1] > H):
        raise ValidationError("members must lie in [0, H]")
    present = set(mem)
    covered: set[int] = set()
    progs: list[tuple[int, int]] = []
    for b in range(1, b_max + 1):
        for a in range(min(b, H + 1)):
            cls = list(range(a, H + 1, b))
            tail = cls[int(len(cls) * (1 - TAIL_FRACTION)):]
            if len(tail) < MIN_TAIL or not all(x in present for x in tail):
                continue
            i = len(cls)
            while i > 0 and cls[i - 1] in present:
                i -= 1
            run = cls[i:]
            if all(x in covered for x in run):
                continue
            progs.append((run[0], b))
            covered.update(run)
    residual = [x for x in mem if x not in covered]
    cut = -(-H * FINITE_CUT.numerator // FINITE_CUT.denominator)
    if residual and residual[-1] < cut:
        progs.extend((x, 0) for x in residual)
        residual = []
    w = window if window is not None else max(1, isqrt(H))
    w = min(max(w, 1), max(H, 1))
    start = H // 2
    density = banach_density_estimate(residual, H, w, start=start)
    schedule = f"max over windows [s, s+{w}] with {min(start, max(H - w, 0))} <= s <= {max(H - w, 0)}, count/{w}"
    return ReturnSetReport(H, mem, progs, residual, density, schedule)


def banach_density_estimate(members: Sequence[int], H: int, w: int, start: int = 0) -> Fraction:
    """max over windows [s, s+w] inside [start, H] of |members in window| / w, capped at 1."""
    if not 1 <= w <= max(H, 1):
        raise ValueError("need 1 <= w <= H")
    pts = sorted(set(x for x in members if 0 <= x <= H))
    if not pts:
        return Fraction(0)
    last = max(H - w, 0)
    start = min(max(start, 0), last)
    best = 0
    # an optimal window can be taken to start at a member or at ``start``
    candidates = {start, last} | {x for x in pts if start <= x <= last}
    for s in candidates:
        cnt = bisect_right(pts, s + w) - bisect_left(pts, s)
        best = max(best, cnt)
    return min(Fraction(best, w), Fraction(1))


# -- sets built from powers of p ----------------------------------------------------

@dataclass(frozen=True)
class FormSetSpec:
    """{d_1 p^{k_1 n_1} + ... + d_r p^{k_r n_r} : n_i >= 0}."""

    p: int
    d: tuple[Fraction, ...]
    k: tuple[int, ...]

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValidationError(f"{self.p} is not prime")
        if len(self.d) < 1 or len(self.d) != len(self.k):
            raise ValidationError("need r >= 1 and matching lengths of d and k")
        if any(k < 0 for k in self.k):
            raise ValidationError("k_i must be nonnegative")
        object.__setattr__(self, "d", tuple(Fraction(x) for x in self.d))
        object.__setattr__(self, "k", tuple(int(x) for x in self.k))

    @property
    def r(self) -> int:
        return len(self.d)


def form_set_members(spec: FormSetSpec, H: int) -> list[int]:
    """Integer values of the form in [0, H].

    With all d_i >= 0 the enumeration is complete.  With mixed signs the
    terms are enumerated up to 4 * H * p^{max k}, which catches every
    value whose largest terms do not cancel beyond that size.
    """
    if H < 0:
        return []
    nonneg = all(x >= 0 for x in spec.d)
    bound = Fraction(H) if nonneg else Fraction(4 * H * spec.p ** max(spec.k))
    options = []
    for d, k in zip(spec.d, spec.k):
        if d == 0 or k == 0:
            options.append([d])
            continue
        vals, power = [], 1
        while abs(d) * power <= bound:
            vals.append(d * power)
            power *= spec.p ** k
        options.append(vals or [])
    if any(not o for o in options):
        return []
    sums = {Fraction(0)}
    for opt in options:
        nxt = set()
        for s in sums:
            for v in opt:
                total = s + v
                if nonneg and total > H:
                    continue
                nxt.add(total)
        sums = nxt
    return sorted(int(s) for s in sums if s.denominator == 1 and 0 <= s <= H)


def digit_sum(n: int, p: int) -> int:
    s = 0
    while n:
        n, r = divmod(n, p)
        s += r
    return s


@dataclass(frozen=True)
class DigitQuery:
    p: int
    r: int
    H: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValidationError(f"{self.p} is not prime")
        if self.r < 1:
            raise ValidationError("r must be positive")


def digit_solutions(q: DigitQuery) -> list[int]:
    """n in [1, H] with n^2 a sum of exactly r powers of p.

    A sum of powers of p can be rewritten by merging p equal powers into
    the next one, which lowers the term count by p - 1; splitting reverses
    it.  So m >= 1 is a sum of exactly r powers iff s_p(m) <= r <= m and
    r = s_p(m) mod (p - 1).
    """
    out = []
    p, r = q.p, q.r
    for n in range(1, q.H + 1):
        m = n * n
        s = digit_sum(m, p)
        if s <= r <= m and (r - s) % (p - 1) == 0:
            out.append(n)
    return out


def running_density(solutions: Sequence[int], H: int) -> list[tuple[int, Fraction]]:
    """|solutions in [1, x]| / x at x = 10, 100, ... and at H."""
    checkpoints = []
    x = 10
    while x <= H:
        checkpoints.append(x)
        x *= 10
    if not checkpoints or checkpoints[-1] != H:
        checkpoints.append(H)
    sols = sorted(solutions)
    return [(x, Fraction(bisect_right(sols, x), x)) for x in checkpoints if x >= 1]
