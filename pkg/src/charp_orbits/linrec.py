"""Rational power series over F_q(t): linear recurrence form, arithmetic
progression sections and eventually-geometric (Polya-type) decompositions.

A series is stored as a reduced fraction ``num(x)/den(x)`` with
coefficients in F_q(t) and ``den(0) == 1``.  Writing ``k`` for
``max(deg den, deg num + 1)``, the coefficients obey

    a_{n+k} = -(d_1 a_{n+k-1} + ... + d_k a_n)      for all n >= 0,

which is the companion-matrix form ``a_n = w A^n v`` used throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Sequence

from . import grammar
from .errors import ValidationError, ZeroDenominator
from .ffield import FieldSpec, Poly, RatFunc
from .multgroup import GroupSpec, membership
from .recurrence import berlekamp_massey


def _rzero(F: FieldSpec) -> RatFunc:
    return RatFunc._new(Poly.zero(F), Poly.one(F))


def _rone(F: FieldSpec) -> RatFunc:
    return RatFunc._new(Poly.one(F), Poly.one(F))


class XPoly:
    """Dense polynomial in x with F_q(t) coefficients."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: FieldSpec, coeffs: Sequence[RatFunc] = ()):
        cs = list(coeffs)
        while cs and cs[-1].is_zero():
            cs.pop()
        self.field = field
        self.coeffs: tuple[RatFunc, ...] = tuple(cs)

    @classmethod
    def constant(cls, c: RatFunc) -> "XPoly":
        return cls(c.field, [c])

    @classmethod
    def monomial(cls, c: RatFunc, k: int) -> "XPoly":
        F = c.field
        return cls(F, [_rzero(F)] * k + [c])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __bool__(self):
        return bool(self.coeffs)

    def coeff(self, i: int) -> RatFunc:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return _rzero(self.field)

    def __eq__(self, other):
        if not isinstance(other, XPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def _coerce(self, other) -> "XPoly":
        if isinstance(other, XPoly):
            return other
        if isinstance(other, int):
            return XPoly(self.field, [self.field.const_from_int(other)])
        if isinstance(other, RatFunc):
            return XPoly(self.field, [other])
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = [x + y for x, y in zip(a, b)] + list(a[len(b):])
        return XPoly(self.field, out)

    __radd__ = __add__

    def __neg__(self):
        return XPoly(self.field, [-c for c in self.coeffs])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return XPoly(self.field)
        out = [_rzero(self.field)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        out[i + j] = out[i + j] + x * y
        return XPoly(self.field, out)

    __rmul__ = __mul__

    def scale(self, c: RatFunc) -> "XPoly":
        if c.is_zero():
            return XPoly(self.field)
        return XPoly(self.field, [x * c for x in self.coeffs])

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not other.coeffs:
            raise ZeroDenominator("division by the zero polynomial")
        if other.degree != 0:
            raise ValidationError("series numerators and denominators must be polynomials in x")
        return self.scale(other.coeffs[0].inverse())

    def __pow__(self, k: int) -> "XPoly":
        if k < 0:
            if self.degree == 0:
                return XPoly(self.field, [self.coeffs[0] ** k])
            raise ValidationError("negative powers of x-polynomials are not polynomials")
        out = XPoly(self.field, [_rone(self.field)])
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def __divmod__(self, other: "XPoly"):
        if not other.coeffs:
            raise ZeroDenominator("division by the zero x-polynomial")
        F = self.field
        db = other.degree
        if self.degree < db:
            return XPoly(F), self
        inv = other.coeffs[-1].inverse()
        r = list(self.coeffs)
        q = [_rzero(F)] * (len(r) - db)
        for k in range(len(r) - 1 - db, -1, -1):
            c = r[k + db]
            if c:
                c = c * inv
                q[k] = c
                for i in range(db + 1):
                    if other.coeffs[i]:
                        r[k + i] = r[k + i] - c * other.coeffs[i]
        return XPoly(F, q), XPoly(F, r[:db])

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def monic(self) -> "XPoly":
        if not self.coeffs:
            return self
        return self.scale(self.coeffs[-1].inverse())

    def truncate(self, n: int) -> "XPoly":
        return XPoly(self.field, self.coeffs[:n])

    def to_str(self, var: str = "x") -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            if i == 0:
                terms.append(str(c))
                continue
            mono = var if i == 1 else f"{var}^{i}"
            if c.is_one():
                terms.append(mono)
            elif c.is_compound():
                terms.append(f"({c})*{mono}")
            else:
                terms.append(f"{c}*{mono}")
        return "+".join(terms) if terms else "0"

    __str__ = to_str

    def __repr__(self):
        return f"XPoly({self})"


def xpoly_gcd(a: XPoly, b: XPoly) -> XPoly:
    while b.coeffs:
        a, b = b, (a % b).monic()
    return a.monic()


def _normalize_den0(num: XPoly, den: XPoly) -> tuple[XPoly, XPoly]:
    c0 = den.coeff(0)
    if c0.is_zero():
        raise ValidationError("series denominator vanishes at x = 0")
    if c0.is_one():
        return num, den
    inv = c0.inverse()
    return num.scale(inv), den.scale(inv)


class RationalSeries:
    """F(x) = num(x)/den(x) in F_q(t)(x), reduced, with den(0) == 1."""

    __slots__ = ("field", "num", "den", "_stream")

    def __init__(self, num: XPoly, den: XPoly):
        if not den.coeffs:
            raise ValidationError("series denominator is zero")
        g = xpoly_gcd(num, den) if num.coeffs else XPoly(den.field, [_rone(den.field)])
        if g.degree > 0:
            num, den = num // g, den // g
        if not num.coeffs:
            den = XPoly(den.field, [_rone(den.field)])
        self.num, self.den = _normalize_den0(num, den)
        self.field = den.field
        self._stream: list[RatFunc] = []

    @classmethod
    def _from_reduced(cls, num: XPoly, den: XPoly) -> "RationalSeries":
        obj = cls.__new__(cls)
        obj.num, obj.den = _normalize_den0(num, den)
        obj.field = den.field
        obj._stream = []
        return obj

    @classmethod
    def from_strings(cls, field: FieldSpec, num: str, den: str = "1",
                     num_line: int = 1, den_line: int = 1) -> "RationalSeries":
        return cls(parse_xpoly(field, num, num_line), parse_xpoly(field, den, den_line))

    @classmethod
    def geometric(cls, mu: RatFunc, delta: RatFunc, shift: int = 0, step: int = 1) -> "RationalSeries":
        """mu * x**shift / (1 - delta * x**step)."""
        F = mu.field
        den = XPoly(F, [_rone(F)]) - XPoly.monomial(delta, step)
        return cls(XPoly.monomial(mu, shift), den)

    def __eq__(self, other):
        if not isinstance(other, RationalSeries):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __add__(self, other: "RationalSeries") -> "RationalSeries":
        return RationalSeries(self.num * other.den + other.num * self.den, self.den * other.den)

    def __str__(self):
        return f"({self.num})/({self.den})"

    def __repr__(self):
        return f"RationalSeries({self})"

    @property
    def order(self) -> int:
        if not self.num.coeffs:
            return 0
        return max(self.den.degree, self.num.degree + 1)

    @property
    def polynomial_part_degree(self) -> int:
        """Degree of the polynomial part of num/den (-1 if none)."""
        return self.num.degree - self.den.degree if self.num.degree >= self.den.degree else -1

    def coefficients(self, count: int) -> list[RatFunc]:
        """a_0, ..., a_{count-1}, computed by the recurrence and cached."""
        s = self._stream
        if len(s) >= count:
            return s[:count]
        F = self.field
        dens = [(j, d) for j, d in enumerate(self.den.coeffs) if j > 0 and d]
        num = self.num.coeffs
        for n in range(len(s), count):
            acc = num[n] if n < len(num) else _rzero(F)
            for j, d in dens:
                if j > n:
                    break
                prev = s[n - j]
                if prev:
                    acc = acc - d * prev
            s.append(acc)
        return s[:count]

    def recurrence(self) -> list[RatFunc]:
        """[d_1, ..., d_k]: a_{n+k} = -(d_1 a_{n+k-1} + ... + d_k a_n) for n >= 0."""
        k = self.order
        return [self.den.coeff(j) for j in range(1, k + 1)]


def parse_xpoly(field: FieldSpec, text: str, line: int = 1) -> XPoly:
    """Parse a polynomial in ``x`` whose coefficients are scalar expressions."""
    node = grammar.parse_expr(text, line)
    one = XPoly(field, [_rone(field)])
    env = {"x": XPoly.monomial(_rone(field), 1), "t": one.scale(field.t())}
    if not field.prime:
        env["u"] = one.scale(field.const(field.u))

    def lift(n: int) -> XPoly:
        return XPoly(field, [field.const_from_int(n)])

    try:
        return grammar.evaluate(node, env, lift)
    except ZeroDivisionError as exc:
        raise ZeroDenominator(f"division by zero in {text!r}") from exc


# -- linear recurrence form ---------------------------------------------------------

@dataclass
class LinRecState:
    """a_n = w . A^n . v for all n >= 0 (row vector w, square A, column v)."""

    w: list[RatFunc]
    A: list[list[RatFunc]]
    v: list[RatFunc]

    @property
    def order(self) -> int:
        return len(self.A)

    def coefficient(self, n: int) -> RatFunc:
        """w A^n v by square-and-multiply on the matrix."""
        k = self.order
        if k == 0:
            raise ValueError("empty recurrence state")
        F = self.w[0].field
        vec = list(self.v)
        P = [row[:] for row in self.A]
        while n:
            if n & 1:
                vec = _matvec(P, vec, F)
            n >>= 1
            if n:
                P = _matmul(P, P, F)
        acc = _rzero(F)
        for a, b in zip(self.w, vec):
            if a and b:
                acc = acc + a * b
        return acc

    def section(self, M: int, b: int) -> "LinRecState":
        """State (w, A^M, A^b v) generating a_{Mn+b}."""
        F = self.w[0].field
        AM = _matpow(self.A, M, F)
        vb = list(self.v)
        for _ in range(b):
            vb = _matvec(self.A, vb, F)
        return LinRecState(list(self.w), AM, vb)


def _matvec(A, v, F):
    out = []
    for row in A:
        acc = _rzero(F)
        for a, b in zip(row, v):
            if a and b:
                acc = acc + a * b
        out.append(acc)
    return out


def _matmul(A, B, F):
    cols = list(zip(*B))
    return [[_dot(row, col, F) for col in cols] for row in A]


def _dot(a, b, F):
    acc = _rzero(F)
    for x, y in zip(a, b):
        if x and y:
            acc = acc + x * y
    return acc


def _matpow(A, n, F):
    k = len(A)
    R = [[_rone(F) if i == j else _rzero(F) for j in range(k)] for i in range(k)]
    P = A
    while n:
        if n & 1:
            R = _matmul(R, P, F)
        n >>= 1
        if n:
            P = _matmul(P, P, F)
    return R


def series_to_linrec(F: RationalSeries) -> LinRecState:
    """Companion form: v holds a_0..a_{k-1}, A shifts the window, w reads slot 0."""
    k = F.order
    fld = F.field
    if k == 0:
        return LinRecState([_rone(fld)], [[_rzero(fld)]], [_rzero(fld)])
    d = F.recurrence()
    A = [[_rzero(fld)] * k for _ in range(k)]
    for i in range(k - 1):
        A[i][i + 1] = _rone(fld)
    A[k - 1] = [-d[k - 1 - j] for j in range(k)]
    v = F.coefficients(k)
    w = [_rone(fld)] + [_rzero(fld)] * (k - 1)
    return LinRecState(w, A, v)


def coefficient_at(F: RationalSeries, n: int) -> RatFunc:
    """Exact a_n: x^n reduced modulo the characteristic polynomial by
    square-and-multiply (the companion-matrix power in polynomial form)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    k = F.order
    fld = F.field
    if k == 0:
        return _rzero(fld)
    if n < k or n < len(F._stream):
        return F.coefficients(n + 1)[n]
    d = F.recurrence()
    # chi(z) = z^k + d_1 z^{k-1} + ... + d_k
    chi = XPoly(fld, [d[k - 1 - i] for i in range(k)] + [_rone(fld)])
    result = XPoly(fld, [_rone(fld)])
    base = XPoly.monomial(_rone(fld), 1)
    e = n
    while e:
        if e & 1:
            result = (result * base) % chi
        e >>= 1
        if e:
            base = (base * base) % chi
    init = F.coefficients(k)
    acc = _rzero(fld)
    for c, a in zip(result.coeffs, init):
        if c and a:
            acc = acc + c * a
    return acc


def section(F: RationalSeries, M: int, b: int) -> RationalSeries:
    """The rational series sum_n a_{Mn+b} y^n.

    Its order is at most ``F.order`` (it is generated by (w, A^M, A^b v)),
    so Berlekamp-Massey on 2*order section terms recovers it exactly.
    """
    if M < 1 or not 0 <= b < M:
        raise ValueError("need M >= 1 and 0 <= b < M")
    fld = F.field
    k = F.order
    if k == 0:
        return RationalSeries(XPoly(fld), XPoly(fld, [_rone(fld)]))
    terms = F.coefficients(M * (2 * k - 1) + b + 1)[b::M][:2 * k]
    C = berlekamp_massey(terms, _rzero(fld), _rone(fld))
    L = len(C) - 1
    conn = XPoly(fld, C)
    S = XPoly(fld, terms[:max(L, 1)])
    num = (conn * S).truncate(L)
    return RationalSeries(num, conn)


# -- Polya-type decomposition -------------------------------------------------------

@dataclass
class PolyaDecomposition:
    """F(x) = P(x) + sum_b mu_b x^(b+MN) / (1 - delta_b x^M)."""

    M: int
    N: int
    P: XPoly
    mu: tuple[RatFunc, ...]
    delta: tuple[RatFunc, ...]
    memberships: dict = dc_field(default_factory=dict)

    @property
    def field(self) -> FieldSpec:
        return self.mu[0].field

    def coefficient(self, n: int) -> RatFunc:
        M, N = self.M, self.N
        if n < M * N:
            return self.P.coeff(n)
        b = n % M
        j = (n - b - M * N) // M
        mu = self.mu[b]
        if mu.is_zero():
            return mu
        return mu * self.delta[b] ** j

    def stream(self, count: int) -> list[RatFunc]:
        return [self.coefficient(n) for n in range(count)]

    def to_dict(self) -> dict:
        out = {
            "M": self.M, "N": self.N, "P": str(self.P),
            "mu": [str(m) for m in self.mu], "delta": [str(d) for d in self.delta],
        }
        if self.memberships:
            out["membership"] = self.memberships
        return out


@dataclass
class NotGeometric:
    """Every M up to the budget has a section that is never eventually geometric.

    ``witnesses`` holds (M, b, n, reason) records; the section b of modulus
    M fails the forced ratio at index n (or the exact identity check).
    """

    M_max: int
    witnesses: list[tuple[int, int, int, str]]

    def to_dict(self) -> dict:
        return {"verdict": "NotGeometric", "M_max": self.M_max,
                "witnesses": [list(w) for w in self.witnesses]}


@dataclass
class BudgetExceeded:
    """Some modulus works, but only with N larger than the budget."""

    M_max: int
    N_max: int
    candidates: list[tuple[int, int]]

    def to_dict(self) -> dict:
        return {"verdict": "BudgetExceeded", "M_max": self.M_max, "N_max": self.N_max,
                "candidates": [list(c) for c in self.candidates]}


def reconstruct(D: PolyaDecomposition) -> RationalSeries:
    """Rebuild F from a decomposition, grouping the terms by delta.

    Distinct deltas give pairwise coprime denominators 1 - delta x^M, so
    reducing each group separately yields the canonical reduced fraction
    without a global gcd.
    """
    fld = D.field
    one = XPoly(fld, [_rone(fld)])
    groups: dict[RatFunc, XPoly] = {}
    order: list[RatFunc] = []
    for b, (mu, delta) in enumerate(zip(D.mu, D.delta)):
        if mu.is_zero():
            continue
        if delta.is_zero():
            raise ValidationError("delta_b must be nonzero")
        if delta not in groups:
            groups[delta] = XPoly(fld)
            order.append(delta)
        groups[delta] = groups[delta] + XPoly.monomial(mu, b + D.M * D.N)
    parts = []
    for delta in order:
        n_d = groups[delta]
        d_d = one - XPoly.monomial(delta, D.M)
        g = xpoly_gcd(n_d, d_d)
        if g.degree > 0:
            n_d, d_d = n_d // g, d_d // g
        parts.append((n_d, d_d))
    den = one
    for _, d_d in parts:
        den = den * d_d
    num = D.P * den
    for i, (n_d, _) in enumerate(parts):
        term = n_d
        for j, (_, d_j) in enumerate(parts):
            if j != i:
                term = term * d_j
        num = num + term
    if not num.coeffs:
        return RationalSeries._from_reduced(XPoly(fld), one)
    return RationalSeries._from_reduced(num, den)


def reconstruct_and_verify(D: PolyaDecomposition) -> RationalSeries:
    """Reconstruct, then re-check the first coefficients against the
    decomposition's own closed form."""
    F = reconstruct(D)
    count = D.M * D.N + 2 * D.M + F.order + 1
    if F.coefficients(count) != D.stream(count):
        raise AssertionError("reconstruction disagrees with the decomposition")
    return F


def polya_decompose(F: RationalSeries, G: GroupSpec | None = None,
                    M_max: int = 64, N_max: int = 16
                    ) -> PolyaDecomposition | NotGeometric | BudgetExceeded:
    """Search M = 1, 2, ... for a decomposition with every section
    a_{Mn+b} geometric from n = N on.

    For a fixed M let N0 be the least N with M*N beyond the polynomial part
    of F.  Past that point each section is a linear recurrence with an
    invertible companion matrix, so if it is ever geometric it is geometric
    from N0 on with the ratio forced by two consecutive terms.  A failed
    ratio check is therefore an exact witness against M; a candidate that
    passes is certified by comparing reduced fractions.  N is then lowered
    while the earlier terms still fit.
    """
    if M_max < 1 or N_max < 0:
        raise ValueError("budgets must be positive")
    fld = F.field
    degQ = F.polynomial_part_degree
    witnesses: list[tuple[int, int, int, str]] = []
    over_budget: list[tuple[int, int]] = []
    for M in range(1, M_max + 1):
        N0 = degQ // M + 1 if degQ >= 0 else 0
        a = F.coefficients(M * (N0 + 3))
        mu, delta = [], []
        failed = None
        for b in range(M):
            s0, s1, s2 = a[M * N0 + b], a[M * (N0 + 1) + b], a[M * (N0 + 2) + b]
            if s0.is_zero():
                if s1:
                    failed = (M, b, N0 + 1, "nonzero after zero")
                elif s2:
                    failed = (M, b, N0 + 2, "nonzero after zero")
                mu.append(_rzero(fld))
                delta.append(_rone(fld))
            else:
                if s1.is_zero():
                    failed = (M, b, N0 + 1, "zero after nonzero")
                else:
                    d = s1 / s0
                    if s2 != d * s1:
                        failed = (M, b, N0 + 2, "ratio changes")
                    mu.append(s0)
                    delta.append(d)
            if failed:
                break
        if failed:
            witnesses.append(failed)
            continue
        cand = PolyaDecomposition(M, N0, XPoly(fld, a[:M * N0]), tuple(mu), tuple(delta))
        if reconstruct(cand) != F:
            witnesses.append((M, 0, N0, "identity fails"))
            continue
        cand = _lower_N(cand, a)
        if cand.N > N_max:
            over_budget.append((M, cand.N))
            continue
        if reconstruct(cand) != F:
            raise AssertionError("lowered decomposition lost the identity")
        if G is not None:
            cand.memberships = decomposition_memberships(cand, G)
        return cand
    if over_budget:
        return BudgetExceeded(M_max, N_max, over_budget)
    return NotGeometric(M_max, witnesses)


def _lower_N(D: PolyaDecomposition, a: Sequence[RatFunc]) -> PolyaDecomposition:
    M, N = D.M, D.N
    mu, delta = list(D.mu), list(D.delta)
    while N > 0:
        new_mu = []
        for b in range(M):
            prev = a[M * (N - 1) + b]
            if mu[b].is_zero():
                if prev:
                    return _with(D, N, mu, delta, a)
                new_mu.append(mu[b])
            else:
                if prev * delta[b] != mu[b]:
                    return _with(D, N, mu, delta, a)
                new_mu.append(prev)
        mu = new_mu
        N -= 1
    return _with(D, N, mu, delta, a)


def _with(D, N, mu, delta, a) -> PolyaDecomposition:
    fld = D.field
    return PolyaDecomposition(D.M, N, XPoly(fld, a[:D.M * N]), tuple(mu), tuple(delta))


def decomposition_memberships(D: PolyaDecomposition, G: GroupSpec) -> dict:
    """Which parts of D lie in G (delta_b) or G u {0} (mu_b, coefficients of P)."""

    def in_g0(c: RatFunc):
        if c.is_zero():
            return True, None
        cert = membership(c, G)
        return cert is not None, cert

    delta_ok, mu_ok, p_ok = [], [], []
    for d in D.delta:
        cert = membership(d, G)
        delta_ok.append(cert is not None)
    for m in D.mu:
        mu_ok.append(in_g0(m)[0])
    for n in range(D.M * D.N):
        p_ok.append(in_g0(D.P.coeff(n))[0])
    return {"delta_in_G": delta_ok, "mu_in_G0": mu_ok, "P_in_G0": p_ok,
            "all": all(delta_ok) and all(mu_ok) and all(p_ok)}


# -- return sets of series --------------------------------------------------------

@dataclass
class SeriesReturnSets:
    """N = {n : a_n in G} and N0 = {n : a_n in G u {0}} on [0, horizon]."""

    horizon: int
    N: list[int]
    N0: list[int]
    report_N: object
    report_N0: object


def return_set_of_series(F: RationalSeries, G: GroupSpec, H: int) -> SeriesReturnSets:
    from .retset import structure_fit

    if H < 1:
        raise ValueError("horizon must be at least 1")
    coeffs = F.coefficients(H + 1)
    members, members0 = [], []
    for n, c in enumerate(coeffs):
        if c.is_zero():
            members0.append(n)
        elif membership(c, G) is not None:
            members.append(n)
            members0.append(n)
    return SeriesReturnSets(H, members, members0, structure_fit(members, H), structure_fit(members0, H))
