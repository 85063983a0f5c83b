"""Exact arithmetic in F_q = F_p[u]/(m(u)) and in the rational function field F_q(t).

Elements of F_q are plain ints in ``range(q)``: the integer ``sum(c_i * p**i)``
encodes the class of ``sum(c_i * u**i)``.  For prime fields this is just the
residue mod p.  Polynomials (:class:`Poly`) and rational functions
(:class:`RatFunc`) are immutable and hashable; every operation returns a new
value in canonical form.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import grammar
from .errors import FieldError, ZeroArgument, ZeroDenominator, ZeroPolynomial

_MAX_TABLE_Q = 1 << 20
_MAX_EXT_Q = 1024


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for sp in small:
        if n % sp == 0:
            return n == sp
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _prime_factors(n: int) -> list[int]:
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


class FieldSpec:
    """The finite field F_q with q = p**ext_degree.

    ``modulus`` is the dense ascending coefficient list of an irreducible
    polynomial of degree ``ext_degree`` over F_p; it is required (and checked)
    when ``ext_degree > 1``.
    """

    __slots__ = ("p", "ext_degree", "modulus", "q", "prime",
                 "_add", "_exp", "_log", "_gen")

    def __init__(self, p: int, ext_degree: int = 1, modulus: Sequence[int] | None = None):
        if not is_prime(p):
            raise FieldError(f"characteristic {p} is not prime")
        if ext_degree < 1:
            raise FieldError("ext_degree must be at least 1")
        self.p = p
        self.ext_degree = ext_degree
        self.q = p ** ext_degree
        self.prime = ext_degree == 1
        self._exp = None
        self._log = None
        self._gen = None
        self._add = None
        if self.prime:
            if modulus is not None and len(modulus) > 2:
                raise FieldError("a modulus of degree > 1 needs ext_degree > 1")
            self.modulus = None
            return
        if modulus is None:
            raise FieldError("extension fields need an explicit modulus")
        mod = [c % p for c in modulus]
        while mod and mod[-1] == 0:
            mod.pop()
        if len(mod) != ext_degree + 1:
            raise FieldError(f"modulus must have degree {ext_degree}")
        inv = pow(mod[-1], -1, p)
        mod = tuple(c * inv % p for c in mod)
        base = FieldSpec(p)
        if not is_irreducible(Poly(base, mod)):
            raise FieldError(f"modulus {list(mod)} is reducible over F_{p}")
        if self.q > _MAX_EXT_Q:
            raise FieldError(f"extension fields are table-driven; q must be <= {_MAX_EXT_Q}")
        self.modulus = mod
        self._build_ext_tables()

    # -- construction helpers -------------------------------------------------

    def _digits(self, a: int) -> list[int]:
        out = []
        for _ in range(self.ext_degree):
            out.append(a % self.p)
            a //= self.p
        return out

    def _undigits(self, ds: Sequence[int]) -> int:
        a = 0
        for c in reversed(ds):
            a = a * self.p + c
        return a

    def _slow_mul(self, a: int, b: int) -> int:
        p, e, mod = self.p, self.ext_degree, self.modulus
        da, db = self._digits(a), self._digits(b)
        prod = [0] * (2 * e - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] += x * y
        for k in range(len(prod) - 1, e - 1, -1):
            c = prod[k] % p
            if c:
                for i in range(e):
                    prod[k - e + i] -= c * mod[i]
            prod[k] = 0
        return self._undigits([c % p for c in prod[:e]])

    def _build_ext_tables(self) -> None:
        q, p = self.q, self.p
        self._add = [[self._undigits([(x + y) % p for x, y in zip(self._digits(a), self._digits(b))])
                      for b in range(q)] for a in range(q)]
        order_factors = _prime_factors(q - 1)
        for g in range(2, q):
            # g is primitive iff g^((q-1)/f) != 1 for every prime f | q-1
            if all(self._slow_pow(g, (q - 1) // f) != 1 for f in order_factors):
                break
        else:  # q == 2 cannot happen here since ext_degree > 1
            g = 1
        exp = [1] * (q - 1)
        for k in range(1, q - 1):
            exp[k] = self._slow_mul(exp[k - 1], g)
        log = [0] * q
        for k, v in enumerate(exp):
            log[v] = k
        self._exp, self._log, self._gen = exp, log, g

    def _slow_pow(self, a: int, k: int) -> int:
        r = 1
        while k:
            if k & 1:
                r = self._slow_mul(r, a)
            a = self._slow_mul(a, a)
            k >>= 1
        return r

    def _ensure_prime_tables(self) -> None:
        if self._exp is not None:
            return
        q = self.q
        if q > _MAX_TABLE_Q:
            raise FieldError(f"discrete-log tables need q <= {_MAX_TABLE_Q}")
        if q == 2:
            self._exp, self._log, self._gen = [1], [0, 0], 1
            return
        factors = _prime_factors(q - 1)
        g = next(g for g in range(2, q) if all(pow(g, (q - 1) // f, q) != 1 for f in factors))
        exp = [1] * (q - 1)
        for k in range(1, q - 1):
            exp[k] = exp[k - 1] * g % q
        log = [0] * q
        for k, v in enumerate(exp):
            log[v] = k
        self._exp, self._log, self._gen = exp, log, g

    # -- element arithmetic ---------------------------------------------------

    def element(self, n: int) -> int:
        """Image of the integer ``n`` in F_q."""
        return n % self.p

    @property
    def u(self) -> int:
        if self.prime:
            raise FieldError("the generator u only exists in extension fields")
        return self.p

    def add(self, a: int, b: int) -> int:
        if self.prime:
            return (a + b) % self.p
        return self._add[a][b]

    def neg(self, a: int) -> int:
        if self.prime:
            return -a % self.p
        return self._undigits([-c % self.p for c in self._digits(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.prime:
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        log = self._log
        return self._exp[(log[a] + log[b]) % (self.q - 1)]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDenominator("inverse of zero in F_q")
        if self.prime:
            return pow(a, -1, self.p)
        return self._exp[-self._log[a] % (self.q - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, k: int) -> int:
        if self.prime:
            if a == 0:
                if k < 0:
                    raise ZeroDenominator("negative power of zero")
                return 1 if k == 0 else 0
            return pow(a, k, self.p)
        if a == 0:
            if k < 0:
                raise ZeroDenominator("negative power of zero")
            return 1 if k == 0 else 0
        return self._exp[self._log[a] * k % (self.q - 1)]

    def generator(self) -> int:
        """A fixed primitive element of F_q* (base of :meth:`log`)."""
        if self.prime:
            self._ensure_prime_tables()
        return self._gen

    def log(self, a: int) -> int:
        """Discrete logarithm of ``a`` to the base :meth:`generator`, in [0, q-1)."""
        if a == 0:
            raise ZeroArgument("log of zero")
        if self.prime:
            self._ensure_prime_tables()
        return self._log[a]

    def exp(self, k: int) -> int:
        if self.prime:
            self._ensure_prime_tables()
        return self._exp[k % (self.q - 1)]

    def pth_root(self, a: int) -> int:
        """Inverse Frobenius: the unique b with b**p == a."""
        if self.prime:
            return a
        return self.pow(a, self.q // self.p)

    def elem_str(self, a: int) -> str:
        """Canonical text of an element: an int, or an ascending polynomial in u."""
        if self.prime:
            return str(a)
        return _dense_str(self._digits(a), "u", str)

    def elem_is_compound(self, a: int) -> bool:
        if self.prime:
            return False
        return sum(1 for c in self._digits(a) if c) > 1

    # -- value semantics ------------------------------------------------------

    def _key(self):
        return (self.p, self.ext_degree, self.modulus)

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        if self.prime:
            return f"FieldSpec(p={self.p})"
        return f"FieldSpec(p={self.p}, ext_degree={self.ext_degree}, modulus={list(self.modulus)})"

    # -- convenience constructors --------------------------------------------

    def poly(self, coeffs: Iterable[int]) -> "Poly":
        return Poly(self, coeffs)

    def t(self) -> "RatFunc":
        return RatFunc(Poly._new(self, (0, 1)))

    def const(self, c: int) -> "RatFunc":
        return RatFunc(Poly._new(self, (c,) if c else ()))

    def const_from_int(self, n: int) -> "RatFunc":
        return self.const(self.element(n))

    def rat(self, text: str) -> "RatFunc":
        return parse_scalar(self, text)


def _dense_str(coeffs: Sequence[int], var: str, cstr, compound=lambda c: False) -> str:
    terms = []
    for i, c in enumerate(coeffs):
        if not c:
            continue
        if i == 0:
            terms.append(cstr(c))
            continue
        mono = var if i == 1 else f"{var}^{i}"
        if c == 1:
            terms.append(mono)
        elif compound(c):
            terms.append(f"({cstr(c)})*{mono}")
        else:
            terms.append(f"{cstr(c)}*{mono}")
    return "+".join(terms) if terms else "0"


# -- dense polynomial kernels over prime fields (tuples of ints in [0, p)) -----

def _trim(cs: list[int]) -> tuple[int, ...]:
    n = len(cs)
    while n and cs[n - 1] == 0:
        n -= 1
    return tuple(cs[:n])


def _mul_prime(a: tuple, b: tuple, p: int) -> tuple:
    if not a or not b:
        return ()
    if len(a) < len(b):
        a, b = b, a
    if len(b) == 1:
        c = b[0]
        return tuple(x * c % p for x in a)
    if len(b) >= 24:
        return _mul_kronecker(a, b, p)
    res = [0] * (len(a) + len(b) - 1)
    for j, bj in enumerate(b):
        if bj:
            for i, ai in enumerate(a, j):
                res[i] += ai * bj
    return tuple(x % p for x in res)


def _mul_kronecker(a: tuple, b: tuple, p: int) -> tuple:
    bound = len(b) * (p - 1) ** 2
    width = (bound.bit_length() + 7) // 8
    ia = int.from_bytes(b"".join(c.to_bytes(width, "little") for c in a), "little")
    ib = int.from_bytes(b"".join(c.to_bytes(width, "little") for c in b), "little")
    n = len(a) + len(b) - 1
    raw = (ia * ib).to_bytes(n * width, "little")
    return tuple(int.from_bytes(raw[i * width:(i + 1) * width], "little") % p for i in range(n))


def _divmod_prime(a: tuple, b: tuple, p: int) -> tuple[tuple, tuple]:
    db = len(b) - 1
    if len(a) <= db:
        return (), a
    inv = pow(b[-1], -1, p)
    r = list(a)
    q = [0] * (len(a) - db)
    for k in range(len(a) - 1 - db, -1, -1):
        c = r[k + db] % p
        if c:
            c = c * inv % p
            q[k] = c
            for i in range(db):
                r[k + i] -= c * b[i]
    return tuple(q), _trim([x % p for x in r[:db]])


class Poly:
    """Dense univariate polynomial over F_q (ascending coefficients).

    The zero polynomial has ``coeffs == ()`` and degree -1.
    """

    __slots__ = ("field", "coeffs", "_hash")

    def __init__(self, field: FieldSpec, coeffs: Iterable[int] = ()):
        if field.prime:
            cs = [c % field.p for c in coeffs]
        else:
            cs = [_coerce_elem(field, c) for c in coeffs]
        self.field = field
        self.coeffs = _trim(cs)
        self._hash = None

    @classmethod
    def _new(cls, field: FieldSpec, coeffs: tuple) -> "Poly":
        obj = cls.__new__(cls)
        obj.field = field
        obj.coeffs = coeffs
        obj._hash = None
        return obj

    @classmethod
    def zero(cls, field: FieldSpec) -> "Poly":
        return cls._new(field, ())

    @classmethod
    def one(cls, field: FieldSpec) -> "Poly":
        return cls._new(field, (1,))

    @classmethod
    def x(cls, field: FieldSpec) -> "Poly":
        return cls._new(field, (0, 1))

    @classmethod
    def constant(cls, field: FieldSpec, c: int) -> "Poly":
        return cls._new(field, (c,) if c else ())

    # -- basic properties -----------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lc(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_one(self) -> bool:
        return self.coeffs == (1,)

    def __bool__(self):
        return bool(self.coeffs)

    def __len__(self):
        return len(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs and self.field == other.field
        if isinstance(other, int):
            return self.coeffs == Poly.constant(self.field, self.field.element(other)).coeffs
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.coeffs, self.field.p, self.field.ext_degree))
        return self._hash

    def __repr__(self):
        return f"Poly({self})"

    def to_str(self, var: str = "t") -> str:
        F = self.field
        return _dense_str(self.coeffs, var, F.elem_str, F.elem_is_compound)

    __str__ = to_str

    def n_terms(self) -> int:
        return sum(1 for c in self.coeffs if c)

    # -- ring operations ------------------------------------------------------

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            return other
        if isinstance(other, int):
            return Poly.constant(self.field, self.field.element(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        F = self.field
        if F.prime:
            p = F.p
            cs = [(x + y) % p for x, y in zip(a, b)]
        else:
            cs = [F.add(x, y) for x, y in zip(a, b)]
        cs.extend(a[len(b):])
        return Poly._new(F, _trim(cs))

    __radd__ = __add__

    def __neg__(self):
        F = self.field
        if F.prime:
            p = F.p
            return Poly._new(F, tuple(-c % p for c in self.coeffs))
        return Poly._new(F, tuple(F.neg(c) for c in self.coeffs))

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
        F = self.field
        if F.prime:
            return Poly._new(F, _mul_prime(self.coeffs, other.coeffs, F.p))
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly._new(F, ())
        res = [0] * (len(a) + len(b) - 1)
        add, mul = F.add, F.mul
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        res[i + j] = add(res[i + j], mul(x, y))
        return Poly._new(F, _trim(res))

    __rmul__ = __mul__

    def scale(self, c: int) -> "Poly":
        """Multiply by the field element ``c``."""
        F = self.field
        if c == 0:
            return Poly._new(F, ())
        if F.prime:
            p = F.p
            return Poly._new(F, tuple(x * c % p for x in self.coeffs))
        return Poly._new(F, tuple(F.mul(x, c) for x in self.coeffs))

    def shift(self, k: int) -> "Poly":
        """Multiply by the k-th power of the indeterminate."""
        if not self.coeffs:
            return self
        return Poly._new(self.field, (0,) * k + self.coeffs)

    def __divmod__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not other.coeffs:
            raise ZeroDenominator("polynomial division by zero")
        F = self.field
        if F.prime:
            q, r = _divmod_prime(self.coeffs, other.coeffs, F.p)
            return Poly._new(F, q), Poly._new(F, r)
        a, b = self.coeffs, other.coeffs
        db = len(b) - 1
        if len(a) <= db:
            return Poly._new(F, ()), self
        inv = F.inv(b[-1])
        r = list(a)
        q = [0] * (len(a) - db)
        for k in range(len(a) - 1 - db, -1, -1):
            c = r[k + db]
            if c:
                c = F.mul(c, inv)
                q[k] = c
                for i in range(db + 1):
                    r[k + i] = F.sub(r[k + i], F.mul(c, b[i]))
        return Poly._new(F, tuple(q)), Poly._new(F, _trim(r[:db]))

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def exact_div(self, other: "Poly") -> "Poly":
        q, r = divmod(self, other)
        if r:
            raise ValueError(f"{other} does not divide {self}")
        return q

    def __pow__(self, k: int) -> "Poly":
        if k < 0:
            raise ValueError("negative power of a polynomial; use RatFunc")
        result = Poly.one(self.field)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def powmod(self, k: int, m: "Poly") -> "Poly":
        result = Poly.one(self.field) % m
        base = self % m
        while k:
            if k & 1:
                result = (result * base) % m
            k >>= 1
            if k:
                base = (base * base) % m
        return result

    def monic(self) -> "Poly":
        if not self.coeffs or self.coeffs[-1] == 1:
            return self
        return self.scale(self.field.inv(self.coeffs[-1]))

    def derivative(self) -> "Poly":
        F = self.field
        cs = [F.mul(c, F.element(i)) for i, c in enumerate(self.coeffs)][1:]
        return Poly._new(F, _trim(cs))

    def __call__(self, x: int) -> int:
        F = self.field
        acc = 0
        for c in reversed(self.coeffs):
            acc = F.add(F.mul(acc, x), c)
        return acc

    def compose_power(self, k: int) -> "Poly":
        """f(t) -> f(t**k)."""
        if k == 1 or not self.coeffs:
            return self
        cs = [0] * ((len(self.coeffs) - 1) * k + 1)
        for i, c in enumerate(self.coeffs):
            cs[i * k] = c
        return Poly._new(self.field, tuple(cs))

    def sort_key(self) -> tuple:
        return self.coeffs


def _coerce_elem(field: FieldSpec, c) -> int:
    if isinstance(c, int) and 0 <= c < field.q:
        return c
    raise FieldError(f"{c!r} does not encode an element of F_{field.q}")


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd (zero only when both inputs are zero)."""
    while b.coeffs:
        a, b = b, a % b
    return a.monic()


def poly_xgcd(a: Poly, b: Poly) -> tuple[Poly, Poly, Poly]:
    """Return (g, s, t) with s*a + t*b == g, g monic."""
    F = a.field
    r0, r1 = a, b
    s0, s1 = Poly.one(F), Poly.zero(F)
    t0, t1 = Poly.zero(F), Poly.one(F)
    while r1.coeffs:
        q, r = divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if not r0.coeffs:
        return r0, s0, t0
    inv = F.inv(r0.lc)
    return r0.scale(inv), s0.scale(inv), t0.scale(inv)


# -- factorization --------------------------------------------------------------

def _pth_root_poly(f: Poly) -> Poly:
    F = f.field
    p = F.p
    cs = [F.pth_root(f.coeffs[i]) for i in range(0, len(f.coeffs), p)]
    return Poly._new(F, _trim(cs))


def _squarefree(f: Poly) -> list[tuple[Poly, int]]:
    """Square-free decomposition of a monic polynomial (characteristic p aware)."""
    F = f.field
    out: list[tuple[Poly, int]] = []
    if f.degree < 1:
        return out
    c = poly_gcd(f, f.derivative())
    w = f.exact_div(c)
    i = 1
    while w.degree > 0:
        y = poly_gcd(w, c)
        fac = w.exact_div(y)
        if fac.degree > 0:
            out.append((fac, i))
        w = y
        c = c.exact_div(y)
        i += 1
    if c.degree > 0:
        for g, m in _squarefree(_pth_root_poly(c)):
            out.append((g, m * F.p))
    return out


def _distinct_degree(f: Poly) -> list[tuple[Poly, int]]:
    F = f.field
    t = Poly.x(F)
    out = []
    h = t
    rest = f
    d = 1
    while rest.degree >= 2 * d:
        h = h.powmod(F.q, rest)
        g = poly_gcd(h - t, rest)
        if g.degree > 0:
            out.append((g, d))
            rest = rest.exact_div(g)
            h = h % rest
        d += 1
    if rest.degree > 0:
        out.append((rest, rest.degree))
    return out


def _equal_degree(f: Poly, d: int, rng: random.Random) -> list[Poly]:
    if f.degree == d:
        return [f]
    F = f.field
    q = F.q
    while True:
        a = Poly(F, [rng.randrange(q) for _ in range(f.degree)])
        if a.degree < 1:
            continue
        if q % 2:
            b = a.powmod((q ** d - 1) // 2, f) - 1
        else:
            # trace map to F_2 for characteristic 2
            b = a % f
            acc = b
            for _ in range(F.ext_degree * d - 1):
                b = (b * b) % f
                acc = acc + b
            b = acc
        g = poly_gcd(b, f)
        if 0 < g.degree < f.degree:
            return _equal_degree(g, d, rng) + _equal_degree(f.exact_div(g), d, rng)


def factor_poly(f: Poly, seed: int = 0) -> tuple[int, list[tuple[Poly, int]]]:
    """Factor ``f`` into a leading constant and monic irreducible powers.

    The factor list is sorted by ascending coefficient tuple, so output is
    reproducible; ``seed`` drives the randomized equal-degree splitting.
    """
    if not f.coeffs:
        raise ZeroPolynomial("cannot factor the zero polynomial")
    const = f.lc
    g = f.monic()
    rng = random.Random(seed)
    mult: dict[Poly, int] = {}
    for sq, m in _squarefree(g):
        for block, d in _distinct_degree(sq):
            for irr in _equal_degree(block, d, rng):
                mult[irr] = mult.get(irr, 0) + m
    factors = sorted(mult.items(), key=lambda kv: kv[0].coeffs)
    return const, factors


def is_irreducible(f: Poly) -> bool:
    """Rabin's test; constants are not irreducible."""
    n = f.degree
    if n < 1:
        return False
    if n == 1:
        return True
    F = f.field
    f = f.monic()
    t = Poly.x(F)
    q = F.q
    for r in _prime_factors(n):
        h = t.powmod(q ** (n // r), f)
        if poly_gcd(h - t, f).degree != 0:
            return False
    return t.powmod(q ** n, f) == t


# -- rational functions ---------------------------------------------------------

class RatFunc:
    """An element ``num/den`` of F_q(t) in reduced form with monic denominator."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: Poly, den: Poly | None = None):
        if den is None:
            self.num = num
            self.den = Poly.one(num.field)
            self._hash = None
            return
        r = normalize_rat(num, den)
        self.num, self.den, self._hash = r.num, r.den, None

    @classmethod
    def _new(cls, num: Poly, den: Poly) -> "RatFunc":
        obj = cls.__new__(cls)
        obj.num = num
        obj.den = den
        obj._hash = None
        return obj

    @property
    def field(self) -> FieldSpec:
        return self.num.field

    def is_zero(self) -> bool:
        return not self.num.coeffs

    def __bool__(self):
        return bool(self.num.coeffs)

    def is_one(self) -> bool:
        return self.num.coeffs == (1,) and self.den.coeffs == (1,)

    def is_constant(self) -> bool:
        return self.num.degree <= 0 and self.den.degree == 0

    def constant_value(self) -> int:
        """The F_q element of a constant rational function."""
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.num.lc

    def is_polynomial(self) -> bool:
        return self.den.coeffs == (1,)

    def __eq__(self, other):
        if isinstance(other, RatFunc):
            return self.num == other.num and self.den == other.den
        if isinstance(other, (int, Poly)):
            return self == self._coerce(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __repr__(self):
        return f"RatFunc({self})"

    def __str__(self):
        return self.to_str()

    def to_str(self, var: str = "t") -> str:
        ns = self.num.to_str(var)
        if self.den.coeffs == (1,):
            return ns
        ds = self.den.to_str(var)
        if self.num.n_terms() > 1:
            ns = f"({ns})"
        elif self.num.degree > 0 and self.num.lc != 1 and self.field.elem_is_compound(self.num.lc):
            ns = f"({ns})"
        if self.den.n_terms() > 1:
            ds = f"({ds})"
        return f"{ns}/{ds}"

    def is_compound(self) -> bool:
        """True when the canonical string needs parentheses as a factor."""
        s = self.to_str()
        return "+" in s or "/" in s

    def _coerce(self, other) -> "RatFunc":
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, int):
            F = self.field
            c = F.element(other)
            return RatFunc._new(Poly.constant(F, c), Poly.one(F))
        if isinstance(other, Poly):
            return RatFunc._new(other, Poly.one(other.field))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b, c, d = self.num, self.den, other.num, other.den
        if not a.coeffs:
            return other
        if not c.coeffs:
            return self
        if b.coeffs == (1,) and d.coeffs == (1,):
            return RatFunc._new(a + c, b)
        if b == d:
            n = a + c
            g = poly_gcd(n, b)
            if g.coeffs == (1,):
                return RatFunc._new(n, b)
            return RatFunc._new(n.exact_div(g), b.exact_div(g))
        g = poly_gcd(b, d)
        if g.coeffs == (1,):
            return RatFunc._new(a * d + c * b, b * d)
        db, dd = b.exact_div(g), d.exact_div(g)
        n = a * dd + c * db
        den = b * dd
        h = poly_gcd(n, g)
        if h.coeffs != (1,):
            n, den = n.exact_div(h), den.exact_div(h)
        return RatFunc._new(n, den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc._new(-self.num, self.den)

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
        a, b, c, d = self.num, self.den, other.num, other.den
        F = a.field
        if not a.coeffs or not c.coeffs:
            return RatFunc._new(Poly.zero(F), Poly.one(F))
        if b.coeffs == (1,) and d.coeffs == (1,):
            return RatFunc._new(a * c, b)
        if d.coeffs != (1,):
            g1 = poly_gcd(a, d)
            if g1.coeffs != (1,):
                a, d = a.exact_div(g1), d.exact_div(g1)
        if b.coeffs != (1,):
            g2 = poly_gcd(c, b)
            if g2.coeffs != (1,):
                c, b = c.exact_div(g2), b.exact_div(g2)
        return RatFunc._new(a * c, b * d)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if not self.num.coeffs:
            raise ZeroDenominator("inverse of zero in F_q(t)")
        lc = self.num.lc
        if lc == 1:
            return RatFunc._new(self.den, self.num)
        inv = self.field.inv(lc)
        return RatFunc._new(self.den.scale(inv), self.num.scale(inv))

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int) -> "RatFunc":
        if k < 0:
            return self.inverse() ** (-k)
        if k == 0:
            F = self.field
            return RatFunc._new(Poly.one(F), Poly.one(F))
        # powers of coprime polynomials stay coprime
        return RatFunc._new(self.num ** k, self.den ** k)

    def scale(self, c: int) -> "RatFunc":
        if c == 0:
            return RatFunc._new(Poly.zero(self.field), Poly.one(self.field))
        return RatFunc._new(self.num.scale(c), self.den)

    def height(self) -> int:
        return max(self.num.degree, self.den.degree)


def normalize_rat(num: Poly, den: Poly) -> RatFunc:
    """Reduce ``num/den`` to lowest terms with a monic denominator."""
    if not den.coeffs:
        raise ZeroDenominator("rational function with zero denominator")
    F = num.field
    if not num.coeffs:
        return RatFunc._new(Poly.zero(F), Poly.one(F))
    g = poly_gcd(num, den)
    if g.coeffs != (1,):
        num, den = num.exact_div(g), den.exact_div(g)
    lc = den.lc
    if lc != 1:
        inv = F.inv(lc)
        num, den = num.scale(inv), den.scale(inv)
    return RatFunc._new(num, den)


# -- places, valuations, heights ------------------------------------------------

@dataclass(frozen=True)
class Place:
    """A place of F_q(t): finite (monic irreducible ``pi``) or infinity (``pi is None``)."""

    pi: Poly | None = None

    @classmethod
    def infinity(cls) -> "Place":
        return cls(None)

    @classmethod
    def finite(cls, pi: Poly, check: bool = True) -> "Place":
        if check and (pi.lc != 1 or not is_irreducible(pi)):
            raise FieldError(f"{pi} is not monic irreducible")
        return cls(pi)

    @property
    def is_infinite(self) -> bool:
        return self.pi is None

    @property
    def degree(self) -> int:
        return 1 if self.pi is None else self.pi.degree

    def sort_key(self) -> tuple:
        return (1, ()) if self.pi is None else (0, self.pi.coeffs)

    def __str__(self):
        return "inf" if self.pi is None else str(self.pi)


def _multiplicity(f: Poly, pi: Poly) -> tuple[int, Poly]:
    k = 0
    while f.degree >= pi.degree:
        q, r = divmod(f, pi)
        if r.coeffs:
            break
        f = q
        k += 1
    return k, f


def valuation(f: RatFunc, v: Place) -> int:
    """Order of ``f`` at the place ``v``."""
    if f.is_zero():
        raise ZeroArgument("valuation of zero")
    if v.pi is None:
        return f.den.degree - f.num.degree
    return _multiplicity(f.num, v.pi)[0] - _multiplicity(f.den, v.pi)[0]


def weil_height(f: RatFunc) -> int:
    """max(deg num, deg den) of the reduced form."""
    if f.is_zero():
        raise ZeroArgument("height of zero")
    return max(f.num.degree, f.den.degree)


def support(f: RatFunc, seed: int = 0) -> list[Place]:
    """Finite places where ``f`` has nonzero valuation, in canonical order."""
    places = []
    for part in (f.num, f.den):
        if part.degree > 0:
            places.extend(Place(pi) for pi, _ in factor_poly(part, seed)[1])
    return sorted(set(places), key=Place.sort_key)


def split_over(f: RatFunc, places: Sequence[Place]) -> tuple[list[int], RatFunc]:
    """Valuations of ``f`` at finite ``places`` and the cofactor left over.

    The cofactor is ``f / prod(pi**v)``; it is a constant exactly when the
    finite support of ``f`` lies inside ``places``.
    """
    num, den = f.num, f.den
    vals = []
    for pl in places:
        a, num = _multiplicity(num, pl.pi)
        b, den = _multiplicity(den, pl.pi)
        vals.append(a - b)
    return vals, RatFunc._new(num, den)


# -- text ----------------------------------------------------------------------

def parse_scalar(field: FieldSpec, text: str, line: int = 1) -> RatFunc:
    """Parse a scalar-grammar string (variables ``t`` and, for extensions, ``u``)."""
    node = grammar.parse_expr(text, line)
    env = {"t": field.t()}
    if not field.prime:
        env["u"] = field.const(field.u)
    try:
        return grammar.evaluate(node, env, field.const_from_int)
    except ZeroDivisionError as exc:
        raise ZeroDenominator(f"division by zero in {text!r}") from exc

