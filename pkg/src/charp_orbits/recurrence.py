"""Linear recurrence sequences: integer companion data and Berlekamp-Massey.

:func:`berlekamp_massey` is generic over any field whose elements support
``+ - * /`` and truthiness (``Fraction``, :class:`~charp_orbits.ffield.RatFunc`).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence


def berlekamp_massey(seq: Sequence[Any], zero: Any, one: Any) -> list[Any]:
    """Shortest connection polynomial of ``seq``.

    Returns ``C = [1, c_1, ..., c_L]`` with
    ``sum(C[j] * seq[n - j] for j in range(L + 1)) == 0`` for ``L <= n < len(seq)``.
    If the sequence satisfies some recurrence of order at most ``len(seq) // 2``
    the result is its minimal one.
    """
    C = [one]
    B = [one]
    L = 0
    m = 1
    b = one
    for n in range(len(seq)):
        d = seq[n]
        for j in range(1, L + 1):
            d = d + C[j] * seq[n - j]
        if not d:
            m += 1
            continue
        coef = d / b
        T = list(C)
        need = len(B) + m
        if len(C) < need:
            C = C + [zero] * (need - len(C))
        for j, bj in enumerate(B):
            C[j + m] = C[j + m] - coef * bj
        if 2 * L <= n:
            L = n + 1 - L
            B = T
            b = d
            m = 1
        else:
            m += 1
    C = C[:L + 1] + [zero] * max(0, L + 1 - len(C))
    return C


@dataclass(frozen=True)
class IntRecurrence:
    """Integer sequence b with b(n+k) = coeffs[0]*b(n+k-1) + ... + coeffs[k-1]*b(n).

    ``initial`` holds b(0), ..., b(k-1).  Order 0 (empty data) is the zero sequence.
    """

    coeffs: tuple[int, ...]
    initial: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))
        object.__setattr__(self, "initial", tuple(int(c) for c in self.initial))
        if len(self.coeffs) != len(self.initial):
            raise ValueError("coeffs and initial values must have the same length")

    @property
    def order(self) -> int:
        return len(self.coeffs)

    def values(self, count: int) -> list[int]:
        k = self.order
        if k == 0:
            return [0] * count
        out = list(self.initial[:count])
        while len(out) < count:
            out.append(sum(c * out[-1 - j] for j, c in enumerate(self.coeffs)))
        return out

    def at(self, n: int) -> int:
        return self.values(n + 1)[n]

    def characteristic(self) -> list[int]:
        """Ascending coefficients of z^k - c_1 z^(k-1) - ... - c_k."""
        return [-c for c in reversed(self.coeffs)] + [1]

    @classmethod
    def from_terms(cls, terms: Sequence[int]) -> "IntRecurrence":
        """Minimal integer recurrence generating ``terms``.

        Uses Berlekamp-Massey over the rationals; an integer sequence with a
        rational generating function has a minimal recurrence with integer
        coefficients, which is asserted here.
        """
        C = berlekamp_massey([Fraction(x) for x in terms], Fraction(0), Fraction(1))
        coeffs = []
        for c in C[1:]:
            if c.denominator != 1:
                raise ValueError("terms do not admit an integer recurrence of this length")
            coeffs.append(-int(c))
        k = len(coeffs)
        return cls(tuple(coeffs), tuple(terms[:k]))

    def to_dict(self) -> dict:
        return {"coeffs": list(self.coeffs), "initial": list(self.initial)}
