"""Integer matrix algebra: Hermite normal form with transforms, integer
linear solving, left kernels and lattice reduction.

Matrices are lists of row lists of Python ints; nothing here uses floats.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

Matrix = list[list[int]]


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> Matrix:
    cols = list(zip(*B)) if B else []
    return [[sum(a * b for a, b in zip(row, col)) for col in cols] for row in A]


def vecmat(v: Sequence[int], A: Sequence[Sequence[int]]) -> list[int]:
    """Row vector times matrix."""
    if not A:
        return []
    out = [0] * len(A[0])
    for c, row in zip(v, A):
        if c:
            for j, a in enumerate(row):
                out[j] += c * a
    return out


def matvec(A: Sequence[Sequence[int]], v: Sequence[int]) -> list[int]:
    return [sum(a * b for a, b in zip(row, v)) for row in A]


def hnf(A: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix, list[int]]:
    """Row Hermite normal form.

    Returns ``(H, U, pivots)`` with ``U @ A == H``, ``U`` unimodular, ``H`` in
    row echelon form with positive pivots, entries above each pivot reduced
    into ``[0, pivot)`` and zero rows last.  ``pivots[i]`` is the pivot column
    of row ``i``; ``len(pivots)`` is the rank.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    H = [list(row) for row in A]
    U = identity(m)
    pivots: list[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        while True:
            nz = [i for i in range(r, m) if H[i][c] != 0]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(H[i][c]))
            if i0 != r:
                H[r], H[i0] = H[i0], H[r]
                U[r], U[i0] = U[i0], U[r]
            done = True
            piv = H[r][c]
            for i in range(r + 1, m):
                if H[i][c]:
                    f = H[i][c] // piv
                    if f:
                        H[i] = [x - f * y for x, y in zip(H[i], H[r])]
                        U[i] = [x - f * y for x, y in zip(U[i], U[r])]
                    if H[i][c]:
                        done = False
            if done:
                break
        if all(H[i][c] == 0 for i in range(r, m)):
            continue
        if H[r][c] < 0:
            H[r] = [-x for x in H[r]]
            U[r] = [-x for x in U[r]]
        piv = H[r][c]
        for i in range(r):
            f = H[i][c] // piv
            if f:
                H[i] = [x - f * y for x, y in zip(H[i], H[r])]
                U[i] = [x - f * y for x, y in zip(U[i], U[r])]
        pivots.append(c)
        r += 1
    return H, U, pivots


def rank(A: Sequence[Sequence[int]]) -> int:
    return len(hnf(A)[2]) if A else 0


def solve_left(A: Sequence[Sequence[int]], b: Sequence[int]) -> list[int] | None:
    """An integer row vector ``x`` with ``x @ A == b``, or ``None``."""
    m = len(A)
    if m == 0:
        return [] if all(v == 0 for v in b) else None
    H, U, pivots = hnf(A)
    z = [0] * m
    residual = list(b)
    for i, c in enumerate(pivots):
        q, rem = divmod(residual[c], H[i][c])
        if rem:
            return None
        z[i] = q
        if q:
            residual = [x - q * y for x, y in zip(residual, H[i])]
    if any(residual):
        return None
    return vecmat(z, U)


def left_kernel(A: Sequence[Sequence[int]]) -> Matrix:
    """A basis (rows, in Hermite form) of ``{x in Z^m : x @ A == 0}``."""
    m = len(A)
    if m == 0:
        return []
    H, U, pivots = hnf(A)
    basis = U[len(pivots):]
    if not basis:
        return []
    return [row for row in hnf(basis)[0] if any(row)]


def reduce_mod(v: Sequence[int], basis_hnf: Sequence[Sequence[int]]) -> list[int]:
    """Reduce ``v`` modulo the lattice spanned by Hermite-form rows.

    Coordinates at pivot columns end up in ``[0, pivot)``, which gives a
    canonical coset representative.
    """
    v = list(v)
    for row in basis_hnf:
        c = next(j for j, x in enumerate(row) if x)
        f = v[c] // row[c]
        if f:
            v = [x - f * y for x, y in zip(v, row)]
    return v


def in_lattice(v: Sequence[int], basis_hnf: Sequence[Sequence[int]]) -> bool:
    return not any(reduce_mod(v, basis_hnf))


def det(A: Sequence[Sequence[int]]) -> int:
    """Bareiss fraction-free determinant."""
    n = len(A)
    if n == 0:
        return 1
    M = [list(row) for row in A]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k]:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def charpoly(A: Sequence[Sequence[int]]) -> list[int]:
    """Characteristic polynomial ``det(zI - A)`` as ascending integer coefficients.

    Faddeev-LeVerrier over the rationals; the result is integral.
    """
    n = len(A)
    Af = [[Fraction(x) for x in row] for row in A]
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    M = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        AM = [[sum(Af[i][l] * M[l][j] for l in range(n)) for j in range(n)] for i in range(n)]
        M = [[AM[i][j] + (coeffs[n - k + 1] if i == j else 0) for j in range(n)] for i in range(n)]
        AM = [[sum(Af[i][l] * M[l][j] for l in range(n)) for j in range(n)] for i in range(n)]
        coeffs[n - k] = -sum(AM[i][i] for i in range(n)) / k
    out = []
    for c in coeffs:
        assert c.denominator == 1
        out.append(int(c))
    return out


def primitive(v: Sequence[int]) -> list[int]:
    """Divide by the content and make the first nonzero entry positive."""
    g = 0
    for x in v:
        g = gcd(g, x)
    if g == 0:
        return list(v)
    v = [x // g for x in v]
    first = next(x for x in v if x)
    return v if first > 0 else [-x for x in v]
