"""Small exact integer-lattice toolkit: row clearing, rational rank,
integer kernels via column Hermite reduction, and LLL reduction.

Matrices are plain lists of lists of ``int``/``Fraction``; sizes in this
package are tiny (a handful of rows and columns), so clarity beats speed.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce
from typing import Sequence

Matrix = list[list[int]]


def lcm(values) -> int:
    return reduce(lambda p, q: p * q // math.gcd(p, q), values, 1)


def clear_denominators(row: Sequence[Fraction], primitive: bool = True) -> list[int]:
    """Scale a rational row to integers (divided by its content if ``primitive``)."""
    den = lcm(Fraction(x).denominator for x in row)
    ints = [int(Fraction(x) * den) for x in row]
    if primitive:
        g = reduce(math.gcd, ints, 0)
        if g > 1:
            ints = [v // g for v in ints]
    return ints


def rational_rank(rows: Sequence[Sequence[Fraction]]) -> int:
    M = [[Fraction(x) for x in r] for r in rows]
    if not M:
        return 0
    ncols = len(M[0])
    rank = 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(M)) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        for i in range(len(M)):
            if i != rank and M[i][c] != 0:
                f = M[i][c] / M[rank][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[rank])]
        rank += 1
        if rank == len(M):
            break
    return rank


def solve_rational(rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> list[Fraction] | None:
    """Unique solution of ``rows @ x = rhs`` or ``None``.

    Returns ``None`` when the system is inconsistent or underdetermined.
    """
    M = [[Fraction(x) for x in r] + [Fraction(v)] for r, v in zip(rows, rhs)]
    if not M:
        return None
    ncols = len(M[0]) - 1
    rank = 0
    pivots = []
    for c in range(ncols):
        piv = next((i for i in range(rank, len(M)) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        inv = 1 / M[rank][c]
        M[rank] = [x * inv for x in M[rank]]
        for i in range(len(M)):
            if i != rank and M[i][c] != 0:
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[rank])]
        pivots.append(c)
        rank += 1
    if any(all(x == 0 for x in r[:-1]) and r[-1] != 0 for r in M):
        return None
    if rank < ncols:
        return None
    x = [Fraction(0)] * ncols
    for i, c in enumerate(pivots):
        x[c] = M[i][-1]
    return x


def _egcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def column_hermite(M: Matrix, ncols: int) -> tuple[Matrix, Matrix, int]:
    """Unimodular column reduction ``M U = H`` with ``H`` in column echelon form.

    Returns ``(H, U, r)`` where the first ``r`` columns of ``H`` are the
    pivot columns and the remaining ``ncols - r`` columns are zero.
    """
    A = [list(r) for r in M]
    U = [[int(i == j) for j in range(ncols)] for i in range(ncols)]

    def colop(c: int, j: int, x: int, y: int, u: int, v: int) -> None:
        # (col_c, col_j) <- (x col_c + y col_j, u col_c + v col_j)
        for R in (A, U):
            for row in R:
                ac, aj = row[c], row[j]
                row[c] = x * ac + y * aj
                row[j] = u * ac + v * aj

    c = 0
    for i in range(len(A)):
        if c >= ncols:
            break
        for j in range(c + 1, ncols):
            aj = A[i][j]
            if aj == 0:
                continue
            ac = A[i][c]
            if ac == 0:
                colop(c, j, 0, 1, 1, 0)
                continue
            g, x, y = _egcd(ac, aj)
            colop(c, j, x, y, aj // g, -(ac // g))
        if A[i][c] < 0:
            for R in (A, U):
                for row in R:
                    row[c] = -row[c]
        if A[i][c] != 0:
            c += 1
    return A, U, c


def integer_kernel(M: Matrix, ncols: int) -> list[list[int]]:
    """A basis of ``{v in Z^ncols : M v = 0}``."""
    if not M:
        return [[int(i == j) for i in range(ncols)] for j in range(ncols)]
    _, U, r = column_hermite(M, ncols)
    return [[U[i][j] for i in range(ncols)] for j in range(r, ncols)]


def _dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def lll_reduce(basis: Sequence[Sequence[int]], delta: Fraction = Fraction(3, 4)) -> list[list[int]]:
    """Exact LLL reduction of linearly independent integer vectors."""
    B = [list(map(int, b)) for b in basis]
    k = len(B)
    if k <= 1:
        return B

    def gram_schmidt():
        Bs: list[list[Fraction]] = []
        mu = [[Fraction(0)] * k for _ in range(k)]
        norms: list[Fraction] = []
        for i in range(k):
            v = [Fraction(x) for x in B[i]]
            for j in range(i):
                mu[i][j] = _dot(B[i], Bs[j]) / norms[j] if norms[j] else Fraction(0)
                v = [a - mu[i][j] * b for a, b in zip(v, Bs[j])]
            Bs.append(v)
            norms.append(_dot(v, v))
        return mu, norms

    mu, norms = gram_schmidt()
    i = 1
    while i < k:
        for j in range(i - 1, -1, -1):
            q = round(mu[i][j])
            if q:
                B[i] = [a - q * b for a, b in zip(B[i], B[j])]
                mu, norms = gram_schmidt()
        if norms[i] >= (delta - mu[i][i - 1] ** 2) * norms[i - 1]:
            i += 1
        else:
            B[i], B[i - 1] = B[i - 1], B[i]
            mu, norms = gram_schmidt()
            i = max(i - 1, 1)
    return B


def normalize_sign(v: Sequence[int]) -> tuple[int, ...]:
    """Flip the sign so the first nonzero entry is positive."""
    for x in v:
        if x != 0:
            return tuple(v) if x > 0 else tuple(-y for y in v)
    return tuple(v)


def smallest_vector(candidates: Sequence[Sequence[int]]) -> tuple[int, ...] | None:
    """Deterministic pick: smallest max-norm, ties broken lexicographically."""
    vs = [normalize_sign(v) for v in candidates if any(v)]
    if not vs:
        return None
    return min(vs, key=lambda v: (max(abs(x) for x in v), v))


def hadamard_bound(M: Matrix, rank_cap: int) -> int:
    """Upper bound on the entries of a Cramer kernel vector of ``M``.

    Any ``rho x rho`` minor with ``rho <= rank_cap`` is bounded by the product
    of the ``rho`` largest Euclidean row norms.
    """
    norms = sorted((math.sqrt(sum(x * x for x in r)) for r in M if any(r)), reverse=True)
    prod = 1.0
    for v in norms[:rank_cap]:
        prod *= v
    return int(math.floor(prod + 1e-9))
