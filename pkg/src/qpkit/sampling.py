"""Seeded generators of random test instances (frequency matrices, spectra)."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .independence import VerdictKind, relation_search_bound
from .number_field import FieldScalar, FrequencyMatrix, sqrt
from .qp import ParentSpectrum, TrigPolynomial

__all__ = [
    "random_rational",
    "random_matrix",
    "certified_matrix",
    "random_spectrum",
    "random_polynomial",
    "SQRT2_ROW",
]

SQRT2_ROW = FrequencyMatrix.row([1, sqrt(2)])


def random_rational(rng: np.random.Generator, height: int = 5) -> Fraction:
    """Numerator in ``[-height, height]``, denominator in ``[1, height]``."""
    return Fraction(int(rng.integers(-height, height + 1)), int(rng.integers(1, height + 1)))


def random_matrix(rng: np.random.Generator, max_d: int = 3, max_n: int = 4, height: int = 5,
                  fields=(1, 2, 5)) -> FrequencyMatrix:
    """Entries ``a + b sqrt(m)`` with ``a``, ``b`` of height at most ``height``."""
    m = int(rng.choice(fields))
    d = int(rng.integers(1, max_d + 1))
    n = int(rng.integers(1, max_n + 1))
    rows = []
    for _ in range(d):
        row = []
        for _ in range(n):
            a = random_rational(rng, height)
            b = random_rational(rng, height) if m > 1 else 0
            row.append(FieldScalar(a, b, m))
        rows.append(row)
    return FrequencyMatrix(rows, m)


def certified_matrix(rng: np.random.Generator, bound: int = 10, **kw) -> tuple[FrequencyMatrix, int]:
    """Draw until both relation kinds have a search certificate ``<= bound``.

    Returns the matrix and the number of draws it took. A relation search
    with coefficient bound ``bound`` is then complete for that matrix.
    """
    draws = 0
    while True:
        P = random_matrix(rng, **kw)
        draws += 1
        if (relation_search_bound(P, VerdictKind.Q_RANK) <= bound
                and relation_search_bound(P, VerdictKind.Z_MOD_ZD) <= bound):
            return P, draws


def random_spectrum(rng: np.random.Generator, n: int, terms: int, max_degree: int,
                    scale: float = 1.0) -> ParentSpectrum:
    coeffs = {}
    for _ in range(terms):
        k = tuple(int(v) for v in rng.integers(-max_degree, max_degree + 1, size=n))
        re, im = rng.normal(0.0, scale, size=2)
        coeffs[k] = complex(re, im)
    return ParentSpectrum(n, coeffs)


def random_polynomial(rng: np.random.Generator, P: FrequencyMatrix = SQRT2_ROW, terms: int = 5,
                      max_degree: int = 5, scale: float = 1.0) -> TrigPolynomial:
    F = random_spectrum(rng, P.n, terms, max_degree, scale)
    return TrigPolynomial(P, F.coeffs)
