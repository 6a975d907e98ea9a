"""The R^d- and Z^d-actions ``y -> y + P^T x (mod 1)`` on the torus and their
Weyl averages.

For trigonometric polynomials both averages have closed forms: the
continuous box average of ``exp(2 pi i lam.x)`` over ``[-T, T]^d`` is a
product of sinc factors, the lattice average is a product of normalized
Dirichlet kernels. Phases are reduced modulo 1 in exact arithmetic before
rounding, so the ``theta == 0`` branch is decided exactly.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import DimensionError
from .number_field import FieldScalar, FrequencyMatrix

__all__ = [
    "TorusPoint",
    "Character",
    "flow",
    "orbit_segment",
    "weyl_average_continuous",
    "weyl_average_discrete",
    "equidistribution_table",
    "riemann_average",
    "sinc_factor",
    "dirichlet_factor",
    "exact_phase",
    "int_phase",
    "cis",
]


def _wrap01(v: float) -> float:
    r = v % 1.0
    return 0.0 if r == 1.0 else r


@dataclass(frozen=True)
class TorusPoint:
    coords: tuple[float, ...]

    def __init__(self, coords: Sequence[float]):
        object.__setattr__(self, "coords", tuple(_wrap01(float(c)) for c in coords))

    @property
    def n(self) -> int:
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __len__(self):
        return len(self.coords)

    def as_array(self) -> np.ndarray:
        return np.array(self.coords, dtype=float)


@dataclass(frozen=True)
class Character:
    """``y -> exp(2 pi i k.y)``; ``k == 0`` is the trivial character."""

    k: tuple[int, ...]

    def __call__(self, y: Sequence[float]) -> complex:
        return cis(int_phase(self.k, getattr(y, "coords", y)))

    def spectrum(self, coeff: complex = 1.0):
        from .qp import ParentSpectrum

        return ParentSpectrum(len(self.k), {self.k: coeff})


def _as_point(y, n: int) -> TorusPoint:
    y = y if isinstance(y, TorusPoint) else TorusPoint(y)
    if y.n != n:
        raise DimensionError(f"torus point has {y.n} coordinates, P has n={n}")
    return y


def exact_phase(lam: Sequence[FieldScalar], x: Sequence[float], offset: float = 0.0) -> float:
    """``(offset + lam . x) mod 1``, computed exactly from the binary values of the floats."""
    s = FieldScalar(Fraction(offset))
    for lj, xj in zip(lam, x):
        if lj and xj:
            s = s + lj * Fraction(xj)
    return _wrap01(float(s.frac()))


def int_phase(k: Sequence[int], y: Sequence[float]) -> float:
    """``(k . y) mod 1`` in exact rational arithmetic."""
    s = sum((kj * Fraction(yj) for kj, yj in zip(k, y) if kj), Fraction(0))
    return _wrap01(float(s - math.floor(s)))


def cis(phase: float) -> complex:
    """``exp(2 pi i phase)``."""
    a = 2.0 * math.pi * phase
    return complex(math.cos(a), math.sin(a))


def flow(P: FrequencyMatrix, y, x: Sequence[float]) -> TorusPoint:
    """``Phi_x(y) = (y + P^T x) mod Z^n``, correctly rounded per coordinate."""
    y = _as_point(y, P.n)
    x = tuple(float(v) for v in np.atleast_1d(np.asarray(x, dtype=float)))
    if len(x) != P.d:
        raise DimensionError(f"x must have {P.d} coordinates")
    return TorusPoint([exact_phase(P.column(j), x, y.coords[j]) for j in range(P.n)])


def orbit_segment(P: FrequencyMatrix, y, x_from: float, x_to: float, samples: int) -> list[TorusPoint]:
    """Evenly spaced points of the line orbit ``x -> Phi_x(y)``, ``x`` in ``[x_from, x_to]``."""
    if P.d != 1:
        raise DimensionError("line orbits are exported for d == 1 only")
    if samples < 2:
        raise ValueError("need at least 2 samples")
    y = _as_point(y, P.n)
    xs = np.linspace(float(x_from), float(x_to), int(samples))
    return [flow(P, y, [x]) for x in xs.tolist()]


def _exact_T(T) -> Fraction:
    return T if isinstance(T, Fraction) else Fraction(T)


def sinc_factor(lam: FieldScalar, T) -> float:
    """``sin(2 pi lam T) / (2 pi lam T)``, with the phase ``lam*T`` reduced exactly."""
    if not lam:
        return 1.0
    Tq = _exact_T(T)
    theta = (lam * Tq).frac()
    return math.sin(2.0 * math.pi * float(theta)) / (2.0 * math.pi * float(lam) * float(Tq))


def dirichlet_factor(lam: FieldScalar, T: int) -> float:
    """Average of ``exp(2 pi i lam x)`` over integers ``|x| <= T``.

    Equals ``sin(pi (2T+1) theta) / ((2T+1) sin(pi theta))`` with
    ``theta = lam mod 1``, and 1 when ``theta == 0`` (decided exactly).
    """
    theta = lam.frac()
    if not theta:
        return 1.0
    L = 2 * int(T) + 1
    # sin(pi*u) with u = L*theta reduced mod 2 exactly
    u = theta * L
    u = u - 2 * (u * Fraction(1, 2)).floor()
    return math.sin(math.pi * float(u)) / (L * math.sin(math.pi * float(theta)))


def _spectrum_items(F):
    return sorted(F.coeffs.items())


def _phase(k: Sequence[int], y: TorusPoint) -> complex:
    return cis(int_phase(k, y.coords))


def _csum(values) -> complex:
    values = list(values)
    return complex(math.fsum(v.real for v in values), math.fsum(v.imag for v in values))


def weyl_average_continuous(F, P: FrequencyMatrix, y, T) -> complex:
    """Closed-form ``(2T)^-d * integral over [-T,T]^d of F(Phi_x(y)) dx``."""
    y = _as_point(y, P.n)
    if F.n != P.n:
        raise DimensionError("spectrum and P disagree on n")
    terms = []
    for k, c in _spectrum_items(F):
        lam = P.apply(k)
        factor = 1.0
        for lj in lam:
            factor *= sinc_factor(lj, T)
        terms.append(c * _phase(k, y) * factor)
    return _csum(terms)


def weyl_average_discrete(F, P: FrequencyMatrix, y, T: int) -> complex:
    """Closed-form ``(2T+1)^-d * sum over x in [-T,T]^d cap Z^d of F(Phi_x(y))``."""
    if int(T) != T or T < 0:
        raise ValueError("T must be a non-negative integer")
    y = _as_point(y, P.n)
    if F.n != P.n:
        raise DimensionError("spectrum and P disagree on n")
    terms = []
    for k, c in _spectrum_items(F):
        factor = 1.0
        for lj in P.apply(k):
            factor *= dirichlet_factor(lj, int(T))
        terms.append(c * _phase(k, y) * factor)
    return _csum(terms)


def _decay_bound(F, P: FrequencyMatrix, T, discrete: bool) -> float:
    """Upper bound on ``|A_T F(y) - integral F|``, uniform in ``y``."""
    parts = []
    for k, c in _spectrum_items(F):
        if not any(k):
            continue
        factor = 1.0
        for lj in P.apply(k):
            if discrete:
                theta = float(lj.frac())
                s = abs(math.sin(math.pi * theta))
                if s > 0:
                    factor *= min(1.0, 1.0 / ((2 * int(T) + 1) * s))
            elif lj:
                factor *= min(1.0, 1.0 / (2 * math.pi * abs(float(lj)) * float(T)))
        parts.append(abs(c) * factor)
    return math.fsum(parts)


def _max_workers() -> int:
    env = os.environ.get("QPKIT_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return min(8, os.cpu_count() or 1)


def equidistribution_table(F, P: FrequencyMatrix, y, T_list: Sequence, discrete: bool = False) -> list[dict]:
    """Rows ``{T, value, abs_error, bound}`` with ``abs_error = |A_T F(y) - integral F|``.

    ``bound`` is the closed-form decay bound; it does not depend on ``y``.
    """
    mean = F.coeffs.get((0,) * F.n, 0j)
    average = weyl_average_discrete if discrete else weyl_average_continuous

    def row(T):
        v = average(F, P, y, T)
        return {"T": T, "value": v, "abs_error": abs(v - mean), "bound": _decay_bound(F, P, T, discrete)}

    with ThreadPoolExecutor(max_workers=_max_workers()) as pool:
        return list(pool.map(row, T_list))


def riemann_average(func: Callable[[np.ndarray], np.ndarray], P: FrequencyMatrix, y, T: float, grid: int = 1000) -> complex:
    """Approximate continuous Weyl average for a black-box parent ``func``.

    Midpoint rule on a uniform ``grid^d`` mesh of ``[-T, T]^d``; the result
    carries quadrature error and is not used by any exact check.
    ``func`` receives an ``(N, n)`` array of torus points.
    """
    y = _as_point(y, P.n)
    h = 2.0 * T / grid
    axis = -T + h * (np.arange(grid) + 0.5)
    mesh = np.stack(np.meshgrid(*([axis] * P.d), indexing="ij"), axis=-1).reshape(-1, P.d)
    pts = (y.as_array()[None, :] + mesh @ P.to_numpy()) % 1.0
    return complex(np.mean(func(pts)))
