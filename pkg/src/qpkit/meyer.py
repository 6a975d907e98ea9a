"""Golden-ratio cut-and-project set and the quasi-periodic functions built on it.

Lattice points ``(m, n)`` of ``Z^2`` are mapped to a physical coordinate
``m + n phi`` and an internal coordinate ``m + n phi'``
(``phi' = (1 - sqrt 5)/2``). The band is the set of points whose internal
coordinate lies in a bounded window ``W``; its physical coordinates form a
Meyer set. Membership in ``W`` is decided exactly in ``Q(sqrt 5)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .analysis import derivative_series_probe
from .errors import FieldError, PreconditionError
from .number_field import FieldScalar, FrequencyMatrix, floor_surd, golden_conjugate, golden_ratio
from .qp import ParentSpectrum, TrigPolynomial

__all__ = [
    "Window",
    "BandSet",
    "enumerate_band",
    "brute_force_band",
    "DensityReport",
    "meyer_density_check",
    "golden_comparability",
    "pathological_parent",
    "pathological_f",
    "g_r_function",
    "PathologyReport",
    "pathology_report",
    "PHI",
    "PHI_CONJ",
]

PHI = golden_ratio()
PHI_CONJ = golden_conjugate()
_PHI_F = float(PHI)
_PHI_CONJ_F = float(PHI_CONJ)


def _scalar(x) -> FieldScalar:
    if isinstance(x, FieldScalar):
        if not x.is_rational and x.m != 5:
            raise FieldError(f"window endpoint {x} is not in Q(sqrt 5)")
        return x if x.m == 5 else FieldScalar(x.a, 0, 5)
    if isinstance(x, float):
        x = Fraction(repr(x))  # "0.5" -> 1/2 rather than the binary expansion
    return FieldScalar(Fraction(x), 0, 5)


@dataclass(frozen=True)
class Window:
    """Interval of internal coordinates; half-open ``[lo, hi)`` by default."""

    lo: FieldScalar
    hi: FieldScalar
    closed_lo: bool = True
    closed_hi: bool = False

    def __post_init__(self):
        object.__setattr__(self, "lo", _scalar(self.lo))
        object.__setattr__(self, "hi", _scalar(self.hi))
        if not self.lo < self.hi:
            raise ValueError(f"empty window: lo={self.lo} is not below hi={self.hi}")

    @classmethod
    def default(cls) -> Window:
        return cls(Fraction(-1, 2), Fraction(1, 2))

    @classmethod
    def parse(cls, text: str) -> Window:
        """``"lo:hi"``, optionally bracketed: ``"[lo,hi)"``, ``"(lo:hi]"`` ..."""
        t = text.strip()
        closed_lo, closed_hi = True, False
        if t and t[0] in "[(":
            closed_lo = t[0] == "["
            t = t[1:]
        if t and t[-1] in "])":
            closed_hi = t[-1] == "]"
            t = t[:-1]
        sep = ":" if ":" in t else ","
        parts = t.split(sep)
        if len(parts) != 2:
            raise ValueError(f"window must look like lo:hi, got {text!r}")
        lo, hi = (Fraction(p.strip()) for p in parts)
        return cls(lo, hi, closed_lo, closed_hi)

    def __contains__(self, x) -> bool:
        x = _scalar(x)
        above = x >= self.lo if self.closed_lo else x > self.lo
        below = x <= self.hi if self.closed_hi else x < self.hi
        return above and below

    @property
    def reach(self) -> float:
        """``max(|lo|, |hi|)``, rounded up."""
        return max(abs(float(self.lo)), abs(float(self.hi))) * (1 + 1e-15)

    def __str__(self):
        return f"{'[' if self.closed_lo else '('}{self.lo}, {self.hi}{']' if self.closed_hi else ')'}"

    def to_json(self) -> dict:
        return {"lo": self.lo.to_json(), "hi": self.hi.to_json(),
                "closed_lo": self.closed_lo, "closed_hi": self.closed_hi}


@dataclass(frozen=True)
class BandSet:
    """Lattice points with internal coordinate in ``window`` and ``m^2 + n^2 <= radius^2``.

    Points are sorted by physical coordinate ``m + n phi``.
    """

    window: Window
    radius: float
    m: np.ndarray
    n: np.ndarray

    def __len__(self):
        return int(self.m.shape[0])

    @property
    def points(self) -> list[tuple[int, int]]:
        return list(zip(self.m.tolist(), self.n.tolist()))

    def physical(self) -> np.ndarray:
        return self.m + self.n * _PHI_F

    def internal(self) -> np.ndarray:
        return self.m + self.n * _PHI_CONJ_F

    def norms(self) -> np.ndarray:
        return np.hypot(self.m, self.n)

    @property
    def has_origin(self) -> bool:
        return bool(np.any((self.m == 0) & (self.n == 0)))

    def without_origin(self) -> BandSet:
        keep = (self.m != 0) | (self.n != 0)
        return BandSet(self.window, self.radius, self.m[keep], self.n[keep])

    def restrict(self, radius: float) -> BandSet:
        keep = self.m * self.m + self.n * self.n <= radius * radius
        return BandSet(self.window, min(radius, self.radius), self.m[keep], self.n[keep])


def _bound_form(x: FieldScalar) -> tuple[int, int, int]:
    # x = (A + B sqrt 5) / D with D even, so n phi' = (n D/2 - n D/2 sqrt 5) / D stays integral
    A, B, D = x._integer_form()
    if D % 2:
        A, B, D = 2 * A, 2 * B, 2 * D
    return A, B, D


def _row_range(W: Window, n: int) -> tuple[int, int]:
    """Admissible ``m`` with ``lo <= m + n phi' <= hi`` (respecting closedness)."""
    A, B, D = _bound_form(W.lo)
    h = n * D // 2
    # a = lo - n phi' = ((A - h) + (B + h) sqrt 5) / D
    a_floor = floor_surd(A - h, B + h, D, 5)
    a_exact = B + h == 0 and (A - h) % D == 0
    m_lo = a_floor + (0 if (a_exact and W.closed_lo) else 1)
    A, B, D = _bound_form(W.hi)
    h = n * D // 2
    b_floor = floor_surd(A - h, B + h, D, 5)
    b_exact = B + h == 0 and (A - h) % D == 0
    m_hi = b_floor - (1 if (b_exact and not W.closed_hi) else 0)
    return m_lo, m_hi


def _disc_halfwidth(R2: Fraction, n: int) -> int:
    t = R2 - n * n
    return math.isqrt(math.floor(t)) if t >= 0 else -1


def enumerate_band(W: Window | None, radius: float) -> BandSet:
    """All ``(m, n)`` with ``m + n phi' in W`` and ``m^2 + n^2 <= radius^2``.

    Each row ``n`` contributes an interval of ``m`` found by exact floors in
    ``Q(sqrt 5)``; the result is sorted by ``m + n phi``.
    """
    W = Window.default() if W is None else W
    if not radius > 0:
        raise ValueError("radius must be positive")
    R = Fraction(repr(float(radius))) if isinstance(radius, float) else Fraction(radius)
    R2 = R * R
    top = math.floor(R)
    ms, ns = [], []
    for n in range(-top, top + 1):
        half = _disc_halfwidth(R2, n)
        if half < 0:
            continue
        m_lo, m_hi = _row_range(W, n)
        m_lo, m_hi = max(m_lo, -half), min(m_hi, half)
        if m_lo <= m_hi:
            ms.append(np.arange(m_lo, m_hi + 1, dtype=np.int64))
            ns.append(np.full(m_hi - m_lo + 1, n, dtype=np.int64))
    m = np.concatenate(ms) if ms else np.zeros(0, dtype=np.int64)
    n = np.concatenate(ns) if ns else np.zeros(0, dtype=np.int64)
    order = np.lexsort((n, m + n * _PHI_F))
    return BandSet(W, float(radius), m[order], n[order])


def brute_force_band(W: Window | None, radius: float) -> set[tuple[int, int]]:
    """Reference enumeration: test every lattice point of the disc."""
    W = Window.default() if W is None else W
    r = math.floor(radius)
    return {
        (m, n)
        for m in range(-r, r + 1)
        for n in range(-r, r + 1)
        if m * m + n * n <= radius * radius and (PHI_CONJ * n + m) in W
    }


@dataclass(frozen=True)
class DensityReport:
    L: float
    trials: int
    covered: tuple[float, float]
    min_count: int
    max_count: int
    min_gap: float

    @property
    def C_low(self) -> float:
        return self.min_count / self.L

    @property
    def C_high(self) -> float:
        return self.max_count / self.L

    def to_json(self) -> dict:
        return {
            "L": self.L,
            "trials": self.trials,
            "covered": list(self.covered),
            "min_count": self.min_count,
            "max_count": self.max_count,
            "C_low": self.C_low,
            "C_high": self.C_high,
            "min_gap": self.min_gap,
        }


# |(m, n)| <= ||A^-1|| * |(x, u)| for A: (m, n) -> (m + n phi, m + n phi')
_A_INV_NORM = float(np.linalg.norm(np.linalg.inv(np.array([[1.0, _PHI_F], [1.0, _PHI_CONJ_F]])), 2))


def covered_interval(B: BandSet) -> float:
    """Largest ``X`` such that every band point with ``|m + n phi| <= X`` was enumerated."""
    return B.radius / (_A_INV_NORM * (1 + 1e-12)) - B.window.reach


def meyer_density_check(B: BandSet, L: float, trials: int = 1000) -> DensityReport:
    """Slide windows of length ``L`` over the fully enumerated part of the set."""
    X = covered_interval(B)
    if not (L > 0 and 2 * X >= L):
        raise PreconditionError(
            f"radius {B.radius} covers only |x| <= {X:.3f}; windows of length {L} need a larger radius"
        )
    x = np.sort(B.physical())
    starts = np.linspace(-X, X - L, max(1, int(trials)))
    counts = np.searchsorted(x, starts + L, side="right") - np.searchsorted(x, starts, side="left")
    inside = x[(x >= -X) & (x <= X)]
    gap = float(np.min(np.diff(inside))) if inside.size > 1 else math.inf
    return DensityReport(float(L), len(starts), (-X, X), int(counts.min()), int(counts.max()), gap)


def golden_comparability(B: BandSet) -> tuple[float, float]:
    """Extremes of ``|m + n phi| / |(m, n)|`` over the band, origin excluded."""
    if B.has_origin:
        B = B.without_origin()
    if len(B) == 0:
        raise ValueError("band has no points besides the origin")
    ratios = np.abs(B.physical()) / B.norms()
    return float(ratios.min()), float(ratios.max())


def _no_origin(B: BandSet) -> BandSet:
    if B.has_origin:
        raise PreconditionError("the origin must be excluded; use B.without_origin()")
    return B


def _physical_weights(B: BandSet, exponent: float) -> dict:
    # physical - internal = n sqrt 5, so a small |m + n phi| forces a small |n| on a bounded
    # window: the float sum keeps its relative accuracy
    w = np.abs(B.physical()) ** (-float(exponent))
    return dict(zip(B.points, w.tolist()))


def pathological_parent(B: BandSet, exponent: float = 1.5) -> ParentSpectrum:
    """``F^(m, n) = |m + n phi|^-exponent`` on the band."""
    return ParentSpectrum(2, _physical_weights(_no_origin(B), exponent))


def pathological_f(B: BandSet, exponent: float = 1.5) -> TrigPolynomial:
    """Frequencies ``m + n phi'`` (inside the window) with coefficients ``|m + n phi|^-exponent``.

    Uses ``P = (1, phi')``.
    """
    P = FrequencyMatrix.row([1, PHI_CONJ])
    return TrigPolynomial(P, pathological_parent(B, exponent).coeffs)


def g_r_function(B: BandSet, r: float) -> TrigPolynomial:
    """Frequencies ``m + n phi`` (the Meyer set) with coefficients ``|m + n phi|^-r``.

    Needs ``r > 1``: the Meyer set grows linearly, so the coefficients are
    summable only for ``r > 1``.
    """
    if not r > 1:
        raise ValueError(
            f"r = {r}: the coefficients |lambda|^-r over a linearly growing set are summable only for r > 1"
        )
    B = _no_origin(B)
    P = FrequencyMatrix.row([1, PHI])
    return TrigPolynomial(P, _physical_weights(B, r))


@dataclass(frozen=True)
class PathologyReport:
    window: Window
    radii: list
    probes: list  # SeriesProbe per order
    comparability: list  # (radius, C_low, C_high)
    points: list  # band size per radius

    def to_json(self) -> dict:
        return {
            "window": str(self.window),
            "radii": list(self.radii),
            "points": list(self.points),
            "probes": [p.to_json() for p in self.probes],
            "comparability": [
                {"radius": r, "C_low": lo, "C_high": hi} for r, lo, hi in self.comparability
            ],
        }


def pathology_report(radii: Sequence[float], orders: Sequence[int] = (0, 1),
                     window: Window | None = None, power: float = 1.0,
                     threshold: float = 0.05) -> PathologyReport:
    """Certificate series ``sum |k|^m |F^(k)|^power`` of the band parent at each radius.

    With ``power=1`` the order-0 series converges and the order-1 series
    grows like ``sqrt(R)``.
    """
    radii = sorted(float(r) for r in radii)
    W = Window.default() if window is None else window
    full = enumerate_band(W, radii[-1]).without_origin()
    F = pathological_parent(full)
    probes = [derivative_series_probe(F, m, radii, power=power, threshold=threshold) for m in orders]
    comp, sizes = [], []
    for R in radii:
        sub = full.restrict(R)
        lo, hi = golden_comparability(sub)
        comp.append((R, lo, hi))
        sizes.append(len(sub))
    return PathologyReport(W, radii, probes, comp, sizes)
