"""Coefficient inequalities and regularity checks for quasi-periodic polynomials.

Everything here works on finite spectra. Statements about infinite series
are reported as truncation evidence (partial sums at explicit radii), never
as proofs.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import mpmath
import numpy as np

from .errors import DimensionError, GridError, PreconditionError
from .independence import require_q_independent
from .number_field import FieldScalar, to_float
from .qp import (
    ParentSpectrum,
    TrigPolynomial,
    _torus_lq,
    default_grid,
    lift,
    sample_parent,
)

__all__ = [
    "Direction",
    "HYReport",
    "hausdorff_young_check",
    "conjugate_exponent",
    "coefficient_lp_norm",
    "HolderReport",
    "holder_decay_bound",
    "Omega1Estimate",
    "omega1_estimate",
    "DiscretenessConstant",
    "discreteness_constant",
    "min_frequency_ratio",
    "sobolev_besicovitch_norm",
    "HolderMode",
    "SobolevMode",
    "RegularityVerdict",
    "parent_regularity_verdict",
    "SeriesProbe",
    "derivative_series_probe",
]

# Tolerance for the Hausdorff-Young comparison on top of the quadrature error.
HY_TOLERANCE = 1e-8


class Direction(str, enum.Enum):
    LE = "LE"  # ||f||_q <= l^{q'} norm of the coefficients
    GE = "GE"  # ||f||_q >= l^{q'} norm of the coefficients


def conjugate_exponent(q: float) -> float:
    if not q >= 1:
        raise ValueError(f"q must be >= 1, got {q}")
    if q == 1:
        return math.inf
    if math.isinf(q):
        return 1.0
    return q / (q - 1)


def coefficient_lp_norm(coeffs: Sequence[complex], p: float) -> float:
    mags = [abs(c) for c in coeffs]
    if not mags:
        return 0.0
    if math.isinf(p):
        return max(mags)
    top = max(mags)
    if top == 0:
        return 0.0
    # scale by the largest modulus to keep the powers in range
    return top * math.fsum((m / top) ** p for m in mags) ** (1.0 / p)


@dataclass(frozen=True)
class HYReport:
    q: float
    q_conjugate: float
    lhs: float  # ||f||_q
    rhs: float  # l^{q'} norm of the coefficients
    direction: Direction
    holds: bool
    slack: float  # signed margin in the required direction; negative means violated
    tolerance: float
    method: str

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "q_conjugate": None if math.isinf(self.q_conjugate) else self.q_conjugate,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "direction": self.direction.value,
            "holds": self.holds,
            "slack": self.slack,
            "tolerance": self.tolerance,
            "method": self.method,
        }


def hausdorff_young_check(f: TrigPolynomial, q: float, grid: int | None = None,
                          method: str = "auto") -> HYReport:
    """Compare ``||f||_q`` with the ``l^{q'}`` norm of the Bohr coefficients.

    For ``q <= 2`` the coefficient norm is at most ``||f||_q`` (``GE``); for
    ``q >= 2`` it is at least ``||f||_q`` (``LE``). At ``q == 2`` both hold.
    """
    if not (1 <= q < math.inf):
        raise ValueError(f"q must satisfy 1 <= q < inf, got {q}")
    F = lift(f)
    qc = conjugate_exponent(q)
    even = float(q).is_integer() and int(q) % 2 == 0
    chosen = ("convolution" if even else "grid") if method == "auto" else method
    lhs = _torus_lq(F, q, grid, chosen)
    rhs = coefficient_lp_norm(list(F.coeffs.values()), qc)
    direction = Direction.GE if q < 2 else Direction.LE
    slack = lhs - rhs if direction is Direction.GE else rhs - lhs
    tol = HY_TOLERANCE * max(1.0, rhs)
    holds = slack >= -tol
    if q == 2:
        holds = abs(lhs - rhs) <= tol
    return HYReport(float(q), qc, lhs, rhs, direction, holds, slack, tol, chosen)


def _freq_norm(lam: Sequence[FieldScalar]) -> float:
    return math.hypot(*(float(v) for v in lam)) if len(lam) > 1 else abs(float(lam[0]))


@dataclass(frozen=True)
class HolderReport:
    eta: float
    C: float
    checked: int
    violations: list = field(default_factory=list)  # (k, |beta|, |coeff|, bound)

    @property
    def holds(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "eta": self.eta,
            "C": self.C,
            "checked": self.checked,
            "holds": self.holds,
            "violations": [
                {"k": list(k), "beta": b, "coeff": c, "bound": bd} for k, b, c, bd in self.violations
            ],
        }


def holder_decay_bound(f: TrigPolynomial, eta: float, C: float) -> HolderReport:
    """Check ``|f^(beta)| <= (C/2) |beta|^-eta`` on every stored ``beta != 0``.

    A violation shows that ``f`` cannot have L1 modulus of continuity
    ``omega_1(f, delta) <= C delta^eta``.
    """
    if not (0 < eta <= 1):
        raise ValueError("eta must lie in (0, 1]")
    if not C > 0:
        raise ValueError("C must be positive")
    violations = []
    checked = 0
    for lam, c in f.frequencies.items():
        if not any(lam):
            continue
        checked += 1
        b = _freq_norm(lam)
        bound = 0.5 * C * b ** (-eta)
        if abs(c) > bound:
            violations.append((f.index_of(lam), b, abs(c), bound))
    return HolderReport(float(eta), float(C), checked, violations)


@dataclass(frozen=True)
class Omega1Estimate:
    lower: float
    upper: float
    argmax_t: float
    net_size: int
    grid: int

    def to_json(self) -> dict:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "argmax_t": self.argmax_t,
            "net_size": self.net_size,
            "grid": self.grid,
        }


def omega1_estimate(f: TrigPolynomial, delta: float, grid: int | None = None,
                    net: int = 64) -> Omega1Estimate:
    """Enclose ``sup_{|t|<=delta} M(|f(.+t) - f|)`` for ``d == 1``.

    Each mean is the torus integral of ``|F(y + P^T t) - F(y)|``, computed by
    the rectangle rule; the rule's error for a Lipschitz integrand and the
    variation between net points are added to the upper end and the
    quadrature error is subtracted from the lower end.
    """
    if f.d != 1:
        raise DimensionError("omega_1 is estimated for d == 1")
    if not delta > 0:
        raise ValueError("delta must be positive")
    F = lift(f)
    if grid is None:
        # |F(y+s) - F(y)| has kinks, so use a finer grid than for smooth integrands
        N = max(256, 4 * default_grid(F))
        while N > 8 and N ** F.n > (1 << 20):
            N //= 2
    else:
        N = int(grid)
    if N < 2 * F.max_degree() + 1:
        raise GridError(f"grid N={N} aliases the spectrum")
    lam = {k: float(f.P.apply(k)[0]) for k in F.coeffs}
    lip_t = 2 * math.pi * math.fsum(abs(c) * abs(lam[k]) for k, c in F.coeffs.items())
    # |e^{iu} - 1| <= min(2, |u|) gives an upper bound valid for every |t| <= delta
    wiener_cap = math.fsum(abs(c) * min(2.0, 2 * math.pi * abs(lam[k]) * delta)
                           for k, c in F.coeffs.items())
    ts = np.linspace(0.0, float(delta), max(2, int(net)))
    best, best_t, quad_err = 0.0, 0.0, 0.0
    for t in ts:
        G = ParentSpectrum(F.n, {
            k: c * (np.exp(2j * math.pi * ((lam[k] * t) % 1.0)) - 1.0) for k, c in F.coeffs.items()
        })
        if not G.coeffs:
            continue
        val = float(np.mean(np.abs(sample_parent(G, N).values)))
        err = 2 * math.pi * math.fsum(abs(c) * sum(map(abs, k)) for k, c in G.coeffs.items()) / (4 * N)
        quad_err = max(quad_err, err)
        if val > best:
            best, best_t = val, float(t)
    spacing = float(delta) / (len(ts) - 1)
    lower = max(0.0, best - quad_err)
    upper = min(wiener_cap, best + quad_err + lip_t * spacing / 2)
    return Omega1Estimate(lower, max(lower, upper), best_t, len(ts), N)


@dataclass(frozen=True)
class DiscretenessConstant:
    """``min |P k| / |k|`` over the stored nonzero ``k``.

    ``squared`` is exact (a field element); ``value`` is its square root
    rounded to double precision.
    """

    squared: FieldScalar
    value: float
    argmin: tuple[int, ...]
    offending: tuple = ()  # k != 0 with P k == 0

    def __float__(self):
        return self.value

    @property
    def positive(self) -> bool:
        return bool(self.squared)

    def to_json(self) -> dict:
        return {
            "D_prime": self.value,
            "D_prime_squared": self.squared.to_json(),
            "argmin": list(self.argmin),
            "offending": [list(k) for k in self.offending],
        }


def _sqrt_to_float(x: FieldScalar) -> float:
    if not x:
        return 0.0
    with mpmath.workprec(120):
        return float(mpmath.sqrt(to_float(x, 120)))


def min_frequency_ratio(f: TrigPolynomial) -> DiscretenessConstant:
    """``min ||P k||^2 / ||k||^2`` over stored ``k != 0``, for any ``d``."""
    best = None
    best_k = None
    offending = []
    for k in f.terms:
        if not any(k):
            continue
        lam = f.P.apply(k)
        num = sum((v * v for v in lam), FieldScalar(0, 0, f.P.m))
        r = num / sum(v * v for v in k)
        if not r:
            offending.append(k)
        if best is None or r < best:
            best, best_k = r, k
    if best is None:
        raise ValueError("spectrum has no nonzero frequency index")
    return DiscretenessConstant(best, _sqrt_to_float(best), best_k, tuple(offending))


def discreteness_constant(f: TrigPolynomial) -> DiscretenessConstant:
    """``D' = min |k . p| / |k|_2`` over the stored spectrum (``d == 1``)."""
    if f.d != 1:
        raise DimensionError("the discreteness constant is defined for d == 1")
    return min_frequency_ratio(f)


def sobolev_besicovitch_norm(f: TrigPolynomial, s: float, q: float) -> float:
    """``(sum (1+|lam|^2)^(s q'/2) |f^(lam)|^q')^(1/q')``."""
    if not q > 1:
        raise ValueError("q must be > 1")
    if s < 0:
        raise ValueError("s must be >= 0")
    qc = conjugate_exponent(q)
    terms = [
        (1.0 + _freq_norm(lam) ** 2) ** (s * qc / 2) * abs(c) ** qc
        for lam, c in f.frequencies.items()
    ]
    return math.fsum(terms) ** (1.0 / qc)


@dataclass(frozen=True)
class SeriesProbe:
    order: int
    power: float
    rows: list  # (radius, partial_sum, relative_increment)
    threshold: float

    @property
    def convergent(self) -> bool:
        """Advisory: the last relative increment is below ``threshold``."""
        if len(self.rows) < 2:
            return True
        return self.rows[-1][2] < self.threshold

    def growth_factors(self) -> list[float]:
        out = []
        for (_, a, _), (_, b, _) in zip(self.rows, self.rows[1:]):
            out.append(b / a if a else math.inf)
        return out

    def log_slope(self) -> float:
        """Least-squares slope of partial sum against ``log R``."""
        if len(self.rows) < 2:
            return 0.0
        x = np.log([r for r, _, _ in self.rows])
        y = np.array([s for _, s, _ in self.rows])
        return float(np.polyfit(x, y, 1)[0])

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "power": self.power,
            "threshold": self.threshold,
            "convergent": self.convergent,
            "rows": [{"radius": r, "partial_sum": s, "relative_increment": inc} for r, s, inc in self.rows],
        }


def derivative_series_probe(F: ParentSpectrum, m: int, radii: Sequence[float],
                            power: float = 1.0, threshold: float = 0.05) -> SeriesProbe:
    """Partial sums of ``sum_{0<|k|<=R} |k|^m |F^(k)|^power`` at each ``R``.

    ``relative_increment`` is ``(S(R_i) - S(R_{i-1})) / S(R_{i-1})``; the
    convergence flag compares the last one with ``threshold`` (5% by default,
    meant for radii one decade apart).
    """
    if m < 0:
        raise ValueError("order m must be >= 0")
    radii = sorted(float(r) for r in radii)
    ks = np.array([k for k in F.coeffs if any(k)], dtype=float).reshape(-1, F.n)
    cs = np.array([abs(c) for k, c in F.coeffs.items() if any(k)], dtype=float)
    norms = np.sqrt(np.sum(ks * ks, axis=1))
    order = np.argsort(norms, kind="stable")
    norms, terms = norms[order], (norms[order] ** m) * cs[order] ** power
    rows = []
    prev = None
    for R in radii:
        i = int(np.searchsorted(norms, R, side="right"))
        s = float(math.fsum(terms[:i])) if i else 0.0
        inc = 0.0 if prev is None else ((s - prev) / prev if prev else (0.0 if s == 0 else math.inf))
        rows.append((R, s, inc))
        prev = s
    return SeriesProbe(int(m), float(power), rows, float(threshold))


@dataclass(frozen=True)
class HolderMode:
    r: int
    eta: float


@dataclass(frozen=True)
class SobolevMode:
    s: float
    q: float


@dataclass(frozen=True)
class RegularityVerdict:
    mode: str
    hypothesis_r: int | None
    hypothesis_eta: float | None
    D_prime: float
    guaranteed_class: int | None
    checked_series: list  # (order m, partial sum, convergent flag)
    failures: list = field(default_factory=list)
    offending_k: list = field(default_factory=list)
    bound: float | None = None  # r - n, or s - n/q

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "hypothesis_r": self.hypothesis_r,
            "hypothesis_eta": self.hypothesis_eta,
            "D_prime": self.D_prime,
            "guaranteed_class": self.guaranteed_class,
            "bound": self.bound,
            "checked_series": [
                {"order": m, "partial_sum": s, "convergent": c} for m, s, c in self.checked_series
            ],
            "failures": list(self.failures),
            "offending_k": [list(k) for k in self.offending_k],
        }


def _probe_radii(F: ParentSpectrum) -> list[float]:
    top = max((math.sqrt(sum(v * v for v in k)) for k in F.coeffs if any(k)), default=0.0)
    radii = [top / 100, top / 10, top]
    return [r for r in radii if r >= 1] or [top]


def parent_regularity_verdict(f: TrigPolynomial, mode: HolderMode | SobolevMode,
                              threshold: float = 0.05) -> RegularityVerdict:
    """Check the hypotheses of the regularity transfer and report the class it gives.

    Hypothesis violations are returned in ``failures``; nothing is raised
    for them.
    """
    n = f.n
    failures: list[str] = []
    offending: list = []
    if isinstance(mode, HolderMode):
        name, r, eta = "holder", int(mode.r), float(mode.eta)
        if f.d != 1:
            failures.append(f"Holder mode needs d == 1, got d = {f.d}")
        if r <= n:
            failures.append(f"needs r > n, got r = {r}, n = {n}")
        if not (0 < eta < 1):
            failures.append(f"needs 0 < eta < 1, got eta = {eta}")
        bound = float(r - n)
        candidate = r - n
    elif isinstance(mode, SobolevMode):
        name, r, eta = "sobolev", None, None
        s, q = float(mode.s), float(mode.q)
        if not q > 1:
            failures.append(f"needs q > 1, got q = {q}")
            bound = -math.inf
        else:
            bound = s - n / q
        if not bound > 1:
            failures.append(f"needs s - n/q > 1, got {bound}")
        candidate = math.ceil(bound) - 1 if math.isfinite(bound) else None
    else:
        raise TypeError("mode must be HolderMode or SobolevMode")

    try:
        require_q_independent(f.P)
    except PreconditionError as exc:
        failures.append(f"columns of P are rationally dependent, relation {list(exc.witness)}")

    D = 0.0
    if any(any(k) for k in f.terms):
        dc = min_frequency_ratio(f)
        D = dc.value
        if not dc.positive:
            failures.append("discreteness fails: P k = 0 for a stored k != 0")
            offending = list(dc.offending)
    F = ParentSpectrum(n, f.terms)
    series = []
    top = candidate if (candidate is not None and candidate >= 0) else 0
    for m in range(top + 1):
        probe = derivative_series_probe(F, m, _probe_radii(F), threshold=threshold)
        series.append((m, probe.rows[-1][1], probe.convergent))
    guaranteed = None if failures else candidate
    return RegularityVerdict(name, r, eta, D, guaranteed, series, failures, offending,
                             None if not math.isfinite(bound) else bound)
