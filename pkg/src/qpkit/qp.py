"""Quasi-periodic trigonometric polynomials ``f(x) = F(P^T x)`` and their
parents on the torus.

A :class:`TrigPolynomial` stores its spectrum by integer index ``k`` so the
frequency is ``P k`` (exact). :class:`ParentSpectrum` stores the Fourier
coefficients of the parent ``F`` on ``T^n``. When the columns of ``P`` are
rationally independent the two carry the same data (``lift``/``project``);
norms of ``f`` are then computed on the torus, where the mean over ``R^d``
becomes an integral over ``T^n``.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from . import lattice
from .errors import ConvergenceError, DimensionError, DomainError, GridError, PreconditionError
from .independence import q_independent, require_q_independent
from .number_field import FieldScalar, FrequencyMatrix
from .torus import cis as _cis, exact_phase, int_phase as _int_phase, sinc_factor

__all__ = [
    "ParentSpectrum",
    "TrigPolynomial",
    "GridFunction",
    "NormInterval",
    "InverseResult",
    "IsometryReport",
    "lift",
    "project",
    "evaluate",
    "evaluate_parent",
    "evaluate_many",
    "bohr_coefficient",
    "bohr_mean",
    "finite_mean",
    "fejer_sum",
    "bochner_fejer_sum",
    "fejer_weight",
    "sample_parent",
    "default_grid",
    "sup_norm",
    "sup_norm_qp",
    "besicovitch_norm",
    "wiener_norm",
    "multiply",
    "convolve",
    "wiener_inverse",
    "residual_on_grid",
    "b2_isometry_check",
    "exact_phase",
]

# Refuse dense grids above this many points (complex128: 256 MiB).
MAX_GRID_POINTS = 1 << 24


def _key(k) -> tuple[int, ...]:
    return tuple(int(v) for v in k)


@functools.lru_cache(maxsize=512)
def _independent(P: FrequencyMatrix) -> bool:
    return q_independent(P).independent


def _clean(coeffs: Mapping, n: int) -> dict[tuple[int, ...], complex]:
    out: dict[tuple[int, ...], complex] = {}
    for k, c in coeffs.items():
        k = _key(k)
        if len(k) != n:
            raise DimensionError(f"index {k} does not have {n} entries")
        c = complex(c)
        if not (math.isfinite(c.real) and math.isfinite(c.imag)):
            raise ValueError(f"non-finite coefficient at {k}")
        c = out.get(k, 0j) + c
        if c == 0:
            out.pop(k, None)
        else:
            out[k] = c
    return dict(sorted(out.items()))


def _coeff_json(c: complex) -> dict:
    return {"re": float(c.real), "im": float(c.imag)}


def _coeff_from_json(t: dict) -> complex:
    return complex(float(t.get("re", 0.0)), float(t.get("im", 0.0)))


@dataclass(frozen=True)
class ParentSpectrum:
    """Sparse Fourier coefficients of a function on ``T^n``."""

    n: int
    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 1:
            raise DimensionError("n must be at least 1")
        object.__setattr__(self, "coeffs", _clean(self.coeffs, self.n))

    def __len__(self):
        return len(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, ParentSpectrum):
            return NotImplemented
        return self.n == other.n and self.coeffs == other.coeffs

    @property
    def support(self) -> list[tuple[int, ...]]:
        return list(self.coeffs)

    def max_degree(self) -> int:
        return max((max(abs(v) for v in k) for k in self.coeffs), default=0)

    def mean(self) -> complex:
        return self.coeffs.get((0,) * self.n, 0j)

    def wiener_norm(self) -> float:
        return math.fsum(abs(c) for c in self.coeffs.values())

    def l2_squared(self) -> float:
        return math.fsum(abs(c) ** 2 for c in self.coeffs.values())

    def scale(self, s: complex) -> ParentSpectrum:
        return ParentSpectrum(self.n, {k: s * c for k, c in self.coeffs.items()})

    def __add__(self, other: ParentSpectrum) -> ParentSpectrum:
        if self.n != other.n:
            raise DimensionError("spectra on different tori")
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, 0j) + c
        return ParentSpectrum(self.n, out)

    def __mul__(self, other: ParentSpectrum) -> ParentSpectrum:
        return convolve(self, other)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "terms": [{"k": list(k), **_coeff_json(c)} for k, c in self.coeffs.items()],
        }

    @classmethod
    def from_json(cls, obj) -> ParentSpectrum:
        terms = obj.get("terms", [])
        n = obj.get("n")
        if n is None:
            if not terms:
                raise DimensionError('empty spectrum needs an explicit "n"')
            n = len(terms[0]["k"])
        coeffs: dict = {}
        for t in terms:
            k = _key(t["k"])
            coeffs[k] = coeffs.get(k, 0j) + _coeff_from_json(t)
        return cls(int(n), coeffs)


class TrigPolynomial:
    """``f(x) = sum_k c_k exp(2 pi i (P k).x)`` with finitely many terms.

    Terms whose frequencies ``P k`` coincide (possible only when ``P`` is
    rationally dependent) are merged onto the lexicographically smallest
    ``k``, so frequencies are pairwise distinct.
    """

    __slots__ = ("P", "terms", "_freq_cache")

    def __init__(self, P: FrequencyMatrix, terms: Mapping | None = None):
        self.P = P
        terms = _clean(terms or {}, P.n)
        self._freq_cache = None
        if _independent(P):
            # distinct indices give distinct frequencies; nothing to merge
            self.terms: dict[tuple[int, ...], complex] = terms
            return
        by_freq: dict[tuple[FieldScalar, ...], tuple[tuple[int, ...], complex]] = {}
        for k, c in terms.items():  # sorted, so the first k seen is the smallest
            lam = P.apply(k)
            if lam in by_freq:
                k0, c0 = by_freq[lam]
                by_freq[lam] = (k0, c0 + c)
            else:
                by_freq[lam] = (k, c)
        merged = {k: c for k, c in by_freq.values() if c != 0}
        self.terms = dict(sorted(merged.items()))

    @property
    def _freq(self) -> dict[tuple[FieldScalar, ...], tuple[int, ...]]:
        if self._freq_cache is None:
            self._freq_cache = {self.P.apply(k): k for k in self.terms}
        return self._freq_cache

    @classmethod
    def from_frequencies(cls, P: FrequencyMatrix, coeffs: Mapping) -> TrigPolynomial:
        """Build from ``{lambda: c}``; each ``lambda`` must lie in ``P Z^n``."""
        A, B = P.rational_parts()
        terms: dict = {}
        for lam, c in coeffs.items():
            lam = _as_freq(lam, P)
            rows = A + B
            rhs = [x.a for x in lam] + [x.b for x in lam]
            sol = lattice.solve_rational(rows, rhs)
            if sol is None:
                raise PreconditionError(
                    f"frequency {[str(x) for x in lam]} has no unique integer index under P"
                )
            if any(v.denominator != 1 for v in sol):
                raise PreconditionError(f"frequency {[str(x) for x in lam]} is not in P Z^n")
            k = tuple(int(v) for v in sol)
            terms[k] = terms.get(k, 0j) + complex(c)
        return cls(P, terms)

    @property
    def n(self) -> int:
        return self.P.n

    @property
    def d(self) -> int:
        return self.P.d

    @property
    def frequencies(self) -> dict[tuple[FieldScalar, ...], complex]:
        return {lam: self.terms[k] for lam, k in self._freq.items()}

    def index_of(self, lam) -> tuple[int, ...] | None:
        return self._freq.get(_as_freq(lam, self.P))

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if not isinstance(other, TrigPolynomial):
            return NotImplemented
        return self.P == other.P and self.terms == other.terms

    def __repr__(self):
        return f"TrigPolynomial(P={self.P!r}, terms={self.terms!r})"

    def scale(self, s: complex) -> TrigPolynomial:
        return TrigPolynomial(self.P, {k: s * c for k, c in self.terms.items()})

    def __add__(self, other: TrigPolynomial) -> TrigPolynomial:
        _same_P(self, other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0j) + c
        return TrigPolynomial(self.P, out)

    def __sub__(self, other: TrigPolynomial) -> TrigPolynomial:
        return self + other.scale(-1)

    def __mul__(self, other):
        if isinstance(other, TrigPolynomial):
            return multiply(self, other)
        return self.scale(other)

    def to_json(self) -> dict:
        obj = self.P.to_json()
        obj["terms"] = [{"k": list(k), **_coeff_json(c)} for k, c in self.terms.items()]
        return obj

    @classmethod
    def from_json(cls, obj) -> TrigPolynomial:
        P = FrequencyMatrix.from_json(obj)
        by_k: dict = {}
        by_lam: dict = {}
        for t in obj.get("terms", []):
            if "k" in t:
                k = _key(t["k"])
                by_k[k] = by_k.get(k, 0j) + _coeff_from_json(t)
            elif "lambda" in t:
                lam = t["lambda"] if isinstance(t["lambda"], list) else [t["lambda"]]
                lam = tuple(FieldScalar.from_json(v, P.m) for v in lam)
                by_lam[lam] = by_lam.get(lam, 0j) + _coeff_from_json(t)
            else:
                raise ValueError('each term needs "k" or "lambda"')
        f = cls(P, by_k)
        if by_lam:
            f = f + cls.from_frequencies(P, by_lam)
        return f


def _as_freq(lam, P: FrequencyMatrix) -> tuple[FieldScalar, ...]:
    if isinstance(lam, (FieldScalar, int, Fraction)):
        lam = (lam,)
    lam = tuple(FieldScalar.coerce(v, P.m) for v in lam)
    if len(lam) != P.d:
        raise DimensionError(f"frequency must have {P.d} entries")
    return lam


def _same_P(f: TrigPolynomial, g: TrigPolynomial) -> None:
    if f.P != g.P:
        raise DimensionError("polynomials use different frequency matrices")


@dataclass(frozen=True)
class GridFunction:
    """Samples of a function on ``T^n`` at the points ``j / N``."""

    n: int
    N: int
    values: np.ndarray

    def __post_init__(self):
        if self.N < 1:
            raise GridError("N must be at least 1")
        if self.values.shape != (self.N,) * self.n:
            raise DimensionError("values must have shape (N,)*n")

    def coefficients(self) -> np.ndarray:
        """DFT coefficients, index ``j`` holding the alias class of ``k = j mod N``."""
        return np.fft.fftn(self.values, norm="forward")


# ---------------------------------------------------------------- lift/project


def lift(f: TrigPolynomial) -> ParentSpectrum:
    """Parent spectrum with ``F^(k) = f^(P k)``; needs rationally independent columns."""
    require_q_independent(f.P)
    return ParentSpectrum(f.n, dict(f.terms))


def project(F: ParentSpectrum, P: FrequencyMatrix) -> TrigPolynomial:
    if F.n != P.n:
        raise DimensionError(f"spectrum lives on T^{F.n}, P has n={P.n}")
    return TrigPolynomial(P, F.coeffs)


# ------------------------------------------------------------------ evaluation


def _csum(values) -> complex:
    values = list(values)
    return complex(math.fsum(v.real for v in values), math.fsum(v.imag for v in values))


def _point(x, d: int) -> tuple[float, ...]:
    x = tuple(float(v) for v in np.atleast_1d(np.asarray(x, dtype=float)))
    if len(x) != d:
        raise DimensionError(f"expected a point with {d} coordinates")
    return x


def evaluate(f: TrigPolynomial, x) -> complex:
    x = _point(x, f.d)
    return _csum(c * _cis(exact_phase(lam, x)) for lam, c in f.frequencies.items())


def evaluate_parent(F: ParentSpectrum, y) -> complex:
    y = _point(getattr(y, "coords", y), F.n)
    return _csum(c * _cis(_int_phase(k, y)) for k, c in F.coeffs.items())


def evaluate_many(f: TrigPolynomial, xs: np.ndarray) -> np.ndarray:
    """Vectorized float evaluation at the rows of ``xs`` (shape ``(M, d)`` or ``(M,)``).

    Frequencies are formed in floating point, so phases carry an error of
    order ``1e-16 |P k| |x|``; use :func:`evaluate` for exact phases.
    """
    xs = np.asarray(xs, dtype=float)
    if xs.ndim == 1:
        xs = xs[:, None]
    if not f.terms:
        return np.zeros(xs.shape[0], dtype=complex)
    K = np.array(list(f.terms), dtype=float)
    C = np.array(list(f.terms.values()), dtype=complex)
    lam = K @ f.P.to_numpy().T  # (terms, d)
    out = np.empty(xs.shape[0], dtype=complex)
    for start in range(0, xs.shape[0], 4096):
        ph = np.mod(xs[start:start + 4096] @ lam.T, 1.0)
        out[start:start + 4096] = np.exp(2j * np.pi * ph) @ C
    return out


# ---------------------------------------------------------------- mean values


def bohr_coefficient(f: TrigPolynomial, lam) -> complex:
    """The mean of ``f(x) exp(-2 pi i lam.x)``: the stored coefficient or 0."""
    k = f.index_of(lam)
    return f.terms[k] if k is not None else 0j


def bohr_mean(f: TrigPolynomial) -> complex:
    """Mean value of ``f``; equals the integral of the parent over the torus."""
    require_q_independent(f.P)
    return f.terms.get((0,) * f.n, 0j)


def finite_mean(f: TrigPolynomial, T, lam=None) -> complex:
    """Closed-form box average ``(2T)^-d int_{[-T,T]^d} f(x) e^{-2 pi i lam.x} dx``."""
    shift = _as_freq(lam, f.P) if lam is not None else None
    terms = []
    for mu, c in f.frequencies.items():
        diff = mu if shift is None else tuple(a - b for a, b in zip(mu, shift))
        factor = 1.0
        for v in diff:
            factor *= sinc_factor(v, T)
        terms.append(c * factor)
    return _csum(terms)


# --------------------------------------------------------------- Fejer sums


def fejer_weight(k: Sequence[int], N: int) -> Fraction:
    """``prod_j (1 - |k_j|/N)`` for ``max |k_j| <= N``, else 0."""
    w = Fraction(1)
    for kj in k:
        if abs(kj) >= N:
            return Fraction(0)
        w *= 1 - Fraction(abs(kj), N)
    return w


def _check_order(N) -> int:
    if int(N) != N or N < 1:
        raise ValueError("Fejer order N must be a positive integer")
    return int(N)


def fejer_sum(F: ParentSpectrum, N: int, y) -> complex:
    N = _check_order(N)
    y = _point(getattr(y, "coords", y), F.n)
    return _csum(
        float(w) * c * _cis(_int_phase(k, y))
        for k, c in F.coeffs.items()
        if (w := fejer_weight(k, N))
    )


def bochner_fejer_sum(f: TrigPolynomial, N: int, x) -> complex:
    """The Fejer weights of the parent, applied to the terms of ``f`` at ``x``."""
    N = _check_order(N)
    x = _point(x, f.d)
    return _csum(
        float(w) * f.terms[k] * _cis(exact_phase(lam, x))
        for lam, k in f._freq.items()
        if (w := fejer_weight(k, N))
    )


# ---------------------------------------------------------------- grids, norms


def default_grid(F: ParentSpectrum) -> int:
    """Smallest power of two ``>= 4 max|k_j| + 1``."""
    need = 4 * F.max_degree() + 1
    return 1 << (need - 1).bit_length()


QUADRATURE_POINTS = 1 << 22


def quadrature_grid(F: ParentSpectrum) -> int:
    """Default grid for ``|F|^q`` with non-even ``q``, which is not band-limited.

    Four times finer than ``default_grid`` while the grid stays under
    ``QUADRATURE_POINTS``; never coarser than ``default_grid``.
    """
    base = default_grid(F)
    N = 4 * base
    while N > base and N ** F.n > QUADRATURE_POINTS:
        N //= 2
    return N


def _check_grid(F: ParentSpectrum, N: int | None) -> int:
    N = default_grid(F) if N is None else int(N)
    need = 2 * F.max_degree() + 1
    if N < need:
        raise GridError(f"grid N={N} aliases the spectrum; need N >= {need}")
    if N ** F.n > MAX_GRID_POINTS:
        raise GridError(f"grid {N}^{F.n} exceeds {MAX_GRID_POINTS} points")
    return N


def sample_parent(F: ParentSpectrum, N: int) -> GridFunction:
    """Values of ``F`` at ``j/N`` via one inverse FFT."""
    arr = np.zeros((N,) * F.n, dtype=complex)
    for k, c in F.coeffs.items():
        arr[tuple(kj % N for kj in k)] += c
    return GridFunction(F.n, N, np.fft.ifftn(arr, norm="forward"))


def _bernstein_slack(F: ParentSpectrum, N: int) -> float:
    # every point is within 1/(2N) per axis of a grid point
    return math.pi * math.fsum(abs(c) * sum(abs(v) for v in k) for k, c in F.coeffs.items()) / N


@dataclass(frozen=True)
class NormInterval:
    lower: float
    upper: float
    note: str = ""

    def __contains__(self, v: float) -> bool:
        return self.lower <= v <= self.upper

    def to_json(self) -> dict:
        return {"lower": self.lower, "upper": self.upper, "note": self.note}


def sup_norm(F: ParentSpectrum, grid: int | None = None) -> NormInterval:
    """Certified enclosure of ``sup|F|``: the grid max below, and above the
    smaller of ``grid max + pi sum|c||k|_1 / N`` and the Wiener norm."""
    N = _check_grid(F, grid)
    vmax = float(np.max(np.abs(sample_parent(F, N).values))) if F.coeffs else 0.0
    upper = max(vmax, min(vmax + _bernstein_slack(F, N), F.wiener_norm()))
    return NormInterval(vmax, upper, f"grid N={N}")


def sup_norm_qp(f: TrigPolynomial, samples: int = 10**6, T_window: float = 1e4,
                grid: int | None = None) -> NormInterval:
    """Sampled lower bound for ``sup|f|`` over ``[0, T_window]^d``.

    The upper end is the certified parent bound when the columns of ``P``
    are independent (the orbit is dense, so the sampled values approach it)
    and the Wiener norm otherwise.
    """
    per_axis = max(2, int(round(samples ** (1.0 / f.d))))
    axis = np.linspace(0.0, float(T_window), per_axis)
    mesh = np.stack(np.meshgrid(*([axis] * f.d), indexing="ij"), axis=-1).reshape(-1, f.d)
    lower = 0.0
    for chunk in np.array_split(mesh, max(1, mesh.shape[0] // 250_000)):
        if chunk.size:
            lower = max(lower, float(np.max(np.abs(evaluate_many(f, chunk)))))
    if q_independent(f.P).independent:
        upper = sup_norm(lift(f), grid).upper
        note = "sampled lower bound; upper from the parent on the torus"
    else:
        upper = wiener_norm(f)
        note = "sampled lower bound; upper is the Wiener norm"
    return NormInterval(lower, max(lower, upper), note)


def _power(F: ParentSpectrum, p: int) -> ParentSpectrum:
    out = ParentSpectrum(F.n, {(0,) * F.n: 1.0})
    base = F
    while p:
        if p & 1:
            out = convolve(out, base)
        p >>= 1
        if p:
            base = convolve(base, base)
    return out


def _torus_lq(F: ParentSpectrum, q: float, grid: int | None, method: str) -> float:
    if not q >= 1:
        raise ValueError(f"q must be >= 1, got {q}")
    if not F.coeffs:
        return 0.0
    even = float(q).is_integer() and int(q) % 2 == 0
    if method == "auto":
        method = "convolution" if even else "grid"
    if method == "convolution":
        if not even:
            raise ValueError("the convolution path needs an even integer q")
        # int |F|^{2p} = int |F^p|^2 = sum |coeff(F^p)|^2
        mean = _power(F, int(q) // 2).l2_squared()
    elif method == "grid":
        N = _check_grid(F, grid if grid is not None or even else quadrature_grid(F))
        vals = np.abs(sample_parent(F, N).values)
        mean = float(np.mean(vals ** q))
    else:
        raise ValueError(f"unknown method {method!r}")
    return mean ** (1.0 / q)


def besicovitch_norm(f: TrigPolynomial, q: float, grid: int | None = None, method: str = "auto") -> float:
    """``M(|f|^q)^(1/q)`` via the parent: uniform-grid rule, or exact
    coefficient convolution for even integer ``q``."""
    return _torus_lq(lift(f), q, grid, method)


def wiener_norm(f) -> float:
    coeffs = f.terms if isinstance(f, TrigPolynomial) else f.coeffs
    return math.fsum(abs(c) for c in coeffs.values())


# ------------------------------------------------------------------ algebra


def convolve(F: ParentSpectrum, G: ParentSpectrum) -> ParentSpectrum:
    """Coefficients of the pointwise product ``F G``."""
    if F.n != G.n:
        raise DimensionError("spectra on different tori")
    acc: dict[tuple[int, ...], list[complex]] = {}
    for (k1, c1), (k2, c2) in itertools.product(F.coeffs.items(), G.coeffs.items()):
        k = tuple(a + b for a, b in zip(k1, k2))
        acc.setdefault(k, []).append(c1 * c2)
    return ParentSpectrum(F.n, {k: _csum(v) for k, v in acc.items()})


def multiply(f: TrigPolynomial, g: TrigPolynomial) -> TrigPolynomial:
    _same_P(f, g)
    prod = convolve(ParentSpectrum(f.n, f.terms), ParentSpectrum(g.n, g.terms))
    return TrigPolynomial(f.P, prod.coeffs)


@dataclass(frozen=True)
class InverseResult:
    inverse: TrigPolynomial
    residual: float  # Wiener norm of f*g - 1, an upper bound for sup|f*g - 1|
    grid: int
    min_modulus: float
    slack: float
    dropped: int

    def to_json(self) -> dict:
        out = self.inverse.to_json()
        out["residual"] = self.residual
        out["grid"] = self.grid
        out["certified_min_modulus"] = self.min_modulus - self.slack
        out["dropped_terms"] = self.dropped
        return out


def _wrap_offsets(coef: np.ndarray) -> list[int]:
    """Per axis, where to cut the cyclic index range into representatives.

    The cut goes through the middle of the window of ``N/8`` consecutive
    index classes carrying the least marginal magnitude. A one-sided
    decaying spectrum is then not folded onto negative indices, and an
    isolated exact zero inside the support (a gap in the generated
    semigroup) does not attract the cut.
    """
    mags = np.abs(coef)
    offsets = []
    for axis in range(coef.ndim):
        other = tuple(a for a in range(coef.ndim) if a != axis)
        marg = mags.max(axis=other) if other else mags
        N = marg.shape[0]
        w = max(1, N // 8)
        window = np.convolve(np.concatenate([marg, marg[:w - 1]]), np.ones(w), mode="valid")[:N]
        # window i covers classes i .. i+w-1; ties resolved toward the symmetric window (-N/2, N/2]
        centre = N // 2
        best = min(range(N), key=lambda i: (window[i], (i + w // 2 - centre) % N))
        offsets.append((best + w // 2 + 1) % N)
    return offsets


INVERSE_GRID_POINTS = 1 << 20
INVERSE_TARGET = 1e-12  # adaptive refinement stops once the residual is this small


def _invert_on_grid(f: TrigPolynomial, F: ParentSpectrum, N: int, tail_tol: float):
    vals = sample_parent(F, N).values
    vmin = float(np.min(np.abs(vals)))
    slack = _bernstein_slack(F, N)
    if vmin - slack <= 0:
        return None, math.inf, vmin, slack, 0
    coef = GridFunction(F.n, N, 1.0 / vals).coefficients()
    offsets = _wrap_offsets(coef)
    mags = np.abs(coef)
    keep = mags >= tail_tol
    dropped = int(np.count_nonzero((mags > 0) & ~keep))
    idx = np.argwhere(keep)
    off = np.array(offsets)
    ks = np.where((idx < off) | (off == 0), idx, idx - N)
    terms = {tuple(int(v) for v in k): complex(c) for k, c in zip(ks, coef[keep])}
    G = ParentSpectrum(F.n, terms)
    residual = (convolve(F, G) + ParentSpectrum(F.n, {(0,) * F.n: -1.0})).wiener_norm()
    return TrigPolynomial(f.P, G.coeffs), residual, vmin, slack, dropped


def wiener_inverse(f: TrigPolynomial, grid: int | None = None, tail_tol: float = 1e-12,
                   max_residual: float = 1e-8) -> InverseResult:
    """Inverse of a nonvanishing ``f`` in the Wiener algebra.

    The parent is sampled on an ``N^n`` grid, inverted pointwise and
    transformed back; coefficients below ``tail_tol`` are dropped. The
    reported residual is the Wiener norm of ``f g - 1``. Without ``grid``
    the grid doubles from the band-limited default until the residual
    reaches ``INVERSE_TARGET`` or stops improving; the best certified result
    is returned if its residual is within ``max_residual``.
    """
    F = lift(f)
    if not F.coeffs:
        raise DomainError("f is identically zero")
    if grid is not None:
        sizes = [_check_grid(F, grid)]
    else:
        sizes = []
        N = max(16, default_grid(F))
        while N ** F.n <= INVERSE_GRID_POINTS:
            sizes.append(N)
            N *= 2
        sizes = sizes or [_check_grid(F, None)]
    best = None
    last = None
    for N in sizes:
        g, residual, vmin, slack, dropped = _invert_on_grid(f, F, N, tail_tol)
        last = (N, vmin, slack, residual)
        if g is None:
            if vmin <= 1e-14 * F.wiener_norm():
                break  # a sampled zero: no finer grid will help
            continue
        stalled = best is not None and residual > 0.5 * best.residual
        if best is None or residual < best.residual:
            best = InverseResult(g, residual, N, vmin, slack, dropped)
        if stalled or residual <= INVERSE_TARGET:
            break  # at the target, or refinement stalled at the truncation floor
    if best is None:
        N, vmin, slack, _ = last
        raise DomainError(
            f"cannot certify that the parent is nonvanishing: grid min {vmin:.3e} <= slack {slack:.3e} at N={N}"
        )
    if best.residual > max_residual:
        raise ConvergenceError(
            f"inverse residual {best.residual:.3e} exceeds {max_residual:.1e} at grid N={best.grid}"
        )
    return best


def residual_on_grid(f: TrigPolynomial, g: TrigPolynomial, N: int) -> float:
    """``max |f g - 1|`` over an ``N^n`` torus grid."""
    h = lift(multiply(f, g)) + ParentSpectrum(f.n, {(0,) * f.n: -1.0})
    if not h.coeffs:
        return 0.0
    if N ** h.n > MAX_GRID_POINTS:
        raise GridError(f"grid {N}^{h.n} exceeds {MAX_GRID_POINTS} points")
    return float(np.max(np.abs(sample_parent(h, N).values)))


@dataclass(frozen=True)
class IsometryReport:
    projected_l2_squared: float
    parent_l2_squared: float

    @property
    def equal(self) -> bool:
        return self.projected_l2_squared == self.parent_l2_squared

    def to_json(self) -> dict:
        return {
            "projected_l2_squared": self.projected_l2_squared,
            "parent_l2_squared": self.parent_l2_squared,
            "equal": self.equal,
        }


def b2_isometry_check(F: ParentSpectrum, P: FrequencyMatrix) -> IsometryReport:
    """Coefficient l2 mass of ``project(F, P)`` against that of ``F``."""
    require_q_independent(P)
    f = project(F, P)
    lhs = math.fsum(abs(f.terms[k]) ** 2 for k in sorted(f.terms))
    rhs = math.fsum(abs(F.coeffs[k]) ** 2 for k in sorted(F.coeffs))
    return IsometryReport(lhs, rhs)
