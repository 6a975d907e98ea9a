"""Exact arithmetic in Q and in real quadratic fields Q(sqrt(m)).

A :class:`FieldScalar` is the real number ``a + b*sqrt(m)`` with rational
``a`` and ``b``.  Pure rationals have ``b == 0`` and mix freely with any
field; two irrational values must share the same ``m``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, DomainError, FieldError

__all__ = [
    "FieldScalar",
    "FrequencyMatrix",
    "field_add",
    "field_mul",
    "field_neg",
    "field_inv",
    "field_conjugate",
    "to_float",
    "is_squarefree",
    "golden_ratio",
    "golden_conjugate",
    "sqrt",
]


def is_squarefree(m: int) -> bool:
    if m < 2:
        return False
    p = 2
    while p * p <= m:
        if m % (p * p) == 0:
            return False
        p += 1
    return True


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        if not math.isfinite(x):
            raise FieldError(f"non-finite rational component {x!r}")
        return Fraction(x)
    if isinstance(x, np.integer):
        return Fraction(int(x))
    raise TypeError(f"cannot interpret {x!r} as a rational")


class FieldScalar:
    """Immutable exact real ``a + b*sqrt(m)``."""

    __slots__ = ("_a", "_b", "_m", "_float")

    def __init__(self, a=0, b=0, m: int = 1):
        a = _as_fraction(a)
        b = _as_fraction(b)
        m = int(m)
        if b != 0 and not is_squarefree(m):
            raise FieldError(f"m={m} must be square-free and >= 2 when b != 0")
        if b == 0 and m < 1:
            raise FieldError(f"invalid field parameter m={m}")
        self._a = a
        self._b = b
        self._m = m
        self._float = None

    @classmethod
    def _raw(cls, a: Fraction, b: Fraction, m: int) -> FieldScalar:
        obj = object.__new__(cls)
        obj._a = a
        obj._b = b
        obj._m = m
        obj._float = None
        return obj

    @classmethod
    def coerce(cls, x, m: int | None = None) -> FieldScalar:
        if isinstance(x, FieldScalar):
            return x
        return cls._raw(_as_fraction(x), Fraction(0), m if m is not None else 1)

    @property
    def a(self) -> Fraction:
        return self._a

    @property
    def b(self) -> Fraction:
        return self._b

    @property
    def m(self) -> int:
        return self._m

    @property
    def is_rational(self) -> bool:
        return self._b == 0

    # ------------------------------------------------------------------
    # arithmetic

    def _common_m(self, other: FieldScalar) -> int:
        if self._b and other._b:
            if self._m != other._m:
                raise FieldError(
                    f"mixed radicals sqrt({self._m}) and sqrt({other._m}) are not supported"
                )
            return self._m
        if self._b:
            return self._m
        if other._b:
            return other._m
        return self._m if self._m != 1 else other._m

    def _wrap(self, other) -> FieldScalar | None:
        if isinstance(other, FieldScalar):
            return other
        if isinstance(other, (int, Fraction, Rational, np.integer)):
            return FieldScalar._raw(_as_fraction(other), Fraction(0), self._m)
        return None

    def __add__(self, other):
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        m = self._common_m(o)
        return FieldScalar._raw(self._a + o._a, self._b + o._b, m)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        m = self._common_m(o)
        return FieldScalar._raw(self._a - o._a, self._b - o._b, m)

    def __rsub__(self, other):
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        m = self._common_m(o)
        a = self._a * o._a + self._b * o._b * m
        b = self._a * o._b + self._b * o._a
        return FieldScalar._raw(a, b, m)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldScalar._raw(-self._a, -self._b, self._m)

    def __pos__(self):
        return self

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def norm(self) -> Fraction:
        """Field norm ``a^2 - m b^2`` (product with the conjugate)."""
        return self._a * self._a - self._b * self._b * self._m

    def conjugate(self) -> FieldScalar:
        return FieldScalar._raw(self._a, -self._b, self._m)

    def inverse(self) -> FieldScalar:
        if self._a == 0 and self._b == 0:
            raise DomainError("inverse of zero")
        nrm = self.norm()
        return FieldScalar._raw(self._a / nrm, -self._b / nrm, self._m)

    def __truediv__(self, other):
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, (int, np.integer)):
            return NotImplemented
        k = int(k)
        if k < 0:
            return self.inverse() ** (-k)
        result = FieldScalar._raw(Fraction(1), Fraction(0), self._m)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # ------------------------------------------------------------------
    # exact order structure

    def _integer_form(self) -> tuple[int, int, int]:
        """Return ``(A, B, D)`` with ``self == (A + B*sqrt(m)) / D`` and ``D > 0``."""
        qa, qb = self._a.denominator, self._b.denominator
        D = qa * qb // math.gcd(qa, qb)
        return self._a.numerator * (D // qa), self._b.numerator * (D // qb), D

    def sign(self) -> int:
        A, B, _ = self._integer_form()
        if B == 0:
            return (A > 0) - (A < 0)
        if A >= 0 and B >= 0:
            return 1
        if A <= 0 and B <= 0:
            return -1
        diff = A * A - B * B * self._m
        # diff != 0 because sqrt(m) is irrational
        return (1 if diff > 0 else -1) if A > 0 else (1 if diff < 0 else -1)

    def floor(self) -> int:
        A, B, D = self._integer_form()
        return floor_surd(A, B, D, self._m)

    def ceil(self) -> int:
        return -((-self).floor())

    def frac(self) -> FieldScalar:
        """Exact fractional part ``self - floor(self)`` in ``[0, 1)``."""
        return self - self.floor()

    def __floor__(self):
        return self.floor()

    def __ceil__(self):
        return self.ceil()

    def _cmp(self, other) -> int:
        o = self._wrap(other)
        if o is None:
            raise TypeError(f"cannot compare FieldScalar with {type(other).__name__}")
        return (self - o).sign()

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __eq__(self, other):
        o = self._wrap(other)
        if o is None:
            if isinstance(other, float):
                return self._b == 0 and self._a == other
            return NotImplemented
        if self._a != o._a or self._b != o._b:
            return False
        return self._b == 0 or self._m == o._m

    def __hash__(self):
        if self._b == 0:
            return hash(self._a)
        return hash((self._a, self._b, self._m))

    def __bool__(self):
        return self._a != 0 or self._b != 0

    # ------------------------------------------------------------------
    # conversions

    def __float__(self) -> float:
        if self._float is None:
            self._float = to_float(self)
        return self._float

    def __repr__(self):
        if self._b == 0:
            return f"FieldScalar({str(self._a)!r})"
        return f"FieldScalar({str(self._a)!r}, {str(self._b)!r}, m={self._m})"

    def __str__(self):
        if self._b == 0:
            return str(self._a)
        sign = "-" if self._b < 0 else "+"
        return f"{self._a}{sign}{abs(self._b)}*sqrt({self._m})"

    def to_json(self) -> dict:
        return {"a": str(self._a), "b": str(self._b), "m": self._m}

    @classmethod
    def from_json(cls, obj, m: int | None = None) -> FieldScalar:
        """Decode ``{"a": "p/q", "b": "r/s", "m": m}``.

        Bare numbers and rational strings are accepted as rationals; ``m``
        supplies the field when the object omits it.
        """
        if isinstance(obj, dict):
            unknown = set(obj) - {"a", "b", "m"}
            if unknown:
                raise FieldError(f"unknown FieldScalar keys {sorted(unknown)}")
            b = _as_fraction(obj.get("b", 0))
            mm = obj.get("m", m if m is not None else 1)
            if b == 0 and mm == 1 and m is not None:
                mm = m
            return cls(obj.get("a", 0), b, mm)
        if isinstance(obj, bool):
            raise FieldError(f"boolean is not a field element: {obj!r}")
        if isinstance(obj, (int, str)):
            return cls(obj, 0, m if m is not None else 1)
        if isinstance(obj, float):
            # floats are read through their shortest decimal representation
            return cls(Fraction(repr(obj)), 0, m if m is not None else 1)
        raise FieldError(f"cannot decode field element from {obj!r}")


def floor_surd(A: int, B: int, D: int, m: int) -> int:
    """``floor((A + B sqrt(m)) / D)`` for integers with ``D > 0`` and square-free ``m > 1``."""
    if B == 0:
        return A // D
    r = math.isqrt(B * B * m)
    # sqrt(B^2 m) lies strictly between r and r + 1
    if B > 0:
        return (A + r) // D
    return (A - r - 1) // D


def sqrt(m: int) -> FieldScalar:
    return FieldScalar(0, 1, m)


def golden_ratio() -> FieldScalar:
    return FieldScalar(Fraction(1, 2), Fraction(1, 2), 5)


def golden_conjugate() -> FieldScalar:
    return FieldScalar(Fraction(1, 2), Fraction(-1, 2), 5)


def field_add(x: FieldScalar, y: FieldScalar) -> FieldScalar:
    return x + y


def field_mul(x: FieldScalar, y: FieldScalar) -> FieldScalar:
    return x * y


def field_neg(x: FieldScalar) -> FieldScalar:
    return -x


def field_inv(x: FieldScalar) -> FieldScalar:
    return x.inverse()


def field_conjugate(x: FieldScalar) -> FieldScalar:
    return x.conjugate()


def _round_scaled(x: FieldScalar, shift: int) -> int:
    """Round ``|x| * 2**shift`` to the nearest integer, ties to even."""
    s = abs(x) * FieldScalar._raw(Fraction(2) ** shift, Fraction(0), x.m)
    fl = s.floor()
    rem = (s - fl - Fraction(1, 2)).sign()
    if rem > 0 or (rem == 0 and fl % 2 == 1):
        return fl + 1
    return fl


def to_float(x: FieldScalar, precision: int = 53):
    """Correctly rounded value of ``x`` with ``precision`` significant bits.

    Returns a Python ``float`` for ``precision <= 53`` and an ``mpmath.mpf``
    otherwise.
    """
    x = FieldScalar.coerce(x)
    if precision < 2:
        raise ValueError("precision must be at least 2 bits")
    if not x:
        return 0.0
    if x.is_rational and precision == 53:
        return float(x.a)
    # float estimate of |x|; go through the conjugate when a and b*sqrt(m) cancel
    a, b, m = x.a, x.b, x.m
    if x.is_rational or (a >= 0) == (b >= 0):
        est = abs(float(a) + float(b) * math.sqrt(m))
    else:
        conj = abs(float(a) - float(b) * math.sqrt(m))
        est = abs(float(x.norm())) / conj if conj else 0.0
    if est > 0 and math.isfinite(est):
        e = math.frexp(est)[1] - 1
    else:
        e = 0
    ax = abs(x)
    two = Fraction(2)
    # enforce 2**e <= |x| < 2**(e+1) exactly
    while ax < FieldScalar._raw(two ** e, Fraction(0), m):
        e -= 1
    while ax >= FieldScalar._raw(two ** (e + 1), Fraction(0), m):
        e += 1
    shift = precision - 1 - e
    M = _round_scaled(x, shift)
    if x.sign() < 0:
        M = -M
    if precision <= 53:
        return math.ldexp(float(M), -shift)
    import mpmath

    with mpmath.workprec(precision + 8):
        return mpmath.mpf((M, -shift))


def _lcm(values: Iterable[int]) -> int:
    return reduce(lambda p, q: p * q // math.gcd(p, q), values, 1)


class FrequencyMatrix:
    """The ``d x n`` matrix ``P`` whose columns generate the frequency module.

    Entries are exact :class:`FieldScalar` values sharing one radical.
    """

    __slots__ = ("_entries", "_d", "_n", "_m", "_float", "_cache")

    def __init__(self, rows: Sequence[Sequence], m: int | None = None):
        if not rows or not rows[0]:
            raise DimensionError("frequency matrix must be at least 1 x 1")
        n = len(rows[0])
        if any(len(r) != n for r in rows):
            raise DimensionError("ragged frequency matrix")
        radicals = {
            e.m for r in rows for e in r if isinstance(e, FieldScalar) and not e.is_rational
        }
        if m is not None and m != 1:
            radicals.add(m)
        if len(radicals) > 1:
            raise FieldError(f"entries use several radicals {sorted(radicals)}")
        field_m = radicals.pop() if radicals else (m or 1)
        if field_m != 1 and not is_squarefree(field_m):
            raise FieldError(f"m={field_m} is not square-free")
        self._entries = tuple(
            tuple(
                (FieldScalar._raw(e.a, e.b, field_m) if isinstance(e, FieldScalar)
                 else FieldScalar._raw(_as_fraction(e), Fraction(0), field_m))
                for e in r
            )
            for r in rows
        )
        self._d = len(rows)
        self._n = n
        self._m = field_m
        self._float = None
        self._cache = {}

    @classmethod
    def row(cls, entries: Sequence, m: int | None = None) -> FrequencyMatrix:
        """Convenience constructor for ``d == 1``."""
        return cls([list(entries)], m)

    @property
    def d(self) -> int:
        return self._d

    @property
    def n(self) -> int:
        return self._n

    @property
    def m(self) -> int:
        return self._m

    @property
    def entries(self) -> tuple[tuple[FieldScalar, ...], ...]:
        return self._entries

    def __getitem__(self, ij) -> FieldScalar:
        i, j = ij
        return self._entries[i][j]

    def column(self, j: int) -> tuple[FieldScalar, ...]:
        return tuple(r[j] for r in self._entries)

    def apply(self, k: Sequence[int]) -> tuple[FieldScalar, ...]:
        """Exact frequency vector ``P k``."""
        if len(k) != self._n:
            raise DimensionError(f"expected {self._n} integers, got {len(k)}")
        zero = FieldScalar._raw(Fraction(0), Fraction(0), self._m)
        out = []
        for r in self._entries:
            a = Fraction(0)
            b = Fraction(0)
            for e, kj in zip(r, k):
                if kj:
                    a += e.a * kj
                    b += e.b * kj
            out.append(FieldScalar._raw(a, b, self._m) if (a or b) else zero)
        return tuple(out)

    def to_numpy(self) -> np.ndarray:
        if self._float is None:
            arr = np.array([[float(e) for e in r] for r in self._entries], dtype=float)
            arr.setflags(write=False)
            self._float = arr
        return self._float

    def rational_parts(self) -> tuple[list[list[Fraction]], list[list[Fraction]]]:
        """The rational matrices ``(a_ij)`` and ``(b_ij)`` with ``P = A + B sqrt(m)``."""
        A = [[e.a for e in r] for r in self._entries]
        B = [[e.b for e in r] for r in self._entries]
        return A, B

    def scale(self, c) -> FrequencyMatrix:
        c = FieldScalar.coerce(c, self._m)
        return FrequencyMatrix([[e * c for e in r] for r in self._entries], self._m)

    def __eq__(self, other):
        if not isinstance(other, FrequencyMatrix):
            return NotImplemented
        return self._entries == other._entries

    def __hash__(self):
        return hash(self._entries)

    @property
    def is_rational(self) -> bool:
        return all(e.is_rational for r in self._entries for e in r)

    def __repr__(self):
        rows = ", ".join("[" + ", ".join(str(e) for e in r) + "]" for r in self._entries)
        return f"FrequencyMatrix([{rows}], m={self._m})"

    def to_json(self) -> dict:
        return {
            "field": {"m": self._m},
            "P": [[{"a": str(e.a), "b": str(e.b)} for e in r] for r in self._entries],
        }

    @classmethod
    def from_json(cls, obj) -> FrequencyMatrix:
        if not isinstance(obj, dict) or "P" not in obj:
            raise FieldError('matrix JSON needs a "P" key')
        m = int(obj.get("field", {}).get("m", 1))
        rows = obj["P"]
        if not isinstance(rows, list) or not rows:
            raise FieldError('"P" must be a non-empty list of rows')
        if not isinstance(rows[0], list):
            rows = [rows]
        return cls([[FieldScalar.from_json(e, m) for e in r] for r in rows], m)
