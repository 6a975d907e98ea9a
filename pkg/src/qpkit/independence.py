"""Exact decision procedures for the arithmetic conditions on the columns of P.

* ``q_independent``: no nonzero rational ``r`` with ``sum r_j p_j = 0``
  (unique ergodicity of the R^d-action).
* ``z_independent_mod_zd``: no nonzero integer ``a`` with
  ``sum a_j p_j in Z^d`` (unique ergodicity of the Z^d-action).
* ``module_dense_in_R``: density of ``p_1 Z + ... + p_n Z`` in R (d == 1).

Everything is decided in exact arithmetic. Writing ``P = A + B sqrt(m)`` with
rational ``A``, ``B`` turns each question into one about integer lattices.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import lattice
from .errors import DimensionError, PreconditionError
from .number_field import FieldScalar, FrequencyMatrix

__all__ = [
    "VerdictKind",
    "IndependenceVerdict",
    "ErgodicityReport",
    "q_independent",
    "z_independent_mod_zd",
    "module_dense_in_R",
    "ergodicity_report",
    "relation_holds",
    "brute_force_relation",
    "relation_search_bound",
    "require_q_independent",
]


class VerdictKind(str, enum.Enum):
    Q_RANK = "Q_RANK"
    Z_MOD_ZD = "Z_MOD_ZD"
    DENSITY = "DENSITY"


@dataclass(frozen=True)
class IndependenceVerdict:
    independent: bool
    witness: tuple[int, ...] | None
    kind: VerdictKind
    # DENSITY only: p_j = generator_unit * witness_j with generator_unit = p_1 / denominator
    denominator: int | None = None
    generator: FieldScalar | None = None
    irrational_pair: tuple[int, int] | None = None

    def __post_init__(self):
        if self.independent and self.witness is not None:
            raise ValueError("independent verdicts carry no witness")
        if not self.independent and (self.witness is None or not any(self.witness)):
            raise ValueError("dependent verdicts need a nonzero witness")

    def __bool__(self):
        return self.independent

    def to_json(self) -> dict:
        out = {
            "kind": self.kind.value,
            "independent": self.independent,
            "witness": list(self.witness) if self.witness is not None else None,
        }
        if self.kind is VerdictKind.DENSITY:
            out["denominator"] = self.denominator
            out["generator"] = self.generator.to_json() if self.generator is not None else None
            out["irrational_pair"] = list(self.irrational_pair) if self.irrational_pair else None
        return out


def _q_rows(P: FrequencyMatrix) -> list[list[int]]:
    A, B = P.rational_parts()
    rows = [lattice.clear_denominators(r) for r in A + B]
    return [r for r in rows if any(r)]


def _z_rows(P: FrequencyMatrix) -> list[list[int]]:
    """Integer matrix on ``(a, z) in Z^(n+d)`` whose kernel projects onto the
    relations ``sum a_j p_j in Z^d``."""
    A, B = P.rational_parts()
    d = P.d
    rows = []
    for r in B:
        ints = lattice.clear_denominators(r)
        if any(ints):
            rows.append(ints + [0] * d)
    for i, r in enumerate(A):
        D = lattice.lcm(x.denominator for x in r)
        if D == 1:
            continue  # integer row: always in Z
        z = [0] * d
        z[i] = -D
        rows.append([int(x * D) for x in r] + z)
    return rows


def q_independent(P: FrequencyMatrix) -> IndependenceVerdict:
    """Decide Q-independence of the columns of ``P``.

    The columns are Q-independent iff the stacked rational matrix
    ``[A; B]`` (2d x n) has rank n. On failure the witness is an integer
    kernel vector of that matrix.
    """
    rows = _q_rows(P)
    if rows and lattice.rational_rank(rows) == P.n:
        return IndependenceVerdict(True, None, VerdictKind.Q_RANK)
    kernel = lattice.integer_kernel(rows, P.n)
    reduced = lattice.lll_reduce(kernel)
    return IndependenceVerdict(False, lattice.smallest_vector(reduced), VerdictKind.Q_RANK)


def z_independent_mod_zd(P: FrequencyMatrix) -> IndependenceVerdict:
    """Decide Z-independence of the columns of ``P`` modulo ``Z^d``.

    The radical parts must cancel exactly (``B a = 0``) and every rational row
    must land in Z (``D_i A_i a = D_i z_i``). Both constraints are linear over
    Z in ``(a, z)``; the integer kernel (column Hermite reduction) projected
    on ``a`` is the full relation lattice.
    """
    n = P.n
    rows = _z_rows(P)
    kernel = lattice.integer_kernel(rows, n + P.d)
    relations = [v[:n] for v in kernel if any(v[:n])]
    if not relations:
        return IndependenceVerdict(True, None, VerdictKind.Z_MOD_ZD)
    reduced = lattice.lll_reduce(relations)
    return IndependenceVerdict(False, lattice.smallest_vector(reduced), VerdictKind.Z_MOD_ZD)


def module_dense_in_R(P: FrequencyMatrix) -> IndependenceVerdict:
    """Density of ``p_1 Z + ... + p_n Z`` in R for a single row ``P``.

    Dense iff some ratio ``p_i / p_j`` is irrational. Otherwise every
    ``p_j = (p_1 / t) s_j`` with integers ``s_j``; the witness is ``s`` and
    ``generator`` is the positive generator of the (cyclic) group.
    """
    if P.d != 1:
        raise DimensionError("density criterion is defined for d == 1")
    ps = P.entries[0]
    if any(not p for p in ps):
        raise PreconditionError("all frequencies must be nonzero")
    p1 = ps[0]
    ratios = []
    for j, p in enumerate(ps):
        r = p / p1
        if not r.is_rational:
            return IndependenceVerdict(True, None, VerdictKind.DENSITY, irrational_pair=(j, 0))
        ratios.append(r.a)
    t = lattice.lcm(r.denominator for r in ratios)
    s = tuple(int(r * t) for r in ratios)
    g = math.gcd(*s) if len(s) > 1 else abs(s[0])
    generator = abs(p1 * Fraction(g, t))
    return IndependenceVerdict(False, s, VerdictKind.DENSITY, denominator=t, generator=generator)


@dataclass(frozen=True)
class ErgodicityReport:
    r_action: bool
    z_action: bool
    r_witness: tuple[int, ...] | None
    z_witness: tuple[int, ...] | None
    # exponent vectors of invariant non-trivial characters exp(2 pi i a.y)
    r_invariant_character: tuple[int, ...] | None = field(default=None)
    z_invariant_character: tuple[int, ...] | None = field(default=None)

    def to_json(self) -> dict:
        def _l(v):
            return list(v) if v is not None else None

        return {
            "r_action": self.r_action,
            "z_action": self.z_action,
            "witnesses": {"r": _l(self.r_witness), "z": _l(self.z_witness)},
            "invariant_characters": {
                "r": _l(self.r_invariant_character),
                "z": _l(self.z_invariant_character),
            },
        }


def ergodicity_report(P: FrequencyMatrix) -> ErgodicityReport:
    q = q_independent(P)
    z = z_independent_mod_zd(P)
    return ErgodicityReport(
        r_action=q.independent,
        z_action=z.independent,
        r_witness=q.witness,
        z_witness=z.witness,
        r_invariant_character=q.witness,
        z_invariant_character=z.witness,
    )


def require_q_independent(P: FrequencyMatrix) -> None:
    """Raise :class:`PreconditionError` (with witness) unless rank_Q P = n."""
    v = q_independent(P)
    if not v.independent:
        raise PreconditionError(
            f"columns of P are rationally dependent: witness {list(v.witness)}", v.witness
        )


def relation_holds(P: FrequencyMatrix, a: Sequence[int], kind: VerdictKind) -> bool:
    """Check a claimed relation exactly."""
    if not any(a):
        return False
    lam = P.apply(list(a))
    if kind is VerdictKind.Q_RANK:
        return all(not x for x in lam)
    if kind is VerdictKind.Z_MOD_ZD:
        return all(x.is_rational and x.a.denominator == 1 for x in lam)
    raise ValueError(f"no relation check for {kind}")


# ----------------------------------------------------------------------
# Brute-force oracle (independent of the normal-form path above)


def relation_search_bound(P: FrequencyMatrix, kind: VerdictKind) -> int:
    """A coefficient bound that makes :func:`brute_force_relation` complete.

    If a relation exists, one exists whose entries are minors of the integer
    constraint matrix, hence at most the Hadamard product of its largest row
    norms. The bound is computed from the rows alone, without elimination.
    """
    if kind is VerdictKind.Q_RANK:
        rows = _q_rows(P)
        return max(1, lattice.hadamard_bound(rows, P.n - 1))
    rows = _z_rows(P)
    return max(1, lattice.hadamard_bound(rows, P.n + P.d - 1))


def _relation_keys(P: FrequencyMatrix, kind: VerdictKind):
    """Integer linear maps whose common zero set (mod the moduli) is the relation set."""
    A, B = P.rational_parts()
    exact = [lattice.clear_denominators(r) for r in B]
    modular: list[tuple[list[int], int]] = []
    if kind is VerdictKind.Q_RANK:
        exact += [lattice.clear_denominators(r) for r in A]
    else:
        for r in A:
            D = lattice.lcm(x.denominator for x in r)
            if D > 1:
                modular.append(([int(x * D) for x in r], D))
    exact = [r for r in exact if any(r)]
    return exact, modular


def brute_force_relation(
    P: FrequencyMatrix, kind: VerdictKind, bound: int = 10, max_candidates: int = 50_000_000
) -> tuple[int, ...] | None:
    """Exhaustive search for a relation with entries in ``[-bound, bound]``.

    Returns the relation of smallest max-norm (ties lexicographic, first
    nonzero entry positive), or ``None`` if the box holds no relation.
    Meet-in-the-middle over a split of the coordinates keeps the cost at
    roughly ``(2 bound + 1)^(n/2)`` per half.
    """
    if kind not in (VerdictKind.Q_RANK, VerdictKind.Z_MOD_ZD):
        raise ValueError(f"no brute force for {kind}")
    n = P.n
    exact, modular = _relation_keys(P, kind)
    h = n // 2
    side = 2 * bound + 1
    if side ** (n - h) > max_candidates:
        raise ValueError(f"search box too large: bound={bound}, n={n}")
    rng = np.arange(-bound, bound + 1, dtype=np.int64)

    def half(cols: range) -> tuple[np.ndarray, np.ndarray]:
        if len(cols) == 0:
            vecs = np.zeros((1, 0), dtype=np.int64)
        else:
            grids = np.meshgrid(*([rng] * len(cols)), indexing="ij")
            vecs = np.stack([g.ravel() for g in grids], axis=1)
        keys = []
        for r in exact:
            c = np.array([r[j] for j in cols], dtype=object)
            keys.append(vecs.astype(object) @ c if len(cols) else np.zeros(len(vecs), dtype=object))
        for r, D in modular:
            c = np.array([r[j] for j in cols], dtype=object)
            val = vecs.astype(object) @ c if len(cols) else np.zeros(len(vecs), dtype=object)
            keys.append(val % D)
        if keys:
            K = np.stack(keys, axis=1)
        else:
            K = np.zeros((len(vecs), 0), dtype=object)
        return vecs, K

    left_cols, right_cols = range(0, h), range(h, n)
    U, KU = half(left_cols)
    W, KW = half(right_cols)
    # the right half must cancel the left: negate exact keys, negate residues mod D
    n_exact = len(exact)
    KWn = KW.copy()
    if KWn.shape[1]:
        KWn[:, :n_exact] = -KWn[:, :n_exact]
        for idx, (_, D) in enumerate(modular):
            KWn[:, n_exact + idx] = (-KWn[:, n_exact + idx]) % D
    table: dict[tuple, list[int]] = {}
    for i, key in enumerate(map(tuple, KWn.tolist())):
        table.setdefault(key, []).append(i)
    best = None
    best_key = None
    for i, key in enumerate(map(tuple, KU.tolist())):
        js = table.get(key)
        if not js:
            continue
        u = U[i]
        for j in js:
            v = np.concatenate([u, W[j]])
            if not v.any():
                continue
            cand = lattice.normalize_sign([int(x) for x in v])
            ck = (max(abs(x) for x in cand), cand)
            if best_key is None or ck < best_key:
                best_key, best = ck, cand
    return best


def _enumerate_relations(P: FrequencyMatrix, kind: VerdictKind, bound: int):
    """Plain enumeration; used only to cross-check the meet-in-the-middle search."""
    for v in itertools.product(range(-bound, bound + 1), repeat=P.n):
        if any(v) and relation_holds(P, v, kind):
            yield v
