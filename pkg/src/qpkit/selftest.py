"""Seeded property suite behind ``qpkit selftest``.

Each check draws its instances from a generator seeded by ``(seed, name)``
so checks are independent of each other and of execution order. Reports
contain no timings, so equal seeds give byte-identical output.
"""

from __future__ import annotations

import cmath
import math
import zlib
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .analysis import discreteness_constant, hausdorff_young_check
from .independence import VerdictKind, brute_force_relation, q_independent, z_independent_mod_zd
from .meyer import pathology_report
from .qp import (
    ParentSpectrum,
    TrigPolynomial,
    besicovitch_norm,
    bochner_fejer_sum,
    fejer_sum,
    lift,
    project,
    residual_on_grid,
    wiener_inverse,
)
from .sampling import SQRT2_ROW, certified_matrix, random_polynomial, random_spectrum
from .torus import flow, weyl_average_continuous, weyl_average_discrete


@dataclass
class CheckResult:
    name: str
    cases: int
    passed: bool
    worst: float  # the check's figure of merit, documented per check

    def to_json(self) -> dict:
        return {"name": self.name, "cases": self.cases, "passed": self.passed, "worst": self.worst}


def _rng(seed: int, name: str) -> np.random.Generator:
    return np.random.default_rng([seed, zlib.crc32(name.encode())])


def check_independence(rng, count: int) -> CheckResult:
    """worst = number of disagreements with the bounded relation search."""
    bad = 0
    for _ in range(count):
        P, _ = certified_matrix(rng, 10)
        for kind, decide in ((VerdictKind.Q_RANK, q_independent), (VerdictKind.Z_MOD_ZD, z_independent_mod_zd)):
            found = brute_force_relation(P, kind, 10)
            bad += (found is None) != decide(P).independent
    return CheckResult("independence_vs_search", count, bad == 0, float(bad))


def check_weyl_decay(rng, count: int) -> CheckResult:
    """worst = largest (error - bound); must be <= 1e-12."""
    P = SQRT2_ROW
    worst = -math.inf
    for _ in range(count):
        F = random_spectrum(rng, 2, 2, 5)
        F = ParentSpectrum(2, {k: c for k, c in F.coeffs.items() if any(k)} or {(1, 0): 1.0})
        bound_num = math.fsum(abs(c) / (2 * math.pi * abs(float(P.apply(k)[0]))) for k, c in F.coeffs.items())
        for T in (10, 100, 1000):
            for _ in range(3):
                y = rng.random(2)
                err = abs(weyl_average_continuous(F, P, y, T) - F.mean())
                worst = max(worst, err - bound_num / T)
    return CheckResult("weyl_decay_bound", count, worst <= 1e-12, worst)


def check_z_witness(rng, count: int) -> CheckResult:
    """worst = largest |discrete average - e^{2 pi i y_1}|."""
    P = SQRT2_ROW
    F = ParentSpectrum(2, {(1, 0): 1.0})
    worst = 0.0
    for _ in range(count):
        y = rng.random(2)
        target = cmath.exp(2j * math.pi * y[0])
        for T in (1, 10, 100, 1000):
            worst = max(worst, abs(weyl_average_discrete(F, P, y, T) - target))
    return CheckResult("z_action_witness", count, worst <= 1e-12, worst)


def check_round_trip(rng, count: int) -> CheckResult:
    """worst = number of polynomials whose round trip changed a coefficient."""
    bad = 0
    for _ in range(count):
        f = random_polynomial(rng, terms=int(rng.integers(0, 8)), max_degree=10)
        bad += project(lift(f), f.P) != f
    return CheckResult("lift_project_round_trip", count, bad == 0, float(bad))


def check_fejer_identity(rng, count: int) -> CheckResult:
    """worst = largest |Fejer sum on the torus - Bochner-Fejer sum on the line|."""
    worst = 0.0
    for _ in range(count):
        f = random_polynomial(rng, terms=6, max_degree=20)
        N = int(rng.integers(1, 51))
        x = float(rng.uniform(-50, 50))
        y = flow(f.P, (0.0, 0.0), [x])
        worst = max(worst, abs(fejer_sum(lift(f), N, y) - bochner_fejer_sum(f, N, x)))
    return CheckResult("fejer_identity", count, worst <= 1e-12, worst)


def check_parseval(rng, count: int) -> CheckResult:
    """worst = largest |grid norm^2 - sum |c|^2|."""
    worst = 0.0
    for _ in range(count):
        f = random_polynomial(rng, terms=8, max_degree=20)
        lhs = besicovitch_norm(f, 2, method="grid") ** 2
        rhs = math.fsum(abs(c) ** 2 for c in f.terms.values())
        worst = max(worst, abs(lhs - rhs))
    return CheckResult("parseval_grid", count, worst <= 1e-10, worst)


def check_hausdorff_young(rng, count: int) -> CheckResult:
    """worst = most negative slack over all q."""
    worst = math.inf
    ok = True
    for q in (1.0, 4 / 3, 2.0, 3.0, 4.0):
        for _ in range(count):
            f = random_polynomial(rng, terms=int(rng.integers(1, 7)), max_degree=5)
            rep = hausdorff_young_check(f, q)
            worst = min(worst, rep.slack)
            ok &= rep.holds
    return CheckResult("hausdorff_young", 5 * count, ok and worst >= -1e-8, worst)


def check_wiener_inverse(rng, count: int) -> CheckResult:
    """worst = max of coefficient error (j <= 20) and fine-grid residual."""
    f = TrigPolynomial(SQRT2_ROW, {(0, 0): 2.0, (0, 1): 1.0})
    res = wiener_inverse(f, grid=64, tail_tol=1e-12)
    coef_err = max(abs(res.inverse.terms.get((0, j), 0j) - (-1) ** j * 2.0 ** -(j + 1)) for j in range(21))
    fine = residual_on_grid(f, res.inverse, 640)
    worst = max(coef_err, fine)
    return CheckResult("wiener_inverse", 1, coef_err <= 1e-10 and fine <= 1e-9, worst)


def check_pathology(rng, count: int) -> CheckResult:
    """worst = order-0 relative increment per decade (must stay below 5%)."""
    rep = pathology_report([1e3, 1e4], orders=(0, 1))
    p0, p1 = rep.probes
    inc0 = max(r[2] for r in p0.rows[1:])
    growth1 = min(p1.growth_factors())
    ratios_ok = all(0.4 <= lo and hi <= 1.91 for _, lo, hi in rep.comparability)
    ok = inc0 < 0.05 and growth1 >= 1.5 and ratios_ok
    return CheckResult("golden_pathology", 1, ok, inc0)


def check_discreteness(rng, count: int) -> CheckResult:
    """worst = |D' - 1| + |D'(3/2 P) - 3/2| (exact, so 0)."""
    terms = {(1, 0): 1.0, (0, 1): 1.0, (1, 1): 1.0}
    d1 = discreteness_constant(TrigPolynomial(SQRT2_ROW, terms))
    d2 = discreteness_constant(TrigPolynomial(SQRT2_ROW.scale(Fraction(3, 2)), terms))
    ok = d1.squared == 1 and d2.squared == Fraction(9, 4)
    return CheckResult("discreteness_constant", 1, ok, abs(d1.value - 1) + abs(d2.value - 1.5))


CHECKS: list[tuple[str, Callable, int]] = [
    ("independence_vs_search", check_independence, 60),
    ("weyl_decay_bound", check_weyl_decay, 20),
    ("z_action_witness", check_z_witness, 10),
    ("lift_project_round_trip", check_round_trip, 200),
    ("fejer_identity", check_fejer_identity, 50),
    ("parseval_grid", check_parseval, 20),
    ("hausdorff_young", check_hausdorff_young, 30),
    ("wiener_inverse", check_wiener_inverse, 1),
    ("golden_pathology", check_pathology, 1),
    ("discreteness_constant", check_discreteness, 1),
]


def run_selftest(seed: int = 42, scale: float = 1.0) -> dict:
    """Run every check; ``scale`` multiplies the per-check instance counts."""
    results = []
    for name, fn, count in CHECKS:
        results.append(fn(_rng(seed, name), max(1, int(round(count * scale)))))
    return {
        "seed": int(seed),
        "scale": float(scale),
        "passed": all(r.passed for r in results),
        "checks": [r.to_json() for r in results],
    }
