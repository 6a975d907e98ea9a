"""Acceptance suite: one test per criterion, each recording PASS/FAIL."""

import math
import subprocess
import sys
from fractions import Fraction

import mpmath
import numpy as np

import oracles
from qpkit import FrequencyMatrix, sqrt
from qpkit.analysis import Direction, discreteness_constant, hausdorff_young_check
from qpkit.independence import VerdictKind, brute_force_relation, q_independent, z_independent_mod_zd
from qpkit.meyer import Window, enumerate_band, pathology_report
from qpkit.qp import (
    ParentSpectrum,
    TrigPolynomial,
    besicovitch_norm,
    bochner_fejer_sum,
    fejer_sum,
    lift,
    project,
    quadrature_grid,
    residual_on_grid,
    wiener_inverse,
)
from qpkit.sampling import SQRT2_ROW, certified_matrix, random_matrix, random_polynomial, random_spectrum
from qpkit.torus import flow, weyl_average_continuous, weyl_average_discrete


def test_criterion_1_independence_matches_relation_search(criterion):
    rng = np.random.default_rng(1)
    disagreements = []
    shapes, fields = set(), set()
    dependent = {VerdictKind.Q_RANK: 0, VerdictKind.Z_MOD_ZD: 0}
    draws = 0
    for _ in range(500):
        P, used = certified_matrix(rng, 10)
        draws += used
        shapes.add((P.d, P.n))
        fields.add(P.m)
        for kind, decide in ((VerdictKind.Q_RANK, q_independent), (VerdictKind.Z_MOD_ZD, z_independent_mod_zd)):
            verdict = decide(P)
            found = brute_force_relation(P, kind, 10)
            if found is None:
                if not verdict.independent:
                    disagreements.append((P, kind, verdict.witness))
            else:
                dependent[kind] += 1
                if verdict.independent:
                    disagreements.append((P, kind, found))
    ok = not disagreements and fields == {1, 2, 5}
    criterion(1, ok, f"500 matrices ({draws} draws, {len(shapes)} shapes, fields {sorted(fields)}), "
                     f"dependent Q={dependent[VerdictKind.Q_RANK]} Z={dependent[VerdictKind.Z_MOD_ZD]}, "
                     f"disagreements={len(disagreements)}")
    assert not disagreements
    assert fields == {1, 2, 5}


def _two_character_parent(rng) -> ParentSpectrum:
    ks = set()
    while len(ks) < 2:
        k = tuple(int(v) for v in rng.integers(-5, 6, size=2))
        if any(k):
            ks.add(k)
    return ParentSpectrum(2, {k: complex(*rng.normal(size=2)) for k in sorted(ks)})


def test_criterion_2_weyl_decay_bound(criterion):
    rng = np.random.default_rng(2)
    P = SQRT2_ROW
    worst_excess = -math.inf
    worst_oracle = 0.0
    for _ in range(20):
        F = _two_character_parent(rng)
        lam = {k: oracles.mp_value(P.apply(k)[0]) for k in F.coeffs}
        bound_num = math.fsum(abs(c) / (2 * math.pi * abs(float(lam[k]))) for k, c in F.coeffs.items())
        for T in (10, 100, 1000):
            for _ in range(10):
                y = rng.random(2)
                value = weyl_average_continuous(F, P, y, T)
                err = abs(value - F.mean())
                worst_excess = max(worst_excess, err - bound_num / T)
                exact = sum(
                    mpmath.mpc(c.real, c.imag) * oracles.mp_cis(k[0] * mpmath.mpf(y[0]) + k[1] * mpmath.mpf(y[1]))
                    * oracles.sinc_average(lam[k], T)
                    for k, c in F.coeffs.items()
                )
                worst_oracle = max(worst_oracle, abs(value - complex(exact)))
    ok = worst_excess <= 1e-12 and worst_oracle <= 1e-12
    criterion(2, ok, f"max(error - bound) = {worst_excess:.3e}, max |closed form - mpmath| = {worst_oracle:.3e}")
    assert worst_excess <= 1e-12
    assert worst_oracle <= 1e-12


def test_criterion_3_discrete_average_keeps_invariant_character(criterion):
    rng = np.random.default_rng(3)
    F = ParentSpectrum(2, {(1, 0): 1.0})
    Ts = list(range(0, 101)) + [10 ** 3, 10 ** 4, 10 ** 5, 10 ** 6]
    worst = 0.0
    for _ in range(20):
        y = rng.random(2)
        target = complex(oracles.mp_cis(mpmath.mpf(y[0])))
        for T in Ts:
            worst = max(worst, abs(weyl_average_discrete(F, SQRT2_ROW, y, T) - target))
    # the companion character k=(0,1) does average out, as the irrational direction should
    G = ParentSpectrum(2, {(0, 1): 1.0})
    y = rng.random(2)
    lam = oracles.mp_value(sqrt(2))
    direct = complex(oracles.lattice_average(lam, 200) * oracles.mp_cis(mpmath.mpf(y[1])))
    decay_err = abs(weyl_average_discrete(G, SQRT2_ROW, y, 200) - direct)
    ok = worst <= 1e-12 and decay_err <= 1e-12
    criterion(3, ok, f"max |average - e^(2 pi i y1)| = {worst:.3e} over {len(Ts)} T values, "
                     f"(0,1) direct-sum check {decay_err:.3e}")
    assert worst <= 1e-12
    assert decay_err <= 1e-12


def _independent_matrix(rng) -> FrequencyMatrix:
    while True:
        P = random_matrix(rng, max_d=2, max_n=3, fields=(2, 5))
        if q_independent(P).independent:
            return P


def test_criterion_4_round_trip_and_fejer_identity(criterion):
    rng = np.random.default_rng(4)
    mismatched = 0
    for i in range(1000):
        P = SQRT2_ROW if i % 2 == 0 else _independent_matrix(rng)
        f = random_polynomial(rng, P, terms=int(rng.integers(0, 9)), max_degree=10)
        mismatched += project(lift(f), P) != f
    worst_identity = 0.0
    worst_oracle = 0.0
    for i in range(100):
        P = SQRT2_ROW if i % 2 == 0 else _independent_matrix(rng)
        f = random_polynomial(rng, P, terms=6, max_degree=20)
        N = int(rng.integers(1, 51))
        x = rng.uniform(-50, 50, size=P.d)
        y = flow(P, np.zeros(P.n), x)
        line = bochner_fejer_sum(f, N, x)
        worst_identity = max(worst_identity, abs(fejer_sum(lift(f), N, y) - line))
        weighted = {k: c * math.prod(max(0.0, 1 - abs(kj) / N) for kj in k) for k, c in f.terms.items()}
        worst_oracle = max(worst_oracle, abs(line - oracles.qp_value(P, weighted, x)))
    ok = mismatched == 0 and worst_identity <= 1e-12 and worst_oracle <= 1e-12
    criterion(4, ok, f"round trip mismatches {mismatched}/1000, Fejer identity max error {worst_identity:.3e}, "
                     f"line sum vs mpmath {worst_oracle:.3e}")
    assert mismatched == 0
    assert worst_identity <= 1e-12
    assert worst_oracle <= 1e-12


PARSEVAL_MATRICES = {
    1: FrequencyMatrix.row([1]),
    2: SQRT2_ROW,
    3: FrequencyMatrix([[1, sqrt(2), 0], [0, 0, 1]], 2),
}


def test_criterion_5_parseval_on_default_grid(criterion):
    rng = np.random.default_rng(5)
    worst = 0.0
    cases = 0
    for n, count in ((1, 40), (2, 40), (3, 6)):
        P = PARSEVAL_MATRICES[n]
        for _ in range(count):
            F = random_spectrum(rng, n, int(rng.integers(1, 12)), 20)
            coeffs = {**F.coeffs, (20,) + (0,) * (n - 1): 0.5}
            f = TrigPolynomial(P, coeffs)
            lhs = besicovitch_norm(f, 2, method="grid") ** 2
            rhs = math.fsum(abs(c) ** 2 for c in f.terms.values())
            worst = max(worst, abs(lhs - rhs))
            cases += 1
    ok = worst <= 1e-10
    criterion(5, ok, f"{cases} spectra with max|k| = 20, max |grid norm^2 - sum |c|^2| = {worst:.3e}")
    assert worst <= 1e-10


def test_criterion_6_hausdorff_young(criterion):
    rng = np.random.default_rng(6)
    worst_slack = math.inf
    wrong_direction = 0
    q2_gap = 0.0
    quad_gap = 0.0
    same_grid_gap = 0.0
    for q in (1.0, 4 / 3, 2.0, 3.0, 4.0):
        for i in range(200):
            f = random_polynomial(rng, terms=int(rng.integers(1, 8)), max_degree=6)
            rep = hausdorff_young_check(f, q)
            worst_slack = min(worst_slack, rep.slack)
            wrong_direction += rep.direction != (Direction.GE if q < 2 else Direction.LE) or not rep.holds
            if q == 2.0:
                grid = hausdorff_young_check(f, q, method="grid")
                q2_gap = max(q2_gap, abs(rep.lhs - rep.rhs), abs(grid.lhs - grid.rhs))
            if i < 10 and q in (4 / 3, 3.0):
                N = quadrature_grid(lift(f))
                ref = oracles.torus_lq_bruteforce(lift(f).coeffs, 2, q, N)
                same_grid_gap = max(same_grid_gap, abs(rep.lhs - ref) / ref)
                fine = besicovitch_norm(f, q, grid=2048)
                quad_gap = max(quad_gap, abs(rep.lhs - fine) / fine)
    worked = hausdorff_young_check(TrigPolynomial(SQRT2_ROW, {(0, 0): 1.0, (0, 1): 2.0}), 4)
    lhs_ref = mpmath.mpf(33) ** 0.25
    rhs_ref = (1 + mpmath.mpf(2) ** (mpmath.mpf(4) / 3)) ** 0.75
    rel = max(abs(worked.lhs - lhs_ref) / lhs_ref, abs(worked.rhs - rhs_ref) / rhs_ref)
    moment = oracles.even_moment({(0,): 1.0, (1,): 2.0}, 2)
    ok = worst_slack >= -1e-8 and wrong_direction == 0 and q2_gap <= 1e-10 and same_grid_gap <= 1e-12 and quad_gap <= 1e-4 and rel <= 5e-7 and moment == 33.0
    criterion(6, ok, f"1000 checks, min slack {worst_slack:.3e}, direction/holds failures {wrong_direction}, "
                     f"q=2 gap {q2_gap:.3e}, grid rule vs direct evaluation (rel) {same_grid_gap:.1e}, default rule vs 2048 grid (rel) {quad_gap:.1e}, "
                     f"q=4 worked case lhs {worked.lhs:.8f} rhs {worked.rhs:.8f} (rel err {float(rel):.1e})")
    assert worst_slack >= -1e-8
    assert wrong_direction == 0
    assert q2_gap <= 1e-10
    assert same_grid_gap <= 1e-12
    assert quad_gap <= 1e-4
    assert rel <= 5e-7
    assert moment == 33.0


def test_criterion_7_wiener_inverse_geometric_series(criterion):
    f = TrigPolynomial(SQRT2_ROW, {(0, 0): 2.0, (0, 1): 1.0})
    res = wiener_inverse(f, grid=64, tail_tol=1e-12)
    coef_err = max(
        abs(res.inverse.terms.get((0, j), 0j) - float(Fraction(-1) ** j / Fraction(2) ** (j + 1)))
        for j in range(21)
    )
    stray = max((abs(c) for k, c in res.inverse.terms.items() if k[0] != 0 or k[1] < 0), default=0.0)
    fine = residual_on_grid(f, res.inverse, 640)
    ok = coef_err <= 1e-10 and fine <= 1e-9 and res.residual <= 1e-9 and stray <= 1e-10
    criterion(7, ok, f"max coefficient error (j <= 20) {coef_err:.3e}, stray terms {stray:.3e}, "
                     f"sup |f g - 1| on 640 grid {fine:.3e}, Wiener norm residual {res.residual:.3e}")
    assert coef_err <= 1e-10
    assert stray <= 1e-10
    assert fine <= 1e-9
    assert res.residual <= 1e-9


def test_criterion_8_golden_pathology(criterion):
    radii = [1e3, 1e4, 1e5]
    rep = pathology_report(radii, orders=(0, 1))
    p0, p1 = rep.probes
    inc0 = [r[2] for r in p0.rows[1:]]
    growth1 = p1.growth_factors()
    ratios_ok = all(0.4 <= lo and hi <= 1.91 for _, lo, hi in rep.comparability)

    # independent recomputation of the band and both series at full radius
    pts = oracles.band_oracle(Fraction(-1, 2), Fraction(1, 2), 1e5)
    pts.discard((0, 0))
    lib = enumerate_band(Window.default(), 1e5).without_origin()
    same_band = set(lib.points) == pts
    mn = np.array(sorted(pts), dtype=float)
    phys = np.abs(mn[:, 0] + mn[:, 1] * float(oracles.MP_PHI))
    norms = np.hypot(mn[:, 0], mn[:, 1])
    coeff = phys ** -1.5
    series_gap = 0.0
    for order, probe in ((0, p0), (1, p1)):
        for R, s, _ in probe.rows:
            sel = norms <= R
            ref = math.fsum((norms[sel] ** order) * coeff[sel])
            series_gap = max(series_gap, abs(s - ref) / ref)
    ratio = phys / norms
    comp_gap = max(abs(rep.comparability[-1][1] - ratio.min()), abs(rep.comparability[-1][2] - ratio.max()))
    lo_all = min(lo for _, lo, _ in rep.comparability)
    hi_all = max(hi for _, _, hi in rep.comparability)

    ok = all(v < 0.05 for v in inc0) and all(g >= 1.5 for g in growth1) and ratios_ok and same_band \
        and series_gap <= 1e-9 and comp_gap <= 1e-12
    criterion(8, ok, f"order-0 increments {[f'{v:.4f}' for v in inc0]}, order-1 growth {[f'{g:.3f}' for g in growth1]}, "
                     f"comparability [{lo_all:.4f}, {hi_all:.4f}], band of {len(pts)} points matches oracle: {same_band}, "
                     f"series rel gap {series_gap:.1e}")
    assert all(v < 0.05 for v in inc0)
    assert all(g >= 1.5 for g in growth1)
    assert ratios_ok
    assert same_band
    assert series_gap <= 1e-9
    assert comp_gap <= 1e-12


def test_criterion_9_discreteness_constant(criterion):
    terms = {(1, 0): 1.0, (0, 1): 1.0, (1, 1): 1.0}
    d1 = discreteness_constant(TrigPolynomial(SQRT2_ROW, terms))
    d2 = discreteness_constant(TrigPolynomial(SQRT2_ROW.scale(Fraction(3, 2)), terms))
    # brute force: |P k|^2 / |k|^2 over the three frequencies, exact in Q(sqrt 2)
    ref = min(SQRT2_ROW.apply(k)[0] ** 2 / (k[0] ** 2 + k[1] ** 2) for k in terms)
    ok = d1.squared == 1 and d2.squared == Fraction(9, 4) and d1.squared == ref and d1.value == 1.0 and d2.value == 1.5
    criterion(9, ok, f"D'^2 = {d1.squared} (D' = {d1.value}), rescaled by 3/2: D'^2 = {d2.squared} (D' = {d2.value})")
    assert d1.squared == 1 and d1.value == 1.0
    assert d2.squared == Fraction(9, 4) and d2.value == 1.5
    assert d1.squared == ref


def test_criterion_10_selftest_is_deterministic(criterion):
    cmd = [sys.executable, "-m", "qpkit", "selftest", "--seed", "42"]
    first = subprocess.run(cmd, capture_output=True, timeout=300)
    second = subprocess.run(cmd, capture_output=True, timeout=300)
    same = first.stdout == second.stdout and len(first.stdout) > 0
    ok = same and first.returncode == 0 and second.returncode == 0
    criterion(10, ok, f"two runs, {len(first.stdout)} bytes each, identical: {same}, exit codes "
                      f"{first.returncode}/{second.returncode}")
    assert same
    assert first.returncode == 0 and second.returncode == 0
