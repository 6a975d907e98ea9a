import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from qpkit import FrequencyMatrix, sqrt
from qpkit.analysis import (
    Direction,
    HolderMode,
    SobolevMode,
    coefficient_lp_norm,
    conjugate_exponent,
    derivative_series_probe,
    discreteness_constant,
    hausdorff_young_check,
    holder_decay_bound,
    min_frequency_ratio,
    omega1_estimate,
    parent_regularity_verdict,
    sobolev_besicovitch_norm,
)
from qpkit.errors import DimensionError
from qpkit.qp import ParentSpectrum, TrigPolynomial
from qpkit.sampling import SQRT2_ROW, random_polynomial


def test_conjugate_exponents():
    assert conjugate_exponent(1) == math.inf
    assert conjugate_exponent(2) == 2
    assert math.isclose(conjugate_exponent(4 / 3), 4)
    assert conjugate_exponent(math.inf) == 1


def test_coefficient_norms():
    c = [3, -4j]
    assert coefficient_lp_norm(c, 2) == 5
    assert coefficient_lp_norm(c, 1) == 7
    assert coefficient_lp_norm(c, math.inf) == 4


@pytest.mark.parametrize("q", [1.0, 4 / 3, 2.0, 3.0, 4.0, 6.0])
def test_single_character_is_extremal(q):
    f = TrigPolynomial(SQRT2_ROW, {(2, -1): 0.5 - 0.5j})
    rep = hausdorff_young_check(f, q)
    assert rep.holds
    assert abs(rep.lhs - rep.rhs) <= 1e-12
    assert rep.direction == (Direction.GE if q < 2 else Direction.LE)


@given(st.integers(0, 2**32 - 1), st.sampled_from([1.0, 1.5, 2.0, 2.5, 4.0]))
def test_hausdorff_young_property(seed, q):
    f = random_polynomial(np.random.default_rng(seed), terms=4, max_degree=4)
    rep = hausdorff_young_check(f, q)
    assert rep.holds and rep.slack >= -1e-8
    js = rep.to_json()
    assert js["direction"] in ("<=", ">=", "LE", "GE")


def test_holder_decay_violation_is_reported():
    f = TrigPolynomial(SQRT2_ROW, {(0, 0): 1.0, (0, 1): 1.0, (5, 0): 0.01})
    rep = holder_decay_bound(f, 0.5, 1.0)
    assert rep.checked == 2
    assert [v[0] for v in rep.violations] == [(0, 1)]
    assert holder_decay_bound(f, 0.5, 4.0).holds
    with pytest.raises(ValueError):
        holder_decay_bound(f, 1.5, 1.0)


@pytest.mark.parametrize("delta", [0.01, 0.1, 0.3])
def test_omega1_encloses_single_character(delta):
    # M|e(lam (x+t)) - e(lam x)| = |e(lam t) - 1| = 2|sin(pi lam t)|, maximal at t = delta here
    f = TrigPolynomial(SQRT2_ROW, {(0, 1): 1.0})
    lam = oracles.mp_value(sqrt(2))
    exact = float(2 * abs(mpmath.sin(mpmath.pi * lam * delta)))
    est = omega1_estimate(f, delta)
    assert est.lower <= exact <= est.upper
    assert est.upper - est.lower < 0.05 * exact + 1e-3


def test_omega1_rejects_multivariate():
    P = FrequencyMatrix([[1, sqrt(2)], [sqrt(2), 1]], 2)
    with pytest.raises(DimensionError):
        omega1_estimate(TrigPolynomial(P, {(1, 0): 1.0}), 0.1)


def test_discreteness_constant_examples():
    f = TrigPolynomial(SQRT2_ROW, {(1, 0): 1.0, (0, 1): 1.0, (1, -1): 1.0})
    dc = discreteness_constant(f)
    # |1 - sqrt 2|^2 / 2 = (3 - 2 sqrt 2) / 2
    assert dc.squared == (3 - 2 * sqrt(2)) / 2
    assert dc.argmin == (1, -1)
    assert dc.value == float(mpmath.sqrt(oracles.mp_value(dc.squared)))
    assert dc.positive


def test_min_frequency_ratio_multirow_and_offending():
    P = FrequencyMatrix([[1, 1], [2, 2]], 1)
    f = TrigPolynomial(P, {(1, -1): 1.0, (1, 0): 1.0})
    dc = min_frequency_ratio(f)
    assert dc.offending == ((1, -1),) and not dc.positive
    with pytest.raises(DimensionError):
        discreteness_constant(f)


def test_sobolev_norm_matches_formula():
    f = TrigPolynomial(SQRT2_ROW, {(0, 0): 1.0, (1, 1): 2.0})
    lam = 1 + math.sqrt(2)
    s, q = 1.5, 3.0
    qc = 1.5
    ref = (1 + (1 + lam * lam) ** (s * qc / 2) * 2 ** qc) ** (1 / qc)
    assert math.isclose(sobolev_besicovitch_norm(f, s, q), ref, rel_tol=1e-14)


def test_series_probe_partial_sums():
    F = ParentSpectrum(2, {(1, 0): 1.0, (3, 4): 0.5, (0, 0): 9.0})
    probe = derivative_series_probe(F, 1, [1, 5, 10])
    assert [r[1] for r in probe.rows] == [1.0, 3.5, 3.5]
    assert probe.growth_factors() == [3.5, 1.0]
    assert probe.convergent


def test_regularity_verdict_holder():
    f = TrigPolynomial(SQRT2_ROW, {(1, 0): 1.0, (0, 1): 0.5})
    v = parent_regularity_verdict(f, HolderMode(4, 0.5))
    assert v.ok and v.guaranteed_class == 2 and v.bound == 2.0
    assert [m for m, _, _ in v.checked_series] == [0, 1, 2]
    bad = parent_regularity_verdict(f, HolderMode(2, 0.5))
    assert not bad.ok and bad.guaranteed_class is None


def test_regularity_verdict_sobolev_and_dependence():
    f = TrigPolynomial(SQRT2_ROW, {(1, 0): 1.0})
    v = parent_regularity_verdict(f, SobolevMode(3.5, 2.0))
    assert v.ok and v.bound == 2.5 and v.guaranteed_class == 2
    P = FrequencyMatrix.row([1, Fraction(1, 2)])
    w = parent_regularity_verdict(TrigPolynomial(P, {(1, -2): 1.0, (1, 0): 1.0}), SobolevMode(5, 2))
    assert not w.ok
    assert any("rationally dependent" in s for s in w.failures)
    assert w.offending_k == [(1, -2)]
