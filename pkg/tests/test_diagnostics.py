import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special, stats

from tailunseen.diagnostics import (
    InsufficientPointsError,
    class_margin,
    default_j_max,
    expected_cumulative,
    expected_distinct,
    expected_fingerprint,
    fit_power_signature,
    tail_constant,
)
from tailunseen.partition import CumulativeCounts
from tailunseen.samplers import Crp, Discrete, DoubleZipf, Zipf


def brute_cumulative(spec, n, k, atoms=3_000_000):
    p = spec.mass(np.arange(1, atoms + 1))
    rest = spec.tail_mass(atoms + 1)
    return math.fsum(stats.binom.sf(k - 1, n, p)), n * rest  # value, bound on omitted part


def test_expected_cumulative_reference_values():
    z = Zipf(2.0)
    for k, want in ((1, 13.3371), (2, 6.4186), (3, 4.6891)):
        assert expected_cumulative(z, 100, k) == pytest.approx(want, abs=5e-5)


@pytest.mark.parametrize("spec", [Zipf(2.0), Zipf(1.3), DoubleZipf(0.5, 0.4, 40)])
@pytest.mark.parametrize("k", [1, 2, 5])
def test_expected_cumulative_against_brute_force(spec, k):
    n = 300
    got = expected_cumulative(spec, n, k)
    want, slack = brute_cumulative(spec, n, k)
    assert abs(got - want) <= slack + 1e-9 * want


def test_expected_cumulative_small_exact():
    d = Discrete([0.5, 0.5])
    assert expected_cumulative(d, 2, 1) == pytest.approx(1.5)
    assert expected_cumulative(d, 2, 2) == pytest.approx(0.5)


@given(st.lists(st.floats(0.01, 1.0), min_size=1, max_size=8), st.integers(1, 40))
def test_discrete_matches_closed_form(w, n):
    d = Discrete(np.array(w) / sum(w))
    p = d.array
    assert expected_distinct(d, n) == pytest.approx(float(np.sum(1 - (1 - p) ** n)), rel=1e-10)
    for k in (1, 2, min(3, n)):
        assert expected_cumulative(d, n, k) == pytest.approx(float(np.sum(stats.binom.sf(k - 1, n, p))), rel=1e-10)


@pytest.mark.parametrize("spec", [Zipf(2.0), Zipf(1.25), Zipf(4.0), DoubleZipf(0.5, 0.4, 90)])
@pytest.mark.parametrize("n", [10, 100, 1000])
def test_two_paths_for_expected_distinct(spec, n):
    assert expected_cumulative(spec, n, 1) == pytest.approx(expected_distinct(spec, n), rel=1e-10)


@pytest.mark.parametrize("spec", [Zipf(2.0), DoubleZipf(0.5, 0.4, 20)])
def test_expected_cumulative_nonincreasing(spec):
    vals = [expected_cumulative(spec, 200, k) for k in range(1, 30)]
    assert all(a >= b for a, b in zip(vals, vals[1:]))
    assert expected_fingerprint(spec, 200, 3) == pytest.approx(vals[2] - vals[3])


def test_crp_has_no_masses():
    with pytest.raises(ValueError):
        expected_cumulative(Crp(0.5), 10, 1)
    with pytest.raises(ValueError):
        class_margin(Crp(0.5), 0.5)


@given(st.floats(0.05, 0.95), st.floats(-3, 8))
@settings(max_examples=30)
def test_fit_exact_on_own_model(a, b):
    j = np.arange(1, 40)
    c = np.exp(special.gammaln(j - a) - special.gammaln(j) + b)
    # real-valued input through a duck-typed stand-in
    fake = type("C", (), {"c": c})()
    fit = fit_power_signature(fake, j_max=39)
    assert fit.A == pytest.approx(a, abs=1e-7)
    assert fit.B == pytest.approx(b, abs=1e-6)
    assert fit.residual_rms < 1e-6 and fit.points == 39 and fit.j_range == (1, 39)


def test_fit_needs_three_points():
    with pytest.raises(InsufficientPointsError):
        fit_power_signature(CumulativeCounts([5, 2], 7))


def test_default_j_max():
    assert default_j_max(CumulativeCounts([50, 20, 9, 5, 4, 1], 89), min_count=5) == 4
    assert default_j_max(CumulativeCounts([500, 200, 120, 100, 40], 960)) == 4
    assert default_j_max(CumulativeCounts([2, 1], 3)) == 3


def test_zipf_tail_constant_and_margin():
    z = Zipf.from_tail_index(0.5)
    assert tail_constant(z, 0.5) == pytest.approx(special.zeta(2.0) ** -0.5)
    assert math.isinf(tail_constant(z, 0.3)) and tail_constant(z, 0.7) == 0.0
    cm = class_margin(z, 0.5)
    assert 0 <= cm.margin < 10 and math.isfinite(cm.margin)


def test_double_zipf_margin_grows_with_J():
    m = [class_margin(DoubleZipf(0.5, 0.4, J), 0.4).margin for J in (10, 50, 150)]
    assert m[0] < m[1] < m[2]


def test_finite_support_margin_near_min_mass():
    d = Discrete([0.25] * 4)
    cm = class_margin(d, 0.5)
    assert cm.L == 0.0
    assert 0.2 < cm.x_at_sup <= 0.25
