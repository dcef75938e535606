import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tailunseen.partition import Fingerprint, cumulative_from_fingerprint
from tailunseen.samplers import Crp, SeededRng, crp_sample
from tailunseen.tail_index import (
    Boundary,
    grid_oracle_resolution,
    log_eppf,
    mle_grid_oracle,
    score,
    score_derivative,
    solve_mle,
)

from conftest import interior_fingerprints


def score_loop(alpha, fp):
    """Direct definition: sum_{k=1}^{n-1} alpha/(k-alpha) C[k+1] - (K-1)."""
    c = cumulative_from_fingerprint(fp)
    return math.fsum(alpha / (k - alpha) * c[k + 1] for k in range(1, fp.n)) - (fp.distinct - 1)


def test_score_examples():
    fp = Fingerprint.from_partition([2, 1])
    assert score(0.5, fp) == pytest.approx(0.0, abs=1e-14)
    fp = Fingerprint.from_partition([1, 1, 1])
    assert score(0.3, fp) == pytest.approx(-2.0)
    with pytest.raises(ValueError):
        score(1.0, fp)
    with pytest.raises(ValueError):
        score(0.0, fp)


def test_closed_forms():
    # {2,1}: a/(1-a) = 1 -> 1/2 ; {3,1}: a/(1-a) + a/(2-a) = 1 -> 1 - sqrt(3)/3
    assert solve_mle(Fingerprint.from_partition([2, 1])).alpha_hat == pytest.approx(0.5, abs=1e-10)
    est = solve_mle(Fingerprint.from_partition([3, 1]))
    assert est.alpha_hat == pytest.approx(1 - math.sqrt(3) / 3, abs=1e-10)
    assert est.boundary is Boundary.INTERIOR


def test_boundaries():
    est = solve_mle(Fingerprint.from_partition([1] * 5))
    assert est.alpha_hat == 1.0 and est.boundary is Boundary.ALL_SINGLETONS
    est = solve_mle(Fingerprint.from_partition([7]))
    assert est.alpha_hat == 0.0 and est.boundary is Boundary.SINGLE_BLOCK
    # n = 1 is both; singletons convention wins
    assert solve_mle(Fingerprint([1])).boundary is Boundary.ALL_SINGLETONS


@given(interior_fingerprints(), st.floats(0.01, 0.99))
def test_score_matches_direct_sum(fp, a):
    assert score(a, fp) == pytest.approx(score_loop(a, fp), rel=1e-9, abs=1e-9)
    assert score(a, cumulative_from_fingerprint(fp)) == pytest.approx(score(a, fp), rel=1e-12, abs=1e-12)


@given(interior_fingerprints(), st.floats(0.01, 0.98), st.floats(0.001, 0.2))
def test_score_strictly_increasing(fp, a, gap):
    b = min(a + gap, 0.999)
    assert score(a, fp) < score(b, fp)
    assert score_derivative(a, fp) > 0


@given(interior_fingerprints())
def test_root_certificate(fp):
    est = solve_mle(fp)
    assert est.boundary is Boundary.INTERIOR
    assert abs(score(est.alpha_hat, fp)) <= 1e-10
    d = 10 * 1e-10 / score_derivative(est.alpha_hat, fp)
    if d < min(est.alpha_hat, 1 - est.alpha_hat):
        assert score(est.alpha_hat - d, fp) < 0 < score(est.alpha_hat + d, fp)


@given(interior_fingerprints(), st.floats(0.05, 0.95))
def test_gradient_identity(fp, a):
    h = 1e-6
    deriv = (log_eppf(a + h, fp) - log_eppf(a - h, fp)) / (2 * h)
    phi = score(a, fp)
    assert a * deriv == pytest.approx(-phi, rel=1e-6, abs=1e-6 * max(1.0, fp.distinct))


def test_grid_oracle_examples():
    res = grid_oracle_resolution()
    assert abs(mle_grid_oracle(Fingerprint.from_partition([2, 1])) - 0.5) <= res
    assert abs(mle_grid_oracle(Fingerprint.from_partition([3, 1])) - 0.42265) <= res + 1e-5


def float_flat_width(fp, alpha):
    """Half-width of the band around the peak where log_eppf is flat in double precision."""
    curvature = score_derivative(alpha, fp) / alpha  # -d2 logL / d alpha2 at the root
    return math.sqrt(2 * np.finfo(float).eps * (abs(log_eppf(alpha, fp)) + 1) / curvature)


@given(interior_fingerprints())
def test_oracle_equivalence(fp):
    a = solve_mle(fp).alpha_hat
    tol = grid_oracle_resolution() + 4 * float_flat_width(fp, a)
    assert abs(a - mle_grid_oracle(fp)) <= tol


def test_crp_oracle_equivalence_large():
    fp = crp_sample(Crp(0.6), 10_000, SeededRng(5).generator())
    assert abs(solve_mle(fp).alpha_hat - mle_grid_oracle(fp)) <= 1e-4


def test_crp_recovers_alpha():
    fp = crp_sample(Crp(0.6), 200_000, SeededRng(1).generator())
    assert solve_mle(fp).alpha_hat == pytest.approx(0.6, abs=0.03)
