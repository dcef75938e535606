import numpy as np
import pytest
from hypothesis import given, strategies as st

from tailunseen.partition import (
    CumulativeCounts,
    Fingerprint,
    SampleCounts,
    cumulative_from_fingerprint,
    distinct_count,
    fingerprint_from_count_array,
    fingerprint_from_counts,
)

from conftest import samples


def test_sample_counts_validation():
    with pytest.raises(ValueError):
        SampleCounts(np.array(["a"]), np.array([0]))
    with pytest.raises(ValueError):
        SampleCounts(np.array(["a", "a"]), np.array([1, 2]))
    with pytest.raises(ValueError):
        SampleCounts(np.array([]), np.array([]))


def test_from_observations():
    s = SampleCounts.from_observations(["x", "y", "x", "z", "x"])
    assert s.as_dict() == {"x": 3, "y": 1, "z": 1}
    assert s.n == 5 and s.distinct == 3


def test_fingerprint_examples():
    s = SampleCounts.from_mapping({"a": 1, "b": 2})
    fp = fingerprint_from_counts(s)
    assert fp.dense(3).tolist() == [1, 1, 0]
    assert fp[1] == 1 and fp[2] == 1 and fp[7] == 0
    assert fingerprint_from_counts(SampleCounts.from_mapping({"a": 1, "b": 1, "c": 1})).dense().tolist() == [3, 0, 0]
    assert fingerprint_from_count_array([4]).dense().tolist() == [0, 0, 0, 1]


def test_fingerprint_rejects_inconsistent_n():
    with pytest.raises(ValueError):
        Fingerprint([1, 1], n=4)
    with pytest.raises(IndexError):
        Fingerprint([1])[0]


def test_cumulative_examples():
    c = cumulative_from_fingerprint(Fingerprint([1, 1]))
    assert c.c.tolist() == [2, 1] and c[3] == 0 and c.distinct == 2
    with pytest.raises(ValueError):
        CumulativeCounts([1, 2], 5)


def test_distinct_count_examples():
    assert distinct_count(Fingerprint([1, 1, 0])) == 2
    assert distinct_count(Fingerprint([3, 0, 0])) == 3
    assert distinct_count(Fingerprint([0, 0, 0, 1])) == 1


@given(samples())
def test_fingerprint_identities(s):
    fp = fingerprint_from_counts(s)
    ell = np.arange(1, fp.m.size + 1)
    assert int(ell @ fp.m) == s.n
    assert fp.distinct == s.distinct
    # brute-force oracle
    for l in range(1, fp.m.size + 2):
        assert fp[l] == int(np.sum(s.counts == l))


@given(samples())
def test_cumulative_round_trip(s):
    fp = fingerprint_from_counts(s)
    c = cumulative_from_fingerprint(fp)
    cc = np.append(c.c, 0)
    k = np.arange(1, c.c.size + 1)
    assert int(np.sum((cc[:-1] - cc[1:]) * k)) == s.n
    assert c[1] == distinct_count(fp)
    assert np.all(np.diff(c.c) <= 0)
    for k in range(1, c.c.size + 2):
        assert c[k] == int(np.sum(s.counts >= k))


@given(st.lists(st.integers(0, 20), max_size=15))
def test_fingerprint_trims_trailing_zeros(m):
    fp = Fingerprint(m + [0, 0])
    assert fp.m.size == 0 or fp.m[-1] > 0
    assert fp.dense(len(m)).tolist() == m
