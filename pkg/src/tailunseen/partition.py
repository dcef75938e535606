"""Sufficient statistics of an observed sample.

A sample of size ``n`` is summarised by its fingerprint ``M[l]`` (number of
species seen exactly ``l`` times) or equivalently by the cumulative counts
``C[k]`` (number of species seen at least ``k`` times).  Both vectors are
stored densely up to their last nonzero entry; higher indices are zero.
"""
from __future__ import annotations

from collections import Counter
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class SampleCounts:
    """Per-species occurrence counts of one sample.

    ``labels[i]`` is an opaque species identifier seen ``counts[i]`` times.
    Labels are never interpreted, only compared for equality.
    """

    labels: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        labels = np.asarray(self.labels)
        if counts.ndim != 1 or labels.shape != counts.shape:
            raise ValueError("labels and counts must be 1-d arrays of equal length")
        if counts.size and counts.min() < 1:
            raise ValueError("every species count must be >= 1")
        if counts.size == 0:
            raise ValueError("empty sample (n = 0)")
        if len(np.unique(labels)) != len(labels):
            raise ValueError("duplicate species label")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_mapping(cls, counts: Mapping) -> "SampleCounts":
        keys = list(counts)
        labels = np.empty(len(keys), dtype=object)
        labels[:] = keys
        return cls(labels, np.array([counts[k] for k in keys], dtype=np.int64))

    @classmethod
    def from_observations(cls, observations: Iterable) -> "SampleCounts":
        """Tally a sequence of individual observations."""
        obs = observations if isinstance(observations, np.ndarray) else None
        if obs is not None and obs.dtype != object:
            labels, counts = np.unique(obs, return_counts=True)
            return cls(labels, counts)
        return cls.from_mapping(Counter(observations))

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    @property
    def distinct(self) -> int:
        return int(self.counts.size)

    def as_dict(self) -> dict:
        return {lab: int(c) for lab, c in zip(self.labels.tolist(), self.counts.tolist())}


@dataclass(frozen=True)
class Fingerprint:
    """``m[l - 1]`` is the number of species observed exactly ``l`` times."""

    m: np.ndarray
    n: int = field(default=-1)

    def __post_init__(self):
        m = np.asarray(self.m, dtype=np.int64).ravel()
        if m.size and m.min() < 0:
            raise ValueError("fingerprint entries must be nonnegative")
        nz = np.flatnonzero(m)
        m = m[: nz[-1] + 1] if nz.size else m[:0]
        total = int(np.dot(np.arange(1, m.size + 1), m))
        n = total if self.n < 0 else int(self.n)
        if n != total:
            raise ValueError(f"sum of l * M_l is {total}, expected n = {n}")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "n", n)

    @classmethod
    def from_partition(cls, block_sizes: Iterable[int]) -> "Fingerprint":
        """Fingerprint of a partition given by its block sizes, e.g. ``[2, 1]``."""
        sizes = np.asarray(list(block_sizes), dtype=np.int64)
        if sizes.size and sizes.min() < 1:
            raise ValueError("block sizes must be >= 1")
        return cls(np.bincount(sizes, minlength=1)[1:])

    def __getitem__(self, ell: int) -> int:
        """``M[ell]`` with 1-based ``ell``; zero past the stored range."""
        if ell < 1:
            raise IndexError("fingerprint index starts at 1")
        return int(self.m[ell - 1]) if ell <= self.m.size else 0

    @property
    def distinct(self) -> int:
        return int(self.m.sum())

    def sizes(self) -> np.ndarray:
        """Distinct block sizes present, ascending."""
        return np.flatnonzero(self.m) + 1

    def dense(self, length: int | None = None) -> np.ndarray:
        """Fingerprint padded with zeros to ``length`` (default ``n``)."""
        length = self.n if length is None else length
        out = np.zeros(length, dtype=np.int64)
        k = min(length, self.m.size)
        out[:k] = self.m[:k]
        return out


@dataclass(frozen=True)
class CumulativeCounts:
    """``c[k - 1]`` is the number of species observed at least ``k`` times."""

    c: np.ndarray
    n: int

    def __post_init__(self):
        c = np.asarray(self.c, dtype=np.int64).ravel().copy()
        if c.size and (c.min() < 0 or np.any(np.diff(c) > 0)):
            raise ValueError("cumulative counts must be nonnegative and nonincreasing")
        c.setflags(write=False)
        object.__setattr__(self, "c", c)

    def __getitem__(self, k: int) -> int:
        if k < 1:
            raise IndexError("cumulative index starts at 1")
        return int(self.c[k - 1]) if k <= self.c.size else 0

    @property
    def distinct(self) -> int:
        return int(self.c[0]) if self.c.size else 0


def fingerprint_from_counts(sample: SampleCounts) -> Fingerprint:
    return Fingerprint(np.bincount(sample.counts)[1:], sample.n)


def fingerprint_from_count_array(counts: np.ndarray) -> Fingerprint:
    """Same as :func:`fingerprint_from_counts` for a bare array of positive counts."""
    counts = np.asarray(counts, dtype=np.int64)
    return Fingerprint(np.bincount(counts, minlength=1)[1:], int(counts.sum()))


def cumulative_from_fingerprint(fp: Fingerprint) -> CumulativeCounts:
    # suffix sums: C[k] = sum_{l >= k} M[l]
    c = np.cumsum(fp.m[::-1])[::-1]
    return CumulativeCounts(c, fp.n)


def distinct_count(fp: Fingerprint) -> int:
    return fp.distinct
