import sys

import numpy as np
from hypothesis import HealthCheck, settings, strategies as st

from tailunseen.partition import Fingerprint, SampleCounts

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

count_arrays = st.lists(st.integers(1, 60), min_size=1, max_size=40)


@st.composite
def samples(draw):
    counts = draw(count_arrays)
    return SampleCounts(np.arange(len(counts)), np.array(counts))


@st.composite
def interior_fingerprints(draw):
    """Fingerprints with 1 < K < n (an interior MLE exists)."""
    counts = draw(st.lists(st.integers(1, 40), min_size=2, max_size=30))
    if max(counts) == 1:
        counts[0] = 2
    return Fingerprint.from_partition(counts)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULT_LINES", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
