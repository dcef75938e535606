"""Tail-index estimation and unseen-species prediction for heavy-tailed samples."""
__version__ = "0.1.0"

from .partition import CumulativeCounts, Fingerprint, SampleCounts, cumulative_from_fingerprint, fingerprint_from_counts
from .tail_index import Boundary, TailIndexEstimate, estimate_alpha, score, solve_mle
from .estimators import UnseenEstimate, good_toulmin, plugin_unseen, smoothed_gt

__all__ = [
    "Boundary", "CumulativeCounts", "Fingerprint", "SampleCounts", "TailIndexEstimate", "UnseenEstimate",
    "cumulative_from_fingerprint", "estimate_alpha", "fingerprint_from_counts", "good_toulmin",
    "plugin_unseen", "score", "smoothed_gt", "solve_mle",
]
