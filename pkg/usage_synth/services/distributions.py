"""
Distribution statistics for usage and non-usage lengths.

    build_histogram        - log-binned counts (0 | 1-10 | 10-100 | 100-1000 | 1000-3600 | 3600+)
    compare_distributions  - two-sample KS statistic on raw seconds and
                             Wasserstein-1 distance on log10(1 + seconds)

No p-values are computed; the statistics are descriptive.
"""

import csv
import io
from collections import Counter
from typing import Sequence

import numpy as np
from scipy.stats import ks_2samp, wasserstein_distance

from usage_synth.core.exceptions import MetricNotAssessable
from usage_synth.models.reports import Histogram

# Lower bin edges in seconds; the last bin is open-ended.
BIN_EDGES_S: tuple[int, ...] = (0, 1, 10, 100, 1000, 3600)

SHORT_UNIT_S = 100


def build_histogram(values_s: Sequence[int]) -> Histogram:
    """Count values per log bin; edges are inclusive on the left, exclusive on the right."""
    values = np.asarray(values_s, dtype=np.int64)
    if values.size and values.min() < 0:
        raise ValueError("histogram values must be >= 0")
    # side="right" puts a value equal to an edge into the bin that starts there
    bins = np.searchsorted(np.asarray(BIN_EDGES_S), values, side="right") - 1
    counts = np.bincount(bins, minlength=len(BIN_EDGES_S))
    return Histogram(
        bin_edges_s=BIN_EDGES_S,
        counts=tuple(int(c) for c in counts),
        total=int(values.size),
    )


def compare_distributions(sample_a: Sequence[int], sample_b: Sequence[int]) -> dict[str, float]:
    """
    Returns {"ks_stat": D, "wasserstein_log10": W}.

    Raises MetricNotAssessable when either sample is empty.
    """
    if len(sample_a) == 0 or len(sample_b) == 0:
        raise MetricNotAssessable("cannot compare an empty sample")
    a = np.asarray(sample_a, dtype=np.float64)
    b = np.asarray(sample_b, dtype=np.float64)
    ks = ks_2samp(a, b, method="asymp")
    distance = wasserstein_distance(np.log10(1.0 + a), np.log10(1.0 + b))
    return {"ks_stat": float(ks.statistic), "wasserstein_log10": float(distance)}


def short_share(values_s: Sequence[int], cutoff_s: int = SHORT_UNIT_S) -> float | None:
    if len(values_s) == 0:
        return None
    return sum(1 for v in values_s if v < cutoff_s) / len(values_s)


def modal_share(values_s: Sequence[int]) -> float | None:
    """Share of values equal to the most frequent one; high values signal mechanical spacing."""
    if len(values_s) < 2:
        return None
    _, top = Counter(values_s).most_common(1)[0]
    return top / len(values_s)


def histogram_csv(histogram: Histogram) -> str:
    """bin_low,bin_high,count rows; the open last bin has bin_high "inf". Header only when empty."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["bin_low", "bin_high", "count"])
    if histogram.total == 0:
        return buf.getvalue()
    edges = histogram.bin_edges_s
    for idx, count in enumerate(histogram.counts):
        high = edges[idx + 1] if idx + 1 < len(edges) else "inf"
        writer.writerow([edges[idx], high, count])
    return buf.getvalue()
