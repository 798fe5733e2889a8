"""Query latency measurements and synthetic corpora for scaling checks."""

from __future__ import annotations

import random
import statistics
import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .corpus import Collection
from .engine import TopKIndex


@dataclass
class BenchRow:
    bucket: str
    k: int
    queries: int
    median_us: float
    p99_us: float
    mean_results: float

    def tsv(self) -> str:
        return (f"{self.bucket}\t{self.k}\t{self.queries}\t{self.median_us:.1f}\t"
                f"{self.p99_us:.1f}\t{self.mean_results:.1f}")


HEADER = "bucket\tk\tqueries\tmedian_us\tp99_us\tmean_results"


def length_bucket(p: int) -> str:
    """Power-of-two buckets: 0, 1, 2-3, 4-7, ..."""
    if p < 2:
        return str(p)
    lo = 1 << (p.bit_length() - 1)
    return f"{lo}-{2 * lo - 1}"


def time_query(index: TopKIndex, pattern, k: int, measure: str = "tf",
               repeats: int = 3) -> tuple[float, int]:
    """Best-of-``repeats`` wall time in microseconds and the result size."""
    best = float("inf")
    size = 0
    for _ in range(repeats):
        t0 = time.perf_counter()
        res = index.top_k(pattern, k, measure)
        best = min(best, time.perf_counter() - t0)
        size = len(res)
    return best * 1e6, size


def run(index: TopKIndex, patterns: Sequence, ks: Sequence[int], measure: str = "tf",
        repeats: int = 3) -> list[BenchRow]:
    groups: dict = {}
    for p in patterns:
        groups.setdefault(length_bucket(len(p)), []).append(p)
    rows = []
    for bucket in sorted(groups, key=lambda b: int(b.split("-")[0])):
        for k in ks:
            times, sizes = [], []
            for p in groups[bucket]:
                t, s = time_query(index, p, k, measure, repeats)
                times.append(t)
                sizes.append(s)
            rows.append(BenchRow(bucket, k, len(times), statistics.median(times),
                                 float(np.percentile(times, 99)), statistics.fmean(sizes)))
    return rows


def synthetic_texts(total: int, docs: int, sigma: int = 4, seed: int = 0) -> list[bytes]:
    """Random documents over the first ``sigma`` lowercase letters."""
    rng = np.random.default_rng(seed)
    letters = np.frombuffer(b"abcdefghijklmnopqrstuvwxyz"[:sigma], dtype=np.uint8)
    cuts = np.sort(rng.choice(np.arange(1, total), size=docs - 1, replace=False))
    body = letters[rng.integers(0, sigma, size=total)]
    return [bytes(part) for part in np.split(body, cuts)]


def sample_patterns(collection: Collection, length: int, count: int, seed: int = 0) -> list[bytes]:
    """Substrings of the collection, so every pattern occurs."""
    rng = random.Random(seed)
    out = []
    docs = [d for d in collection.docs if len(d.text) >= length]
    for _ in range(count):
        d = rng.choice(docs)
        i = rng.randint(0, len(d.text) - length)
        out.append(collection.decode(d.text[i:i + length]))
    return out
