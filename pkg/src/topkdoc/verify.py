"""Randomized oracle batteries used by ``topkdoc verify`` and the tests."""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np

from .engine import TopKIndex, build_index
from .oracle import Oracle

KS = (1, 2, 5, None)  # None stands for "every containing document"


@dataclass
class Mismatch:
    texts: list
    pattern: object
    k: Optional[int]
    query: str
    got: object
    expected: object

    def reproducer(self) -> str:
        return (f"corpus={self.texts!r}\npattern={self.pattern!r} k={self.k} "
                f"query={self.query}\ngot={self.got!r}\nexpected={self.expected!r}")


@dataclass
class Report:
    trials: int = 0
    patterns: int = 0
    queries: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return (f"{status}: {self.trials} corpora, {self.patterns} patterns, "
                f"{self.queries} queries, {len(self.failures)} mismatches")


def random_texts(rng: random.Random, max_docs: int = 16, max_total: int = 400,
                 max_sigma: int = 8) -> tuple[list[str], list[float]]:
    D = rng.randint(1, max_docs)
    sigma = rng.randint(1, max_sigma)
    alphabet = "abcdefgh"[:sigma]
    total = rng.randint(D, max_total)
    lens = [1] * D
    for _ in range(total - D):
        lens[rng.randrange(D)] += 1
    texts = ["".join(rng.choice(alphabet) for _ in range(m)) for m in lens]
    ranks = [float(rng.choice([0, 1, 2, rng.randint(0, 9)])) for _ in range(D)]
    return texts, ranks


def patterns_upto(index: TopKIndex, max_len: int = 6, limit: Optional[int] = None) -> Iterator:
    """Every pattern of length <= max_len that occurs, plus each one-symbol
    extension of those, shortest first.

    Longer patterns with an absent prefix are absent too, so this covers
    every pattern over the alphabet up to answer equivalence.
    """
    coll = index.collection
    if coll.alphabet is not None:
        symbols = [bytes([b]) for b in coll.alphabet]
        empty = b""
    else:
        symbols = [(c,) for c in range(1, coll.sigma + 1)]
        empty = ()
    queue = deque([empty])
    count = 0
    while queue:
        p = queue.popleft()
        yield p
        count += 1
        if limit is not None and count >= limit:
            return
        if len(p) < max_len and index.locate(p) is not None:
            queue.extend(p + s for s in symbols)


def check_index(index: TopKIndex, texts, max_len: int = 6, ks: Sequence = KS,
                report: Optional[Report] = None, limit: Optional[int] = None,
                rng: Optional[random.Random] = None) -> Report:
    """Compare every query family of ``index`` with the oracle."""
    report = report or Report()
    oracle = Oracle(index.collection)
    rng = rng or random.Random(0)

    def expect(query, p, k, got, want):
        report.queries += 1
        if got != want:
            report.failures.append(Mismatch(list(texts), p, k, query, got, want))

    for p in patterns_upto(index, max_len, limit):
        report.patterns += 1
        for m in index.grids:
            full = oracle.ranked(p, m)
            for k in ks:
                kk = len(full) if k is None else k
                expect(f"top_k[{m}]", p, kk, index.top_k(p, kk, m).items, full[:kk])
            expect(f"online[{m}]", p, None, list(index.top_k_online(p, m)), full)
        expect("df", p, None, index.doc_frequency(p), oracle.doc_frequency(p))
        if "tf" in index.grids:
            tau = rng.choice([0.0, 0.5, 1.0, 2.0])
            expect("tfidf", p, None, index.report_tfidf_above(p, tau), oracle.tfidf_above(p, tau))
            K = rng.randint(1, 4)
            expect("k_mine", p, K, index.k_mine(p, K), oracle.k_mine(p, K))
        if "mindist" in index.grids:
            K = rng.randint(0, 12)
            expect("k_repeats", p, K, index.k_repeats(p, K), oracle.k_repeats(p, K))
        for (m, par) in index.param_index:
            z1 = rng.randint(0, 6)
            z2 = rng.choice([z1, z1 + 3, math.inf])
            k = rng.choice([1, 3, 100])
            expect(f"param[{m},{par}]", p, k, index.top_k_param(p, k, z1, z2, m, par).items,
                   oracle.top_k_param(p, k, z1, z2, m, par, index.z_max))
        if report.failures:
            break
    return report


def corrupt_weights(index: TopKIndex, measure: Optional[str] = None) -> TopKIndex:
    """Fault-injection hook: copy of ``index`` with one weight altered.

    The altered column has its target at the virtual node, so the empty
    pattern always exposes the fault.
    """
    measure = measure or next(iter(index.weights))
    weights = {m: w.copy() for m, w in index.weights.items()}
    col = int(np.flatnonzero(index.y_of == 0)[0])
    weights[measure][col] += 1000.0
    return TopKIndex(index.collection, index.tree, index.links, weights, index.pars,
                     index.z_max, index.scale, index.stripe_height)


def verify_random(seed: int = 0, trials: int = 100, max_len: int = 6,
                  measures: Sequence[str] = ("tf", "mindist", "docrank"),
                  pars: Sequence[str] = ("tf", "doclen"), inject_fault: bool = False,
                  ks: Sequence = KS) -> Report:
    rng = random.Random(seed)
    report = Report()
    for _ in range(trials):
        texts, ranks = random_texts(rng)
        index = build_index(texts, ranks, measures=measures, pars=pars)
        if inject_fault:
            index = corrupt_weights(index)
        report.trials += 1
        check_index(index, texts, max_len, ks, report, rng=rng)
        if report.failures:
            break
    return report
