"""Brute-force reference answers: naive matching over every document."""

from __future__ import annotations

import math
from typing import Optional, Sequence

from .corpus import Collection
from .measures import NO_REPEAT, get_measure


def occurrences(text: Sequence[int], pattern: Sequence[int]) -> list[int]:
    """Start offsets of ``pattern`` in ``text``; the empty pattern occurs at
    every offset 0..len(text)."""
    p = len(pattern)
    pat = list(pattern)
    t = list(text)
    return [i for i in range(len(t) - p + 1) if t[i:i + p] == pat]


def _find_all(text: bytes, pattern: bytes) -> list[int]:
    out = []
    i = text.find(pattern)
    while i >= 0:
        out.append(i)
        i = text.find(pattern, i + 1)
    return out


class Oracle:
    def __init__(self, collection: Collection):
        self.collection = collection
        # byte copies make naive matching cheap when codes fit in a byte
        self._bytes = None
        if collection.sigma < 256:
            self._bytes = [bytes(d.text) for d in collection.docs]

    def positions(self, doc_id: int, codes: Sequence[int]) -> list[int]:
        if self._bytes is None:
            return occurrences(self.collection.docs[doc_id].text, codes)
        return _find_all(self._bytes[doc_id], bytes(codes))

    def _codes(self, pattern) -> Optional[list[int]]:
        return self.collection.encode(pattern)

    def weights(self, pattern, measure="tf") -> dict[int, float]:
        """doc_id -> weight for every document containing ``pattern``."""
        codes = self._codes(pattern)
        if codes is None:
            return {}
        m = get_measure(measure)
        out = {}
        for doc in self.collection.docs:
            pos = self.positions(doc.doc_id, codes)
            if pos:
                out[doc.doc_id] = m.weight(pos, doc)
        return out

    def ranked(self, pattern, measure="tf") -> list[tuple[int, float]]:
        w = self.weights(pattern, measure)
        return sorted(w.items(), key=lambda kv: (-kv[1], kv[0]))

    def top_k(self, pattern, k: int, measure="tf") -> list[tuple[int, float]]:
        return self.ranked(pattern, measure)[:k]

    def doc_frequency(self, pattern) -> int:
        return len(self.weights(pattern, "tf"))

    def top_k_param(self, pattern, k, tau1, tau2, measure="tf", par="tf", z_max=None):
        pw = self.weights(pattern, par)
        keep = []
        for d, w in self.ranked(pattern, measure):
            z = math.floor(pw[d]) if math.isfinite(pw[d]) else (math.inf if pw[d] > 0 else 0)
            if z_max is not None:
                z = min(max(z, 0), z_max - 1)
            if tau1 <= z <= tau2:
                keep.append((d, w))
        return keep[:k]

    def tfidf_above(self, pattern, tau):
        ranked = self.ranked(pattern, "tf")
        if not ranked:
            return []
        idf = math.log(self.collection.D / len(ranked))
        return [(d, int(tf), tf * idf) for d, tf in ranked if tf * idf >= tau]

    def k_mine(self, pattern, K):
        return [d for d, tf in self.ranked(pattern, "tf") if tf >= K]

    def k_repeats(self, pattern, K):
        return [d for d, w in self.ranked(pattern, "mindist") if w != NO_REPEAT and -w <= K]
