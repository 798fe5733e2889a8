"""Weighted grid model and the unweighted three-sided primitives.

* :class:`BitVector` -- packed bits with a superblock/block rank directory.
* :class:`RmqIndex` -- range-minimum positions (block decomposition with a
  sparse table over block minima).
* :class:`WaveletTree` -- points split by y, x-order kept at every node;
  answers three-sided counting.
* :func:`report_three_sided` -- recursive RMQ splitting.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Sequence

import numpy as np

WORD = 64
WORDS_PER_SUPER = 8


class BitVector:
    __slots__ = ("n", "_words", "_super", "_block")

    def __init__(self, bits):
        bits = np.asarray(bits, dtype=np.uint8)
        self.n = n = len(bits)
        nwords = (n + WORD - 1) // WORD
        padded = np.zeros(nwords * WORD, dtype=np.uint8)
        padded[:n] = bits
        words = np.packbits(padded, bitorder="little").view("<u8") if nwords else np.zeros(0, "<u8")
        per_word = padded.reshape(nwords, WORD).sum(axis=1, dtype=np.int64) if nwords else np.zeros(0, np.int64)
        cum = np.zeros(nwords + 1, dtype=np.int64)
        np.cumsum(per_word, out=cum[1:])
        sup = cum[::WORDS_PER_SUPER]
        block = cum - np.repeat(sup, WORDS_PER_SUPER)[: nwords + 1]
        self._words = words.tolist()
        self._super = sup.tolist()
        self._block = block.astype(np.uint16).tolist()

    def __len__(self):
        return self.n

    def __getitem__(self, i: int) -> int:
        return (self._words[i >> 6] >> (i & 63)) & 1

    def rank1(self, i: int) -> int:
        """Number of ones in positions [0, i)."""
        w = i >> 6
        r = self._super[w >> 3] + self._block[w]
        off = i & 63
        if off:
            r += (self._words[w] & ((1 << off) - 1)).bit_count()
        return r

    def rank0(self, i: int) -> int:
        return i - self.rank1(i)

    def memory_words(self) -> int:
        return len(self._words) + len(self._super) + (len(self._block) + 3) // 4


class RmqIndex:
    """Leftmost position of the minimum of ``values[c..d]``.

    Ranges shorter than two blocks are scanned; longer ones combine two
    partial-block scans with a sparse table over block minima.
    """

    BLOCK = 16

    def __init__(self, values):
        vals = np.asarray(values)
        self.n = n = len(vals)
        self.values = vals.tolist()
        B = self.BLOCK
        nb = (n + B - 1) // B
        self.table = []
        if nb == 0:
            return
        if vals.dtype.kind == "f":
            pad = np.full(nb * B, np.inf)
        else:
            pad = np.full(nb * B, np.iinfo(np.int64).max, dtype=np.int64)
        pad[:n] = vals
        level = pad.reshape(nb, B).argmin(axis=1) + np.arange(nb) * B
        self.table.append(level.tolist())
        width = 1
        while 2 * width <= nb:
            left, right = level[: nb - 2 * width + 1], level[width: nb - width + 1]
            level = np.where(pad[left] <= pad[right], left, right)
            self.table.append(level.tolist())
            width *= 2

    def __len__(self):
        return self.n

    def _scan(self, c: int, d: int) -> int:
        window = self.values[c:d + 1]
        return c + window.index(min(window))

    def query(self, c: int, d: int) -> int:
        if d - c < 2 * self.BLOCK:
            return self._scan(c, d)
        B = self.BLOCK
        vals = self.values
        bl, br = c // B + 1, d // B - 1
        best = self._scan(c, bl * B - 1)
        k = (br - bl + 1).bit_length() - 1
        row = self.table[k]
        for p in (row[bl], row[br - (1 << k) + 1], self._scan((br + 1) * B, d)):
            if vals[p] < vals[best] or (vals[p] == vals[best] and p < best):
                best = p
        return best

    __call__ = query

    def memory_words(self) -> int:
        return self.n + sum(len(r) for r in self.table)


class WaveletTree:
    """Balanced tree over the y-order of points; each node keeps its points
    in x-order, stored level by level.

    A node is a half-open range ``[s, e)`` of y-ranks; at every level it
    occupies positions ``[s, e)`` of that level's bitmap, and its children
    are ``[s, mid)`` and ``[mid, e)`` with ``mid = (s + e) // 2``.
    """

    def __init__(self, ys: Sequence[int], keep_levels: bool = False):
        ys = np.asarray(ys, dtype=np.int64)
        self.v = v = len(ys)
        xs = np.arange(v, dtype=np.int64)
        by_y = np.lexsort((xs, ys))
        yrank = np.empty(v, dtype=np.int64)
        yrank[by_y] = xs
        self.ysorted = ys[by_y].tolist()
        self.xsorted = by_y.tolist()  # local x of the point with each y-rank
        self.bits: list[BitVector] = []
        # x-order arrangement per level (local x indices), when requested
        self.levels: list[np.ndarray] = []
        cur = yrank
        pos_x = xs
        s = np.zeros(v, dtype=np.int64)
        e = np.full(v, v, dtype=np.int64)
        while v and np.any(e - s > 1):
            if keep_levels:
                self.levels.append(pos_x)
            mid = (s + e) // 2
            bit = cur >= mid
            self.bits.append(BitVector(bit))
            s = np.where(bit, mid, s)
            e = np.where(bit, e, mid)
            order = np.argsort(s, kind="stable")
            cur, pos_x, s, e = cur[order], pos_x[order], s[order], e[order]
        if keep_levels:
            self.levels.append(pos_x)

    @property
    def height(self) -> int:
        return len(self.bits)

    def count(self, a: int, b: int, h) -> int:
        """Points with local x in [a, b] and y <= h."""
        if a > b or self.v == 0:
            return 0
        a = max(a, 0)
        b = min(b, self.v - 1)
        if a > b:
            return 0
        ys = self.ysorted
        lo, hi = a, b + 1
        s, e = 0, self.v
        level = 0
        acc = 0
        while lo < hi:
            if e - s == 1:
                return acc + (hi - lo if ys[s] <= h else 0)
            mid = (s + e) // 2
            bv = self.bits[level]
            base = bv.rank0(s)
            lo0 = bv.rank0(s + lo) - base
            hi0 = bv.rank0(s + hi) - base
            if ys[mid - 1] <= h:
                # whole left child qualifies; continue right
                acc += hi0 - lo0
                lo, hi = lo - lo0, hi - hi0
                s = mid
            else:
                lo, hi = lo0, hi0
                e = mid
            level += 1
        return acc

    def node_points(self, level: int, s: int, e: int) -> list[int]:
        """Local x indices stored in node [s, e) at ``level`` (needs keep_levels)."""
        return self.levels[level][s:e].tolist()

    def memory_words(self) -> int:
        return 2 * self.v + sum(b.memory_words() for b in self.bits)


def count_three_sided(wt: WaveletTree, a: int, b: int, h) -> int:
    return wt.count(a, b, h)


def report_three_sided(rmq: RmqIndex, y_of: Sequence, a: int, b: int, h) -> list[int]:
    """Positions p in [a, b] with y_of[p] <= h, by recursive RMQ splitting."""
    out = []
    if a > b:
        return out
    stack = [(a, b)]
    while stack:
        c, d = stack.pop()
        p = rmq.query(c, d)
        if y_of[p] > h:
            continue
        out.append(p)
        if c < p:
            stack.append((c, p - 1))
        if p < d:
            stack.append((p + 1, d))
    return out


class RankSpace:
    """x-coordinates replaced by their ranks among the stored points."""

    def __init__(self, xs: Sequence[int]):
        self.xs = list(xs)

    def map_range(self, a: int, b: int) -> tuple[int, int]:
        """[a, b] in original x to an inclusive rank range (empty if lo > hi)."""
        return bisect.bisect_left(self.xs, a), bisect.bisect_right(self.xs, b) - 1

    def __len__(self):
        return len(self.xs)


def rank_space(points: Sequence[tuple[int, int]]):
    """Map points (sorted by distinct x) to rank space.

    Returns the mapped points and the :class:`RankSpace` used to translate
    query ranges.
    """
    xs = [p[0] for p in points]
    if any(x2 <= x1 for x1, x2 in zip(xs, xs[1:])):
        raise ValueError("points must be sorted by distinct x")
    return [(i, p[1]) for i, p in enumerate(points)], RankSpace(xs)


@dataclass
class WeightedGrid:
    """One point per column: y, document and weight.

    ``weight_rank_of[col]`` is the point's position in the global priority
    order (0 = heaviest); ties break by doc id, then column.
    """

    y_of: np.ndarray
    weight_of: np.ndarray
    doc_of: np.ndarray

    def __post_init__(self):
        self.y_of = np.asarray(self.y_of, dtype=np.int64)
        self.weight_of = np.asarray(self.weight_of, dtype=np.float64)
        self.doc_of = np.asarray(self.doc_of, dtype=np.int64)
        w = self.width
        cols = np.arange(w, dtype=np.int64)
        order = np.lexsort((cols, self.doc_of, -self.weight_of))
        self.weight_rank_of = np.empty(w, dtype=np.int64)
        self.weight_rank_of[order] = cols
        self.col_of_rank = order.astype(np.int64)
        self.raw_weight_of = self.weight_of[order]
        self._y = self.y_of.tolist()
        self._rank = self.weight_rank_of.tolist()

    @property
    def width(self) -> int:
        return len(self.y_of)

    @property
    def y(self) -> list:
        return self._y

    @property
    def rank(self) -> list:
        return self._rank

    def point(self, col: int) -> tuple[int, float]:
        return col, float(self.weight_of[col])

    def memory_words(self) -> int:
        return 6 * self.width
