"""Three-sided top-k on a weighted grid: [a, b] x [0, h], k heaviest points.

:class:`ClassTree` partitions the points into weight classes, refined
recursively, and answers queries by counting/reporting inside classes.
:class:`StripedIndex` keeps class trees for vertical stripes of several
widths plus precomputed answers for power-of-two runs of stripes, and picks
the stripe width from max(h, k).  :class:`TopKIterator` turns any batch
structure into an online one.
"""

from __future__ import annotations

import heapq
import logging
import math
from typing import Callable, Iterator, Optional

import numpy as np

from .grid_core import RankSpace, RmqIndex, WaveletTree, WeightedGrid, report_three_sided

log = logging.getLogger(__name__)

LEAF_SIZE = 32


def radix_sort_by_rank(cols: list, rank: list, bits: int) -> list:
    """LSD radix sort of columns by their weight ranks, ``bits`` per pass."""
    if not cols:
        return cols
    bits = max(1, bits)
    mask = (1 << bits) - 1
    top = max(rank[c] for c in cols)
    shift = 0
    while True:
        buckets = [[] for _ in range(mask + 1)]
        for c in cols:
            buckets[(rank[c] >> shift) & mask].append(c)
        cols = [c for bucket in buckets for c in bucket]
        shift += bits
        if top >> shift == 0:
            return cols


class WeightClass:
    """A set of points, all heavier than those of later sibling classes."""

    __slots__ = ("cols", "children", "ys", "space", "wt", "rmq", "_y", "_rank")

    def __init__(self, cols: list, grid: WeightedGrid, leaf_size: int, with_index: bool):
        self.cols = cols
        self.children: list[WeightClass] = []
        y = grid.y
        self._y = y
        self._rank = grid.rank
        self.ys = [y[c] for c in cols]
        self.space = self.wt = self.rmq = None
        if with_index and len(cols) > leaf_size:
            self.space = RankSpace(cols)
            self.wt = WaveletTree(self.ys)
            self.rmq = RmqIndex(self.ys)

    def __len__(self):
        return len(self.cols)

    def count(self, a: int, b: int, h) -> int:
        if self.wt is None:
            return sum(1 for c, y in zip(self.cols, self.ys) if a <= c <= b and y <= h)
        lo, hi = self.space.map_range(a, b)
        return self.wt.count(lo, hi, h)

    def report(self, a: int, b: int, h) -> list:
        if self.wt is None:
            return [c for c, y in zip(self.cols, self.ys) if a <= c <= b and y <= h]
        lo, hi = self.space.map_range(a, b)
        cols = self.cols
        return [cols[p] for p in report_three_sided(self.rmq, self.ys, lo, hi, h)]

    def memory_words(self) -> int:
        total = 2 * len(self.cols)
        if self.wt is not None:
            total += self.wt.memory_words() + self.rmq.memory_words() + len(self.cols)
        return total + sum(ch.memory_words() for ch in self.children)


class ClassTree:
    """Recursive partition of a point set into weight classes.

    The root holds every point; each class larger than ``leaf_size`` is
    split into at most ``branching`` subclasses of consecutive weight ranks.
    Classes with at most ``leaf_size`` points are scanned directly.
    """

    def __init__(self, grid: WeightedGrid, cols=None, branching: Optional[int] = None,
                 leaf_size: int = LEAF_SIZE):
        self.grid = grid
        if cols is None:
            cols = range(grid.width)
        cols = [int(c) for c in cols]
        self.m = m = len(cols)
        self.leaf_size = leaf_size
        self.branching = branching or max(2, math.ceil(m ** 0.25))
        self.lo = cols[0] if cols else 0
        self.hi = cols[-1] if cols else -1
        self.root = WeightClass(cols, grid, leaf_size, with_index=False)
        self._split(self.root)

    def _split(self, node: WeightClass):
        if len(node) <= self.leaf_size:
            return
        rank = self.grid.rank
        by_rank = sorted(node.cols, key=rank.__getitem__)
        chunk = math.ceil(len(by_rank) / self.branching)
        for i in range(0, len(by_rank), chunk):
            part = sorted(by_rank[i:i + chunk])
            child = WeightClass(part, self.grid, self.leaf_size, with_index=True)
            node.children.append(child)
            self._split(child)

    @property
    def height(self) -> int:
        def h(node):
            return 1 + max((h(c) for c in node.children), default=0)
        return h(self.root)

    def classes(self) -> Iterator[WeightClass]:
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(node.children)

    def descend(self, a: int, b: int, h, k: int) -> list:
        """Unsorted columns of the k heaviest points in [a, b] x [0, h]."""
        out: list = []
        if k <= 0 or a > b or h < 0:
            return out
        node = self.root
        if not node.children:
            return self._leaf_topk(node, a, b, h, k)
        i = 0
        while k > 0 and i < len(node.children):
            child = node.children[i]
            ki = child.count(a, b, h)
            if ki <= k:
                if ki:
                    out.extend(child.report(a, b, h))
                k -= ki
                i += 1
            elif child.children:
                node, i = child, 0
            else:
                out.extend(self._leaf_topk(child, a, b, h, k))
                break
        return out

    def _leaf_topk(self, node: WeightClass, a, b, h, k) -> list:
        hits = node.report(a, b, h)
        hits.sort(key=self.grid.rank.__getitem__)
        return hits[:k]

    def topk(self, a: int, b: int, h, k: int) -> list:
        """Columns of the k heaviest points, heaviest first."""
        found = self.descend(a, b, h, k)
        rank = self.grid.rank
        if len(found) < self.branching:
            found.sort(key=rank.__getitem__)
            return found
        bits = max(1, int(0.25 * math.log2(max(2, self.m))))
        return radix_sort_by_rank(found, rank, bits)

    def memory_words(self) -> int:
        return self.root.memory_words()


def _merge_by_rank(lists, rank: list, k: int) -> list:
    out, seen = [], set()
    for c in heapq.merge(*lists, key=rank.__getitem__):
        if c in seen:
            continue
        seen.add(c)
        out.append(c)
        if len(out) == k:
            break
    return out


class StripedIndex:
    """Vertical stripes at doubly-exponentially shrinking widths.

    Level j (1..r) cuts the columns into intervals of width ``widths[j]``,
    each indexed by a :class:`ClassTree`, and stores for every run of 2^v
    consecutive intervals the top ``caps[j]`` points for every height bound
    0..caps[j].  Level 0 is a single class tree over the whole grid.
    """

    def __init__(self, grid: WeightedGrid, scale: Optional[int] = None,
                 leaf_size: int = LEAF_SIZE, verify: bool = False):
        self.grid = grid
        self.n = n = grid.width
        self.scale = scale or max(2, int(math.log2(n)) if n > 1 else 2)
        L2 = self.scale ** 2
        self.leaf_size = leaf_size
        self.whole = ClassTree(grid, None, leaf_size=leaf_size)
        self.widths = [max(n, 1)]
        j = 1
        while n > 0:
            w = max(self._dprime(j) * L2, L2)
            self.widths.append(w)
            if w <= 4 * L2:
                break
            j += 1
        self.r = len(self.widths) - 1
        # caps[j] = dprime(j + 1), both the list length and the height range
        self.caps = [self._dprime(j + 1) for j in range(self.r + 1)]
        self.trees: list[list[ClassTree]] = [[]]
        self.lists: list[dict] = [{}]
        rank = np.asarray(grid.weight_rank_of)
        y_of = np.asarray(grid.y_of)
        for j in range(1, self.r + 1):
            width = self.widths[j]
            count = (n + width - 1) // width
            self.trees.append([ClassTree(grid, range(t * width, min((t + 1) * width, n)),
                                         leaf_size=leaf_size) for t in range(count)])
            self.lists.append(self._precompute(j, count, rank, y_of))
        if verify:
            self.verify_lists()

    def _dprime(self, j: int) -> int:
        n = self.n
        if n <= 1:
            return 1
        return max(1, math.ceil(n ** (1.0 / 2 ** j) - 1e-9))

    def _precompute(self, j: int, count: int, rank: np.ndarray, y_of: np.ndarray) -> dict:
        width, cap = self.widths[j], self.caps[j]
        table = {}
        rank_l = self.grid.rank
        for t in range(count):
            cols = np.arange(t * width, min((t + 1) * width, self.n))
            order = cols[np.argsort(rank[cols], kind="stable")]
            ys = y_of[order]
            table[t, 0] = [order[ys <= c][:cap].tolist() for c in range(cap + 1)]
        v = 1
        while (1 << v) <= count:
            half = 1 << (v - 1)
            for t in range(count - (1 << v) + 1):
                left, right = table[t, v - 1], table[t + half, v - 1]
                table[t, v] = [list(heapq.merge(left[c], right[c], key=rank_l.__getitem__))[:cap]
                               for c in range(cap + 1)]
            v += 1
        return table

    def level_for(self, h, k: int) -> int:
        m = max(h, k)
        j = 0
        for i in range(1, self.r + 1):
            if self.caps[i] > m:
                j = i
            else:
                break
        return j

    def topk_cols(self, a: int, b: int, h, k: int) -> list:
        if k <= 0 or h < 0 or self.n == 0:
            return []
        a, b = max(a, 0), min(b, self.n - 1)
        if a > b:
            return []
        j = self.level_for(h, k)
        if j == 0:
            return self.whole.topk(a, b, h, k)
        width = self.widths[j]
        trees = self.trees[j]
        rank = self.grid.rank
        t1, t2 = a // width, b // width
        if t1 == t2:
            return trees[t1].topk(a, b, h, k)
        left = trees[t1].topk(a, (t1 + 1) * width - 1, h, k)
        right = trees[t2].topk(t2 * width, b, h, k)
        if t2 == t1 + 1:
            return _merge_by_rank([left, right], rank, k)
        a1, b1 = t1 + 1, t2
        v = (b1 - a1).bit_length() - 1
        table = self.lists[j]
        first = table[a1, v][h][:k]
        second = table[b1 - (1 << v), v][h][:k]
        middle = _merge_by_rank([first, second], rank, k)
        return _merge_by_rank([left, middle, right], rank, k)

    def topk(self, a: int, b: int, h, k: int) -> list:
        w = self.grid.weight_of
        return [(c, float(w[c])) for c in self.topk_cols(a, b, h, k)]

    def verify_lists(self, samples: int = 64, seed: int = 0):
        """Check stored lists against a filter-sort scan; raises on mismatch."""
        rng = np.random.default_rng(seed)
        y_of, rank = self.grid.y_of, self.grid.weight_rank_of
        for j in range(1, self.r + 1):
            keys = list(self.lists[j])
            for idx in rng.choice(len(keys), size=min(samples, len(keys)), replace=False):
                t, v = keys[idx]
                width, cap = self.widths[j], self.caps[j]
                lo, hi = t * width, min((t + (1 << v)) * width, self.n)
                for c in range(cap + 1):
                    cols = np.arange(lo, hi)
                    cols = cols[y_of[cols] <= c]
                    expect = cols[np.argsort(rank[cols])][:cap].tolist()
                    if self.lists[j][t, v][c] != expect:
                        raise AssertionError(f"precomputed list level {j} t={t} v={v} c={c} differs")

    def memory_words(self) -> int:
        total = self.whole.memory_words()
        for j in range(1, self.r + 1):
            total += sum(t.memory_words() for t in self.trees[j])
            total += sum(len(lst) + 1 for lists in self.lists[j].values() for lst in lists)
        return total


def class_topk(ct: ClassTree, a: int, b: int, h, k: int) -> list:
    w = ct.grid.weight_of
    return [(c, float(w[c])) for c in ct.topk(a, b, h, k)]


def descend_classes(ct: ClassTree, a: int, b: int, h, k: int) -> list:
    return ct.descend(a, b, h, k)


def striped_topk(si: StripedIndex, a: int, b: int, h, k: int) -> list:
    return si.topk(a, b, h, k)


class TopKIterator:
    """Online top-k: emits results heaviest first, in stages of doubling size.

    Stage i serves k_i results from a batch answer; when a stage runs dry,
    the next batch of size s_{i+1} + k_{i+1} is fetched and its first
    s_{i+1} entries (already emitted) are dropped.
    """

    def __init__(self, batch: Callable[[int], list], first_stage: int = 1):
        self._batch = batch
        self._stage = max(1, first_stage)
        self._buf = batch(self._stage)
        self._pos = 0
        self.emitted = 0
        self._exhausted = len(self._buf) < self._stage
        self.batches = 1

    def __iter__(self):
        return self

    def __next__(self):
        if self._pos == len(self._buf):
            if self._exhausted:
                raise StopIteration
            self._stage *= 2
            want = self.emitted + self._stage
            got = self._batch(want)
            self.batches += 1
            self._exhausted = len(got) < want
            self._buf = got[self.emitted:]
            self._pos = 0
            if not self._buf:
                raise StopIteration
        item = self._buf[self._pos]
        self._pos += 1
        self.emitted += 1
        return item

    def take(self, count: int) -> list:
        out = []
        for _ in range(count):
            try:
                out.append(next(self))
            except StopIteration:
                break
        return out


def first_stage_size(n: int) -> int:
    return max(1, math.ceil(math.log2(n))) if n > 1 else 1


def online_topk(structure, a: int, b: int, h) -> TopKIterator:
    """Online wrapper around any structure with ``topk(a, b, h, k)``."""
    n = getattr(structure, "n", None) or getattr(getattr(structure, "grid", None), "width", 1)
    return TopKIterator(lambda k: structure.topk(a, b, h, k), first_stage_size(n))
