"""Top-k in general rectangles and in boxes with a small third coordinate.

Both structures are wavelet trees over y (see :class:`WaveletTree`) whose
levels also carry range-maximum indexes over weight.  A query covers its
y-range with O(log n) nodes, seeds a heap with the heaviest point of each
node's x-range, and then repeatedly pops the heaviest candidate and splits
its x-range around it.  Nothing depends on k, so every query is online.
"""

from __future__ import annotations

import bisect
import heapq
import math
from typing import Iterator, Optional, Sequence

import numpy as np

from .grid_core import BitVector, RmqIndex, WaveletTree, WeightedGrid


class _Wavelet:
    """Shared y-wavelet plumbing: points given in x order."""

    def __init__(self, cols, ys, ranks, weights):
        self.cols = [int(c) for c in cols]
        self.ranks = np.asarray(ranks, dtype=np.int64)
        self.weights = np.asarray(weights, dtype=np.float64)
        self.wt = WaveletTree(np.asarray(ys, dtype=np.int64), keep_levels=True)
        self.v = len(self.cols)
        self.ysorted = self.wt.ysorted
        self.weight_by_col = dict(zip(self.cols, self.weights.tolist()))

    def x_range(self, a: int, b: int) -> tuple[int, int]:
        """Global column range [a, b] to local half-open [lo, hi)."""
        return bisect.bisect_left(self.cols, a), bisect.bisect_right(self.cols, b)

    def cover(self, lo: int, hi: int, c, d) -> list:
        """Maximal nodes inside y-range [c, d], as (level, s, e, lo, hi)."""
        ylo = bisect.bisect_left(self.ysorted, c)
        yhi = bisect.bisect_right(self.ysorted, d)
        out = []
        if lo >= hi or ylo >= yhi:
            return out
        bits = self.wt.bits
        stack = [(0, 0, self.v, lo, hi)]
        while stack:
            lvl, s, e, lo, hi = stack.pop()
            if lo >= hi or e <= ylo or s >= yhi:
                continue
            if ylo <= s and e <= yhi:
                out.append((lvl, s, e, lo, hi))
                continue
            mid = (s + e) // 2
            bv = bits[lvl]
            base = bv.rank0(s)
            lo0 = bv.rank0(s + lo) - base
            hi0 = bv.rank0(s + hi) - base
            stack.append((lvl + 1, mid, e, lo - lo0, hi - hi0))
            stack.append((lvl + 1, s, mid, lo0, hi0))
        return out


class RangeMaxIterator:
    """Heaviest-first enumeration driven by a candidate heap.

    ``probe(node, lo, hi)`` returns ``(rank, local_x, col)`` for the
    heaviest point of ``node`` with local x in [lo, hi], or None.
    """

    def __init__(self, probe, seeds, weights):
        self._probe = probe
        self._weights = weights
        self.heap = []
        self.inserted = 0
        self.extracted = 0
        for node, lo, hi in seeds:
            self._push(node, lo, hi)

    def _push(self, node, lo, hi):
        if lo > hi:
            return
        hit = self._probe(node, lo, hi)
        if hit is not None:
            rank, x, col = hit
            heapq.heappush(self.heap, (rank, x, col, node, lo, hi))
            self.inserted += 1

    def __iter__(self):
        return self

    def __next__(self):
        if not self.heap:
            raise StopIteration
        rank, x, col, node, lo, hi = heapq.heappop(self.heap)
        self.extracted += 1
        self._push(node, lo, x - 1)
        self._push(node, x + 1, hi)
        return col, float(self._weights[col])


class RankedWavelet(_Wavelet):
    """Wavelet tree over y with a max-weight RMQ on every level."""

    def __init__(self, cols, ys, ranks, weights):
        super().__init__(cols, ys, ranks, weights)
        self.level_cols = []
        self.level_rmq = []
        for arrangement in self.wt.levels:
            self.level_cols.append([self.cols[x] for x in arrangement.tolist()])
            self.level_rmq.append(RmqIndex(self.ranks[arrangement]))

    @classmethod
    def from_grid(cls, grid: WeightedGrid) -> "RankedWavelet":
        cols = np.arange(grid.width)
        return cls(cols, grid.y_of, grid.weight_rank_of, grid.weight_of)

    def _probe(self, node, lo, hi):
        lvl, s = node
        rmq = self.level_rmq[lvl]
        p = rmq.query(s + lo, s + hi)
        return rmq.values[p], p - s, self.level_cols[lvl][p]

    def iter_topk(self, a: int, b: int, c, d) -> RangeMaxIterator:
        lo, hi = self.x_range(a, b)
        seeds = [((lvl, s), l, h - 1) for lvl, s, e, l, h in self.cover(lo, hi, c, d)]
        return RangeMaxIterator(self._probe, seeds, self.weight_by_col)

    def memory_words(self) -> int:
        return self.wt.memory_words() + sum(len(c) + r.memory_words()
                                            for c, r in zip(self.level_cols, self.level_rmq))


def topk_2d(rw: RankedWavelet, a: int, b: int, c, d, k: int) -> list:
    if k <= 0:
        return []
    it = rw.iter_topk(a, b, c, d)
    return [p for _, p in zip(range(k), it)]


class LimitedGrid(_Wavelet):
    """Points (x, y, z) with z in [0, z_max); y-wavelet whose nodes carry a
    z-wavelet with max-weight RMQs, i.e. a 2D range-max over (x, z)."""

    def __init__(self, cols, ys, zs, ranks, weights, z_max: int = 1024):
        zs = np.asarray(zs, dtype=np.int64)
        if len(zs) and (zs.min() < 0 or zs.max() >= z_max):
            raise ValueError(f"z values must lie in [0, {z_max})")
        super().__init__(cols, ys, ranks, weights)
        self.z_max = z_max
        self.zbits = max(1, (z_max - 1).bit_length())
        Z = self.zbits
        v = self.v
        self.inner = []  # per outer level: (pos, rmq, bits) lists over z-levels
        pos_idx = np.arange(v, dtype=np.int64)
        for lvl, arrangement in enumerate(self.wt.levels):
            seg = self._segment_starts(lvl)
            zl = zs[arrangement]
            rl = self.ranks[arrangement]
            positions, rmqs, bits = [], [], []
            for lam in range(Z + 1):
                order = np.lexsort((pos_idx, zl >> (Z - lam), seg))
                positions.append(order.tolist())
                rmqs.append(RmqIndex(rl[order]))
                if lam < Z:
                    bits.append(BitVector((zl[order] >> (Z - 1 - lam)) & 1))
            self.inner.append((positions, rmqs, bits))
        self.level_cols = [[self.cols[x] for x in arr.tolist()] for arr in self.wt.levels]

    def _segment_starts(self, lvl: int) -> np.ndarray:
        p = np.arange(self.v, dtype=np.int64)
        s = np.zeros(self.v, dtype=np.int64)
        e = np.full(self.v, self.v, dtype=np.int64)
        for _ in range(lvl):
            mid = (s + e) // 2
            right = p >= mid
            s = np.where(right, mid, s)
            e = np.where(right, e, mid)
        return s

    def inner_max_2d(self, lvl: int, s: int, e: int, xlo: int, xhi: int,
                     zlo: int, zhi: int) -> Optional[tuple[int, int]]:
        """Heaviest point of node (lvl, [s, e)) with local x in [xlo, xhi]
        and z in [zlo, zhi]: returns (local x, weight rank) or None."""
        xlo, xhi = max(xlo, 0), min(xhi, e - s - 1)
        zlo, zhi = max(zlo, 0), min(zhi, self.z_max - 1)
        if xlo > xhi or zlo > zhi:
            return None
        positions, rmqs, bits = self.inner[lvl]
        Z = self.zbits
        best = None
        stack = [(0, s, e, xlo, xhi + 1, 0)]
        while stack:
            lam, ns, ne, a, b, prefix = stack.pop()
            if a >= b:
                continue
            span = 1 << (Z - lam)
            zl, zr = prefix * span, prefix * span + span - 1
            if zr < zlo or zl > zhi:
                continue
            if zlo <= zl and zr <= zhi:
                rmq = rmqs[lam]
                p = rmq.query(ns + a, ns + b - 1)
                r = rmq.values[p]
                if best is None or r < best[1]:
                    best = (positions[lam][p] - s, r)
                continue
            bv = bits[lam]
            base = bv.rank0(ns)
            zeros = bv.rank0(ne) - base
            a0 = bv.rank0(ns + a) - base
            b0 = bv.rank0(ns + b) - base
            stack.append((lam + 1, ns, ns + zeros, a0, b0, 2 * prefix))
            stack.append((lam + 1, ns + zeros, ne, a - a0, b - b0, 2 * prefix + 1))
        return best

    def iter_topk(self, a: int, b: int, c, d, zlo: int, zhi: int) -> RangeMaxIterator:
        lo, hi = self.x_range(a, b)

        def probe(node, l, h):
            lvl, s, e = node
            hit = self.inner_max_2d(lvl, s, e, l, h, zlo, zhi)
            if hit is None:
                return None
            x, r = hit
            return r, x, self.level_cols[lvl][s + x]

        seeds = [((lvl, s, e), l, h - 1) for lvl, s, e, l, h in self.cover(lo, hi, c, d)]
        return RangeMaxIterator(probe, seeds, self.weight_by_col)

    def memory_words(self) -> int:
        total = self.wt.memory_words()
        for positions, rmqs, bits in self.inner:
            total += sum(len(p) for p in positions) + sum(r.memory_words() for r in rmqs)
            total += sum(b.memory_words() for b in bits)
        return total


def topk_3d_limited(lg: LimitedGrid, a: int, b: int, c, d, zlo: int, zhi: int, k: int) -> list:
    if k <= 0:
        return []
    it = lg.iter_topk(a, b, c, d, zlo, zhi)
    return [p for _, p in zip(range(k), it)]


def inner_max_2d(lg: LimitedGrid, node: tuple, xlo: int, xhi: int, zlo: int, zhi: int):
    """(local x, weight) of the heaviest point in a node's sub-box, or None."""
    lvl, s, e = node
    hit = lg.inner_max_2d(lvl, s, e, xlo, xhi, zlo, zhi)
    if hit is None:
        return None
    x, _ = hit
    col = lg.level_cols[lvl][s + x]
    return x, lg.weight_by_col[col]


class ParamStripes:
    """Weighted points with a parameter, split into horizontal stripes of
    ``height`` rows.  Inside a stripe the parameter is the wavelet
    coordinate and the row offset is the limited coordinate."""

    def __init__(self, grid: WeightedGrid, par_of: Sequence[int], height: Optional[int] = None):
        self.grid = grid
        n = grid.width
        self.par_of = np.asarray(par_of, dtype=np.int64)
        self.height = height or max(4, math.ceil(math.log2(max(n, 2))) ** 2)
        H = self.height
        y = grid.y_of
        stripe_of = y // H
        self.stripes: dict[int, LimitedGrid] = {}
        for s in np.unique(stripe_of).tolist():
            cols = np.flatnonzero(stripe_of == s)
            self.stripes[s] = LimitedGrid(cols, self.par_of[cols], y[cols] - s * H,
                                          grid.weight_rank_of[cols], grid.weight_of[cols],
                                          z_max=H)

    def iter_topk(self, a: int, b: int, h, tau1, tau2) -> Iterator[tuple[int, float]]:
        """Heaviest first over [a, b] x [0, h] x [tau1, tau2]."""
        if h < 0 or a > b or tau1 > tau2:
            return iter(())
        H = self.height
        rank = self.grid.rank
        heads = []
        for s in range(int(h) // H + 1):
            lg = self.stripes.get(s)
            if lg is None:
                continue
            top = min(H - 1, int(h) - s * H)
            it = lg.iter_topk(a, b, tau1, tau2, 0, top)
            first = next(it, None)
            if first is not None:
                heads.append((rank[first[0]], s, first, it))
        heapq.heapify(heads)

        def gen():
            while heads:
                _, s, item, it = heads[0]
                yield item
                nxt = next(it, None)
                if nxt is None:
                    heapq.heappop(heads)
                else:
                    heapq.heapreplace(heads, (rank[nxt[0]], s, nxt, it))
        return gen()

    def topk(self, a, b, h, tau1, tau2, k) -> list:
        return [p for _, p in zip(range(max(k, 0)), self.iter_topk(a, b, h, tau1, tau2))]

    def memory_words(self) -> int:
        return len(self.par_of) + sum(lg.memory_words() for lg in self.stripes.values())
