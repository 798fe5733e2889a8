"""Generalized suffix tree, document marking, document links and grid columns.

The tree is built from the suffix array and LCP array of the concatenated
collection.  Nodes are numbered in preorder; node 0 is the virtual node
above the root (tree depth 0) and node 1 is the root (tree depth 1).
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .corpus import Collection
from .errors import InvalidInputError

NU = 0
ROOT = 1


def suffix_array(keys) -> np.ndarray:
    """Suffix array by prefix doubling over integer keys.

    Assumes every suffix is distinct (guaranteed by unique sentinels).
    """
    keys = np.asarray(keys, dtype=np.int64)
    n = len(keys)
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    rank = np.unique(keys, return_inverse=True)[1].astype(np.int64)
    h = 1
    while True:
        second = np.full(n, -1, dtype=np.int64)
        if h < n:
            second[: n - h] = rank[h:]
        sa = np.lexsort((second, rank))
        r1, r2 = rank[sa], second[sa]
        diff = np.ones(n, dtype=np.int64)
        diff[1:] = (r1[1:] != r1[:-1]) | (r2[1:] != r2[:-1])
        rank = np.empty(n, dtype=np.int64)
        rank[sa] = np.cumsum(diff) - 1
        if rank[sa[-1]] == n - 1:
            return sa.astype(np.int64)
        h *= 2


def lcp_array(keys, sa: np.ndarray) -> np.ndarray:
    """Kasai's algorithm; lcp[i] = lcp(sa[i-1], sa[i]) and lcp[0] = 0."""
    n = len(sa)
    text = list(keys)
    sal = sa.tolist()
    rank = [0] * n
    for i, p in enumerate(sal):
        rank[p] = i
    lcp = [0] * n
    h = 0
    for i in range(n):
        r = rank[i]
        if r == 0:
            h = 0
            continue
        j = sal[r - 1]
        while text[i + h] == text[j + h]:
            h += 1
        lcp[r] = h
        if h:
            h -= 1
    return np.asarray(lcp, dtype=np.int64)


class SuffixTree:
    """Compact generalized suffix tree over a frozen collection.

    Per-node arrays are indexed by preorder node id: ``parent``,
    ``string_depth``, ``depth`` (tree depth), ``sa_lo``/``sa_hi`` (leaf
    interval in suffix-array order) and ``end`` (one past the last preorder
    id of the subtree).  ``col_lo``/``col_hi`` are filled by
    :func:`assign_columns`.
    """

    def __init__(self, collection: Collection, sa, parent, string_depth, depth,
                 sa_lo, sa_hi, boundary_node=None):
        self.collection = collection
        self.keys = collection.keys()
        self.sa = np.asarray(sa, dtype=np.int64)
        self.parent = np.asarray(parent, dtype=np.int64)
        self.string_depth = np.asarray(string_depth, dtype=np.int64)
        self.depth = np.asarray(depth, dtype=np.int64)
        self.sa_lo = np.asarray(sa_lo, dtype=np.int64)
        self.sa_hi = np.asarray(sa_hi, dtype=np.int64)
        self.boundary_node = boundary_node
        self.root = ROOT
        self.num_nodes = len(self.parent)
        real_lo = self.sa_lo[1:]
        self.end = np.empty(self.num_nodes, dtype=np.int64)
        self.end[0] = self.num_nodes
        self.end[1:] = np.searchsorted(real_lo, self.sa_hi[1:], side="right") + 1
        # children in preorder == children in lexicographic edge order
        order = np.argsort(self.parent[1:], kind="stable") + 1
        counts = np.bincount(self.parent[1:], minlength=self.num_nodes)
        self.child_start = np.zeros(self.num_nodes + 1, dtype=np.int64)
        np.cumsum(counts, out=self.child_start[1:])
        self.child_list = order.astype(np.int64)
        leaves = np.flatnonzero(self.sa_lo == self.sa_hi)
        leaves = leaves[leaves != NU]
        self.leaf_of_sa = np.empty(len(self.sa), dtype=np.int64)
        self.leaf_of_sa[self.sa_lo[leaves]] = leaves
        self.col_lo = np.full(self.num_nodes, -1, dtype=np.int64)
        self.col_hi = np.full(self.num_nodes, -1, dtype=np.int64)
        self._sd = self.string_depth.tolist()
        self._sa_list = None
        self._child_keys = None

    @property
    def leaf_count(self) -> int:
        return len(self.sa)

    def is_leaf(self, v: int) -> bool:
        return v != NU and self.child_start[v] == self.child_start[v + 1]

    def children(self, v: int) -> list[int]:
        return self.child_list[self.child_start[v]:self.child_start[v + 1]].tolist()

    def leaf_payload(self, v: int) -> Optional[tuple[int, int]]:
        if not self.is_leaf(v):
            return None
        return self.collection.position_to_doc(int(self.sa[self.sa_lo[v]]))

    def edge_first_key(self, v: int, child: int) -> int:
        return self.keys[int(self.sa[self.sa_lo[child]]) + self._sd[v]]

    def _child_key_list(self) -> list:
        """First edge symbol (as sort key) of every entry of ``child_list``."""
        if self._child_keys is None:
            keys = np.frombuffer(self.keys, dtype=np.int64) if self.keys.itemsize == 8 \
                else np.asarray(self.keys, dtype=np.int64)
            cl = self.child_list
            pos = self.sa[self.sa_lo[cl]] + self.string_depth[self.parent[cl]]
            self._child_keys = keys[pos].tolist()
            self._child_list_l = cl.tolist()
            self._child_start_l = self.child_start.tolist()
        return self._child_keys

    def child_by_key(self, v: int, key: int) -> Optional[int]:
        ck = self._child_key_list()
        lo, hi = self._child_start_l[v], self._child_start_l[v + 1]
        i = bisect.bisect_left(ck, key, lo, hi)
        if i < hi and ck[i] == key:
            return self._child_list_l[i]
        return None

    def locus(self, pattern: Sequence[int]) -> Optional[int]:
        """Highest node whose path has ``pattern`` as a prefix, or None."""
        keys = self.keys
        shift = self.collection.D - 1
        pk = [c + shift for c in pattern]
        p = len(pk)
        if self._sa_list is None:
            self._sa_list = self.sa.tolist()
            self._sa_lo_l = self.sa_lo.tolist()
        sal, sd = self._sa_list, self._sd
        v, i = ROOT, 0
        while i < p:
            c = self.child_by_key(v, pk[i])
            if c is None:
                return None
            pos = sal[self._sa_lo_l[c]]
            stop = min(sd[c], p)
            for j in range(i + 1, stop):
                if keys[pos + j] != pk[j]:
                    return None
            v, i = c, stop
        return v

    def path(self, v: int) -> list[int]:
        """Symbols spelled from the root to v (sentinels as 0)."""
        if v == NU:
            return []
        pos = int(self.sa[self.sa_lo[v]])
        shift = self.collection.D - 1
        out = []
        for j in range(self._sd[v]):
            k = self.keys[pos + j]
            out.append(k - shift if k > shift else 0)
        return out

    def is_ancestor(self, u: int, v: int) -> bool:
        """u is an ancestor of v (or v itself)."""
        if u == NU:
            return True
        return u <= v < self.end[u]

    def dump(self) -> str:
        """One line per node: id, parent, string depth and column interval."""
        lines = []
        for v in range(1, self.num_nodes):
            lines.append(f"{v}\t{self.parent[v]}\t{self.string_depth[v]}\t"
                         f"[{self.col_lo[v]}, {self.col_hi[v]}]")
        return "\n".join(lines) + "\n"

    def memory_words(self) -> int:
        arrays = (self.sa, self.parent, self.string_depth, self.depth, self.sa_lo,
                  self.sa_hi, self.end, self.child_start, self.child_list,
                  self.leaf_of_sa, self.col_lo, self.col_hi)
        return sum(a.nbytes for a in arrays) // 8 + len(self.keys)


def build_tree(collection: Collection) -> SuffixTree:
    if not collection.frozen:
        raise InvalidInputError("collection must be frozen before indexing")
    keys = collection.keys()
    n = len(keys)
    sa = suffix_array(np.frombuffer(keys, dtype=np.int64) if keys.itemsize == 8 else keys)
    lcp = lcp_array(keys, sa).tolist()
    sal = sa.tolist()

    # lcp-intervals by the bottom-up stack traversal
    int_lcp, int_lb, int_rb = [], [], []
    owner = [0] * n  # owner[i]: interval containing sa positions i-1 and i
    stack = []  # entries: [lcp, lb, interval index]

    def new_interval(depth, lb):
        int_lcp.append(depth)
        int_lb.append(lb)
        int_rb.append(-1)
        return [depth, lb, len(int_lcp) - 1]

    stack.append(new_interval(0, 0))
    for i in range(1, n):
        h = lcp[i]
        lb = i - 1
        while h < stack[-1][0]:
            top = stack.pop()
            int_rb[top[2]] = i - 1
            lb = top[1]
        if h > stack[-1][0]:
            stack.append(new_interval(h, lb))
        owner[i] = stack[-1][2]
    while stack:
        top = stack.pop()
        int_rb[top[2]] = n - 1

    m = len(int_lcp)
    suffix_len = _suffix_lengths(collection)
    leaf_sd = suffix_len[sa]
    lb_all = np.concatenate([np.asarray(int_lb, dtype=np.int64), np.arange(n, dtype=np.int64)])
    rb_all = np.concatenate([np.asarray(int_rb, dtype=np.int64), np.arange(n, dtype=np.int64)])
    sd_all = np.concatenate([np.asarray(int_lcp, dtype=np.int64), leaf_sd])
    order = np.lexsort((sd_all, lb_all))  # preorder
    new_id = np.empty(len(order), dtype=np.int64)
    new_id[order] = np.arange(1, len(order) + 1)

    total = len(order) + 1
    sa_lo = np.zeros(total, dtype=np.int64)
    sa_hi = np.zeros(total, dtype=np.int64)
    sdep = np.zeros(total, dtype=np.int64)
    sa_lo[1:] = lb_all[order]
    sa_hi[1:] = rb_all[order]
    sdep[1:] = sd_all[order]
    sa_lo[0], sa_hi[0] = 0, n - 1

    parent = [0] * total
    depth = [0] * total
    chain = []  # open nodes, by preorder
    hi_l = sa_hi.tolist()
    lo_l = sa_lo.tolist()
    for v in range(1, total):
        while chain and hi_l[chain[-1]] < lo_l[v]:
            chain.pop()
        if chain:
            parent[v] = chain[-1]
            depth[v] = depth[chain[-1]] + 1
        else:
            parent[v] = NU
            depth[v] = 1
        chain.append(v)
    boundary = new_id[np.asarray(owner, dtype=np.int64)] if n else np.zeros(0, np.int64)
    boundary[0] = ROOT
    tree = SuffixTree(collection, sa, parent, sdep, depth, sa_lo, sa_hi, boundary)
    tree.lcp = np.asarray(lcp, dtype=np.int64)
    return tree


def _suffix_lengths(collection: Collection) -> np.ndarray:
    """Length (sentinel included) of the suffix starting at each position."""
    out = np.empty(collection.n, dtype=np.int64)
    for d in collection.docs:
        s = collection.doc_start(d.doc_id)
        m = len(d.text) + 1
        out[s:s + m] = np.arange(m, 0, -1)
    return out


@dataclass
class LinkTable:
    """All document links, sorted by (source node, doc id).

    ``first``/``last`` delimit, inside ``doc_leaves[doc]`` (the document's
    suffix offsets in suffix-array order), the leaves of the source subtree.
    Row i of the table is grid column i.
    """

    source: np.ndarray
    target: np.ndarray
    doc: np.ndarray
    first: np.ndarray
    last: np.ndarray
    doc_leaves: list

    def __len__(self) -> int:
        return len(self.source)

    def positions(self, i: int) -> np.ndarray:
        """Sorted occurrence offsets of path(source) in the link's document."""
        d = int(self.doc[i])
        return np.sort(self.doc_leaves[d][int(self.first[i]):int(self.last[i]) + 1])


@dataclass(frozen=True)
class DocLink:
    source: int
    target: int
    doc_id: int
    weight: float
    column: int


def compute_links(tree: SuffixTree) -> LinkTable:
    """Mark nodes per document and link each marked node to its lowest
    marked proper ancestor (or to the virtual node)."""
    coll = tree.collection
    D = coll.D
    sal = tree.sa.tolist()
    lcp = tree.lcp.tolist() if hasattr(tree, "lcp") else _lcp_from_tree(tree)
    boundary = tree.boundary_node.tolist()
    depth = tree.depth.tolist()
    leaf_of_sa = tree.leaf_of_sa.tolist()
    starts = [coll.doc_start(d) for d in range(D)] + [coll.n]

    doc_of_pos = np.repeat(np.arange(D), np.diff(np.asarray(starts))).tolist()

    src, tgt, dd, fst, lst = [], [], [], [], []
    leaves_per_doc = [[] for _ in range(D)]
    last_sa = [-1] * D
    prev_lca = [NU] * D  # lca of the previous two leaves of d
    chains = [[] for _ in range(D)]  # marked internal nodes, [node, first leaf idx]

    mono_pos, mono_val = [], []  # increasing-lcp stack for range minima
    n = len(sal)
    for i in range(n):
        if i:
            h = lcp[i]
            while mono_val and mono_val[-1] >= h:
                mono_val.pop()
                mono_pos.pop()
            mono_pos.append(i)
            mono_val.append(h)
        p = sal[i]
        d = doc_of_pos[p]
        leaf = leaf_of_sa[i]
        idx = len(leaves_per_doc[d])
        leaves_per_doc[d].append(p - starts[d])
        j = last_sa[d]
        if j < 0:
            last_sa[d] = i
            continue
        m = mono_pos[bisect.bisect_left(mono_pos, j + 1)]
        u = boundary[m]
        # previous leaf of d: link to the deeper of its two neighbouring lcas
        pl = prev_lca[d]
        t = u if depth[u] > depth[pl] else pl
        src.append(leaf_of_sa[j]); tgt.append(t); dd.append(d); fst.append(idx - 1); lst.append(idx - 1)
        prev_lca[d] = u
        chain = chains[d]
        start = idx - 1
        du = depth[u]
        while chain and depth[chain[-1][0]] > du:
            w, wfirst = chain.pop()
            par = chain[-1][0] if chain and depth[chain[-1][0]] > du else u
            src.append(w); tgt.append(par); dd.append(d); fst.append(wfirst); lst.append(idx - 1)
            start = wfirst
        if not chain or chain[-1][0] != u:
            chain.append([u, start])
        last_sa[d] = i
    for d in range(D):
        j = last_sa[d]
        idx = len(leaves_per_doc[d]) - 1
        src.append(leaf_of_sa[j]); tgt.append(prev_lca[d]); dd.append(d); fst.append(idx); lst.append(idx)
        chain = chains[d]
        while chain:
            w, wfirst = chain.pop()
            par = chain[-1][0] if chain else NU
            src.append(w); tgt.append(par); dd.append(d); fst.append(wfirst); lst.append(idx)

    src_a = np.asarray(src, dtype=np.int64)
    dd_a = np.asarray(dd, dtype=np.int64)
    order = np.lexsort((dd_a, src_a))
    return LinkTable(
        source=src_a[order],
        target=np.asarray(tgt, dtype=np.int64)[order],
        doc=dd_a[order],
        first=np.asarray(fst, dtype=np.int64)[order],
        last=np.asarray(lst, dtype=np.int64)[order],
        doc_leaves=[np.asarray(x, dtype=np.int64) for x in leaves_per_doc],
    )


def _lcp_from_tree(tree: SuffixTree) -> list:
    return lcp_array(tree.keys, tree.sa).tolist()


def assign_columns(tree: SuffixTree, links: LinkTable):
    """Give link i column i (links are in preorder of source) and set the
    column interval of every node.  Returns the grid inputs
    ``(y_of, doc_of)``: target tree depth and document per column."""
    src = links.source
    if len(src) > 1 and np.any(src[1:] < src[:-1]):
        raise InvalidInputError("links must be sorted by source node")
    nodes = np.arange(tree.num_nodes)
    tree.col_lo[:] = np.searchsorted(src, nodes, side="left")
    tree.col_hi[:] = np.searchsorted(src, tree.end, side="left") - 1
    tree.col_lo[NU], tree.col_hi[NU] = 0, len(src) - 1
    y_of = tree.depth[links.target]
    return y_of, links.doc.copy()


def mark_and_link(tree: SuffixTree, measure) -> list[DocLink]:
    """Every document link of ``tree`` with its weight under ``measure``."""
    links = compute_links(tree)
    weights = measure.link_weights(tree, links)
    return [DocLink(int(links.source[i]), int(links.target[i]), int(links.doc[i]),
                    float(weights[i]), i) for i in range(len(links))]
