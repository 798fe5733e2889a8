"""Query engine: pattern lookup in the suffix tree, then top-k over the grid.

For a pattern with locus v, the documents containing it correspond one to
one with the grid points in columns [col_lo(v), col_hi(v)] whose link target
lies strictly above v, i.e. y <= depth(v) - 1.  Every query family below is a
range query over that box.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from .corpus import Collection
from .errors import InvalidInputError, MissingMeasureError
from .grid_core import WaveletTree, WeightedGrid
from .measures import NO_REPEAT, get_measure
from .suffix_index import LinkTable, SuffixTree, assign_columns, build_tree, compute_links
from .topk_range4s import ParamStripes
from .topk_threeside import StripedIndex, TopKIterator, first_stage_size

log = logging.getLogger(__name__)

DEFAULT_MEASURES = ("tf", "mindist", "docrank")
DEFAULT_ZMAX = 1024


@dataclass
class QueryResult:
    """Ranked (doc_id, weight) pairs plus the string depth of the locus."""

    items: list = field(default_factory=list)
    locus_depth: Optional[int] = None

    def __iter__(self):
        return iter(self.items)

    def __len__(self):
        return len(self.items)

    def __getitem__(self, i):
        return self.items[i]

    @property
    def docs(self) -> list[int]:
        return [d for d, _ in self.items]


class DocStream:
    """Online results as (doc_id, weight), heaviest first."""

    def __init__(self, source: Iterator, convert):
        self._source = source
        self._convert = convert
        self.emitted = 0

    def __iter__(self):
        return self

    def __next__(self):
        item = self._convert(next(self._source))
        self.emitted += 1
        return item

    def take(self, count: int) -> list:
        return [x for _, x in zip(range(count), self)]


def quantize_par(values: np.ndarray, z_max: int, name: str = "par") -> np.ndarray:
    """Floor to integers and clamp into [0, z_max)."""
    with np.errstate(invalid="ignore"):
        z = np.floor(values)
    z = np.where(np.isfinite(z), z, np.where(z > 0, z_max - 1, 0))
    out = np.clip(z, 0, z_max - 1).astype(np.int64)
    clamped = int(np.count_nonzero(z != out))
    if clamped:
        log.warning("%d %s values fall outside [0, %d) and were clamped", clamped, name, z_max)
    return out


class TopKIndex:
    """Document retrieval index over one collection.

    Columns are shared by all measures; each measure contributes its own
    weight array, priority order and top-k structure.
    """

    def __init__(self, collection: Collection, tree: SuffixTree, links: LinkTable,
                 weights: dict, pars: Optional[dict] = None, z_max: int = DEFAULT_ZMAX,
                 scale: Optional[int] = None, stripe_height: Optional[int] = None):
        self.collection = collection
        self.tree = tree
        self.links = links
        self.z_max = z_max
        self.scale = scale
        self.stripe_height = stripe_height
        self.build_seconds = 0.0
        self.y_of, self.doc_of = assign_columns(tree, links)
        self._doc_list = self.doc_of.tolist()
        self.weights = {name: np.asarray(w, dtype=np.float64) for name, w in weights.items()}
        self.pars = {name: np.asarray(z, dtype=np.int64) for name, z in (pars or {}).items()}
        self.measures = {name: get_measure(name) for name in self.weights}
        self.grids = {name: WeightedGrid(self.y_of, w, self.doc_of)
                      for name, w in self.weights.items()}
        self.striped = {name: StripedIndex(g, scale=scale) for name, g in self.grids.items()}
        self.counter = WaveletTree(self.y_of)
        self.param_index = {(m, p): ParamStripes(self.grids[m], z, height=stripe_height)
                            for m in self.grids for p, z in self.pars.items()}

    @classmethod
    def build(cls, collection: Collection, measures: Iterable[str] = DEFAULT_MEASURES,
              pars: Iterable[str] = (), z_max: int = DEFAULT_ZMAX,
              scale: Optional[int] = None, stripe_height: Optional[int] = None) -> "TopKIndex":
        if z_max < 1:
            raise InvalidInputError("z_max must be >= 1")
        t0 = time.perf_counter()
        tree = build_tree(collection)
        links = compute_links(tree)
        names = list(dict.fromkeys(measures))
        weights = {m: get_measure(m).link_weights(tree, links) for m in names}
        par_z = {}
        for p in dict.fromkeys(pars):
            raw = weights[p] if p in weights else get_measure(p).link_weights(tree, links)
            par_z[p] = quantize_par(raw, z_max, p)
        index = cls(collection, tree, links, weights, par_z, z_max, scale, stripe_height)
        index.build_seconds = time.perf_counter() - t0
        return index

    # ----------------------------------------------------------------- basics
    @property
    def n(self) -> int:
        return self.collection.n

    @property
    def D(self) -> int:
        return self.collection.D

    @property
    def num_links(self) -> int:
        return len(self.links)

    def memory_words(self) -> int:
        total = self.tree.memory_words() + 5 * len(self.links) + self.counter.memory_words()
        total += sum(g.memory_words() for g in self.grids.values())
        total += sum(s.memory_words() for s in self.striped.values())
        total += sum(p.memory_words() for p in self.param_index.values())
        return total

    def _measure(self, name) -> str:
        name = getattr(name, "name", name)
        if name not in self.grids:
            raise MissingMeasureError(f"measure {name!r} not in index "
                                      f"(built with {sorted(self.grids)})")
        return name

    def locate(self, pattern):
        """(a, b, h, locus string depth) for the query box, or None if absent."""
        codes = self.collection.encode(pattern)
        if codes is None:
            return None
        v = self.tree.locus(codes)
        if v is None:
            return None
        a, b = int(self.tree.col_lo[v]), int(self.tree.col_hi[v])
        return a, b, int(self.tree.depth[v]) - 1, int(self.tree.string_depth[v])

    def _convert(self, measure: str):
        integral = self.measures[measure].integral
        docs = self._doc_list

        def conv(point):
            col, w = point
            if integral and math.isfinite(w):
                w = int(w)
            return docs[col], w
        return conv

    # ---------------------------------------------------------------- queries
    def top_k(self, pattern, k: int, measure: str = "tf") -> QueryResult:
        if k < 0:
            raise InvalidInputError("k must be >= 0")
        m = self._measure(measure)
        box = self.locate(pattern)
        if box is None:
            return QueryResult([], None)
        a, b, h, sd = box
        conv = self._convert(m)
        return QueryResult([conv(p) for p in self.striped[m].topk(a, b, h, k)], sd)

    def top_k_online(self, pattern, measure: str = "tf") -> DocStream:
        m = self._measure(measure)
        box = self.locate(pattern)
        if box is None:
            return DocStream(iter(()), self._convert(m))
        a, b, h, _ = box
        si = self.striped[m]
        it = TopKIterator(lambda k: si.topk(a, b, h, k), first_stage_size(si.n))
        return DocStream(it, self._convert(m))

    def doc_frequency(self, pattern) -> int:
        box = self.locate(pattern)
        if box is None:
            return 0
        a, b, h, _ = box
        return self.counter.count(a, b, h)

    def report_tfidf_above(self, pattern, tau: float) -> list[tuple[int, int, float]]:
        """(doc_id, tf, tf * idf) for documents scoring at least ``tau``."""
        if tau < 0:
            raise InvalidInputError("tau must be >= 0")
        df = self.doc_frequency(pattern)
        if df == 0:
            return []
        idf = math.log(self.D / df)
        out = []
        for doc, tf in self.top_k_online(pattern, "tf"):
            score = tf * idf
            if score < tau:
                break
            out.append((doc, tf, score))
        return out

    def k_mine(self, pattern, K: int) -> list[int]:
        """Documents with at least K occurrences, most frequent first."""
        out = []
        for doc, tf in self.top_k_online(pattern, "tf"):
            if tf < K:
                break
            out.append(doc)
        return out

    def k_repeats(self, pattern, K: int) -> list[int]:
        """Documents with two occurrence starts at distance at most K."""
        out = []
        for doc, w in self.top_k_online(pattern, "mindist"):
            if w == NO_REPEAT or -w > K:
                break
            out.append(doc)
        return out

    def _param(self, measure, par) -> ParamStripes:
        m = self._measure(measure)
        if par not in self.pars:
            raise MissingMeasureError(f"parameter {par!r} not in index "
                                      f"(built with {sorted(self.pars)})")
        return self.param_index[m, par]

    def _z_range(self, tau1, tau2) -> tuple[int, int]:
        zlo = max(0, math.ceil(tau1)) if tau1 != -math.inf else 0
        zhi = min(self.z_max - 1, math.floor(tau2)) if tau2 != math.inf else self.z_max - 1
        return zlo, zhi

    def top_k_param_online(self, pattern, tau1=-math.inf, tau2=math.inf,
                           measure: str = "tf", par: str = "tf") -> DocStream:
        ps = self._param(measure, par)
        conv = self._convert(self._measure(measure))
        box = self.locate(pattern)
        if box is None or tau1 > tau2:
            return DocStream(iter(()), conv)
        a, b, h, _ = box
        zlo, zhi = self._z_range(tau1, tau2)
        return DocStream(ps.iter_topk(a, b, h, zlo, zhi), conv)

    def top_k_param(self, pattern, k: int, tau1=-math.inf, tau2=math.inf,
                    measure: str = "tf", par: str = "tf") -> QueryResult:
        if k < 0:
            raise InvalidInputError("k must be >= 0")
        stream = self.top_k_param_online(pattern, tau1, tau2, measure, par)
        box = self.locate(pattern)
        return QueryResult(stream.take(k), box[3] if box else None)


def build_index(texts: Sequence, ranks: Optional[Sequence] = None, **kwargs) -> TopKIndex:
    """Convenience: index a list of str/bytes documents."""
    return TopKIndex.build(Collection.from_bytes(texts, ranks), **kwargs)
