"""Relevance measures and parameters over occurrence start positions.

A measure maps the sorted start offsets of a string's occurrences in one
document (plus the document itself) to a number.  Link weights are the
measure evaluated on the occurrences of path(source) in the link's document.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import MissingMeasureError

# weight of documents with fewer than two occurrences under mindist
NO_REPEAT = -math.inf


class RelevanceMeasure:
    name = ""
    integral = False

    def weight(self, positions, doc) -> float:
        raise NotImplementedError

    def link_weights(self, tree, links) -> np.ndarray:
        docs = tree.collection.docs
        out = np.empty(len(links), dtype=np.float64)
        for i in range(len(links)):
            out[i] = self.weight(links.positions(i), docs[int(links.doc[i])])
        return out

    def __repr__(self):
        return f"<measure {self.name}>"


class TermFrequency(RelevanceMeasure):
    name = "tf"
    integral = True

    def weight(self, positions, doc):
        return float(len(positions))

    def link_weights(self, tree, links):
        return (links.last - links.first + 1).astype(np.float64)


class MinDistance(RelevanceMeasure):
    """Negated minimum gap between consecutive occurrence starts."""

    name = "mindist"

    def weight(self, positions, doc):
        if len(positions) < 2:
            return NO_REPEAT
        return -float(np.min(np.diff(np.sort(np.asarray(positions)))))

    def link_weights(self, tree, links):
        out = np.full(len(links), NO_REPEAT, dtype=np.float64)
        multi = np.flatnonzero(links.last > links.first)
        for i in multi.tolist():
            pos = links.positions(i)
            out[i] = -float(np.min(np.diff(pos)))
        return out


class DocRank(RelevanceMeasure):
    name = "docrank"

    def weight(self, positions, doc):
        return float(doc.rank)

    def link_weights(self, tree, links):
        ranks = np.asarray([d.rank for d in tree.collection.docs], dtype=np.float64)
        return ranks[links.doc]


class DocLength(RelevanceMeasure):
    name = "doclen"
    integral = True

    def weight(self, positions, doc):
        return float(len(doc.text))

    def link_weights(self, tree, links):
        lens = np.asarray([len(d.text) for d in tree.collection.docs], dtype=np.float64)
        return lens[links.doc]


MEASURES = {m.name: m for m in (TermFrequency(), MinDistance(), DocRank(), DocLength())}


def get_measure(name) -> RelevanceMeasure:
    if isinstance(name, RelevanceMeasure):
        return name
    try:
        return MEASURES[name]
    except KeyError:
        raise MissingMeasureError(f"unknown measure {name!r}; "
                                  f"choose from {sorted(MEASURES)}") from None
