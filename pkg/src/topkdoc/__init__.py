"""Top-k document retrieval over a generalized suffix tree."""

from .corpus import Collection, Document
from .engine import QueryResult, TopKIndex, build_index
from .errors import CorruptIndexError, InvalidInputError, MissingMeasureError, TopKError
from .measures import MEASURES, get_measure
from .oracle import Oracle
from .persist import dumps, load, loads, save

__all__ = [
    "Collection", "Document", "QueryResult", "TopKIndex", "build_index",
    "CorruptIndexError", "InvalidInputError", "MissingMeasureError", "TopKError",
    "MEASURES", "get_measure", "Oracle", "dumps", "load", "loads", "save",
]
__version__ = "0.1.0"
