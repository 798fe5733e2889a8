"""Document collection: ingestion, alphabet coding and global positions."""

from __future__ import annotations

import bisect
import logging
import os
from array import array
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import InvalidInputError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Document:
    doc_id: int
    text: tuple
    rank: float = 0.0
    name: str = ""

    def __len__(self) -> int:
        return len(self.text)


class Collection:
    """An ordered set of documents over the integer alphabet [1, sigma].

    Every document is followed by its own sentinel.  Sentinels are ordered
    by doc_id and compare below every real symbol, so all suffixes of the
    concatenation are distinct.
    """

    def __init__(self, sigma: int, alphabet: Optional[bytes] = None):
        if sigma < 1:
            raise InvalidInputError("alphabet size must be >= 1")
        self.sigma = sigma
        # alphabet[c - 1] is the byte coded as c, when ingested from bytes
        self.alphabet = alphabet
        self.docs: list[Document] = []
        self._starts: list[int] = []
        self.n = 0
        self._frozen = False
        self._keys: Optional[array] = None
        self._code_of: Optional[dict] = None

    @classmethod
    def from_bytes(cls, texts: Iterable, ranks: Optional[Sequence] = None,
                   names: Optional[Sequence[str]] = None) -> "Collection":
        """Build a frozen collection from byte/str texts.

        Each distinct byte becomes a dense code, in byte order, so that
        symbol order follows byte order.
        """
        raw = [t.encode("utf-8") if isinstance(t, str) else bytes(t) for t in texts]
        present = sorted(set().union(*[set(t) for t in raw])) if raw else []
        if not present:
            raise InvalidInputError("collection has no symbols")
        alphabet = bytes(present)
        code = {b: i + 1 for i, b in enumerate(present)}
        coll = cls(len(present), alphabet)
        for i, t in enumerate(raw):
            rank = ranks[i] if ranks is not None else None
            name = names[i] if names is not None else f"d{i}"
            coll.add_document([code[b] for b in t], rank, name)
        coll.freeze()
        return coll

    @classmethod
    def from_manifest(cls, path: str) -> "Collection":
        """Read a manifest: one file path per line, optional tab + rank."""
        base = os.path.dirname(os.path.abspath(path))
        texts, ranks, names = [], [], []
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.rstrip("\n")
                if not line.strip() or line.startswith("#"):
                    continue
                fields = line.split("\t")
                name = fields[0].strip()
                rank = float(fields[1]) if len(fields) > 1 and fields[1].strip() else None
                fpath = name if os.path.isabs(name) else os.path.join(base, name)
                try:
                    with open(fpath, "rb") as doc:
                        texts.append(doc.read())
                except OSError as exc:
                    raise FileNotFoundError(f"{fpath}: {exc.strerror}") from exc
                ranks.append(rank)
                names.append(name)
        if not texts:
            raise InvalidInputError(f"manifest {path} lists no documents")
        return cls.from_bytes(texts, ranks, names)

    @property
    def D(self) -> int:
        return len(self.docs)

    def add_document(self, text: Sequence[int], rank: Optional[float] = None,
                     name: Optional[str] = None) -> int:
        if self._frozen:
            raise InvalidInputError("collection is frozen")
        text = tuple(int(c) for c in text)
        if not text:
            raise InvalidInputError("empty document")
        bad = [c for c in text if not 1 <= c <= self.sigma]
        if bad:
            raise InvalidInputError(f"symbol {bad[0]} outside [1, {self.sigma}]")
        doc_id = len(self.docs)
        self.docs.append(Document(doc_id, text, 0.0 if rank is None else float(rank),
                                  name if name is not None else f"d{doc_id}"))
        self._starts.append(self.n)
        self.n += len(text) + 1
        return doc_id

    def freeze(self) -> "Collection":
        if not self.docs:
            raise InvalidInputError("cannot freeze an empty collection")
        self._frozen = True
        return self

    @property
    def frozen(self) -> bool:
        return self._frozen

    def doc_start(self, doc_id: int) -> int:
        return self._starts[doc_id]

    def position_to_doc(self, pos: int) -> tuple[int, int]:
        if not 0 <= pos < self.n:
            raise IndexError(f"position {pos} outside [0, {self.n})")
        d = bisect.bisect_right(self._starts, pos) - 1
        return d, pos - self._starts[d]

    def doc_to_position(self, doc_id: int, offset: int) -> int:
        if not 0 <= offset <= len(self.docs[doc_id].text):
            raise IndexError(f"offset {offset} outside document {doc_id}")
        return self._starts[doc_id] + offset

    def symbol_key(self, symbol: int) -> int:
        """Sort key of a real symbol; sentinels take keys 0..D-1."""
        return symbol + self.D - 1

    def keys(self) -> array:
        """Concatenated text as sort keys, one per global position."""
        if self._keys is None:
            out = array("q")
            shift = self.D - 1
            for d in self.docs:
                out.extend(c + shift for c in d.text)
                out.append(d.doc_id)
            self._keys = out
        return self._keys

    def encode(self, pattern) -> Optional[list[int]]:
        """Map a str/bytes pattern to symbol codes; None if a byte is unknown."""
        if isinstance(pattern, (str, bytes, bytearray)):
            raw = pattern.encode("utf-8") if isinstance(pattern, str) else bytes(pattern)
            if self.alphabet is None:
                raise InvalidInputError("collection has no byte alphabet")
            if self._code_of is None:
                self._code_of = {b: i + 1 for i, b in enumerate(self.alphabet)}
            code_of = self._code_of
            try:
                return [code_of[b] for b in raw]
            except KeyError:
                return None
        codes = [int(c) for c in pattern]
        for c in codes:
            if not 1 <= c <= self.sigma:
                raise InvalidInputError(f"symbol {c} outside [1, {self.sigma}]")
        return codes

    def decode(self, codes: Sequence[int]) -> bytes:
        if self.alphabet is None:
            raise InvalidInputError("collection has no byte alphabet")
        return bytes(self.alphabet[c - 1] for c in codes)
