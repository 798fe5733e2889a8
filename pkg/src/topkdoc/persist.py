"""Binary index files.

Layout: 8-byte magic, u32 version, then sections (4-byte tag, u64 payload
length, payload), then a SHA-256 digest of everything before it.  All
integers are little-endian and fixed width; arrays are a u64 count followed
by the raw values.  Only the collection, tree, links, weights and parameter
values are stored; query structures are rebuilt on load.
"""

from __future__ import annotations

import hashlib
import io
import struct

import numpy as np

from .corpus import Collection
from .engine import TopKIndex
from .errors import CorruptIndexError
from .suffix_index import LinkTable, SuffixTree

MAGIC = b"TOPKIDX\x00"
VERSION = 1
DIGEST = 32

TREE_FIELDS = ("sa", "parent", "string_depth", "depth", "sa_lo", "sa_hi", "boundary_node", "lcp")
LINK_FIELDS = ("source", "target", "doc", "first", "last")


class _Writer:
    def __init__(self):
        self.buf = io.BytesIO()

    def u32(self, x):
        self.buf.write(struct.pack("<I", x))

    def u64(self, x):
        self.buf.write(struct.pack("<Q", x))

    def i64(self, x):
        self.buf.write(struct.pack("<q", x))

    def f64(self, x):
        self.buf.write(struct.pack("<d", x))

    def blob(self, b: bytes):
        self.u64(len(b))
        self.buf.write(b)

    def text(self, s: str):
        self.blob(s.encode("utf-8"))

    def array(self, a, dtype="<i8"):
        a = np.ascontiguousarray(np.asarray(a).astype(dtype))
        self.u64(len(a))
        self.buf.write(a.tobytes())

    def getvalue(self) -> bytes:
        return self.buf.getvalue()


class _Reader:
    def __init__(self, data: bytes):
        self.data = memoryview(data)
        self.pos = 0

    def _take(self, size: int) -> memoryview:
        if self.pos + size > len(self.data):
            raise CorruptIndexError("index file is truncated")
        out = self.data[self.pos:self.pos + size]
        self.pos += size
        return out

    def u32(self):
        return struct.unpack("<I", self._take(4))[0]

    def u64(self):
        return struct.unpack("<Q", self._take(8))[0]

    def i64(self):
        return struct.unpack("<q", self._take(8))[0]

    def f64(self):
        return struct.unpack("<d", self._take(8))[0]

    def blob(self) -> bytes:
        return bytes(self._take(self.u64()))

    def text(self) -> str:
        return self.blob().decode("utf-8")

    def array(self, dtype="<i8") -> np.ndarray:
        count = self.u64()
        itemsize = np.dtype(dtype).itemsize
        return np.frombuffer(bytes(self._take(count * itemsize)), dtype=dtype).astype(dtype[1:])

    def done(self) -> bool:
        return self.pos == len(self.data)


def _section(out: _Writer, tag: bytes, body: _Writer):
    out.buf.write(tag)
    out.blob(body.getvalue())


def dumps(index: TopKIndex) -> bytes:
    coll = index.collection
    out = _Writer()
    out.buf.write(MAGIC)
    out.u32(VERSION)

    head = _Writer()
    for x in (coll.n, coll.D, coll.sigma, index.z_max):
        head.u64(x)
    head.i64(index.scale if index.scale is not None else -1)
    head.i64(index.stripe_height if index.stripe_height is not None else -1)
    head.u32(len(index.weights))
    for name in index.weights:
        head.text(name)
    head.u32(len(index.pars))
    for name in index.pars:
        head.text(name)
    _section(out, b"HEAD", head)

    corp = _Writer()
    corp.u32(coll.alphabet is not None)
    corp.blob(coll.alphabet or b"")
    for doc in coll.docs:
        corp.text(doc.name)
        corp.f64(doc.rank)
        corp.array(doc.text, "<u4")
    _section(out, b"CORP", corp)

    tree = _Writer()
    for f in TREE_FIELDS:
        tree.array(getattr(index.tree, f))
    _section(out, b"TREE", tree)

    links = _Writer()
    for f in LINK_FIELDS:
        links.array(getattr(index.links, f))
    _section(out, b"LINK", links)

    for name, w in index.weights.items():
        grid = _Writer()
        grid.text(name)
        grid.array(w, "<f8")
        _section(out, b"GRID", grid)
    for name, z in index.pars.items():
        par = _Writer()
        par.text(name)
        par.array(z)
        _section(out, b"PARZ", par)

    body = out.getvalue()
    return body + hashlib.sha256(body).digest()


def _doc_leaves(collection: Collection, sa: np.ndarray) -> list:
    starts = np.asarray([collection.doc_start(d) for d in range(collection.D)], dtype=np.int64)
    doc_of = np.searchsorted(starts, sa, side="right") - 1
    order = np.argsort(doc_of, kind="stable")
    offsets = sa[order] - starts[doc_of[order]]
    bounds = np.searchsorted(doc_of[order], np.arange(collection.D + 1))
    return [offsets[bounds[d]:bounds[d + 1]].copy() for d in range(collection.D)]


def loads(data: bytes) -> TopKIndex:
    if len(data) < len(MAGIC) + 4 + DIGEST or data[:len(MAGIC)] != MAGIC:
        raise CorruptIndexError("not an index file (bad magic)")
    body, digest = data[:-DIGEST], data[-DIGEST:]
    if hashlib.sha256(body).digest() != digest:
        raise CorruptIndexError("index checksum mismatch")
    r = _Reader(body)
    r._take(len(MAGIC))
    version = r.u32()
    if version != VERSION:
        raise CorruptIndexError(f"unsupported index version {version}")

    sections = []
    while not r.done():
        tag = bytes(r._take(4))
        sections.append((tag, _Reader(r.blob())))
    tags = [t for t, _ in sections]
    if tags[:4] != [b"HEAD", b"CORP", b"TREE", b"LINK"]:
        raise CorruptIndexError(f"unexpected section order {tags}")

    head = sections[0][1]
    n, D, sigma, z_max = (head.u64() for _ in range(4))
    scale, stripe_height = head.i64(), head.i64()
    measure_names = [head.text() for _ in range(head.u32())]
    par_names = [head.text() for _ in range(head.u32())]

    corp = sections[1][1]
    has_alphabet = corp.u32()
    alphabet = corp.blob()
    coll = Collection(sigma, alphabet if has_alphabet else None)
    for _ in range(D):
        name = corp.text()
        rank = corp.f64()
        coll.add_document(corp.array("<u4").tolist(), rank, name)
    coll.freeze()
    if coll.n != n:
        raise CorruptIndexError("collection length does not match header")

    tr = sections[2][1]
    arrays = {f: tr.array() for f in TREE_FIELDS}
    tree = SuffixTree(coll, arrays["sa"], arrays["parent"], arrays["string_depth"],
                      arrays["depth"], arrays["sa_lo"], arrays["sa_hi"], arrays["boundary_node"])
    tree.lcp = arrays["lcp"]

    lk = sections[3][1]
    cols = {f: lk.array() for f in LINK_FIELDS}
    links = LinkTable(doc_leaves=_doc_leaves(coll, tree.sa), **cols)

    weights, pars = {}, {}
    for tag, sec in sections[4:]:
        name = sec.text()
        if tag == b"GRID":
            weights[name] = sec.array("<f8")
        elif tag == b"PARZ":
            pars[name] = sec.array()
        else:
            raise CorruptIndexError(f"unknown section {tag!r}")
    if list(weights) != measure_names or list(pars) != par_names:
        raise CorruptIndexError("grid sections do not match header")
    return TopKIndex(coll, tree, links, weights, pars, z_max,
                     None if scale < 0 else scale,
                     None if stripe_height < 0 else stripe_height)


def save(index: TopKIndex, path) -> int:
    data = dumps(index)
    with open(path, "wb") as fh:
        fh.write(data)
    return len(data)


def load(path) -> TopKIndex:
    with open(path, "rb") as fh:
        return loads(fh.read())
