"""Command-line front end: build, query, verify and bench.

Exit codes: 0 success, 1 usage, 2 I/O, 3 verification failure, 4 corrupt index.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from typing import Optional, Sequence

from . import bench, persist, verify
from .corpus import Collection
from .engine import TopKIndex
from .errors import CorruptIndexError, InvalidInputError, MissingMeasureError
from .measures import MEASURES

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_VERIFY, EXIT_CORRUPT = 0, 1, 2, 3, 4

log = logging.getLogger("topkdoc")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _names(values: Sequence[str]) -> list[str]:
    """Flatten comma- or space-separated names, keeping first occurrences."""
    out = []
    for v in values or ():
        out.extend(x for x in v.split(",") if x)
    seen = list(dict.fromkeys(out))
    if len(seen) < len(out):
        log.warning("duplicate names removed: %s", ",".join(out))
    for name in seen:
        if name not in MEASURES:
            raise UsageError(f"unsupported measure {name!r}; choose from {sorted(MEASURES)}")
    return seen


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError:
        raise UsageError(f"bad integer list {text!r}") from None


def _load(path: str) -> TopKIndex:
    return persist.load(path)


def cmd_build(args) -> int:
    measures = _names(args.measures)
    pars = _names(args.par)
    if not measures:
        raise UsageError("at least one measure is required")
    coll = Collection.from_manifest(args.input)
    index = TopKIndex.build(coll, measures, pars, z_max=args.zmax)
    size = persist.save(index, args.out)
    words = index.memory_words()
    print(f"n={index.n} D={index.D} links={index.num_links} "
          f"build_s={index.build_seconds:.3f} words={words} words_per_n={words / index.n:.2f} "
          f"bytes={size}")
    return EXIT_OK


def cmd_query(args) -> int:
    index = _load(args.index)
    pattern = args.pattern.encode("utf-8")
    names = [d.name for d in index.collection.docs]
    param = args.par is not None or args.tau_lo is not None or args.tau_hi is not None
    lo = -math.inf if args.tau_lo is None else args.tau_lo
    hi = math.inf if args.tau_hi is None else args.tau_hi
    if lo > hi:
        raise UsageError(f"empty range: --tau-lo {lo} > --tau-hi {hi}")
    if args.k is not None and args.k < 0:
        raise UsageError("--k must be >= 0")
    if param:
        par = args.par
        if par is None:
            if len(index.pars) != 1:
                raise UsageError(f"--par required; index has {sorted(index.pars) or 'none'}")
            par = next(iter(index.pars))
        if par not in index.pars:
            raise UsageError(f"index has no parameter {par!r} (has {sorted(index.pars) or 'none'})")
        stream = index.top_k_param_online(pattern, lo, hi, args.measure, par)
    else:
        stream = index.top_k_online(pattern, args.measure)
    k = args.k
    if k is None and not args.online:
        k = 10
    try:
        for rank, (doc, weight) in enumerate(stream, 1):
            if k is not None and rank > k:
                break
            print(f"{rank}\t{names[doc]}\t{weight}", flush=args.online)
    except KeyboardInterrupt:
        pass
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.index:
        index = _load(args.index)
        if args.inject_fault:
            index = verify.corrupt_weights(index)
        texts = [bytes(index.collection.decode(d.text)) if index.collection.alphabet else d.text
                 for d in index.collection.docs]
        report = verify.check_index(index, texts, args.max_len, limit=args.max_patterns)
        report.trials = 1
    else:
        report = verify.verify_random(args.seed, args.trials, args.max_len,
                                      inject_fault=args.inject_fault)
    print(report.summary())
    if not report.ok:
        print("minimal reproducer:")
        print(report.failures[0].reproducer())
        return EXIT_VERIFY
    return EXIT_OK


def cmd_bench(args) -> int:
    index = _load(args.index)
    with open(args.patterns, "rb") as fh:
        patterns = [line.rstrip(b"\r\n") for line in fh if line.strip()]
    ks = _int_list(args.k)
    print(bench.HEADER)
    for row in bench.run(index, patterns, ks, args.measure, args.repeats):
        print(row.tsv())
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="topkdoc", description="Top-k document retrieval indexes.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("build", help="index the files listed in a manifest")
    b.add_argument("--input", required=True, help="manifest: one path per line, optional TAB rank")
    b.add_argument("--measures", nargs="+", default=["tf"])
    b.add_argument("--par", nargs="*", default=[], help="measures to store as parameters")
    b.add_argument("--zmax", type=int, default=1024)
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_build)

    q = sub.add_parser("query", help="top-k documents for a pattern")
    q.add_argument("--index", required=True)
    q.add_argument("--pattern", required=True)
    q.add_argument("--k", type=int)
    q.add_argument("--measure", default="tf")
    q.add_argument("--par")
    q.add_argument("--tau-lo", type=float)
    q.add_argument("--tau-hi", type=float)
    q.add_argument("--online", action="store_true", help="stream results until exhausted")
    q.set_defaults(func=cmd_query)

    v = sub.add_parser("verify", help="compare queries with a brute-force oracle")
    v.add_argument("--index", help="check this index instead of random corpora")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--max-len", type=int, default=6)
    v.add_argument("--max-patterns", type=int)
    v.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("bench", help="query latency per pattern-length bucket and k")
    r.add_argument("--index", required=True)
    r.add_argument("--patterns", required=True, help="file with one pattern per line")
    r.add_argument("--k", default="1,10,100")
    r.add_argument("--measure", default="tf")
    r.add_argument("--repeats", type=int, default=3)
    r.set_defaults(func=cmd_bench)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except CorruptIndexError as exc:
        print(f"error: corrupt index: {exc}", file=sys.stderr)
        return EXIT_CORRUPT
    except (UsageError, MissingMeasureError, InvalidInputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
