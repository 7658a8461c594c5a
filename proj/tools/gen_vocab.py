#!/usr/bin/env python3
"""Generate data/vocab.txt and data/merges.txt.

Builds a byte-level BPE table: 256 byte units plus 50,009 merge results,
50,265 entries total. Merges come in two groups: a curated set that forces
common programming subwords to be single tokens, and mechanical filler
merges over high-byte units that pad the table to its exact size without
touching ASCII tokenization.

The script also prints reference segmentations for a handful of probe
tokens; the test suite pins those outputs.
"""

import sys
from pathlib import Path


def bytes_to_unicode():
    bs = (
        list(range(ord("!"), ord("~") + 1))
        + list(range(ord("¡"), ord("¬") + 1))
        + list(range(ord("®"), ord("ÿ") + 1))
    )
    cs = bs[:]
    n = 0
    for b in range(256):
        if b not in bs:
            bs.append(b)
            cs.append(256 + n)
            n += 1
    return dict(zip(bs, [chr(c) for c in cs]))


BYTE_CHAR = bytes_to_unicode()

TARGET_VOCAB = 50265
TARGET_MERGES = TARGET_VOCAB - 256

# Words forced to be single tokens, in priority order. "get" and "arger"
# lead so that camel-case splits like getLarger -> get | L | arger hold no
# matter what follows. All entries are ASCII and none contains an
# uppercase-L boundary pair that would bridge those splits.
CURATED = [
    "get", "arger", "set", "is", "has", "add", "remove", "new", "old",
    "int", "char", "long", "short", "byte", "float", "double", "boolean",
    "void", "string", "String", "Integer", "Double", "Boolean", "Object",
    "System", "Math", "Array", "Arrays", "List", "Map", "Set", "Scanner",
    "Color", "Exception", "Buffer", "Builder", "Reader", "Writer",
    "Stream", "File", "Thread", "Number", "Character", "Iterator",
    "abs", "min", "max", "sum", "avg", "pow", "sqrt", "floor", "ceil",
    "round", "random", "print", "println", "parse", "format", "append",
    "insert", "delete", "update", "create", "build", "init", "start",
    "stop", "close", "open", "read", "write", "flush", "clear", "clone",
    "copy", "compare", "equals", "contains", "matches", "split", "join",
    "trim", "replace", "substring", "indexOf", "toString", "hashCode",
    "hashcode", "valueOf", "charAt", "hasNext", "nextInt", "getRGB",
    "val", "value", "values", "index", "count", "total", "result",
    "temp", "item", "items", "node", "nodes", "list", "array", "map",
    "key", "keys", "num", "name", "names", "data", "size", "len", "pos",
    "idx", "cur", "prev", "first", "last", "head", "tail", "left",
    "right", "root", "child", "children", "parent", "next", "iter",
    "elem", "element", "entry", "entries", "loop", "flag", "found",
    "done", "end", "begin", "length", "width", "height", "depth",
    "level", "limit", "lower", "upper", "bound", "range", "step",
    "offset", "shift", "mask", "bits", "word", "words", "line", "lines",
    "text", "input", "output", "buffer", "stream", "token", "tokens",
    "symbol", "label", "while", "for", "if", "else", "return", "true",
    "false", "null", "public", "private", "protected", "static", "final",
    "class", "method", "field", "param", "args", "argument", "object",
    "instance", "type", "types", "kind", "state", "status", "error",
    "errors", "exception", "message", "info", "debug", "trace", "warn",
    "test", "tests", "check", "assert", "verify", "valid", "invalid",
    "empty", "full", "closed", "active", "enabled", "disabled", "ready",
    "busy", "wait", "notify", "lock", "unlock", "sync", "async", "call",
    "calls", "caller", "invoke", "apply", "exec", "run", "runs",
    "runner", "main", "util", "utils", "helper", "handler", "listener",
    "event", "events", "action", "actions", "command", "commands",
    "option", "options", "config", "settings", "context", "session",
    "request", "response", "server", "client", "socket", "port", "host",
    "path", "file", "files", "folder", "dir", "base", "core", "impl",
    "abstract", "interface", "extends", "implements", "import",
    "package", "throws", "throw", "catch", "try", "finally", "super",
    "this", "case", "switch", "break", "continue", "default", "do",
    "instanceof", "native", "volatile", "transient", "synchronized",
    "tion", "ing", "er", "ed", "ly", "able", "ible", "ment", "ness",
    "ize", "ful", "less", "pre", "post", "sub", "over", "under", "un",
    "de", "en", "em", "non", "anti", "auto", "co", "counter", "ex",
    "extra", "inter", "intra", "micro", "mid", "mis", "mono", "multi",
    "poly", "semi", "trans", "tri", "ultra", "uni", "matrix", "vector",
    "graph", "edge", "edges", "vertex", "visited", "queue", "stack",
    "push", "pop", "peek", "poll", "dequeue", "enqueue", "sort",
    "sorted", "search", "binary", "linear", "swap", "merge", "quick",
    "heap", "hash", "bucket", "table", "cache", "store", "load", "save",
    "fetch", "send", "receive", "encode", "decode", "encrypt", "decrypt",
    "compress", "digest", "sign", "answer", "solve", "solution",
    "problem", "score", "grade", "rank", "order", "group", "batch",
    "chunk", "block", "frame", "page", "row", "rows", "col", "cols",
    "column", "columns", "cell", "cells", "grid", "board", "game",
    "player", "move", "moves", "turn", "win", "lose", "draw", "point",
    "points", "coord", "axis", "angle", "radius", "area", "volume",
    "speed", "time", "date", "year", "month", "day", "hour", "minute",
    "second", "milli", "nano", "format", "pattern", "regex", "match",
    "find", "found", "seek", "skip", "mark", "reset", "rewind",
]


class MergeTable:
    def __init__(self):
        self.merges = []  # list of (left, right)
        self.ranks = {}  # (left, right) -> rank
        self.tokens = set(BYTE_CHAR.values())

    def add(self, left, right):
        result = left + right
        assert (left, right) not in self.ranks, f"duplicate pair {left}+{right}"
        assert result not in self.tokens, f"token collision on {result!r}"
        self.ranks[(left, right)] = len(self.merges)
        self.merges.append((left, right))
        self.tokens.add(result)

    def bpe(self, word):
        """Reference segmentation: repeatedly apply the lowest-ranked pair
        present, merging all its occurrences, until no pair applies."""
        parts = [BYTE_CHAR[b] for b in word.encode("utf-8")]
        while len(parts) > 1:
            best = None
            for i in range(len(parts) - 1):
                r = self.ranks.get((parts[i], parts[i + 1]))
                if r is not None and (best is None or r < best):
                    best = r
            if best is None:
                break
            left, right = self.merges[best]
            out = []
            i = 0
            while i < len(parts):
                if i + 1 < len(parts) and parts[i] == left and parts[i + 1] == right:
                    out.append(left + right)
                    i += 2
                else:
                    out.append(parts[i])
                    i += 1
            parts = out
        return parts

    def force(self, word):
        """Add merges until `word` segments to a single token."""
        parts = self.bpe(word)
        while len(parts) > 1:
            self.add(parts[0], parts[1])
            parts = self.bpe(word)


def main():
    out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("data")
    table = MergeTable()
    for word in CURATED:
        table.force(word)
    curated_count = len(table.merges)

    high = [BYTE_CHAR[b] for b in range(128, 256)]
    for a in high:
        for b in high:
            table.add(a, b)
            if len(table.merges) == TARGET_MERGES:
                break
        if len(table.merges) == TARGET_MERGES:
            break
    for a in high:
        for b in high:
            for c in high:
                if len(table.merges) < TARGET_MERGES:
                    table.add(a + b, c)
        if len(table.merges) == TARGET_MERGES:
            break
    assert len(table.merges) == TARGET_MERGES

    vocab = [(BYTE_CHAR[b], b) for b in range(256)]
    for i, (left, right) in enumerate(table.merges):
        vocab.append((left + right, 256 + i))
    assert len(vocab) == TARGET_VOCAB
    assert len({t for t, _ in vocab}) == TARGET_VOCAB

    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "vocab.txt", "w", encoding="utf-8") as f:
        for token, idx in vocab:
            f.write(f"{token}\t{idx}\n")
    with open(out_dir / "merges.txt", "w", encoding="utf-8") as f:
        for left, right in table.merges:
            f.write(f"{left} {right}\n")

    assert table.bpe("getLarger") == ["get", "L", "arger"], table.bpe("getLarger")
    print(f"curated merges: {curated_count}")
    print(f"total merges:   {len(table.merges)}")
    print(f"vocab size:     {len(vocab)}")
    probes = [
        "getLarger", "a", "i", "max_value", "counter", "hasNext", "getRGB",
        "hashcode", "foo123", "x1", "hello_world", "Math", "abs", "résult",
    ]
    for p in probes:
        parts = table.bpe(p)
        joined = "".join(parts)
        original = "".join(BYTE_CHAR[b] for b in p.encode("utf-8"))
        assert joined == original, p
        print(f"{p!r} -> {parts}")


if __name__ == "__main__":
    main()
