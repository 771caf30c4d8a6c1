"""Plain-text algebra documents and JSON reports.

A document is a sequence of lines; ``#`` starts a comment::

    algebra two_lat
    size 2
    labels bot top
    op meet 2 : 0 0 0 1
    op join 2 : 0 1 1 1
    op bot 0 : 0
    op top 0 : 1

Tables list ``size ** arity`` entries in row-major order (first argument
slowest).  Entries are element indices; labels only affect display.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .algebra import Algebra, Signature

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*$")
FIELDS = ("algebra", "size", "labels", "op")


class DocumentError(ValueError):
    def __init__(self, message: str, line: int, column: int = 1, source: str | None = None):
        self.message, self.line, self.column, self.source = message, line, column, source
        where = f"{source}:" if source else ""
        super().__init__(f"{where}{line}:{column}: {message}")


@dataclass
class AlgebraDocument:
    algebra: Algebra
    labels: tuple[str, ...] | None = None

    def label(self, i: int) -> str:
        return self.labels[i] if self.labels else str(i)


def _tokens(line: str):
    """(column, token) pairs, 1-based columns; stops at a comment."""
    for m in re.finditer(r"\S+", line):
        if m.group().startswith("#"):
            break
        yield m.start() + 1, m.group()


def _int(tok: str, lineno: int, col: int, what: str, source) -> int:
    if not re.fullmatch(r"-?\d+", tok):
        raise DocumentError(f"expected an integer {what}, got {tok!r}", lineno, col, source)
    return int(tok)


def parse_document(text: str, source: str | None = None) -> AlgebraDocument:
    name = None
    size = None
    labels = None
    ops: list[tuple[str, int, list[tuple[int, int]], int, int]] = []
    seen: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        toks = list(_tokens(raw))
        if not toks:
            continue
        col, key = toks[0]
        rest = toks[1:]
        if key not in FIELDS:
            raise DocumentError(f"unknown field {key!r}", lineno, col, source)
        if key != "op" and key in seen:
            raise DocumentError(f"field {key!r} given twice", lineno, col, source)
        seen.add(key)
        if key == "algebra":
            if len(rest) != 1 or not _NAME.match(rest[0][1]):
                raise DocumentError("expected: algebra NAME", lineno, col, source)
            name = rest[0][1]
        elif key == "size":
            if len(rest) != 1:
                raise DocumentError("expected: size N", lineno, col, source)
            size = _int(rest[0][1], lineno, rest[0][0], "size", source)
            if size < 1:
                raise DocumentError("size must be positive", lineno, rest[0][0], source)
        elif key == "labels":
            labels = rest
        else:
            if len(rest) < 3 or rest[2][1] != ":":
                raise DocumentError("expected: op NAME ARITY : ENTRIES", lineno, col, source)
            (ncol, sym), (acol, ar) = rest[0], rest[1]
            if not _NAME.match(sym):
                raise DocumentError(f"bad operation name {sym!r}", lineno, ncol, source)
            if any(o[0] == sym for o in ops):
                raise DocumentError(f"duplicate symbol {sym!r}", lineno, ncol, source)
            arity = _int(ar, lineno, acol, "arity", source)
            if arity < 0:
                raise DocumentError("arity must be nonnegative", lineno, acol, source)
            entries = [(c, _int(t, lineno, c, "table entry", source)) for c, t in rest[3:]]
            ops.append((sym, arity, entries, lineno, ncol))
    if size is None:
        raise DocumentError("missing field 'size'", 1, 1, source)
    if labels is not None:
        texts = [t for _, t in labels]
        if len(texts) != size:
            col = labels[0][0] if labels else 1
            raise DocumentError(f"{len(texts)} labels for {size} elements", _line_of(text, "labels"), col, source)
        if len(set(texts)) != len(texts):
            raise DocumentError("labels must be unique", _line_of(text, "labels"), labels[0][0], source)
    tables = {}
    for sym, arity, entries, lineno, ncol in ops:
        if len(entries) != size ** arity:
            raise DocumentError(f"table for {sym!r} has {len(entries)} entries, expected {size ** arity}",
                                lineno, ncol, source)
        for c, v in entries:
            if not 0 <= v < size:
                raise DocumentError(f"table entry {v} out of range 0..{size - 1}", lineno, c, source)
        tables[sym] = [v for _, v in entries]
    sig = Signature([(sym, arity) for sym, arity, *_ in ops])
    alg = Algebra(sig, size, tables, name=name)
    return AlgebraDocument(alg, None if labels is None else tuple(t for _, t in labels))


def _line_of(text: str, key: str) -> int:
    for lineno, raw in enumerate(text.splitlines(), 1):
        toks = list(_tokens(raw))
        if toks and toks[0][1] == key:
            return lineno
    return 1


def parse_algebra(text: str, source: str | None = None) -> Algebra:
    return parse_document(text, source).algebra


def emit_document(doc: AlgebraDocument) -> str:
    alg = doc.algebra
    lines = []
    if alg.name:
        lines.append(f"algebra {alg.name}")
    lines.append(f"size {alg.size}")
    if doc.labels:
        lines.append("labels " + " ".join(doc.labels))
    for sym, arity in alg.signature:
        lines.append(f"op {sym} {arity} : " + " ".join(map(str, alg.tables[sym])))
    return "\n".join(lines) + "\n"


def emit_algebra(alg: Algebra, labels: Sequence[str] | None = None) -> str:
    return emit_document(AlgebraDocument(alg, tuple(labels) if labels else None))


def load_document(path: str | Path) -> AlgebraDocument:
    path = Path(path)
    doc = parse_document(path.read_text(), str(path))
    if doc.algebra.name is None:
        doc.algebra.name = path.stem
    return doc


def load_algebra(path: str | Path) -> Algebra:
    return load_document(path).algebra


def parse_elements(text: str, doc: AlgebraDocument | None = None) -> list[int]:
    """Comma or space separated elements, by index or by label.

    Labels may themselves contain commas, so the longest matching label wins.
    """
    size = doc.algebra.size if doc else None
    labels = sorted(doc.labels, key=len, reverse=True) if doc and doc.labels else []
    lookup = {lab: i for i, lab in enumerate(doc.labels)} if labels else {}
    out = []
    pos = 0
    while pos < len(text):
        if text[pos] in ", \t\n":
            pos += 1
            continue
        for lab in labels:
            end = pos + len(lab)
            if text.startswith(lab, pos) and (end == len(text) or text[end] in ", \t\n"):
                out.append(lookup[lab])
                pos = end
                break
        else:
            m = re.compile(r"[^,\s]+").match(text, pos)
            tok = m.group()
            if not re.fullmatch(r"\d+", tok):
                raise ValueError(f"unknown element {tok!r}")
            out.append(int(tok))
            pos = m.end()
        if size is not None and not 0 <= out[-1] < size:
            raise ValueError(f"element {out[-1]} out of range 0..{size - 1}")
    return out


def dump_json(data) -> str:
    return json.dumps(data, sort_keys=True, indent=2) + "\n"
