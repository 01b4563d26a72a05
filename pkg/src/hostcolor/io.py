"""Plain-text graph and coloring files (1-indexed, DIMACS-like)."""

from __future__ import annotations

import os
from pathlib import Path
from typing import TextIO

from .graph import Coloring, Graph


class ParseError(ValueError):
    def __init__(self, path, lineno: int, msg: str):
        super().__init__(f"{path}:{lineno}: {msg}")
        self.lineno = lineno


def format_graph(G: Graph) -> str:
    lines = [f"p edge {G.n} {G.m}"]
    lines.extend(f"e {u} {v}" for u, v in G.edge_array.tolist())
    return "\n".join(lines) + "\n"


def parse_graph(text: str, path: str = "<string>") -> Graph:
    n = m = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if n is not None:
                raise ParseError(path, lineno, "duplicate header")
            if len(parts) != 4 or parts[1] != "edge":
                raise ParseError(path, lineno, "expected 'p edge <n> <m>'")
            try:
                n, m = int(parts[2]), int(parts[3])
            except ValueError:
                raise ParseError(path, lineno, "non-integer header field") from None
        elif parts[0] == "e":
            if n is None:
                raise ParseError(path, lineno, "edge before header")
            if len(parts) != 3:
                raise ParseError(path, lineno, "expected 'e <u> <v>'")
            try:
                u, v = int(parts[1]), int(parts[2])
            except ValueError:
                raise ParseError(path, lineno, "non-integer vertex id") from None
            if not (1 <= u <= n and 1 <= v <= n) or u == v:
                raise ParseError(path, lineno, f"bad edge ({u}, {v}) for n={n}")
            edges.append((u, v))
        else:
            raise ParseError(path, lineno, f"unknown record {parts[0]!r}")
    if n is None:
        raise ParseError(path, 1, "missing 'p edge' header")
    if len(edges) != m:
        raise ParseError(path, lineno if text else 1, f"header declares {m} edges, found {len(edges)}")
    try:
        return Graph(n, edges)
    except ValueError as exc:
        raise ParseError(path, 0, str(exc)) from None


def format_coloring(C: Coloring) -> str:
    return "".join(f"{v} {c}\n" for v, c in enumerate(C.assign.tolist(), start=1))


def parse_coloring(text: str, n: int | None = None, k: int | None = None,
                   path: str = "<string>") -> Coloring:
    colors: list[int] = []
    last = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(path, lineno, "expected '<v> <c>'")
        try:
            v, c = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(path, lineno, "non-integer field") from None
        if v != last + 1:
            raise ParseError(path, lineno, f"expected vertex {last + 1}, got {v}")
        if c < 0 or (k is not None and c > k):
            raise ParseError(path, lineno, f"color {c} out of range")
        colors.append(c)
        last = v
    if n is not None and len(colors) != n:
        raise ParseError(path, last + 1, f"coloring has {len(colors)} vertices, graph has {n}")
    kk = k if k is not None else max([3, *colors])
    return Coloring(kk, colors)


def _write(path, text: str) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def write_graph(G: Graph, path: str | os.PathLike) -> None:
    _write(path, format_graph(G))


def read_graph(path: str | os.PathLike) -> Graph:
    return parse_graph(Path(path).read_text(), str(path))


def write_coloring(C: Coloring, path: str | os.PathLike) -> None:
    _write(path, format_coloring(C))


def read_coloring(path: str | os.PathLike, n: int | None = None, k: int | None = None) -> Coloring:
    return parse_coloring(Path(path).read_text(), n=n, k=k, path=str(path))


def dump_graph(G: Graph, fh: TextIO) -> None:
    fh.write(format_graph(G))
