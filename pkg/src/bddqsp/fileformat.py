"""Line-oriented text format for diagrams.

::

    wfbdd v1
    nvars 3
    terminal0 5
    terminal1 6
    node 0 var 1 e0 1 0 0 e1 2 1 0
    root 0

Unweighted files omit the ``<re> <im>`` pair after each edge head.
"""
from __future__ import annotations

from .diagram import Diagram, Edge, Kind, Node

HEADER = "wfbdd v1"


class FormatError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def _fmt(x: float) -> str:
    return format(x, ".17g")


def dumps(d: Diagram) -> str:
    lines = [HEADER, f"nvars {d.n}"]
    for value, name in ((0, "terminal0"), (1, "terminal1")):
        for u in sorted(d.nodes):
            if d.nodes[u].kind is (Kind.ONE if value else Kind.ZERO):
                lines.append(f"{name} {u}")
    for u in sorted(d.nodes):
        node = d.nodes[u]
        if node.is_terminal:
            continue
        parts = [f"node {u} var {node.var}"]
        for b, edge in ((0, node.lo), (1, node.hi)):
            parts.append(f"e{b} {edge.head}")
            if d.weighted:
                w = complex(edge.weight if edge.weight is not None else 1.0)
                parts.append(f"{_fmt(w.real)} {_fmt(w.imag)}")
        lines.append(" ".join(parts))
    lines.append(f"root {d.root}")
    return "\n".join(lines) + "\n"


def loads(text: str) -> Diagram:
    n = None
    root = None
    nodes: dict[int, Node] = {}
    weighted: bool | None = None
    saw_header = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not saw_header:
            if line != HEADER:
                raise FormatError(lineno, f"expected header {HEADER!r}, got {line!r}")
            saw_header = True
            continue
        tok = line.split()
        try:
            if tok[0] == "nvars" and len(tok) == 2:
                n = int(tok[1])
            elif tok[0] in ("terminal0", "terminal1") and len(tok) == 2:
                u = int(tok[1])
                if u in nodes:
                    raise FormatError(lineno, f"duplicate node id {u}")
                nodes[u] = Node.terminal(int(tok[0][-1]))
            elif tok[0] == "root" and len(tok) == 2:
                root = int(tok[1])
            elif tok[0] == "node":
                u, node, has_w = _parse_node(tok, lineno)
                if weighted is None:
                    weighted = has_w
                elif weighted != has_w:
                    raise FormatError(lineno, "mixes weighted and unweighted node lines")
                if u in nodes:
                    raise FormatError(lineno, f"duplicate node id {u}")
                nodes[u] = node
            else:
                raise FormatError(lineno, f"unrecognised line {line!r}")
        except ValueError as exc:
            if isinstance(exc, FormatError):
                raise
            raise FormatError(lineno, str(exc)) from None
    if not saw_header:
        raise FormatError(1, "empty input")
    if n is None:
        raise FormatError(lineno, "missing 'nvars' line")
    if root is None:
        raise FormatError(lineno, "missing 'root' line")
    return Diagram(n, nodes, root, bool(weighted))


def _parse_node(tok: list[str], lineno: int) -> tuple[int, Node, bool]:
    # node <id> var <i> e0 <head> [<re> <im>] e1 <head> [<re> <im>]
    if len(tok) == 8:
        has_w = False
    elif len(tok) == 12:
        has_w = True
    else:
        raise FormatError(lineno, "node line needs 8 (unweighted) or 12 (weighted) fields")
    if tok[2] != "var":
        raise FormatError(lineno, "expected 'var' after node id")
    u, var = int(tok[1]), int(tok[3])
    edges = []
    pos = 4
    for b in (0, 1):
        if tok[pos] != f"e{b}":
            raise FormatError(lineno, f"expected 'e{b}'")
        head = int(tok[pos + 1])
        if has_w:
            edges.append(Edge(head, complex(float(tok[pos + 2]), float(tok[pos + 3]))))
            pos += 4
        else:
            edges.append(Edge(head))
            pos += 2
    return u, Node.internal(var, edges[0], edges[1]), has_w


def load(path: str) -> Diagram:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def dump(d: Diagram, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(d))
