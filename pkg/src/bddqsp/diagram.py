"""Weighted free binary decision diagrams.

A :class:`Diagram` is a rooted DAG whose internal nodes branch on a variable
``x_i`` (``1 <= i <= n``) and whose sinks are the 0- and 1-terminals.  When
the diagram is *weighted*, every edge carries a complex weight and the
diagram describes the n-qubit state

    alpha(z) = 2^{-(n - |V_z| + 1)/2} * prod_{u on P(z)} w_{z_i(u)}(u) / ||w(u)||

where ``P(z)`` is the path selected by ``z`` and ``||w(u)||`` is the 2-norm of
the two outgoing weights of ``u``.

Bit strings are indexed so that ``z[0]`` is ``x_1``.
"""
from __future__ import annotations

import cmath
import enum
import heapq
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

BitString = Union[str, Sequence[int]]

WEIGHT_TOL = 1e-12


class DiagramError(ValueError):
    """Raised when an operation receives a diagram it cannot handle."""


class DegenerateNodeError(DiagramError):
    """An internal node has both outgoing weights equal to zero."""


class Kind(enum.Enum):
    ZERO = "terminal0"
    ONE = "terminal1"
    INTERNAL = "internal"


@dataclass(frozen=True)
class Edge:
    head: int
    weight: complex | None = None


@dataclass(frozen=True)
class Node:
    kind: Kind
    var: int = 0
    lo: Edge | None = None
    hi: Edge | None = None

    @property
    def is_terminal(self) -> bool:
        return self.kind is not Kind.INTERNAL

    def edge(self, b: int) -> Edge:
        return self.hi if b else self.lo

    @staticmethod
    def terminal(value: int) -> "Node":
        return Node(Kind.ONE if value else Kind.ZERO)

    @staticmethod
    def internal(var: int, lo: Edge | int, hi: Edge | int) -> "Node":
        if isinstance(lo, int):
            lo = Edge(lo)
        if isinstance(hi, int):
            hi = Edge(hi)
        return Node(Kind.INTERNAL, var, lo, hi)


@dataclass(frozen=True)
class Diagram:
    """Immutable diagram. ``nodes`` must not be mutated after construction."""

    n: int
    nodes: Mapping[int, Node]
    root: int
    weighted: bool = False

    # -- structure -------------------------------------------------------
    def terminal_id(self, value: int) -> int | None:
        kind = Kind.ONE if value else Kind.ZERO
        found = [u for u, node in self.nodes.items() if node.kind is kind]
        return min(found) if found else None

    @property
    def t0(self) -> int | None:
        return self.terminal_id(0)

    @property
    def t1(self) -> int | None:
        return self.terminal_id(1)

    def internal_ids(self) -> list[int]:
        return sorted(u for u, node in self.nodes.items() if not node.is_terminal)

    @property
    def num_internal(self) -> int:
        return sum(1 for node in self.nodes.values() if not node.is_terminal)

    @property
    def num_nodes(self) -> int:
        return len(self.nodes)

    @property
    def num_edges(self) -> int:
        return 2 * self.num_internal

    def is_terminal(self, u: int) -> bool:
        return self.nodes[u].is_terminal

    def children(self, u: int) -> tuple[int, int]:
        node = self.nodes[u]
        return node.lo.head, node.hi.head

    def weights(self, u: int) -> tuple[complex, complex]:
        node = self.nodes[u]
        return _w(node.lo), _w(node.hi)

    def in_edges(self) -> dict[int, list[tuple[int, int]]]:
        """Map head -> sorted list of (tail, branch bit)."""
        incoming: dict[int, list[tuple[int, int]]] = defaultdict(list)
        for u in self.internal_ids():
            for b in (0, 1):
                incoming[self.nodes[u].edge(b).head].append((u, b))
        return incoming

    def with_weights(self, weights: Mapping[int, tuple[complex, complex]]) -> "Diagram":
        """Copy of this diagram with edge weights replaced per internal node."""
        nodes: dict[int, Node] = {}
        for u, node in self.nodes.items():
            if node.is_terminal:
                nodes[u] = node
            else:
                w0, w1 = weights[u]
                nodes[u] = Node.internal(
                    node.var, Edge(node.lo.head, complex(w0)), Edge(node.hi.head, complex(w1))
                )
        return Diagram(self.n, nodes, self.root, weighted=True)

    def unweighted(self) -> "Diagram":
        nodes = {
            u: node if node.is_terminal else Node.internal(node.var, node.lo.head, node.hi.head)
            for u, node in self.nodes.items()
        }
        return Diagram(self.n, nodes, self.root, weighted=False)


def _w(edge: Edge) -> complex:
    return complex(1.0) if edge.weight is None else complex(edge.weight)


def _bits(z: BitString, n: int) -> tuple[int, ...]:
    if isinstance(z, str):
        bits = tuple(int(c) for c in z if c in "01")
    else:
        bits = tuple(int(b) for b in z)
    if len(bits) != n or any(b not in (0, 1) for b in bits):
        raise ValueError(f"expected a {n}-bit string, got {z!r}")
    return bits


def index_to_bits(k: int, n: int) -> tuple[int, ...]:
    """Basis index -> bit tuple, x_1 is the most significant bit."""
    return tuple((k >> (n - 1 - i)) & 1 for i in range(n))


def bits_to_index(bits: Sequence[int]) -> int:
    k = 0
    for b in bits:
        k = (k << 1) | b
    return k


# -- validation ----------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    kind: str
    node: int | None
    message: str

    def __str__(self) -> str:
        where = "" if self.node is None else f" at node {self.node}"
        return f"{self.kind}{where}: {self.message}"


# Violations that only say the diagram is not in reduced form.  Such a
# diagram still represents its function (or state) correctly.
REDUCEDNESS = frozenset({"redundant node", "equivalent node"})


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def sound(self) -> bool:
        """True when every violation is a reducedness one."""
        return self.kinds() <= REDUCEDNESS

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def add(self, kind: str, node: int | None, message: str) -> None:
        self.violations.append(Violation(kind, node, message))

    def __bool__(self) -> bool:
        return self.ok


def validate(d: Diagram) -> ValidationReport:
    """Check every reducedness, freeness and weighting invariant of ``d``.

    Structural problems (dangling ids, cycles) are reported and stop the
    checks that need a DAG. Weighted diagrams use the weighted reading of the
    contraction rules: a node is redundant only if both edges share a head
    *and* a weight, and two nodes are equivalent only if their weights agree
    too.
    """
    rep = ValidationReport()
    nodes = d.nodes
    if d.n < 0:
        rep.add("structure", None, f"negative variable count {d.n}")
    if d.root not in nodes:
        rep.add("structure", None, f"root {d.root} is not a node")
        return rep

    for kind in (Kind.ZERO, Kind.ONE):
        ids = sorted(u for u, node in nodes.items() if node.kind is kind)
        if len(ids) > 1:
            rep.add("terminal", ids[1], f"more than one {kind.value} node: {ids}")

    dangling = False
    for u in sorted(nodes):
        node = nodes[u]
        if node.is_terminal:
            if node.lo is not None or node.hi is not None:
                rep.add("structure", u, "terminal with outgoing edges")
            continue
        if node.lo is None or node.hi is None:
            rep.add("structure", u, "internal node needs two outgoing edges")
            dangling = True
            continue
        if not 1 <= node.var <= d.n:
            rep.add("structure", u, f"variable index {node.var} outside 1..{d.n}")
        for b in (0, 1):
            head = node.edge(b).head
            if head not in nodes:
                rep.add("structure", u, f"{b}-edge points to missing node {head}")
                dangling = True
    if dangling:
        return rep

    indeg = defaultdict(int)
    for u in nodes:
        if not nodes[u].is_terminal:
            for b in (0, 1):
                indeg[nodes[u].edge(b).head] += 1
    if indeg[d.root]:
        rep.add("root", d.root, "root has incoming edges")

    post = _postorder(d, rep)
    if post is None:
        return rep
    reachable = set(post)
    for u in sorted(set(nodes) - reachable):
        rep.add("unreachable", u, "node not reachable from the root")

    # Contraction rules.
    seen: dict[tuple, int] = {}
    for u in sorted(reachable):
        node = nodes[u]
        if node.is_terminal:
            continue
        h0, h1 = node.lo.head, node.hi.head
        if d.weighted:
            w0, w1 = _w(node.lo), _w(node.hi)
            if h0 == h1 and abs(w0 - w1) <= WEIGHT_TOL:
                rep.add("redundant node", u, f"both edges lead to {h0} with equal weight")
            key = (node.var, h0, h1, _round(w0), _round(w1))
        else:
            if h0 == h1:
                rep.add("redundant node", u, f"both edges lead to {h0}")
            key = (node.var, h0, h1)
        if key in seen:
            rep.add("equivalent node", u, f"same label and children as node {seen[key]}")
        else:
            seen[key] = u

    # Freeness via descendant variable sets.
    below: dict[int, int] = {}
    for u in post:
        node = nodes[u]
        if node.is_terminal:
            below[u] = 0
            continue
        kids = below[node.lo.head] | below[node.hi.head]
        if kids >> node.var & 1:
            rep.add("freeness", u, f"x{node.var} is read again below this node")
        below[u] = kids | (1 << node.var)

    if d.weighted:
        for u in sorted(reachable):
            node = nodes[u]
            if node.is_terminal:
                continue
            w0, w1 = _w(node.lo), _w(node.hi)
            for b, w in ((0, w0), (1, w1)):
                if not (math.isfinite(w.real) and math.isfinite(w.imag)):
                    rep.add("weight", u, f"{b}-edge weight is not finite")
                elif nodes[node.edge(b).head].kind is Kind.ZERO and abs(w) > WEIGHT_TOL:
                    rep.add("weight", u, f"{b}-edge into t0 must have weight 0, has {w}")
            if abs(w0) <= WEIGHT_TOL and abs(w1) <= WEIGHT_TOL:
                rep.add("degenerate node", u, "both outgoing weights are zero")
    return rep


def _round(w: complex) -> tuple[float, float]:
    return (round(w.real, 12), round(w.imag, 12))


def _postorder(d: Diagram, rep: ValidationReport | None = None) -> list[int] | None:
    """Children-before-parents order of nodes reachable from the root.

    Returns None (and records a violation) if a cycle is found.
    """
    state: dict[int, int] = {}
    order: list[int] = []
    stack: list[tuple[int, int]] = [(d.root, 0)]
    while stack:
        u, i = stack.pop()
        if i == 0:
            if state.get(u) == 2:
                continue
            state[u] = 1
        node = d.nodes[u]
        kids = () if node.is_terminal else (node.lo.head, node.hi.head)
        if i < len(kids):
            stack.append((u, i + 1))
            v = kids[i]
            if state.get(v) == 1:
                if rep is None:
                    raise DiagramError(f"cycle through node {v}")
                rep.add("cycle", v, "directed cycle")
                return None
            if v not in state:
                stack.append((v, 0))
        else:
            state[u] = 2
            order.append(u)
    return order


def reachable(d: Diagram) -> list[int]:
    return sorted(_postorder(d))


# -- evaluation ------------------------------------------------------------


@dataclass(frozen=True)
class PathTrace:
    nodes: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]
    free_vars: int

    @property
    def terminal(self) -> int:
        return self.nodes[-1]


def trace(d: Diagram, z: BitString) -> PathTrace:
    """Follow the z-selected edges from the root to a terminal."""
    bits = _bits(z, d.n)
    seq = [d.root]
    edges = []
    u = d.root
    while not d.nodes[u].is_terminal:
        node = d.nodes[u]
        b = bits[node.var - 1]
        edges.append((u, b))
        u = node.edge(b).head
        seq.append(u)
    return PathTrace(tuple(seq), tuple(edges), d.n - len(seq) + 1)


def evaluate(d: Diagram, x: BitString) -> int:
    return 1 if d.nodes[trace(d, x).terminal].kind is Kind.ONE else 0


def truth_table(d: Diagram) -> list[int]:
    return [evaluate(d, index_to_bits(k, d.n)) for k in range(2**d.n)]


def node_norm(d: Diagram, u: int) -> float:
    w0, w1 = d.weights(u)
    norm = math.sqrt(abs(w0) ** 2 + abs(w1) ** 2)
    if norm <= WEIGHT_TOL:
        raise DegenerateNodeError(f"node {u} has both outgoing weights zero")
    return norm


def amplitude(d: Diagram, z: BitString) -> complex:
    if not d.weighted:
        raise DiagramError("amplitude needs a weighted diagram")
    path = trace(d, z)
    if d.nodes[path.terminal].kind is Kind.ZERO:
        return 0j
    amp = complex(2.0 ** (-path.free_vars / 2))
    for u, b in path.edges:
        amp *= d.weights(u)[b] / node_norm(d, u)
    return amp


# -- orderings -------------------------------------------------------------


def layers(d: Diagram) -> list[set[int]]:
    """Bottom-up layer decomposition; layer 0 holds the terminals.

    A node sits one layer above its highest child, which is exactly the
    "all children lower, at least one child in the previous layer" rule.
    """
    height: dict[int, int] = {}
    for u in _postorder(d):
        node = d.nodes[u]
        if node.is_terminal:
            height[u] = 0
        else:
            height[u] = 1 + max(height[node.lo.head], height[node.hi.head])
    terminals = {u for u, node in d.nodes.items() if node.is_terminal}
    out: list[set[int]] = [set(terminals)]
    for u, h in height.items():
        if h:
            while len(out) <= h:
                out.append(set())
            out[h].add(u)
    return out


def topological_order(d: Diagram) -> list[int]:
    """Internal nodes, root first, parents before children.

    Kahn's algorithm; among ready nodes the smallest id goes first.
    """
    internal = [u for u in reachable(d) if not d.nodes[u].is_terminal]
    indeg = {u: 0 for u in internal}
    for u in internal:
        for v in d.children(u):
            if v in indeg:
                indeg[v] += 1
    ready = [u for u, k in indeg.items() if k == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        u = heapq.heappop(ready)
        order.append(u)
        for v in d.children(u):
            if v in indeg:
                indeg[v] -= 1
                if indeg[v] == 0:
                    heapq.heappush(ready, v)
    if len(order) != len(internal):
        raise DiagramError("cycle among internal nodes")
    return order


def is_obdd_under(d: Diagram, order: Sequence[int]) -> bool:
    """True iff every internal->internal edge respects the variable ``order``.

    ``order`` lists variable indices from first to last read.
    """
    rank = {var: pos for pos, var in enumerate(order)}
    for u in reachable(d):
        node = d.nodes[u]
        if node.is_terminal:
            continue
        for v in (node.lo.head, node.hi.head):
            child = d.nodes[v]
            if not child.is_terminal and rank[node.var] >= rank[child.var]:
                return False
    return True


# -- reduction -------------------------------------------------------------


def reduce(d: Diagram, log: list[tuple[str, int, int]] | None = None) -> Diagram:
    """Apply redundant-node deletion and equivalent-node sharing to a fixpoint.

    Nodes are processed bottom-up (by height, then id), so the surviving
    representative of a merge is the smallest id. Each applied rule is
    appended to ``log`` as ``("delete", u, replacement)`` or
    ``("merge", u, into)``.
    """
    if d.weighted:
        raise DiagramError("reduce() takes an unweighted diagram; reduce before weighting")
    post = _postorder(d)
    height: dict[int, int] = {}
    for u in post:
        node = d.nodes[u]
        height[u] = 0 if node.is_terminal else 1 + max(height[node.lo.head], height[node.hi.head])

    canon: dict[int, int] = {}
    terminal_rep: dict[Kind, int] = {}
    table: dict[tuple[int, int, int], int] = {}
    kept: dict[int, Node] = {}
    for u in sorted(post, key=lambda v: (height[v], v)):
        node = d.nodes[u]
        if node.is_terminal:
            rep = terminal_rep.setdefault(node.kind, u)
            canon[u] = rep
            if rep == u:
                kept[u] = node
            elif log is not None:
                log.append(("merge", u, rep))
            continue
        lo, hi = canon[node.lo.head], canon[node.hi.head]
        if lo == hi:
            canon[u] = lo
            if log is not None:
                log.append(("delete", u, lo))
            continue
        key = (node.var, lo, hi)
        if key in table:
            canon[u] = table[key]
            if log is not None:
                log.append(("merge", u, table[key]))
            continue
        table[key] = u
        canon[u] = u
        kept[u] = Node.internal(node.var, lo, hi)

    root = canon[d.root]
    # Drop anything no longer reachable from the new root.
    result = Diagram(d.n, kept, root)
    live = set(reachable(result))
    return Diagram(d.n, {u: kept[u] for u in sorted(live)}, root)


# -- construction helpers -------------------------------------------------


class Builder:
    """Hash-consing constructor that only ever produces reduced diagrams."""

    def __init__(self, n: int):
        self.n = n
        self.nodes: dict[int, Node] = {0: Node.terminal(0), 1: Node.terminal(1)}
        self._table: dict[tuple[int, int, int], int] = {}

    @property
    def zero(self) -> int:
        return 0

    @property
    def one(self) -> int:
        return 1

    def node(self, var: int, lo: int, hi: int) -> int:
        if lo == hi:
            return lo
        key = (var, lo, hi)
        u = self._table.get(key)
        if u is None:
            u = len(self.nodes)
            self.nodes[u] = Node.internal(var, lo, hi)
            self._table[key] = u
        return u

    def support(self, u: int) -> int:
        """Bitmask of variables read in the sub-diagram rooted at ``u``."""
        mask, stack, seen = 0, [u], set()
        while stack:
            v = stack.pop()
            if v in seen:
                continue
            seen.add(v)
            node = self.nodes[v]
            if not node.is_terminal:
                mask |= 1 << node.var
                stack.extend((node.lo.head, node.hi.head))
        return mask

    def build(self, root: int) -> Diagram:
        """Diagram rooted at ``root``, renumbered densely in DFS order."""
        full = Diagram(self.n, self.nodes, root)
        return renumber(Diagram(self.n, {u: self.nodes[u] for u in reachable(full)}, root))


def renumber(d: Diagram) -> Diagram:
    """Dense ids: root 0 and internals by topological order, then t0, t1."""
    order = topological_order(d) if not d.nodes[d.root].is_terminal else []
    ids: dict[int, int] = {u: i for i, u in enumerate(order)}
    for value in (0, 1):
        t = d.terminal_id(value)
        if t is not None and t in set(reachable(d)):
            ids[t] = len(ids)
    nodes = {}
    for u, new in ids.items():
        node = d.nodes[u]
        if node.is_terminal:
            nodes[new] = node
        else:
            nodes[new] = Node.internal(
                node.var,
                Edge(ids[node.lo.head], node.lo.weight),
                Edge(ids[node.hi.head], node.hi.weight),
            )
    return Diagram(d.n, nodes, ids[d.root], d.weighted)


def from_table(
    n: int,
    rows: Iterable[tuple],
    root: int,
    t0: int | None = None,
    t1: int | None = None,
) -> Diagram:
    """Build a diagram from ``(id, var, lo, hi[, w0, w1])`` rows.

    Convenience for tests and hand-written examples.
    """
    nodes: dict[int, Node] = {}
    weighted = False
    if t0 is not None:
        nodes[t0] = Node.terminal(0)
    if t1 is not None:
        nodes[t1] = Node.terminal(1)
    for row in rows:
        if len(row) == 6:
            u, var, lo, hi, w0, w1 = row
            weighted = True
            nodes[u] = Node.internal(var, Edge(lo, complex(w0)), Edge(hi, complex(w1)))
        else:
            u, var, lo, hi = row
            nodes[u] = Node.internal(var, lo, hi)
    return Diagram(n, nodes, root, weighted)


def is_close(a: complex, b: complex, tol: float = 1e-12) -> bool:
    return cmath.isclose(a, b, abs_tol=tol)
