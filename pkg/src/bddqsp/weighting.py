"""Uniform weight distribution over an FBDD.

Turns an unweighted FBDD for ``f`` into a weighted one whose state is the
uniform superposition over the satisfying assignments of ``f``.  Weights are
propagated bottom-up from the 1-terminal: each node keeps the set of
variables not yet consumed below it, and an edge that skips ``k`` variables
relative to its sibling is scaled by ``2^(k/2)``.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

from .diagram import Diagram, DiagramError, validate

COUNT_TOL = 1e-6


class UnsatisfiableError(DiagramError):
    pass


@dataclass(frozen=True)
class WeightingResult:
    diagram: Diagram
    query_count: int
    model_count: int
    # Per node: variables not read on any path below it (includes terminals).
    unassigned: dict[int, frozenset[int]]
    # (node, branch) -> number of variables skipped on that edge.
    skipped: dict[tuple[int, int], int]


def uniform_weights(d: Diagram) -> WeightingResult:
    if d.weighted:
        raise DiagramError("uniform_weights expects an unweighted FBDD")
    report = validate(d)
    if not report.sound:
        raise DiagramError("invalid FBDD: " + "; ".join(map(str, report.violations)))
    t0, t1 = d.t0, d.t1
    if t1 is None or (d.root != t1 and t1 not in {h for u in d.internal_ids() for h in d.children(u)}):
        raise UnsatisfiableError("the 1-terminal is unreachable; f is identically 0")

    everything = frozenset(range(1, d.n + 1))
    unassigned: dict[int, frozenset[int]] = {t1: everything}
    # Squared norm of each node's outgoing weights, kept as exact integers.
    sq: dict[int, int] = {t1: 1}
    if t0 is not None:
        unassigned[t0] = everything
        sq[t0] = 0

    incoming = d.in_edges()
    weights: dict[int, tuple[complex, complex]] = {}
    skipped: dict[tuple[int, int], int] = {}
    done = {t1}
    queue = deque([t1])
    queries = 1
    while queue:
        v = queue.popleft()
        queries += 1
        for u, _ in incoming.get(v, ()):
            queries += 1
            if u in done:
                continue
            h0, h1 = d.children(u)
            if h0 not in unassigned or h1 not in unassigned:
                continue
            queue.append(u)
            done.add(u)
            queries += 1
            common = unassigned[h0] & unassigned[h1]
            ws = []
            total = 0
            for b, h in ((0, h0), (1, h1)):
                queries += 1
                k = len(unassigned[h] - common)
                skipped[(u, b)] = k
                w = sq[h] << k
                total += w
                ws.append(complex(math.sqrt(w)))
            weights[u] = (ws[0], ws[1])
            sq[u] = total
            unassigned[u] = common - {d.nodes[u].var}

    missing = [u for u in d.internal_ids() if u not in weights]
    if missing:
        raise DiagramError(f"nodes never reached during propagation: {missing}")

    out = d.with_weights(weights)
    exact = sq[d.root] << len(unassigned[d.root])
    if d.root != t1:
        w0, w1 = weights[d.root]
        approx = (abs(w0) ** 2 + abs(w1) ** 2) * 2 ** len(unassigned[d.root])
        if abs(approx - exact) > COUNT_TOL * max(1, exact):
            raise DiagramError(f"weight propagation drifted: {approx} vs {exact}")
    return WeightingResult(out, queries, exact, unassigned, skipped)


def model_count(d: Diagram) -> int:
    """Number of satisfying assignments; 0 when f is identically 0."""
    try:
        return uniform_weights(d.unweighted() if d.weighted else d).model_count
    except UnsatisfiableError:
        return 0
