"""Seeded random FBDDs and weightings for property tests and benchmarks."""
from __future__ import annotations

import cmath
import math
import random

from .diagram import Builder, Diagram, Kind


def random_fbdd(
    rng: random.Random,
    n: int,
    max_internal: int = 12,
    p_leaf: float = 0.2,
    p_share: float = 0.35,
) -> Diagram:
    """Reduced FBDD over ``n`` variables with 1..max_internal internal nodes.

    Sub-diagrams are built over shrinking variable sets, so freeness holds by
    construction; reusing earlier sub-diagrams whose support fits gives the
    sharing that distinguishes a DAG from a tree. Path orders differ freely.
    """
    while True:
        b = Builder(n)
        pool: list[int] = []

        def grow(avail: frozenset[int], depth: int) -> int:
            if not avail or (depth > 0 and rng.random() < p_leaf):
                return rng.choice((b.zero, b.one))
            allowed = sum(1 << v for v in avail)
            shared = [u for u in pool if b.support(u) & ~allowed == 0]
            if shared and rng.random() < p_share:
                return rng.choice(shared)
            var = rng.choice(sorted(avail))
            rest = avail - {var}
            lo = grow(rest, depth + 1)
            hi = grow(rest, depth + 1)
            u = b.node(var, lo, hi)
            if u > 1 and u not in pool:
                pool.append(u)
            return u

        root = grow(frozenset(range(1, n + 1)), 0)
        if root <= 1:
            continue
        d = b.build(root)
        if d.num_internal <= max_internal and d.t1 is not None:
            return d


def random_weights(rng: random.Random, d: Diagram, complex_weights: bool = True) -> Diagram:
    """Attach random nonzero weights; edges into the 0-terminal get 0."""
    weights = {}
    for u in d.internal_ids():
        pair = []
        for h in d.children(u):
            if d.nodes[h].kind is Kind.ZERO:
                pair.append(0j)
                continue
            mag = rng.uniform(0.2, 1.5)
            phase = rng.uniform(-math.pi, math.pi) if complex_weights else 0.0
            pair.append(mag * cmath.exp(1j * phase))
        weights[u] = tuple(pair)
    return d.with_weights(weights)


def random_wfbdd(rng: random.Random, n: int, max_internal: int = 12) -> Diagram:
    return random_weights(rng, random_fbdd(rng, n, max_internal))
