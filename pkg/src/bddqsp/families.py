"""Constructive diagram families.

* elementary symmetric functions ``S_n^i`` as ordered BDDs,
* the function ``h(v, w, X, Y, Z)`` that has a small FBDD but only
  exponential-size OBDDs,
* the binomially weighted OBDD for ``alpha_x = delta^{|x|} / C(n, |x|)``
  and the amplitude-amplification ratio that goes with it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .diagram import Builder, Diagram, Edge, Node


@dataclass(frozen=True)
class SymmetricSpec:
    n: int
    i: int

    def __post_init__(self):
        if self.n < 0 or not 0 <= self.i <= self.n:
            raise ValueError(f"need 0 <= i <= n, got n={self.n}, i={self.i}")


@dataclass(frozen=True)
class DeltaFamilySpec:
    n: int
    delta: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if not 0 <= self.delta <= 1:
            raise ValueError("delta must lie in [0, 1]")


def _count_grid(b: Builder, variables: Sequence[int], leaf) -> int:
    """OBDD reading ``variables`` in order, ending in ``leaf(ones)``."""
    m = len(variables)
    level = [leaf(k) for k in range(m + 1)]
    for j in range(m - 1, -1, -1):
        level = [b.node(variables[j], level[k], level[k + 1]) for k in range(j + 1)]
    return level[0]


def symmetric_obdd(spec: SymmetricSpec) -> Diagram:
    b = Builder(spec.n)
    root = _count_grid(b, list(range(1, spec.n + 1)), lambda k: b.one if k == spec.i else b.zero)
    return b.build(root)


def symmetric(x: Sequence[int], i: int) -> int:
    return int(sum(x) == i)


# -- h family --------------------------------------------------------------


def h_variables(n: int) -> dict[str, list[int]]:
    return {
        "v": [1],
        "w": [2],
        "X": list(range(3, n + 3)),
        "Y": list(range(n + 3, 2 * n + 3)),
        "Z": list(range(2 * n + 3, 3 * n + 3)),
    }


def _f1_branch(b: Builder, xs: list[int], ys: list[int], zs: list[int]) -> int:
    n = len(xs)

    def pick(k: int) -> int:
        # x_i is selected when |YZ| = i-1 or |YZ| = n+i.
        if k < n:
            i = k + 1
        elif k > n:
            i = k - n
        else:
            return b.zero
        return b.node(xs[i - 1], b.zero, b.one)

    return _count_grid(b, ys + zs, pick)


def h_family_fbdd(n: int) -> Diagram:
    """FBDD for ``h`` over 3n+2 variables (see :func:`h_variables`)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    var = h_variables(n)
    X, Y, Z = var["X"], var["Y"], var["Z"]
    b = Builder(3 * n + 2)
    f1 = _f1_branch(b, X, Y, Z)
    f2 = _f1_branch(b, Y, Z, X)
    f3 = _f1_branch(b, Z, X, Y)
    not_v = b.node(2, f1, f2)
    yes_v = b.node(2, f3, b.zero)
    return b.build(b.node(1, not_v, yes_v))


def f1_formula(X: Sequence[int], Y: Sequence[int], Z: Sequence[int]) -> int:
    n = len(X)
    yz = list(Y) + list(Z)
    total = sum(X[i - 1] * (symmetric(yz, i - 1) + symmetric(yz, n + i)) for i in range(1, n + 1))
    return int(total > 0)


def h_formula(bits: Sequence[int], n: int) -> int:
    """Direct evaluation of h from its defining sum of products."""
    v, w = bits[0], bits[1]
    X = bits[2 : n + 2]
    Y = bits[n + 2 : 2 * n + 2]
    Z = bits[2 * n + 2 : 3 * n + 2]
    return int(
        (1 - v) * (1 - w) * f1_formula(X, Y, Z)
        + (1 - v) * w * f1_formula(Y, Z, X)
        + v * (1 - w) * f1_formula(Z, X, Y)
        > 0
    )


def h_node_bound(n: int) -> int:
    return 3 * (2 * n * n + 2 * n) + 3


# -- binomial delta state ----------------------------------------------------


def binomial_alpha(n: int, delta: float, weight: int) -> float:
    return delta**weight / math.comb(n, weight)


def binomial_state(spec: DeltaFamilySpec) -> list[float]:
    """Normalized target amplitudes, indexed by basis integer (x_1 = MSB)."""
    n, delta = spec.n, spec.delta
    raw = [binomial_alpha(n, delta, bin(k).count("1")) for k in range(2**n)]
    norm = math.sqrt(sum(a * a for a in raw))
    return [a / norm for a in raw]


def binomial_wobdd(spec: DeltaFamilySpec) -> Diagram:
    """Pascal-triangle weighted OBDD with n(n+1)/2 internal nodes.

    Node (i, j) sits in layer i (reads x_i) and has seen j-1 zeros; its
    1-edge goes to (i+1, j) and its 0-edge to (i+1, j+1).  Layer-n edges
    enter the 1-terminal weighted by alpha for the number of ones on the
    path; every other edge carries the 2-norm of its head's out-weights.
    """
    n, delta = spec.n, spec.delta
    ids: dict[tuple[int, int], int] = {}
    for i in range(1, n + 1):
        for j in range(1, i + 1):
            ids[(i, j)] = len(ids)
    t1 = len(ids)
    nodes: dict[int, Node] = {t1: Node.terminal(1)}
    norm: dict[tuple[int, int], float] = {}
    for i in range(n, 0, -1):
        for j in range(1, i + 1):
            ones = i - j  # ones seen before reading x_i
            if i == n:
                w0 = binomial_alpha(n, delta, ones)
                w1 = binomial_alpha(n, delta, ones + 1)
                lo, hi = t1, t1
            else:
                lo, hi = ids[(i + 1, j + 1)], ids[(i + 1, j)]
                w0, w1 = norm[(i + 1, j + 1)], norm[(i + 1, j)]
            norm[(i, j)] = math.sqrt(w0 * w0 + w1 * w1)
            nodes[ids[(i, j)]] = Node.internal(i, Edge(lo, complex(w0)), Edge(hi, complex(w1)))
    return Diagram(n, nodes, ids[(1, 1)], weighted=True)


@dataclass(frozen=True)
class RatioBreakdown:
    n: int
    delta: float
    a_bar: tuple[float, ...]
    alpha_l1: float
    a_bar_l2: float
    direct: float
    closed_form: float
    corrected_form: float

    @property
    def relative_deviation(self) -> float:
        """(closed_form - direct) / direct."""
        return (self.closed_form - self.direct) / self.direct


def amplification_ratio(spec: DeltaFamilySpec) -> RatioBreakdown:
    """sqrt(N) * ||alpha||_1 / ||A_bar||_2 from the vectors, plus closed forms.

    ``closed_form`` is the commonly quoted expression
    ``sqrt((1 - d^{n+1}) / (1 - d)) * (2 / (1 + d))^{n/2}``;
    ``corrected_form`` is ``2^{n/2} (1 - d^{n+1}) / ((1 - d)(1 + d)^{n/2})``,
    which is what the vector definitions actually sum to.
    """
    n, delta = spec.n, spec.delta
    a_bar = tuple(math.sqrt(math.comb(n, j) * delta**j) for j in range(n + 1))
    # ||alpha||_1 summed over all 2^n basis states, grouped by Hamming weight.
    alpha_l1 = sum(math.comb(n, j) * binomial_alpha(n, delta, j) for j in range(n + 1))
    a_bar_l2 = math.sqrt(sum(a * a for a in a_bar))
    direct = math.sqrt(2**n) * alpha_l1 / a_bar_l2
    geometric = sum(delta**j for j in range(n + 1))  # (1 - d^{n+1}) / (1 - d), safe at d = 1
    closed = math.sqrt(geometric) * (2 / (1 + delta)) ** (n / 2)
    corrected = 2 ** (n / 2) * geometric / (1 + delta) ** (n / 2)
    return RatioBreakdown(n, delta, a_bar, alpha_l1, a_bar_l2, direct, closed, corrected)
