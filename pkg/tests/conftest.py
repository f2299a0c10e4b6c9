import itertools
import math
import random

import pytest

from bddqsp.diagram import Builder, Diagram, Node, from_table

# Acceptance results collected for the terminal summary.
ACCEPTANCE: list[tuple[str, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for name, ok, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")


@pytest.fixture
def record():
    def _record(name: str, ok: bool, detail: str) -> bool:
        ACCEPTANCE.append((name, ok, detail))
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
        return ok

    return _record


# -- oracles ---------------------------------------------------------------


def all_inputs(n):
    return list(itertools.product((0, 1), repeat=n))


def obdd_from_function(n, f, order=None):
    """Reduced OBDD by Shannon expansion; test-side construction only."""
    order = list(order or range(1, n + 1))
    b = Builder(n)

    def rec(level, assignment):
        if level == len(order):
            return b.one if f(tuple(assignment[i] for i in range(1, n + 1))) else b.zero
        var = order[level]
        lo = rec(level + 1, {**assignment, var: 0})
        hi = rec(level + 1, {**assignment, var: 1})
        return b.node(var, lo, hi)

    return b.build(rec(0, {}))


def all_paths(d: Diagram):
    """Every root-to-terminal path as a list of (node, branch) pairs."""
    out = []
    stack = [(d.root, [])]
    while stack:
        u, path = stack.pop()
        node = d.nodes[u]
        if node.is_terminal:
            out.append(path)
            continue
        for b in (0, 1):
            stack.append((node.edge(b).head, path + [(u, b)]))
    return out


def has_repeated_var_on_path(d: Diagram) -> bool:
    for path in all_paths(d):
        seen = [d.nodes[u].var for u, _ in path]
        if len(seen) != len(set(seen)):
            return True
    return False


def random_bdd(rng: random.Random, n: int, size: int) -> Diagram:
    """Unreduced BDD: each new node picks children among earlier nodes."""
    nodes = {0: Node.terminal(0), 1: Node.terminal(1)}
    for u in range(2, size + 2):
        var = rng.randint(1, n)
        lo, hi = rng.randrange(u), rng.randrange(u)
        nodes[u] = Node.internal(var, lo, hi)
    return Diagram(n, nodes, size + 1)


# -- diagrams reconstructed from stated functions ------------------------------


def six_node_function(x):
    x1, x2, x3, x4 = x
    return int(
        (x1 and x3 and x4)
        or (not x1 and x2 and x4)
        or (not x1 and not x2 and not x3)
        or (not x1 and x2 and not x3 and not x4)
    )


@pytest.fixture
def six_node():
    """FBDD for x1x3x4 + ~x1x2x4 + ~x1~x2~x3 + ~x1x2~x3~x4.

    Paths read x1,x2,x4,x3 on one side and x1,x3,x4 on the other.
    """
    return from_table(
        4,
        [
            (0, 1, 1, 4),
            (1, 2, 2, 3),
            (2, 3, 7, 6),
            (3, 4, 2, 7),
            (4, 3, 6, 5),
            (5, 4, 6, 7),
        ],
        root=0,
        t0=6,
        t1=7,
    )


def tree3_function(x):
    x1, x2, x3 = x
    return int((not x1 and not x2 and x3) or (x1 and not x2 and x3) or (x1 and x2 and not x3))


@pytest.fixture
def tree3():
    """Full decision tree; u4 (id 4) is redundant and u5 (id 5) duplicates u3 (id 3)."""
    return from_table(
        3,
        [
            (0, 1, 1, 2),
            (1, 2, 3, 4),
            (2, 2, 5, 6),
            (3, 3, 7, 8),
            (4, 3, 7, 7),
            (5, 3, 7, 8),
            (6, 3, 8, 7),
        ],
        root=0,
        t0=7,
        t1=8,
    )


def mixed_order_function(x):
    x1, x2, x3, x4 = x
    return int(
        (not x1 and not x2 and x3)
        or (not x1 and x2 and x4)
        or (x1 and not x3 and x4)
        or (x1 and x2 and x3)
    )


@pytest.fixture
def mixed_order_obdd():
    return obdd_from_function(4, mixed_order_function)


@pytest.fixture
def mixed_order_fbdd():
    b = Builder(4)
    x4 = b.node(4, b.zero, b.one)
    one_side = b.node(3, x4, b.node(2, b.zero, b.one))
    zero_side = b.node(2, b.node(3, b.zero, b.one), x4)
    return b.build(b.node(1, zero_side, one_side))


@pytest.fixture
def or2():
    """f = x1 v x2 with x1 at the root and its 1-edge straight to t1."""
    return from_table(2, [(0, 1, 1, 3), (1, 2, 2, 3)], root=0, t0=2, t1=3)


@pytest.fixture
def or2_weighted(or2):
    return or2.with_weights({0: (1, math.sqrt(2)), 1: (0, 1)})


@pytest.fixture
def single():
    """n = 1, f = x1."""
    return from_table(1, [(0, 1, 1, 2)], root=0, t0=1, t1=2)


@pytest.fixture
def single_weighted(single):
    return single.with_weights({0: (0, 1)})
