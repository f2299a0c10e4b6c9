import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from bddqsp.diagram import (
    Diagram,
    DegenerateNodeError,
    DiagramError,
    Node,
    amplitude,
    evaluate,
    from_table,
    index_to_bits,
    is_obdd_under,
    layers,
    reduce,
    topological_order,
    trace,
    truth_table,
    validate,
)
from bddqsp.generate import random_fbdd, random_wfbdd

from conftest import (
    all_inputs,
    six_node_function,
    tree3_function,
    mixed_order_function,
    has_repeated_var_on_path,
    random_bdd,
)


# -- validate --------------------------------------------------------------


def test_smallest_wfbdd_is_valid(single_weighted):
    assert validate(single_weighted).ok


def test_redundant_node_reported():
    d = from_table(2, [(0, 1, 1, 3), (1, 2, 2, 2)], root=0, t0=2, t1=3)
    assert "redundant node" in validate(d).kinds()


def test_equivalent_nodes_reported():
    d = from_table(2, [(0, 1, 1, 2), (1, 2, 3, 4), (2, 2, 3, 4)], root=0, t0=3, t1=4)
    rep = validate(d)
    assert "equivalent node" in rep.kinds()
    assert any(v.node == 2 for v in rep.violations)


def test_freeness_violation_matches_path_walk():
    # x1 is read again under x2 on the 0-branch.
    d = from_table(2, [(0, 1, 1, 4), (1, 2, 2, 4), (2, 1, 3, 4)], root=0, t0=3, t1=4)
    assert has_repeated_var_on_path(d)
    rep = validate(d)
    assert "freeness" in rep.kinds()
    assert [v.node for v in rep.violations if v.kind == "freeness"] == [0]


@pytest.mark.parametrize("seed", range(40))
def test_freeness_check_agrees_with_path_enumeration(seed):
    rng = random.Random(seed)
    d = random_bdd(rng, rng.randint(2, 6), rng.randint(2, 9))
    d = Diagram(d.n, {u: d.nodes[u] for u in _reachable_ids(d)}, d.root)
    assert ("freeness" in validate(d).kinds()) == has_repeated_var_on_path(d)


def _reachable_ids(d):
    seen, stack = set(), [d.root]
    while stack:
        u = stack.pop()
        if u in seen:
            continue
        seen.add(u)
        if not d.nodes[u].is_terminal:
            stack.extend(d.children(u))
    return seen


def test_dangling_id_is_reported_not_raised():
    d = Diagram(1, {0: Node.internal(1, 1, 9), 1: Node.terminal(0)}, 0)
    rep = validate(d)
    assert "structure" in rep.kinds()


def test_cycle_is_reported():
    d = Diagram(2, {0: Node.internal(1, 1, 2), 1: Node.internal(2, 0, 2), 2: Node.terminal(1)}, 0)
    kinds = validate(d).kinds()
    assert "cycle" in kinds or "root" in kinds


def test_weight_into_t0_must_be_zero(single):
    d = single.with_weights({0: (0.5, 1)})
    assert "weight" in validate(d).kinds()
    ok = single.with_weights({0: (1e-13, 1)})
    assert validate(ok).ok


def test_degenerate_node_reported_and_amplitude_raises(or2):
    d = or2.with_weights({0: (1, 1), 1: (0, 0)})
    assert "degenerate node" in validate(d).kinds()
    with pytest.raises(DegenerateNodeError):
        amplitude(d, "01")


def test_unreachable_node_reported(single):
    nodes = dict(single.nodes)
    nodes[5] = Node.internal(1, 1, 2)
    assert "unreachable" in validate(Diagram(1, nodes, 0)).kinds()


def test_weighted_parallel_edges_allowed_when_weights_differ():
    d = from_table(1, [(0, 1, 1, 1, 1.0, 0.5)], root=0, t1=1)
    assert validate(d).ok
    same = from_table(1, [(0, 1, 1, 1, 0.5, 0.5)], root=0, t1=1)
    assert "redundant node" in validate(same).kinds()


# -- evaluate / trace --------------------------------------------------------


def test_six_node_truth_table(six_node):
    assert validate(six_node).ok
    assert evaluate(six_node, (1, 0, 1, 1)) == 1
    assert evaluate(six_node, (1, 1, 1, 1)) == 1
    assert evaluate(six_node, "1000") == 0
    assert truth_table(six_node) == [six_node_function(x) for x in all_inputs(4)]


def test_six_node_is_free_but_not_natural_order(six_node):
    assert not is_obdd_under(six_node, [1, 2, 3, 4])


def test_six_node_shared_path(six_node):
    assert trace(six_node, "0000").nodes == trace(six_node, "0001").nodes


def test_trace_single(single):
    t = trace(single, "1")
    assert t.nodes == (0, 2)
    assert t.free_vars == 0
    assert t.edges == ((0, 1),)


@pytest.mark.parametrize("seed", range(15))
def test_trace_free_var_count(seed):
    rng = random.Random(seed)
    d = random_fbdd(rng, rng.randint(1, 8))
    for x in all_inputs(d.n):
        t = trace(d, x)
        assert t.free_vars == d.n - len(t.nodes) + 1
        assert t.nodes[0] == d.root and d.nodes[t.nodes[-1]].is_terminal
        for (u, b), v in zip(t.edges, t.nodes[1:]):
            assert d.nodes[u].edge(b).head == v
        assert evaluate(d, x) == int(d.nodes[t.terminal].kind.value == "terminal1")


def test_bitstring_length_checked(single):
    with pytest.raises(ValueError):
        evaluate(single, "10")


# -- amplitude ---------------------------------------------------------------


def test_amplitude_single(single_weighted):
    assert amplitude(single_weighted, "1") == 1
    assert amplitude(single_weighted, "0") == 0


def test_amplitude_or2(or2_weighted):
    # By hand: 2^{-1/2} * sqrt2/sqrt3 on the short path.
    assert amplitude(or2_weighted, "11") == pytest.approx(1 / math.sqrt(3), abs=1e-15)
    assert amplitude(or2_weighted, "10") == pytest.approx(1 / math.sqrt(3), abs=1e-15)
    assert amplitude(or2_weighted, "01") == pytest.approx(1 / math.sqrt(3), abs=1e-15)
    assert amplitude(or2_weighted, "00") == 0
    total = sum(abs(amplitude(or2_weighted, x)) ** 2 for x in all_inputs(2))
    assert total == pytest.approx(1, abs=1e-15)


def test_amplitude_needs_weights(or2):
    with pytest.raises(DiagramError):
        amplitude(or2, "11")


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 8))
def test_normalization_and_support(seed, n):
    d = random_wfbdd(random.Random(seed), n)
    total = 0.0
    for x in all_inputs(n):
        a = amplitude(d, x)
        total += abs(a) ** 2
        assert (a != 0) == bool(evaluate(d, x))
    assert abs(total - 1) < 1e-10


def test_tautology_without_t0():
    d = Diagram(3, {0: Node.terminal(1)}, 0, weighted=True)
    assert validate(d).ok
    assert all(evaluate(d, x) for x in all_inputs(3))
    assert amplitude(d, "010") == pytest.approx(2 ** -1.5)


# -- layers / order ------------------------------------------------------------


def test_layers_single(single):
    ls = layers(single)
    assert ls[0] == {1, 2}
    assert ls[1] == {0}


def test_layers_six_node(six_node):
    ls = layers(six_node)
    assert ls[0] == {6, 7}
    assert ls[1] == {2, 5}  # both children are terminals


@pytest.mark.parametrize("seed", range(30))
def test_layer_partition(seed):
    rng = random.Random(seed)
    d = random_fbdd(rng, rng.randint(1, 7))
    ls = layers(d)
    flat = [u for layer in ls for u in layer]
    assert sorted(flat) == sorted(d.nodes)
    where = {u: i for i, layer in enumerate(ls) for u in layer}
    for u in d.internal_ids():
        kids = [where[v] for v in d.children(u)]
        assert max(kids) == where[u] - 1


def test_topological_order_chain():
    d = from_table(3, [(0, 1, 3, 1), (1, 2, 3, 2), (2, 3, 3, 4)], root=0, t0=3, t1=4)
    assert topological_order(d) == [0, 1, 2]


def test_topological_order_tie_break(six_node):
    # r, then its children 1 and 4 in id order; 2 waits for both parents.
    assert topological_order(six_node) == [0, 1, 3, 2, 4, 5]


@pytest.mark.parametrize("seed", range(30))
def test_topological_order_respects_edges(seed):
    rng = random.Random(seed)
    d = random_fbdd(rng, rng.randint(1, 8))
    order = topological_order(d)
    pos = {u: i for i, u in enumerate(order)}
    assert order[0] == d.root and sorted(order) == d.internal_ids()
    for u in order:
        for v in d.children(u):
            if v in pos:
                assert pos[u] < pos[v]


def test_obdd_under(mixed_order_obdd, mixed_order_fbdd, single):
    assert truth_table(mixed_order_obdd) == [mixed_order_function(x) for x in all_inputs(4)]
    assert truth_table(mixed_order_fbdd) == [mixed_order_function(x) for x in all_inputs(4)]
    assert validate(mixed_order_fbdd).ok
    assert is_obdd_under(mixed_order_obdd, [1, 2, 3, 4])
    assert not is_obdd_under(mixed_order_fbdd, [1, 2, 3, 4])
    assert is_obdd_under(single, [1])


# -- reduce ----------------------------------------------------------------------


def test_tree3_reduction(tree3):
    log = []
    r = reduce(tree3, log)
    assert log == [("delete", 4, 7), ("merge", 5, 3)]
    assert r.num_internal == 5
    assert validate(r).ok
    assert truth_table(r) == [tree3_function(x) for x in all_inputs(3)]


def test_reduce_fixpoint(six_node):
    assert reduce(six_node) == six_node


def test_reduce_rejects_weighted(or2_weighted):
    with pytest.raises(DiagramError):
        reduce(or2_weighted)


@pytest.mark.parametrize("seed", range(50))
def test_reduce_random_bdd(seed):
    rng = random.Random(seed)
    d = random_bdd(rng, 4, 8)
    r = reduce(d)
    assert truth_table(r) == truth_table(d)
    assert r.num_nodes <= len(_reachable_ids(d))
    kinds = validate(r).kinds()
    assert not kinds & {"redundant node", "equivalent node", "structure", "unreachable"}
    assert reduce(r) == r


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 10), size=st.integers(1, 25))
def test_reduce_soundness_property(seed, n, size):
    d = random_bdd(random.Random(seed), n, size)
    r = reduce(d)
    for k in range(2**n):
        x = index_to_bits(k, n)
        assert evaluate(r, x) == evaluate(d, x)


def test_sound_ignores_only_reducedness():
    redundant = from_table(2, [(0, 1, 1, 3), (1, 2, 2, 2)], root=0, t0=2, t1=3)
    rep = validate(redundant)
    assert not rep.ok and rep.sound
    free = from_table(2, [(0, 1, 1, 4), (1, 2, 2, 4), (2, 1, 3, 4)], root=0, t0=3, t1=4)
    assert not validate(free).sound
