from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from tapaug.generate import GenSpec, generate
from tapaug.instance import (
    InstanceError, compute_twins_and_stems, format_instance, is_feasible, make_instance,
    map_to_original, new_leaf_after_contracting, parse_instance, path_edges, shadow_completion,
    uncovered_edges, validate_solution,
)

from conftest import two_edge_connected


def test_parse_smallest(fx1):
    assert fx1.n == 2
    assert fx1.tree.edges() == [(1, 0)]
    assert fx1.links == {(0, 1)}
    assert not fx1.closed


def test_parse_cherry(fx2):
    assert fx2.tree.root == 0
    assert fx2.tree.children[1] == (2, 3)
    assert fx2.links == {(2, 3), (0, 2)}
    assert fx2.leaves == {2, 3}


@pytest.mark.parametrize("text, message", [
    ("tap 1\nnodes 3\nroot 0\nedge 0 1\nedge 1 0\nlink 0 2\n", "duplicate edge"),
    ("tap 1\nnodes 4\nroot 0\nedge 0 1\nedge 1 2\nedge 2 0\nlink 0 3\n", "not a tree"),
    ("tap 1\nnodes 2\nroot 0\nedge 0 1\nlink 0 1\nlink 1 0\n", "duplicate link"),
    ("tap 2\nnodes 2\nroot 0\nedge 0 1\n", "version"),
    ("tap 1\nnodes 2\nroot 0\nedge 0 x\n", "non-integer"),
    ("tap 1\nnodes 2\nroot 0\nedge 0 1\nfoo 1 0\n", "malformed"),
    ("tap 1\nnodes 2\nroot 0\nedge 0 5\n", "out of range"),
])
def test_parse_errors(text, message):
    with pytest.raises(InstanceError, match=message):
        parse_instance(text)


def test_format_round_trip(fx2):
    text = format_instance(fx2)
    assert parse_instance(text) == fx2
    assert text.splitlines()[-2:] == ["link 0 2", "link 2 3"]


def test_path_edges(fx2, fx3):
    assert path_edges(fx2, 2, 3) == {(2, 1), (3, 1)}
    assert path_edges(fx2, 2, 0) == {(2, 1), (1, 0)}
    assert path_edges(fx3, 3, 0) == {(1, 0), (2, 1), (3, 2)}


def test_shadow_completion_cherry(fx2):
    closed = shadow_completion(fx2)
    assert closed.links == {(2, 3), (0, 2), (1, 2), (1, 3), (0, 1)}
    assert closed.closed
    assert closed.origin_of((0, 1)) == (0, 2)
    assert closed.origin_of((1, 3)) == (2, 3)
    assert closed.origin_of((2, 3)) == (2, 3)


def test_shadow_completion_single_edge(fx1):
    assert shadow_completion(fx1).links == fx1.links


def test_shadow_completion_idempotent(fx2):
    once = shadow_completion(fx2)
    assert shadow_completion(once).links == once.links


def test_twins(fx2, fx3):
    twins, stem_of = compute_twins_and_stems(shadow_completion(fx2))
    assert twins == {(2, 3)}
    assert stem_of == {(2, 3): 1}
    assert compute_twins_and_stems(shadow_completion(fx3))[0] == set()
    star = make_instance(3, 0, [(0, 1), (0, 2)], [(1, 2)])
    assert compute_twins_and_stems(shadow_completion(star))[0] == set()


def test_twin_through_hanging_path():
    # 3 hangs under 2, so contracting 3-2-1-4 leaves a node whose only edge is 1-0
    inst = shadow_completion(make_instance(5, 0, [(0, 1), (1, 2), (2, 3), (1, 4)], [(3, 4), (0, 3)]))
    assert inst.stem_of == {(3, 4): 1}


def test_feasibility(fx1, fx2):
    assert is_feasible(fx1)
    assert is_feasible(fx2)
    dropped = make_instance(4, 0, [(0, 1), (1, 2), (1, 3)], [(2, 3)])
    assert not is_feasible(shadow_completion(dropped))
    assert uncovered_edges(shadow_completion(dropped)) == [(1, 0)]


def test_validate_solution(closed2, fx1):
    assert validate_solution(closed2, {(2, 3), (0, 1)})
    assert not validate_solution(closed2, {(2, 3)})
    assert validate_solution(fx1, {(0, 1)})
    with pytest.raises(InstanceError):
        validate_solution(fx1, {(0, 5)})


def test_map_to_original(closed2):
    assert map_to_original(closed2, {(2, 3), (0, 1)}) == {(2, 3), (0, 2)}
    assert map_to_original(closed2, {(2, 3), (0, 2)}) == {(2, 3), (0, 2)}
    mapped = map_to_original(closed2, {(1, 2), (1, 3), (0, 1)})
    assert len(mapped) <= 3
    assert validate_solution(closed2, mapped)


def _random_instance(seed: int):
    rng = random.Random(seed)
    return generate(GenSpec(rng.randint(2, 10), Fraction(rng.randint(1, 4), 8), seed,
                            rng.choice(["random-tree", "caterpillar", "star-of-paths"])))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_closure_properties(seed):
    inst = _random_instance(seed)
    closed = shadow_completion(inst)
    assert inst.links <= closed.links
    assert shadow_completion(closed).links == closed.links
    for link in closed.links:
        origin = closed.origin_of(link)
        assert origin in inst.links
        assert path_edges(closed, *link) <= path_edges(closed, *origin)
    twins, stem_of = compute_twins_and_stems(closed)
    for a, b in twins:
        assert new_leaf_after_contracting(closed.tree, closed.tree.path_nodes(a, b))
        assert stem_of[(a, b)] == closed.tree.lca(a, b)


def test_validate_matches_bridge_check():
    rng = random.Random(5)
    for seed in range(120):
        closed = shadow_completion(_random_instance(seed))
        links = closed.sorted_links()
        pick = [l for l in links if rng.random() < 0.4]
        assert validate_solution(closed, pick) == two_edge_connected(closed, pick)
        mapped = map_to_original(closed, pick)
        assert len(mapped) <= len(pick)
        if validate_solution(closed, pick):
            assert validate_solution(closed, mapped)
