"""Exact minimum-weight perfect matching on rational weights.

Weights are scaled to integers by the common denominator and handed to the
blossom implementation in networkx, which is exact on integer input.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Hashable, Iterable, Union

import networkx as nx

Weight = Union[int, Fraction]


class NoPerfectMatching(ValueError):
    pass


def min_weight_perfect_matching(
    edges: Iterable[tuple[Hashable, Hashable, Weight]],
    vertices: Iterable[Hashable] = (),
) -> set[tuple[Hashable, Hashable]]:
    """Return a minimum-weight perfect matching as a set of (u, v) edges.

    ``edges`` holds (u, v, weight) triples of a simple graph; isolated
    ``vertices`` may be listed so that their presence makes the instance
    infeasible rather than silently ignored.
    """
    edges = [(u, v, Fraction(w)) for u, v, w in edges]
    graph = nx.Graph()
    graph.add_nodes_from(vertices)
    if not edges:
        if graph.number_of_nodes():
            raise NoPerfectMatching("graph has vertices but no edges")
        return set()
    scale = lcm(*(w.denominator for _, _, w in edges))
    ints = [(u, v, int(w * scale)) for u, v, w in edges]
    # max-weight with maximum cardinality on (offset - w) == min-weight perfect
    offset = max(w for _, _, w in ints) + 1
    for u, v, w in ints:
        if u == v:
            raise ValueError(f"self-loop on {u!r}")
        if graph.has_edge(u, v):
            raise ValueError(f"parallel edge {u!r}-{v!r}")
        graph.add_edge(u, v, weight=offset - w)
    mate = nx.max_weight_matching(graph, maxcardinality=True, weight="weight")
    if 2 * len(mate) != graph.number_of_nodes():
        raise NoPerfectMatching(
            f"maximum matching covers {2 * len(mate)} of {graph.number_of_nodes()} vertices")
    index = {frozenset((u, v)): (u, v) for u, v, _ in edges}
    return {index[frozenset(pair)] for pair in mate}


def matching_weight(edges: Iterable[tuple[Hashable, Hashable, Weight]],
                    matching: set[tuple[Hashable, Hashable]]) -> Fraction:
    lookup = {frozenset((u, v)): Fraction(w) for u, v, w in edges}
    return sum((lookup[frozenset(e)] for e in matching), Fraction(0))
