"""Minimum-weight exact cover of the leaves by links.

Every leaf must end up incident to exactly one chosen link. Leaf-to-leaf
links are priced by whether they are twins; links from a leaf to an
internal node are cheaper by one half.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .instance import InstanceError, Link, TapInstance
from .matching import min_weight_perfect_matching

DEFAULT_RHO = Fraction(7, 4)


@dataclass(frozen=True)
class LeafWeightConfig:
    rho: Fraction = DEFAULT_RHO

    def __post_init__(self) -> None:
        object.__setattr__(self, "rho", Fraction(self.rho))
        if self.rho < Fraction(3, 2):
            raise ValueError(f"rho must be at least 3/2, got {self.rho}")


@dataclass(frozen=True)
class ExactLeafCover:
    links: frozenset[Link]
    weight: Fraction
    matching_part: frozenset[Link]


def link_weight(cfg: LeafWeightConfig, inst: TapInstance, e: Link) -> Fraction:
    leaves = inst.leaves
    a, b = e
    if a in leaves and b in leaves:
        if e in inst.twins:
            return cfg.rho + Fraction(1, 2)
        return cfg.rho
    if a in leaves or b in leaves:
        return cfg.rho - Fraction(1, 2)
    raise ValueError(f"link {e} has no leaf endpoint")


def cover_weight(cfg: LeafWeightConfig, inst: TapInstance, links) -> Fraction:
    return sum((link_weight(cfg, inst, e) for e in links), Fraction(0))


def is_exact_leaf_cover(inst: TapInstance, links) -> bool:
    degree = {v: 0 for v in inst.leaves}
    for u, v in links:
        for x in (u, v):
            if x in degree:
                degree[x] += 1
    return all(d == 1 for d in degree.values())


def min_weight_exact_cover(cfg: LeafWeightConfig, inst: TapInstance) -> ExactLeafCover:
    """Solve the leaf cover through a perfect matching on leaves plus one dummy per leaf.

    Leaf pairs matched together take their shared link, a leaf matched to its
    own dummy takes its upward link, and spare dummies pair off for free.
    Equal-weight covers are separated by a lexicographic perturbation so the
    result is the smallest link set in canonical order.
    """
    leaves = sorted(inst.leaves)
    pair_link: dict[tuple[int, int], Link] = {}
    up_link: dict[int, Link] = {}
    for e in inst.sorted_links():
        a, b = e
        if a in inst.leaves and b in inst.leaves:
            pair_link.setdefault(e, e)
        elif a in inst.leaves or b in inst.leaves:
            leaf = a if a in inst.leaves else b
            up_link.setdefault(leaf, e)  # first in canonical order; all cost rho - 1/2
    for v in leaves:
        if v not in up_link and not any(v in p for p in pair_link):
            raise InstanceError(f"leaf {v} has no incident link")

    candidates = sorted(set(pair_link.values()) | set(up_link.values()))
    rank = {e: i for i, e in enumerate(candidates)}
    big = 1 << (len(candidates) + 1)
    scale = 4 * cfg.rho.denominator

    def perturbed(e: Link) -> int:
        base = link_weight(cfg, inst, e) * scale
        assert base.denominator == 1
        return int(base) * big - (1 << (len(candidates) - rank[e]))

    graph: list[tuple[object, object, int]] = []
    for (a, b), e in pair_link.items():
        graph.append((("leaf", a), ("leaf", b), perturbed(e)))
    for a, e in up_link.items():
        graph.append((("leaf", a), ("dummy", a), perturbed(e)))
    for i, a in enumerate(leaves):
        for b in leaves[i + 1:]:
            graph.append((("dummy", a), ("dummy", b), 0))
    vertices = [("leaf", v) for v in leaves] + [("dummy", v) for v in leaves]
    mate = min_weight_perfect_matching(graph, vertices)

    chosen: set[Link] = set()
    matched: set[Link] = set()
    for u, v in mate:
        kinds = {u[0], v[0]}
        if kinds == {"leaf"}:
            e = pair_link[tuple(sorted((u[1], v[1])))]
            chosen.add(e)
            matched.add(e)
        elif kinds == {"leaf", "dummy"}:
            leaf = u[1] if u[0] == "leaf" else v[1]
            assert u[1] == v[1], "leaf matched to a foreign dummy"
            chosen.add(up_link[leaf])
    free_dummies = sum(1 for u, v in mate if u[0] == v[0] == "dummy") * 2
    assert free_dummies == 2 * len(matched), "dummy pairing parity broken"
    assert is_exact_leaf_cover(inst, chosen)
    return ExactLeafCover(frozenset(chosen), cover_weight(cfg, inst, chosen), frozenset(matched))
