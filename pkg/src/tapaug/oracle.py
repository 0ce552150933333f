"""Brute-force ground truth for small instances.

Covers are searched over link subsets with per-link bitmasks of covered tree
edges. Branching always picks the uncovered edge with the fewest candidate
links, and within a branch the earlier candidates are excluded, so every
cover is generated once.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Optional

from .instance import InstanceError, Link, TapInstance, path_edges, shadow_completion
from .leafcover import LeafWeightConfig, link_weight

MAX_LINKS = 60
MAX_EDGES = 62
WITNESS_CAP = 1000


@dataclass
class OracleResult:
    opt_size: int
    witnesses: list[frozenset[Link]]
    enumeration_stats: dict[str, int] = field(default_factory=dict)
    truncated: bool = False


class _CoverSearch:
    def __init__(self, inst: TapInstance, links: Optional[list[Link]] = None):
        self.inst = inst
        self.links = sorted(inst.links if links is None else links)
        edges = inst.tree.edges()
        if len(edges) > MAX_EDGES:
            raise InstanceError(f"{len(edges)} tree edges exceeds the bitmask limit {MAX_EDGES}")
        bit = {e: 1 << i for i, e in enumerate(edges)}
        self.full = (1 << len(edges)) - 1
        self.masks = []
        for link in self.links:
            m = 0
            for e in path_edges(inst, *link):
                m |= bit[e]
            self.masks.append(m)
        self.by_edge = [[j for j, m in enumerate(self.masks) if m >> i & 1]
                        for i in range(len(edges))]
        self.nodes = 0

    def _lower_bound(self, uncovered: int, banned: int) -> int:
        best = max((bin(m & uncovered).count("1") for j, m in enumerate(self.masks)
                    if not banned >> j & 1), default=0)
        if best == 0:
            return 1 << 30
        return -(-bin(uncovered).count("1") // best)

    def covers(self, k: int) -> Iterator[tuple[int, ...]]:
        """Yield every cover with exactly k links (as index tuples)."""
        def rec(chosen: tuple[int, ...], covered: int, banned: int) -> Iterator[tuple[int, ...]]:
            self.nodes += 1
            uncovered = self.full & ~covered
            if not uncovered:
                if len(chosen) == k:
                    yield chosen
                return
            left = k - len(chosen)
            if left <= 0 or self._lower_bound(uncovered, banned) > left:
                return
            pick, options = None, None
            rest = uncovered
            while rest:
                low = rest & -rest
                i = low.bit_length() - 1
                rest ^= low
                opts = [j for j in self.by_edge[i] if not banned >> j & 1]
                if options is None or len(opts) < len(options):
                    pick, options = i, opts
                    if len(opts) <= 1:
                        break
            for j in options:
                yield from rec(chosen + (j,), covered | self.masks[j], banned)
                banned |= 1 << j
        yield from rec((), 0, 0)

    def min_size(self) -> int:
        for k in range(0, len(self.links) + 1):
            if next(self.covers(k), None) is not None:
                return k
        raise InstanceError("infeasible instance: the links do not cover the tree")


def exact_opt(inst: TapInstance, cap: int = WITNESS_CAP, max_links: int = MAX_LINKS) -> OracleResult:
    """Minimum number of links covering the tree, with up to ``cap`` optimal witnesses."""
    if len(inst.links) > max_links:
        raise InstanceError(f"{len(inst.links)} links exceeds the oracle cap {max_links}")
    search = _CoverSearch(inst)
    k = search.min_size()
    witnesses = []
    truncated = False
    for combo in search.covers(k):
        if len(witnesses) >= cap:
            truncated = True
            break
        witnesses.append(frozenset(search.links[j] for j in combo))
    return OracleResult(k, witnesses, {"search_nodes": search.nodes}, truncated)


def exact_leaf_cover_opt(inst: TapInstance, cfg: LeafWeightConfig = LeafWeightConfig()
                         ) -> tuple[Fraction, frozenset[Link]]:
    """Minimum w-weight exact cover of the leaves by full enumeration."""
    leaves = sorted(inst.leaves)
    incident = {v: [e for e in inst.sorted_links() if v in e] for v in leaves}
    for v in leaves:
        if not incident[v]:
            raise InstanceError(f"leaf {v} has no incident link")
    weight = {e: link_weight(cfg, inst, e) for v in leaves for e in incident[v]}
    best: list = [None, None]

    def rec(i: int, covered: frozenset[int], chosen: tuple[Link, ...], total: Fraction) -> None:
        while i < len(leaves) and leaves[i] in covered:
            i += 1
        if i == len(leaves):
            key = (total, sorted(chosen))
            if best[0] is None or key < best[0]:
                best[0], best[1] = key, frozenset(chosen)
            return
        v = leaves[i]
        for e in incident[v]:
            other = e[0] if e[1] == v else e[1]
            if other in covered:
                continue
            gained = {v, other} & inst.leaves
            rec(i + 1, covered | gained, chosen + (e,), total + weight[e])

    rec(0, frozenset(), (), Fraction(0))
    if best[0] is None:
        raise InstanceError("no exact leaf cover exists")
    return best[0][0], best[1]


def shadow_minimalize(inst: TapInstance, links: frozenset[Link]) -> frozenset[Link]:
    """Replace links by proper shadows while the set still covers the tree."""
    tree_edges = set(inst.tree.edges())
    current = set(links)
    changed = True
    while changed:
        changed = False
        for link in sorted(current):
            path = inst.tree.path_nodes(*link)
            shadows = sorted({(min(path[i], path[j]), max(path[i], path[j]))
                              for i in range(len(path)) for j in range(i + 1, len(path))} - {link})
            for s in shadows:
                if s not in inst.links:
                    continue
                trial = (current - {link}) | {s}
                cov = set()
                for l in trial:
                    cov |= path_edges(inst, *l)
                if cov == tree_edges:
                    current = trial
                    changed = True
                    break
            if changed:
                break
    return frozenset(current)


def is_shadow_minimal(inst: TapInstance, links: frozenset[Link]) -> bool:
    return shadow_minimalize(inst, links) == frozenset(links)


def shadow_minimal_twin_max(inst: TapInstance, max_links: int = MAX_LINKS) -> frozenset[Link]:
    """An optimal shadow-minimal cover of the closed instance with the most twin links.

    Every optimal cover is streamed (no witness cap applies here), so the
    selection is exact even when exact_opt would truncate its witness list.
    """
    closed = shadow_completion(inst)
    if len(closed.links) > max_links:
        raise InstanceError(f"{len(closed.links)} closed links exceeds the oracle cap {max_links}")
    search = _CoverSearch(closed)
    k = search.min_size()
    twins = closed.twins
    best_key, best = None, None
    for combo in search.covers(k):
        cover = frozenset(search.links[j] for j in combo)
        if not is_shadow_minimal(closed, cover):
            continue
        key = (-len(cover & twins), sorted(cover))
        if best_key is None or key < best_key:
            best_key, best = key, cover
    assert best is not None
    return best
