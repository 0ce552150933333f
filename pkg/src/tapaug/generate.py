"""Deterministic random instance generator."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .instance import TapInstance, canon, covered_edges, make_instance

MODES = ("random-tree", "caterpillar", "star-of-paths")


@dataclass(frozen=True)
class GenSpec:
    n: int
    link_density: Fraction = Fraction(1, 4)
    seed: int = 0
    mode: str = "random-tree"

    def __post_init__(self) -> None:
        object.__setattr__(self, "link_density", Fraction(self.link_density))
        if self.n < 2:
            raise ValueError("need n >= 2")
        if not 0 < self.link_density <= 1:
            raise ValueError("link density must lie in (0, 1]")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")


def _tree_parents(spec: GenSpec, rng: random.Random) -> list[int]:
    n = spec.n
    if spec.mode == "random-tree":
        return [rng.randrange(v) for v in range(1, n)]
    if spec.mode == "caterpillar":
        spine = max(1, (n + 1) // 2)
        parents = list(range(spine - 1))  # node v+1 hangs under v along the spine
        parents += [rng.randrange(spine) for _ in range(spine, n)]
        return parents
    # star-of-paths: node 0 is the hub; each new node starts a path or extends one
    parents, tips = [], []
    for v in range(1, n):
        if not tips or rng.random() < 0.4:
            parents.append(0)
            tips.append(v)
        else:
            k = rng.randrange(len(tips))
            parents.append(tips[k])
            tips[k] = v
    return parents


def generate(spec: GenSpec) -> TapInstance:
    """Random feasible instance; uncovered edges are patched with extra links."""
    rng = random.Random(spec.seed)
    parents = _tree_parents(spec, rng)
    edges = [(v, p) for v, p in zip(range(1, spec.n), parents)]
    tree_pairs = {canon(*e) for e in edges}
    links = set()
    for u in range(spec.n):
        for v in range(u + 1, spec.n):
            if (u, v) not in tree_pairs and rng.random() < spec.link_density:
                links.add((u, v))
    inst = make_instance(spec.n, 0, edges, links)
    tree = inst.tree
    covered = covered_edges(inst, links)
    for child, parent in sorted(tree.edges(), key=lambda e: -tree.depth[e[0]]):
        if (child, parent) in covered:
            continue
        below = sorted(v for v in tree.subtree(child) if tree.is_leaf(v))
        low = rng.choice(below)
        grand = tree.parent[parent]
        high = parent if grand is None else grand
        link = canon(low, high)
        links.add(link)
        covered |= covered_edges(inst, [link])
    return make_instance(spec.n, 0, edges, links)
