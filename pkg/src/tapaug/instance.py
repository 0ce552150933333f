"""Tree augmentation instances: rooted tree, links, shadow closure, twins and stems."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional

Link = tuple[int, int]
Edge = tuple[int, int]  # (child, parent)


class InstanceError(ValueError):
    """Raised for malformed or infeasible instances."""


def canon(u: int, v: int) -> Link:
    if u == v:
        raise InstanceError(f"self-loop link {u} {v}")
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class RootedTree:
    root: int
    parent: tuple[Optional[int], ...]
    children: tuple[tuple[int, ...], ...]
    depth: tuple[int, ...]

    @classmethod
    def from_edges(cls, n: int, root: int, edges: Iterable[tuple[int, int]]) -> "RootedTree":
        adj: list[list[int]] = [[] for _ in range(n)]
        count = 0
        for u, v in edges:
            adj[u].append(v)
            adj[v].append(u)
            count += 1
        if count != n - 1:
            raise InstanceError(f"not a tree: {count} edges for {n} nodes")
        parent: list[Optional[int]] = [None] * n
        depth = [-1] * n
        depth[root] = 0
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if depth[v] < 0:
                    depth[v] = depth[u] + 1
                    parent[v] = u
                    queue.append(v)
        if min(depth) < 0:
            raise InstanceError("not a tree: edges do not span all nodes")
        children: list[list[int]] = [[] for _ in range(n)]
        for v, p in enumerate(parent):
            if p is not None:
                children[p].append(v)
        return cls(root, tuple(parent), tuple(tuple(sorted(c)) for c in children), tuple(depth))

    @property
    def n(self) -> int:
        return len(self.parent)

    def edges(self) -> list[Edge]:
        """Tree edges as (child, parent) pairs, ordered by child id."""
        return [(v, p) for v, p in enumerate(self.parent) if p is not None]

    def is_leaf(self, v: int) -> bool:
        return v != self.root and not self.children[v]

    def leaves(self) -> frozenset[int]:
        return frozenset(v for v in range(self.n) if self.is_leaf(v))

    def path_nodes(self, u: int, v: int) -> list[int]:
        """Nodes of the tree path from u to v, in order."""
        left, right = [u], [v]
        while left[-1] != right[-1]:
            a, b = left[-1], right[-1]
            if self.depth[a] >= self.depth[b]:
                left.append(self.parent[a])
            else:
                right.append(self.parent[b])
        right.pop()
        return left + right[::-1]

    def lca(self, u: int, v: int) -> int:
        path = self.path_nodes(u, v)
        return min(path, key=lambda x: self.depth[x])

    def subtree(self, v: int) -> set[int]:
        out, stack = set(), [v]
        while stack:
            u = stack.pop()
            out.add(u)
            stack.extend(self.children[u])
        return out


@dataclass(frozen=True)
class TapInstance:
    tree: RootedTree
    links: frozenset[Link]
    origin: dict[Link, Link] = field(default_factory=dict, compare=False)
    closed: bool = False

    @property
    def n(self) -> int:
        return self.tree.n

    @cached_property
    def leaves(self) -> frozenset[int]:
        return self.tree.leaves()

    def sorted_links(self) -> list[Link]:
        return sorted(self.links)

    def origin_of(self, link: Link) -> Link:
        return self.origin.get(link, link)

    @cached_property
    def twins(self) -> frozenset[Link]:
        return frozenset(compute_twins_and_stems(self)[0])

    @cached_property
    def stem_of(self) -> dict[Link, int]:
        return compute_twins_and_stems(self)[1]

    @cached_property
    def stems(self) -> frozenset[int]:
        return frozenset(self.stem_of.values())

    @cached_property
    def regular_nodes(self) -> frozenset[int]:
        """Nodes that are neither leaves nor stems."""
        return frozenset(range(self.n)) - self.leaves - self.stems

    def incident(self, v: int) -> list[Link]:
        return [l for l in self.sorted_links() if v in l]


def path_edges(inst: TapInstance, u: int, v: int) -> set[Edge]:
    """Tree edges on the path between u and v, each as (child, parent)."""
    tree = inst.tree
    out = set()
    for a, b in zip(tree.path_nodes(u, v), tree.path_nodes(u, v)[1:]):
        out.add((a, b) if tree.parent[a] == b else (b, a))
    return out


def parse_instance(text: str) -> TapInstance:
    lines = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append((lineno, line.split()))

    def expect(idx: int, key: str, nargs: int) -> list[int]:
        if idx >= len(lines):
            raise InstanceError(f"missing '{key}' line")
        lineno, toks = lines[idx]
        if toks[0] != key or len(toks) != nargs + 1:
            raise InstanceError(f"line {lineno}: expected '{key}' with {nargs} argument(s)")
        try:
            return [int(t) for t in toks[1:]]
        except ValueError:
            raise InstanceError(f"line {lineno}: non-integer argument") from None

    if expect(0, "tap", 1) != [1]:
        raise InstanceError("unsupported format version")
    (n,) = expect(1, "nodes", 1)
    if n < 2:
        raise InstanceError("need at least 2 nodes")
    (root,) = expect(2, "root", 1)
    edges: set[Link] = set()
    links: set[Link] = set()
    for lineno, toks in lines[3:]:
        if toks[0] not in ("edge", "link") or len(toks) != 3:
            raise InstanceError(f"line {lineno}: malformed line {' '.join(toks)!r}")
        try:
            u, v = int(toks[1]), int(toks[2])
        except ValueError:
            raise InstanceError(f"line {lineno}: non-integer node id") from None
        if not (0 <= u < n and 0 <= v < n):
            raise InstanceError(f"line {lineno}: node id out of range")
        if u == v:
            raise InstanceError(f"line {lineno}: self-loop")
        target = edges if toks[0] == "edge" else links
        key = canon(u, v)
        if key in target:
            raise InstanceError(f"line {lineno}: duplicate {toks[0]} {u} {v}")
        target.add(key)
    if not 0 <= root < n:
        raise InstanceError("root out of range")
    tree = RootedTree.from_edges(n, root, edges)
    return TapInstance(tree, frozenset(links))


def format_instance(inst: TapInstance, original_only: bool = False) -> str:
    tree = inst.tree
    out = ["tap 1", f"nodes {tree.n}", f"root {tree.root}"]
    out += [f"edge {min(e)} {max(e)}" for e in sorted(canon(*e) for e in tree.edges())]
    links = inst.sorted_links()
    if original_only:
        links = sorted({inst.origin_of(l) for l in links})
    out += [f"link {u} {v}" for u, v in links]
    return "\n".join(out) + "\n"


def make_instance(n: int, root: int, edges: Iterable[tuple[int, int]],
                  links: Iterable[tuple[int, int]]) -> TapInstance:
    tree = RootedTree.from_edges(n, root, edges)
    return TapInstance(tree, frozenset(canon(u, v) for u, v in links))


def shadow_completion(inst: TapInstance) -> TapInstance:
    """Add every shadow of every link; each shadow remembers the smallest link it came from."""
    if inst.closed:
        return inst
    tree = inst.tree
    origin: dict[Link, Link] = {}
    for link in inst.sorted_links():
        src = inst.origin_of(link)
        path = tree.path_nodes(*link)
        for i in range(len(path)):
            for j in range(i + 1, len(path)):
                key = canon(path[i], path[j])
                if key in inst.links:
                    origin.setdefault(key, inst.origin_of(key))
                elif key not in origin or src < origin[key]:
                    origin[key] = src
    return TapInstance(tree, frozenset(origin), origin, closed=True)


def new_leaf_after_contracting(tree: RootedTree, path: list[int]) -> bool:
    """True if merging the path's nodes into one node yields a leaf."""
    nodes = set(path)
    if tree.root in nodes:
        return False
    boundary = sum(1 for v in nodes for c in tree.children[v] if c not in nodes)
    boundary += 1  # the edge to the parent of the topmost node
    return boundary == 1


def compute_twins_and_stems(inst: TapInstance) -> tuple[set[Link], dict[Link, int]]:
    tree = inst.tree
    leaves = tree.leaves()
    twins: set[Link] = set()
    stem_of: dict[Link, int] = {}
    for a, b in inst.links:
        if a in leaves and b in leaves:
            path = tree.path_nodes(a, b)
            if new_leaf_after_contracting(tree, path):
                twins.add((a, b))
                stem_of[(a, b)] = tree.lca(a, b)
    return twins, stem_of


def covered_edges(inst: TapInstance, links: Iterable[Link]) -> set[Edge]:
    out: set[Edge] = set()
    for u, v in links:
        out |= path_edges(inst, u, v)
    return out


def uncovered_edges(inst: TapInstance) -> list[Edge]:
    covered = covered_edges(inst, inst.links)
    return [e for e in inst.tree.edges() if e not in covered]


def is_feasible(inst: TapInstance) -> bool:
    return not uncovered_edges(inst)


def require_feasible(inst: TapInstance) -> None:
    missing = uncovered_edges(inst)
    if missing:
        listed = ", ".join(f"({c},{p})" for c, p in missing)
        raise InstanceError(f"infeasible instance; uncovered tree edges: {listed}")


def validate_solution(inst: TapInstance, links: Iterable[Link]) -> bool:
    links = [canon(*l) for l in links]
    for l in links:
        if l not in inst.links:
            raise InstanceError(f"link {l} is not in the instance")
    return covered_edges(inst, links) == set(inst.tree.edges())


def map_to_original(inst: TapInstance, links: Iterable[Link]) -> set[Link]:
    return {inst.origin_of(canon(*l)) for l in links}
