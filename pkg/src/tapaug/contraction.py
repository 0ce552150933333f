"""The contraction algorithm: greedy contractions, semi-closed trees, dangerous trees.

The working tree T/I is represented by a partition of the original nodes into
super-nodes. Every super-node is a connected piece of the original tree and is
identified by its topmost original node, so parents and depths in T/I are
read straight off the original tree.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from .instance import InstanceError, Link, TapInstance, map_to_original, require_feasible, \
    shadow_completion, validate_solution
from .leafcover import DEFAULT_RHO, ExactLeafCover, LeafWeightConfig, min_weight_exact_cover

log = logging.getLogger(__name__)

GREEDY = "greedy"
SEMI_CLOSED = "semi-closed"
FIND_TREE = "find-tree"

HALF = Fraction(1, 2)


class InvariantViolation(AssertionError):
    """An algorithm invariant failed at runtime."""


@dataclass(frozen=True)
class SubtreeSummary:
    root: int
    nodes: frozenset[int]
    M_prime: frozenset[Link]
    U_prime: frozenset[int]
    U_prime_0: frozenset[int]
    L_prime: frozenset[int]
    S_prime: frozenset[int]
    R_prime: frozenset[int]
    C_prime: frozenset[int]
    twins_in_M: int = 0
    sigma: Optional[Fraction] = None

    def base_tokens(self, rho: Fraction) -> Fraction:
        """Tokens owned by the tree, leaving out the LP-dependent half-degree terms."""
        return (rho * len(self.M_prime) + HALF * self.twins_in_M + len(self.U_prime)
                + (rho - Fraction(3, 2)) * len(self.U_prime_0) + len(self.C_prime))


@dataclass
class ContractionRecord:
    kind: str
    summary: SubtreeSummary
    links: list[Link]
    members: dict[int, frozenset[int]]
    tokens: Fraction  # base tokens, no LP terms


@dataclass
class SolveTrace:
    rho: Fraction
    records: list[ContractionRecord] = field(default_factory=list)

    def partial_solution(self) -> list[Link]:
        return [l for r in self.records for l in r.links]


@dataclass(frozen=True)
class DangerCertificate:
    a: int
    b: int
    b_prime: int
    link: Link  # a live link joining a and b_prime


class ContractionState:
    def __init__(self, inst: TapInstance, cover: ExactLeafCover, rho: Fraction = DEFAULT_RHO):
        if not inst.closed:
            raise InstanceError("instance must be shadow-closed")
        self.inst = inst
        self.tree = inst.tree
        self.rho = Fraction(rho)
        self.comp = list(range(inst.n))
        self.members: dict[int, frozenset[int]] = {v: frozenset([v]) for v in range(inst.n)}
        self.contracted: set[int] = set()
        self.matching: set[Link] = set(cover.matching_part)
        self.partial: list[Link] = []
        self.trace = SolveTrace(self.rho)
        self._live: Optional[list[tuple[Link, int, int]]] = None
        self._children: Optional[dict[int, list[int]]] = None

    # --- structure of T/I -------------------------------------------------

    @property
    def root(self) -> int:
        return self.comp[self.tree.root]

    def super_nodes(self) -> list[int]:
        return sorted(self.members)

    def is_compound(self, x: int) -> bool:
        return x in self.contracted or x == self.root

    def parent(self, x: int) -> Optional[int]:
        p = self.tree.parent[x]
        return None if p is None else self.comp[p]

    def children(self, x: int) -> list[int]:
        if self._children is None:
            kids: dict[int, list[int]] = {v: [] for v in self.members}
            for v in self.members:
                p = self.parent(v)
                if p is not None:
                    kids[p].append(v)
            self._children = kids
        return self._children[x]

    def depth(self, x: int) -> int:
        d = 0
        while (x := self.parent(x)) is not None:
            d += 1
        return d

    def is_leaf(self, x: int) -> bool:
        return x != self.root and not self.children(x)

    def leaves(self) -> list[int]:
        return [v for v in self.super_nodes() if self.is_leaf(v)]

    def subtree(self, x: int) -> frozenset[int]:
        out, stack = set(), [x]
        while stack:
            v = stack.pop()
            out.add(v)
            stack.extend(self.children(v))
        return frozenset(out)

    def path(self, x: int, y: int) -> list[int]:
        left, right = [x], [y]
        dl, dr = self.depth(x), self.depth(y)
        while left[-1] != right[-1]:
            if dl >= dr:
                left.append(self.parent(left[-1]))
                dl -= 1
            else:
                right.append(self.parent(right[-1]))
                dr -= 1
        right.pop()
        return left + right[::-1]

    def path_edges(self, x: int, y: int) -> set[int]:
        """T/I edges on the path, each named by its lower super-node."""
        nodes = self.path(x, y)
        top = min(nodes, key=self.depth)
        return {v for v in nodes if v != top}

    def live_links(self) -> list[tuple[Link, int, int]]:
        if self._live is None:
            out = []
            for link in self.inst.sorted_links():
                a, b = self.comp[link[0]], self.comp[link[1]]
                if a != b:
                    out.append((link, a, b))
            self._live = out
        return self._live

    def links_at(self, x: int) -> list[tuple[Link, int]]:
        """Live links at super-node x with their other super-node endpoint."""
        out = []
        for link, a, b in self.live_links():
            if a == x:
                out.append((link, b))
            elif b == x:
                out.append((link, a))
        return out

    def up_link(self, a: int) -> tuple[Link, int]:
        """The live link from a reaching closest to the root, with its up-node."""
        options = self.links_at(a)
        if not options:
            raise InstanceError(f"super-node {a} has no incident live link")
        link, node = min(options, key=lambda lo: (self.depth(lo[1]), lo[0]))
        if a not in self.subtree(node):
            raise InvariantViolation(f"up-node {node} of {a} is not an ancestor")
        return link, node

    def matched_nodes(self, matching: Iterable[Link]) -> set[int]:
        return {self.comp[v] for link in matching for v in link}

    def creates_new_leaf(self, x: int, y: int) -> bool:
        nodes = set(self.path(x, y))
        if self.root in nodes:
            return False
        boundary = 0
        for v in nodes:
            boundary += sum(1 for c in self.children(v) if c not in nodes)
            if self.parent(v) not in nodes:
                boundary += 1
        return boundary == 1

    # --- summaries ----------------------------------------------------------

    def summarize(self, nodes: frozenset[int], root: int, matching: Iterable[Link],
                  leaves: Optional[Iterable[int]] = None) -> SubtreeSummary:
        matching = list(matching)
        if leaves is None:
            leaves = [v for v in nodes if self.is_leaf(v)]
        leaves = frozenset(leaves)
        m_prime = frozenset(l for l in matching
                            if self.comp[l[0]] in nodes and self.comp[l[1]] in nodes)
        matched = self.matched_nodes(matching)
        unmatched = frozenset(v for v in leaves if v not in matched)
        originals = frozenset(v for v in nodes if v not in self.contracted)
        stems = frozenset(v for v in originals if v in self.inst.stems and v not in leaves)
        return SubtreeSummary(
            root=root,
            nodes=nodes,
            M_prime=m_prime,
            U_prime=unmatched,
            U_prime_0=unmatched & originals,
            L_prime=leaves,
            S_prime=stems,
            R_prime=frozenset(v for v in originals if v not in leaves and v not in stems),
            C_prime=frozenset(v for v in nodes if self.is_compound(v) and v not in leaves),
            twins_in_M=sum(1 for l in m_prime if l in self.inst.twins),
        )

    def is_semi_closed(self, x: int, matching: Optional[Iterable[Link]] = None
                       ) -> tuple[bool, SubtreeSummary]:
        matching = list(self.matching if matching is None else matching)
        nodes = self.subtree(x)
        summary = self.summarize(nodes, x, matching)
        for link in matching:
            inside = (self.comp[link[0]] in nodes) + (self.comp[link[1]] in nodes)
            if inside == 1:
                return False, summary
        for u in summary.U_prime:
            if any(other not in nodes for _, other in self.links_at(u)):
                return False, summary
        return True, summary

    def minimally_semi_closed(self, matching: Optional[Iterable[Link]] = None
                              ) -> list[SubtreeSummary]:
        matching = list(self.matching if matching is None else matching)
        semi = {}
        for x in self.super_nodes():
            ok, summary = self.is_semi_closed(x, matching)
            if ok:
                semi[x] = summary
        minimal = [s for x, s in semi.items()
                   if not any(y != x and y in s.nodes for y in semi)]
        return sorted(minimal, key=self._preference)

    def _preference(self, summary: SubtreeSummary) -> tuple[int, int]:
        return (-self.depth(summary.root), summary.root)

    # --- dangerous trees ----------------------------------------------------

    def is_dangerous(self, summary: SubtreeSummary) -> Optional[DangerCertificate]:
        s = summary
        if s.C_prime or s.S_prime or s.U_prime_0 or len(s.M_prime) != 1 or len(s.L_prime) != 3:
            return None
        if len(s.U_prime) != 1:
            return None
        (a,) = s.U_prime
        (pair,) = s.M_prime
        x, y = sorted(self.comp[v] for v in pair)
        found = []
        for b, b2 in ((x, y), (y, x)):
            joining = sorted(l for l, other in self.links_at(a) if other == b2)
            if not joining or self.creates_new_leaf(a, b2):
                continue
            if all(other in s.nodes for _, other in self.links_at(b)):
                continue  # closed at b
            found.append(DangerCertificate(a, b, b2, joining[0]))
        if not found:
            return None
        if len(found) == 2:
            up_x, up_y = self.up_link(found[0].b)[1], self.up_link(found[1].b)[1]
            if up_x in self.subtree(up_y) and up_x != up_y:
                return found[1]  # up-node of y is a proper ancestor
        return found[0]

    # --- contractions -------------------------------------------------------

    def _merge(self, nodes: Iterable[int]) -> int:
        nodes = set(nodes)
        top = min(nodes, key=lambda v: (self.depth(v), v))
        merged = frozenset().union(*(self.members[v] for v in nodes))
        for v in nodes:
            del self.members[v]
            self.contracted.discard(v)
        for v in merged:
            self.comp[v] = top
        self.members[top] = merged
        self.contracted.add(top)
        self._live = None
        self._children = None
        return top

    def _check_matching(self) -> None:
        for link in self.matching:
            for v in link:
                if self.comp[v] != v or v in self.contracted or not self.is_leaf(v):
                    raise InvariantViolation(f"matched endpoint {v} of {link} is not an original leaf")

    def _record(self, kind: str, summary: SubtreeSummary, links: list[Link]) -> None:
        members = {v: self.members[v] for v in summary.nodes}
        self.trace.records.append(
            ContractionRecord(kind, summary, list(links), members, summary.base_tokens(self.rho)))

    def greedy_contract_exhaust(self) -> int:
        count = 0
        while True:
            unmatched = set(self.leaves()) - self.matched_nodes(self.matching)
            pick = next(((l, a, b) for l, a, b in self.live_links()
                         if a in unmatched and b in unmatched), None)
            if pick is None:
                return count
            link, a, b = pick
            nodes = frozenset(self.path(a, b))
            top = min(nodes, key=self.depth)
            summary = self.summarize(nodes, top, self.matching, leaves=(a, b))
            self._record(GREEDY, summary, [link])
            self.partial.append(link)
            self._merge(nodes)
            self._check_matching()
            count += 1

    def cover_of(self, summary: SubtreeSummary, matching: Iterable[Link]) -> list[Link]:
        """M'(T') plus the up-links of the unmatched leaves of T'."""
        links = [l for l in sorted(matching)
                 if self.comp[l[0]] in summary.nodes and self.comp[l[1]] in summary.nodes]
        links += [self.up_link(u)[0] for u in sorted(summary.U_prime)]
        return links

    def check_cover(self, summary: SubtreeSummary, links: Iterable[Link]) -> None:
        want = {v for v in summary.nodes if v != summary.root}
        got: set[int] = set()
        for link in links:
            a, b = self.comp[link[0]], self.comp[link[1]]
            if a not in summary.nodes or b not in summary.nodes:
                raise InvariantViolation(f"cover link {link} leaves the subtree at {summary.root}")
            got |= self.path_edges(a, b)
        if got != want:
            raise InvariantViolation(
                f"links {sorted(links)} miss edges below {sorted(want - got)} of subtree {summary.root}")

    def contract_subtree(self, summary: SubtreeSummary, links: list[Link],
                         kind: str = SEMI_CLOSED) -> int:
        self.check_cover(summary, links)
        self._record(kind, summary, links)
        self.partial.extend(links)
        self.matching -= {l for l in self.matching
                          if self.comp[l[0]] in summary.nodes and self.comp[l[1]] in summary.nodes}
        new = self._merge(summary.nodes)
        for l in self.matching:
            if (self.comp[l[0]] == new) != (self.comp[l[1]] == new):
                raise InvariantViolation(f"matching link {l} split by contraction")
        self._check_matching()
        return new

    def find_tree(self) -> tuple[SubtreeSummary, list[Link], SubtreeSummary]:
        """Rewrite every dangerous tree's pair and return a tree that is safe to contract.

        Returns the tree summarized w.r.t. the rewritten matching, the cover
        built from the rewritten matching, and the same tree summarized
        w.r.t. the current matching (the one the token ledger uses).
        """
        rewritten = set(self.matching)
        certs = []
        for s in self.minimally_semi_closed():
            cert = self.is_dangerous(s)
            if cert is None:
                raise InvariantViolation(f"minimally semi-closed tree at {s.root} is not dangerous")
            (pair,) = s.M_prime
            rewritten.discard(pair)
            rewritten.add(cert.link)
            certs.append(cert)
        candidates = self.minimally_semi_closed(rewritten)
        if not candidates:
            raise InvariantViolation("no semi-closed tree for the rewritten matching")
        tilde = candidates[0]
        cover = self.cover_of(tilde, rewritten)
        ok, plain = self.is_semi_closed(tilde.root)
        if not ok:
            raise InvariantViolation(f"tree at {tilde.root} is not semi-closed for the matching")
        if self.is_dangerous(plain) is not None:
            raise InvariantViolation(f"find-tree returned a dangerous tree at {tilde.root}")
        if len(cover) != len(plain.M_prime) + len(plain.U_prime):
            raise InvariantViolation("find-tree cover size differs from |M'|+|U'|")
        for cert in certs:
            inside = {cert.a in tilde.nodes, cert.b in tilde.nodes, cert.b_prime in tilde.nodes}
            if len(inside) != 1:
                raise InvariantViolation("dangerous tree split by the find-tree result")
        return tilde, cover, plain

    def step(self) -> None:
        """One pass of the main loop after greedy contractions are exhausted."""
        minimal = self.minimally_semi_closed()
        safe = [s for s in minimal if self.is_dangerous(s) is None]
        if safe:
            chosen = safe[0]
            self.contract_subtree(chosen, self.cover_of(chosen, self.matching), SEMI_CLOSED)
        else:
            _, cover, plain = self.find_tree()
            self.contract_subtree(plain, cover, FIND_TREE)

    def to_dot(self) -> str:
        lines = ["graph TI {"]
        matched = self.matched_nodes(self.matching)
        for v in self.super_nodes():
            label = ",".join(map(str, sorted(self.members[v])))
            shape = "box" if self.is_compound(v) else "ellipse"
            style = ', style="bold"' if v in matched else ""
            lines.append(f'  n{v} [label="{label}", shape={shape}{style}];')
        for v in self.super_nodes():
            p = self.parent(v)
            if p is not None:
                lines.append(f"  n{p} -- n{v};")
        for link in sorted(self.matching):
            a, b = (self.comp[x] for x in link)
            lines.append(f"  n{a} -- n{b} [style=dashed];")
        lines.append("}")
        return "\n".join(lines) + "\n"


def init_state(inst: TapInstance, cover: ExactLeafCover, rho: Fraction = DEFAULT_RHO
               ) -> ContractionState:
    return ContractionState(inst, cover, rho)


@dataclass
class SolveResult:
    solution: set[Link]
    partial: list[Link]
    trace: SolveTrace
    cover: ExactLeafCover
    instance: TapInstance


def solve(inst: TapInstance, rho: Fraction = DEFAULT_RHO, snapshot=None) -> SolveResult:
    """Run the contraction algorithm and return the solution in original links.

    ``snapshot``, if given, is called with the state before every loop pass.
    """
    closed = shadow_completion(inst)
    require_feasible(closed)
    cover = min_weight_exact_cover(LeafWeightConfig(rho), closed)
    state = init_state(closed, cover, rho)
    rounds = 0
    while True:
        if snapshot is not None:
            snapshot(state)
        before = len(state.members)
        state.greedy_contract_exhaust()
        if len(state.members) == 1:
            break
        state.step()
        if len(state.members) >= before:
            raise InvariantViolation("no progress in main loop")
        rounds += 1
        if len(state.members) == 1:
            break
    if snapshot is not None:
        snapshot(state)
    log.debug("solved with %d links in %d rounds", len(state.partial), rounds)
    if not validate_solution(closed, state.partial):
        raise InvariantViolation("partial solution does not cover the tree")
    solution = map_to_original(closed, state.partial)
    if not validate_solution(closed, solution):
        raise InvariantViolation("mapped solution does not cover the tree")
    return SolveResult(solution, list(state.partial), state.trace, cover, closed)


def _frac(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def trace_to_jsonl(trace: SolveTrace, inst: TapInstance) -> str:
    """One JSON object per contraction; rationals are written as "p/q" strings."""
    import json

    lines = []
    for i, rec in enumerate(trace.records):
        s = rec.summary
        lines.append(json.dumps({
            "step": i,
            "kind": rec.kind,
            "root": s.root,
            "nodes": {str(v): sorted(rec.members[v]) for v in sorted(s.nodes)},
            "links": [list(l) for l in rec.links],
            "original_links": [list(inst.origin_of(l)) for l in rec.links],
            "M_prime": sorted(list(l) for l in s.M_prime),
            "U_prime": sorted(s.U_prime),
            "U_prime_0": sorted(s.U_prime_0),
            "C_prime": sorted(s.C_prime),
            "R_prime": sorted(s.R_prime),
            "tokens_without_lp": _frac(rec.tokens),
            "needed": _frac(Fraction(len(rec.links) + 1)),
        }, sort_keys=True))
    return "\n".join(lines) + ("\n" if lines else "")
