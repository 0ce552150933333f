from __future__ import annotations

from collections import deque

import pytest

from tapaug.instance import TapInstance, parse_instance, shadow_completion

FIXTURE_1 = """tap 1
nodes 2
root 0
edge 0 1
link 0 1
"""

FIXTURE_2 = """tap 1
nodes 4
root 0
edge 0 1
edge 1 2
edge 1 3
link 2 3
link 0 2
"""

FIXTURE_3 = """tap 1
# path 0-1-2-3 with a single long link
nodes 4
root 0
edge 0 1
edge 1 2
edge 2 3
link 0 3
"""

# Dangerous-tree shape: compound leaf a = {2,3,6}, matched pair 4-5, link 3-4,
# and 5 reaching outside through 0-5.
DANGEROUS_ONE = """tap 1
nodes 7
root 0
edge 0 1
edge 1 2
edge 1 4
edge 1 5
edge 2 3
edge 2 6
link 0 5
link 1 3
link 3 4
link 3 6
link 4 5
"""

# Two disjoint copies of the gadget above hanging from the root.
DANGEROUS_TWO = """tap 1
nodes 13
root 0
edge 0 1
edge 1 2
edge 1 4
edge 1 5
edge 2 3
edge 2 6
edge 0 7
edge 7 8
edge 7 11
edge 7 12
edge 8 9
edge 8 10
link 0 5
link 1 3
link 3 4
link 3 6
link 4 5
link 0 12
link 7 9
link 9 11
link 9 10
link 11 12
"""


@pytest.fixture
def fx1() -> TapInstance:
    return parse_instance(FIXTURE_1)


@pytest.fixture
def fx2() -> TapInstance:
    return parse_instance(FIXTURE_2)


@pytest.fixture
def fx3() -> TapInstance:
    return parse_instance(FIXTURE_3)


@pytest.fixture
def closed2(fx2) -> TapInstance:
    return shadow_completion(fx2)


def two_edge_connected(inst: TapInstance, links) -> bool:
    """Independent check: no tree edge is a bridge of the multigraph T + links."""
    edges = [("t", c, p) for c, p in inst.tree.edges()] + [("l", u, v) for u, v in links]
    n = inst.n
    for skip in range(inst.n - 1):
        adj = [[] for _ in range(n)]
        for k, (_, u, v) in enumerate(edges):
            if k != skip:
                adj[u].append(v)
                adj[v].append(u)
        seen = {0}
        queue = deque([0])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        if len(seen) != n:
            return False
    return True
