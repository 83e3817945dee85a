import heapq
import random
import time

import pytest

from treeact.trees import Tree
from treeact.tower import build_congruence_tower


def pruefer_tree(n: int, rng: random.Random) -> Tree:
    """Uniform random labelled tree on n vertices via a Pruefer sequence."""
    names = [f"v{i:02d}" for i in range(n)]
    if n == 1:
        return Tree((names[0],), ())
    if n == 2:
        return Tree(tuple(names), ((names[0], names[1]),))
    seq = [rng.randrange(n) for _ in range(n - 2)]
    deg = [1] * n
    for x in seq:
        deg[x] += 1
    leaves = [i for i in range(n) if deg[i] == 1]
    heapq.heapify(leaves)
    edges = []
    for x in seq:
        leaf = heapq.heappop(leaves)
        edges.append((names[leaf], names[x]))
        deg[x] -= 1
        if deg[x] == 1:
            heapq.heappush(leaves, x)
    u = heapq.heappop(leaves)
    v = heapq.heappop(leaves)
    edges.append((names[u], names[v]))
    return Tree(tuple(names), tuple(edges))


@pytest.fixture(scope="session")
def tower322():
    """The depth-2 mod-4 tower, built once and shared; returns (system, seconds)."""
    start = time.monotonic()
    sys_ = build_congruence_tower(3, 2, 2)
    return sys_, time.monotonic() - start
