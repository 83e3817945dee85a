"""Finite combinatorial trees and their automorphisms.

Vertices are opaque strings and all tie-breaking is lexicographic on the
identifier (after a primary distance key where one is stated).  Trees are
immutable after construction; construction itself is permissive so that
``validate_tree`` can report on malformed input instead of refusing it.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Iterable, Iterator, Mapping, Sequence


class TreeError(ValueError):
    """Raised when a tree operation's preconditions are violated."""


def _norm_edge(u: str, v: str) -> tuple[str, str]:
    return (u, v) if u <= v else (v, u)


def frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


@dataclass(eq=False)
class Tree:
    """A finite graph intended to be a tree, with an optional exact embedding.

    ``embedding`` maps vertices to rational coordinates in the plane or in
    3-space.  Nothing is validated at construction time: use
    ``validate_tree``.
    """

    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    embedding: dict[str, tuple[Fraction, ...]] | None = None

    def __post_init__(self) -> None:
        self.vertices = tuple(self.vertices)
        self.edges = tuple(sorted(_norm_edge(u, v) for u, v in self.edges))
        if self.embedding is not None:
            self.embedding = {
                v: tuple(Fraction(c) for c in coords)
                for v, coords in self.embedding.items()
            }
        self._adj: dict[str, tuple[str, ...]] | None = None

    @property
    def adjacency(self) -> dict[str, tuple[str, ...]]:
        if self._adj is None:
            nbrs: dict[str, list[str]] = {v: [] for v in self.vertices}
            for u, v in self.edges:
                if u in nbrs and v in nbrs and u != v:
                    nbrs[u].append(v)
                    nbrs[v].append(u)
            self._adj = {v: tuple(sorted(ws)) for v, ws in nbrs.items()}
        return self._adj

    def degree(self, v: str) -> int:
        if v not in self.adjacency:
            raise TreeError("vertex not in tree")
        return len(self.adjacency[v])

    def leaves(self) -> tuple[str, ...]:
        return tuple(v for v in sorted(self.vertices) if len(self.adjacency[v]) == 1)

    def __contains__(self, v: str) -> bool:
        return v in self.adjacency

    def __len__(self) -> int:
        return len(self.vertices)


@dataclass(frozen=True)
class ValidationResult:
    ok: bool
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def validate_tree(t: Tree) -> ValidationResult:
    """Check the tree invariants, naming the first violated one."""
    if not t.vertices:
        return ValidationResult(False, "no vertices")
    if len(set(t.vertices)) != len(t.vertices):
        return ValidationResult(False, "duplicate vertex")
    vset = set(t.vertices)
    seen = set()
    for u, v in t.edges:
        if u == v:
            return ValidationResult(False, "self-loop")
        if u not in vset or v not in vset:
            return ValidationResult(False, "edge references unknown vertex")
        if (u, v) in seen:
            return ValidationResult(False, "duplicate edge")
        seen.add((u, v))
    if len(t.edges) > len(t.vertices) - 1:
        return ValidationResult(False, "cycle")
    if len(t.edges) < len(t.vertices) - 1:
        return ValidationResult(False, "disconnected")
    # |E| = |V|-1 holds; connectivity now rules out a cycle+island split.
    root = t.vertices[0]
    reached = {root}
    queue = deque([root])
    while queue:
        x = queue.popleft()
        for y in t.adjacency[x]:
            if y not in reached:
                reached.add(y)
                queue.append(y)
    if len(reached) != len(t.vertices):
        return ValidationResult(False, "disconnected")
    if t.embedding is not None:
        if set(t.embedding) != vset:
            return ValidationResult(False, "embedding does not cover vertices")
        dims = {len(c) for c in t.embedding.values()}
        if not dims <= {2} and not dims <= {3}:
            return ValidationResult(False, "embedding dimension must be uniform 2 or 3")
        if len(set(t.embedding.values())) != len(t.vertices):
            return ValidationResult(False, "embedding not injective")
    return ValidationResult(True, None)


# A TreePath is the ordered vertex list of the unique simple path a -> b.
TreePath = list


def path(t: Tree, a: str, b: str) -> list[str]:
    """The unique simple path from a to b; ``path(t, a, a) == [a]``."""
    adj = t.adjacency
    if a not in adj or b not in adj:
        raise TreeError("vertex not in tree")
    if a == b:
        return [a]
    parent: dict[str, str] = {a: a}
    queue = deque([a])
    while queue:
        x = queue.popleft()
        if x == b:
            break
        for y in adj[x]:
            if y not in parent:
                parent[y] = x
                queue.append(y)
    if b not in parent:
        raise TreeError("vertices not connected")
    out = [b]
    while out[-1] != a:
        out.append(parent[out[-1]])
    out.reverse()
    return out


def distance(t: Tree, a: str, b: str) -> int:
    return len(path(t, a, b)) - 1


def _is_connected_subset(t: Tree, sub: frozenset[str]) -> bool:
    if not sub:
        return False
    start = next(iter(sub))
    reached = {start}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for y in t.adjacency[x]:
            if y in sub and y not in reached:
                reached.add(y)
                queue.append(y)
    return len(reached) == len(sub)


def first_point_map(t: Tree, sub: Iterable[str], x: str) -> str:
    """The unique entry point r(x) of the arc from x into the subtree.

    ``sub`` must induce a connected subtree; the path from x meets it
    exactly in the returned vertex, and r(x) = x for x already inside.
    """
    subset = frozenset(sub)
    if x not in t.adjacency:
        raise TreeError("vertex not in tree")
    if not subset <= set(t.vertices) or not _is_connected_subset(t, subset):
        raise TreeError("subtree required")
    if x in subset:
        return x
    target = min(subset)
    for v in path(t, x, target):
        if v in subset:
            return v
    raise TreeError("vertices not connected")


def point_order(t: Tree, x: str) -> int:
    """Number of connected components of the tree minus x (= its degree)."""
    if len(t.vertices) < 2:
        raise TreeError("order undefined on degenerate tree")
    return t.degree(x)


def convex_hull(t: Tree, s: Iterable[str]) -> frozenset[str]:
    """Union of all pairwise paths between members of s; induces a subtree."""
    pts = sorted(set(s))
    if not pts:
        raise TreeError("empty vertex set")
    hull: set[str] = set(pts)
    base = pts[0]
    for v in pts[1:]:
        hull.update(path(t, base, v))
    # Paths from one base vertex already span the minimal subtree, but the
    # contract is the union over all pairs; the two agree inside a tree.
    return frozenset(hull)


class TreeAutomorphism:
    """A bijection on the vertices of a fixed tree, applied as a left action."""

    __slots__ = ("_map", "_hash")

    def __init__(self, mapping: Mapping[str, str]):
        self._map = dict(mapping)
        self._hash: int | None = None

    def __call__(self, v: str) -> str:
        return self._map[v]

    def apply(self, v: str) -> str:
        return self._map[v]

    @property
    def mapping(self) -> dict[str, str]:
        return dict(self._map)

    def domain(self) -> frozenset[str]:
        return frozenset(self._map)

    def __mul__(self, other: "TreeAutomorphism") -> "TreeAutomorphism":
        # (g * h)(v) = g(h(v)); composition matches left actions.
        return TreeAutomorphism({v: self._map[w] for v, w in other._map.items()})

    def inverse(self) -> "TreeAutomorphism":
        return TreeAutomorphism({w: v for v, w in self._map.items()})

    def fixed_vertices(self) -> frozenset[str]:
        return frozenset(v for v, w in self._map.items() if v == w)

    def is_identity(self) -> bool:
        return all(v == w for v, w in self._map.items())

    def __eq__(self, other: object) -> bool:
        return isinstance(other, TreeAutomorphism) and self._map == other._map

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._map.items()))
        return self._hash

    def __repr__(self) -> str:
        moved = {v: w for v, w in sorted(self._map.items()) if v != w}
        return f"TreeAutomorphism({moved or 'id'})"

    @staticmethod
    def identity(vertices: Iterable[str]) -> "TreeAutomorphism":
        return TreeAutomorphism({v: v for v in vertices})


def is_tree_automorphism(t: Tree, a: TreeAutomorphism) -> ValidationResult:
    vset = set(t.vertices)
    if a.domain() != vset:
        return ValidationResult(False, "domain mismatch")
    if set(a.mapping.values()) != vset:
        return ValidationResult(False, "not a bijection")
    eset = set(t.edges)
    for u, v in t.edges:
        if _norm_edge(a(u), a(v)) not in eset:
            return ValidationResult(False, f"edge ({u},{v}) not preserved")
    return ValidationResult(True, None)


def _require_fixed_leaf(t: Tree, h: TreeAutomorphism, e: str) -> None:
    if len(t.vertices) < 2:
        raise TreeError("tree must have at least two vertices")
    if e not in t.adjacency:
        raise TreeError("vertex not in tree")
    if t.degree(e) != 1:
        raise TreeError("endpoint must be a leaf")
    if h(e) != e:
        raise TreeError("endpoint not fixed")


def second_fixed_point(t: Tree, h: TreeAutomorphism, e: str) -> str:
    """A fixed vertex of h other than the fixed leaf e.

    Always exists: an automorphism fixing a leaf fixes the tree centre (both
    endpoints, when the centre is an edge).  The witness is canonical:
    nearest to e, ties broken by identifier.
    """
    _require_fixed_leaf(t, h, e)
    ok = is_tree_automorphism(t, h)
    if not ok:
        raise TreeError(f"not an automorphism: {ok.reason}")
    dist = _distances_from(t, e)
    fixed = [v for v in t.vertices if v != e and h(v) == v]
    if not fixed:
        raise TreeError("no second fixed vertex; input is not an automorphism")
    return min(fixed, key=lambda v: (dist[v], v))


def common_fixed_point(t: Tree, gens: Sequence[TreeAutomorphism], z: str) -> str:
    """A vertex other than z fixed by every generator (all must fix leaf z)."""
    if len(t.vertices) < 2:
        raise TreeError("tree must have at least two vertices")
    if z not in t.adjacency or t.degree(z) != 1:
        raise TreeError("z must be a leaf")
    for h in gens:
        if h(z) != z:
            raise TreeError("generator moves the fixed endpoint")
        ok = is_tree_automorphism(t, h)
        if not ok:
            raise TreeError(f"not an automorphism: {ok.reason}")
    dist = _distances_from(t, z)
    common = [
        v for v in t.vertices if v != z and all(h(v) == v for h in gens)
    ]
    if not common:
        raise TreeError("no common fixed vertex; inputs are not automorphisms")
    return min(common, key=lambda v: (dist[v], v))


def _distances_from(t: Tree, root: str) -> dict[str, int]:
    dist = {root: 0}
    queue = deque([root])
    while queue:
        x = queue.popleft()
        for y in t.adjacency[x]:
            if y not in dist:
                dist[y] = dist[x] + 1
                queue.append(y)
    return dist


# -- automorphism enumeration (rooted at a fixed leaf) ------------------------


def _rooted_children(t: Tree, root: str) -> dict[str, tuple[str, ...]]:
    children: dict[str, tuple[str, ...]] = {}
    parent = {root: None}
    order = [root]
    queue = deque([root])
    while queue:
        x = queue.popleft()
        kids = tuple(y for y in t.adjacency[x] if y != parent[x])
        children[x] = kids
        for y in kids:
            parent[y] = x
            queue.append(y)
            order.append(y)
    return children


def _canon(v: str, children: dict[str, tuple[str, ...]], memo: dict) -> tuple:
    if v not in memo:
        memo[v] = tuple(sorted(_canon(c, children, memo) for c in children[v]))
    return memo[v]


def count_automorphisms_fixing_leaf(t: Tree, e: str) -> int:
    """Order of the stabiliser of leaf e in the automorphism group."""
    children = _rooted_children(t, e)
    memo: dict = {}

    def count(v: str) -> int:
        total = 1
        groups: dict[tuple, list[str]] = {}
        for c in children[v]:
            groups.setdefault(_canon(c, children, memo), []).append(c)
        for members in groups.values():
            k = len(members)
            fact = 1
            for i in range(2, k + 1):
                fact *= i
            total *= fact
            for c in members:
                total *= count(c)
        return total

    return count(e)


def automorphisms_fixing_leaf(t: Tree, e: str) -> Iterator[TreeAutomorphism]:
    """All automorphisms fixing leaf e, generated lazily.

    Enumeration is by permuting isomorphic sibling subtrees of the tree
    rooted at e; deterministic given the vertex identifiers.
    """
    if e not in t.adjacency or t.degree(e) != 1:
        raise TreeError("e must be a leaf")
    children = _rooted_children(t, e)
    memo: dict = {}

    def maps(v: str, w: str) -> Iterator[dict[str, str]]:
        # Yields all isomorphisms subtree(v) -> subtree(w); canon(v)==canon(w).
        groups_v: dict[tuple, list[str]] = {}
        for c in children[v]:
            groups_v.setdefault(_canon(c, children, memo), []).append(c)
        groups_w: dict[tuple, list[str]] = {}
        for c in children[w]:
            groups_w.setdefault(_canon(c, children, memo), []).append(c)

        def rec(keys: list[tuple], acc: dict[str, str]) -> Iterator[dict[str, str]]:
            if not keys:
                yield acc
                return
            key, rest = keys[0], keys[1:]
            srcs = groups_v[key]
            for perm in permutations(groups_w[key]):
                def fill(i: int, acc2: dict[str, str]) -> Iterator[dict[str, str]]:
                    if i == len(srcs):
                        yield from rec(rest, acc2)
                        return
                    for sub in maps(srcs[i], perm[i]):
                        merged = dict(acc2)
                        merged.update(sub)
                        yield from fill(i + 1, merged)
                yield from fill(0, dict(acc))
        yield from rec(sorted(groups_v), {v: w})

    for m in maps(e, e):
        yield TreeAutomorphism(m)


def random_automorphism_fixing_leaf(t: Tree, e: str, rng) -> TreeAutomorphism:
    """A random automorphism fixing leaf e (uniform over sibling shuffles)."""
    children = _rooted_children(t, e)
    memo: dict = {}
    mapping: dict[str, str] = {e: e}

    def rec(v: str, w: str) -> None:
        mapping[v] = w
        groups_v: dict[tuple, list[str]] = {}
        for c in children[v]:
            groups_v.setdefault(_canon(c, children, memo), []).append(c)
        groups_w: dict[tuple, list[str]] = {}
        for c in children[w]:
            groups_w.setdefault(_canon(c, children, memo), []).append(c)
        for key, srcs in groups_v.items():
            dsts = list(groups_w[key])
            rng.shuffle(dsts)
            for s, d in zip(srcs, dsts):
                rec(s, d)

    rec(e, e)
    return TreeAutomorphism(mapping)


# -- subdivision (geometric realization step) ---------------------------------


def midpoint_name(u: str, v: str) -> str:
    a, b = _norm_edge(u, v)
    return f"{a}~{b}"


def subdivide_tree(t: Tree) -> Tree:
    """Insert one regular (degree-2) vertex in the middle of every edge."""
    verts = list(t.vertices)
    edges = []
    for u, v in t.edges:
        m = midpoint_name(u, v)
        verts.append(m)
        edges.append((u, m))
        edges.append((m, v))
    return Tree(tuple(verts), tuple(edges))


# -- serialization -------------------------------------------------------------


def tree_to_json(t: Tree) -> dict:
    out: dict = {
        "vertices": list(t.vertices),
        "edges": [list(e) for e in t.edges],
    }
    if t.embedding is not None:
        out["embedding"] = {
            v: [frac_str(c) for c in coords] for v, coords in sorted(t.embedding.items())
        }
    return out


def tree_from_json(obj: Mapping) -> Tree:
    embedding = None
    if obj.get("embedding") is not None:
        embedding = {
            v: tuple(Fraction(c) for c in coords)
            for v, coords in obj["embedding"].items()
        }
    return Tree(
        tuple(obj["vertices"]),
        tuple((u, v) for u, v in obj["edges"]),
        embedding,
    )


def tree_to_dot(t: Tree, name: str = "tree") -> str:
    lines = [f"graph {name} {{"]
    for v in sorted(t.vertices):
        lines.append(f'  "{v}";')
    for u, v in t.edges:
        lines.append(f'  "{u}" -- "{v}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
