"""Finite ordering spaces: axiom checkers, invariant-order search, extraction.

An order assignment is an antisymmetric sign function on ordered pairs of
distinct ball elements, phi(g, h) = +1 meaning g comes after h.  The search
looks for assignments that are simultaneously antisymmetric (R), transitive
(T) and left-invariant under a finite set (L), returning either a verified
witness or an exhausted search trace; running out of budget is a third,
explicitly inconclusive outcome.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from .matrices import CapExceeded, GroupMatrix, MatrixError, matrix_from_json, matrix_to_json


class OrderingError(ValueError):
    pass


class SearchBudgetExhausted(RuntimeError):
    """The search ran out of budget before reaching Sat or Unsat."""


Word = tuple[tuple[str, int], ...]


@dataclass(eq=False)
class Ball:
    """Word-length ball in a matrix group: identity-containing, inverse-closed."""

    elements: tuple[GroupMatrix, ...]
    generators: tuple[GroupMatrix, ...]
    names: tuple[str, ...]
    radius: int
    words: dict[GroupMatrix, Word]

    def __post_init__(self) -> None:
        self._index = {g: k for k, g in enumerate(self.elements)}

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, g: GroupMatrix) -> bool:
        return g in self._index

    def index(self, g: GroupMatrix) -> int:
        if g not in self._index:
            raise OrderingError("element not in ball")
        return self._index[g]

    def word(self, g: GroupMatrix) -> Word:
        return self.words[g]


def ball_generate(
    gens: Sequence[GroupMatrix],
    radius: int,
    names: Sequence[str] | None = None,
    cap: int = 200_000,
) -> Ball:
    """All products of at most ``radius`` generators and inverses."""
    if radius < 0:
        raise OrderingError("radius must be nonnegative")
    if not gens:
        raise OrderingError("at least one generator required")
    n, mod = gens[0].n, gens[0].mod
    for g in gens:
        if g.n != n or g.mod != mod:
            raise MatrixError("generators must share dimension and domain")
    if names is None:
        names = tuple(f"g{k}" for k in range(len(gens)))
    names = tuple(names)
    steps: list[tuple[str, int, GroupMatrix]] = []
    for name, g in zip(names, gens):
        steps.append((name, 1, g))
        steps.append((name, -1, g.inverse()))
    ident = GroupMatrix.identity(n, mod)
    words: dict[GroupMatrix, Word] = {ident: ()}
    frontier = [ident]
    for _ in range(radius):
        new = []
        for x in frontier:
            for name, e, g in steps:
                y = x * g
                if y not in words:
                    if len(words) >= cap:
                        raise CapExceeded("ball exceeds cap")
                    words[y] = words[x] + ((name, e),)
                    new.append(y)
        frontier = new
    elements = tuple(sorted(words, key=lambda g: g.entries))
    return Ball(elements, tuple(gens), names, radius, words)


def format_word(word: Word) -> str:
    if not word:
        return "e"
    return "*".join(name if e == 1 else f"{name}^-1" for name, e in word)


@dataclass(eq=False)
class OrderAssignment:
    """Sign function on ordered pairs of distinct ball elements."""

    ball: Ball
    signs: dict[tuple[int, int], int]

    def __post_init__(self) -> None:
        # Store both orientations; reject inconsistent input.
        full: dict[tuple[int, int], int] = {}
        for (i, j), s in self.signs.items():
            if i == j:
                raise OrderingError("diagonal pair in assignment")
            if s not in (-1, 1):
                raise OrderingError("signs must be +1 or -1")
            if full.get((i, j), s) != s or full.get((j, i), -s) != -s:
                raise OrderingError("conflicting signs for a pair")
            full[(i, j)] = s
            full[(j, i)] = -s
        self.signs = full

    def sign_idx(self, i: int, j: int) -> int:
        try:
            return self.signs[(i, j)]
        except KeyError:
            raise OrderingError("incomplete assignment") from None

    def sign(self, g: GroupMatrix, h: GroupMatrix) -> int:
        return self.sign_idx(self.ball.index(g), self.ball.index(h))

    def ascending(self, indices: Iterable[int] | None = None) -> list[GroupMatrix]:
        """Elements sorted ascending: later elements have sign +1 over earlier."""
        idx = list(indices) if indices is not None else list(range(len(self.ball)))
        key = {i: sum(1 for j in idx if j != i and self.signs.get((i, j)) == 1) for i in idx}
        return [self.ball.elements[i] for i in sorted(idx, key=lambda i: (key[i], i))]

    @staticmethod
    def from_total_order(ball: Ball, ascending: Sequence[GroupMatrix]) -> "OrderAssignment":
        pos = {ball.index(g): k for k, g in enumerate(ascending)}
        if len(pos) != len(ball):
            raise OrderingError("total order must cover the ball")
        signs = {}
        idx = list(pos)
        for a in idx:
            for b in idx:
                if a != b:
                    signs[(a, b)] = 1 if pos[a] > pos[b] else -1
        return OrderAssignment(ball, signs)


@dataclass(frozen=True)
class AxiomReport:
    passed: bool
    antisymmetry_violations: tuple[tuple[int, int], ...]
    transitivity_violations: tuple[tuple[int, int, int], ...]


def check_axioms(phi: OrderAssignment, b: Ball | None = None) -> AxiomReport:
    """Check antisymmetry and transitivity on every pair/triple of the ball."""
    ball = b if b is not None else phi.ball
    idx = [phi.ball.index(g) for g in ball.elements]
    r_bad = []
    for a in idx:
        for c in idx:
            if a < c:
                if phi.sign_idx(a, c) != -phi.sign_idx(c, a):
                    r_bad.append((a, c))
    t_bad = []
    for f in idx:
        for g in idx:
            if g == f:
                continue
            if phi.sign_idx(f, g) != 1:
                continue
            for h in idx:
                if h == f or h == g:
                    continue
                if phi.sign_idx(g, h) == 1 and phi.sign_idx(f, h) != 1:
                    t_bad.append((f, g, h))
    return AxiomReport(not r_bad and not t_bad, tuple(r_bad), tuple(t_bad))


@dataclass(frozen=True)
class InvarianceReport:
    passed: bool
    violations: tuple[tuple[int, int, int], ...]  # (f, g, h) as b2 indices


def check_invariance(
    phi: OrderAssignment,
    f: Sequence[GroupMatrix],
    b: Ball,
    b2: Ball | None = None,
) -> InvarianceReport:
    """Check phi(fg, fh) = phi(g, h) for f in F and distinct g, h in b."""
    outer = b2 if b2 is not None else phi.ball
    bad = []
    for fm in f:
        for g in b.elements:
            for h in b.elements:
                if g == h:
                    continue
                fg, fh = fm * g, fm * h
                if fg not in outer or fh not in outer:
                    raise OrderingError("ball containment violated")
                if phi.sign(fg, fh) != phi.sign(g, h):
                    bad.append(
                        (outer.index(fm) if fm in outer else -1,
                         outer.index(g), outer.index(h))
                    )
    return InvarianceReport(not bad, tuple(bad))


# -- invariant-order search -----------------------------------------------------


@dataclass(frozen=True)
class TraceStep:
    pair: tuple[int, int]
    value: int
    reason: str


@dataclass(frozen=True)
class UnsatTrace:
    branches: int
    forcing_chain: tuple[TraceStep, ...]

    def to_json(self) -> dict:
        return {
            "branches": self.branches,
            "forcing_chain": [
                {"pair": list(s.pair), "value": s.value, "reason": s.reason}
                for s in self.forcing_chain
            ],
        }


@dataclass(frozen=True)
class SearchResult:
    status: str  # "sat" | "unsat"
    witness: OrderAssignment | None
    trace: UnsatTrace | None
    decisions: int

    @property
    def is_sat(self) -> bool:
        return self.status == "sat"


class _PairVars:
    """Unordered pairs of b2 indices glued by the invariance constraints.

    Union-find with parity: two pairs in one class must receive equal signs
    (parity +1) or opposite signs (parity -1).  A class whose canonical
    orientations disagree with themselves is an immediate contradiction.
    """

    def __init__(self) -> None:
        self.parent: dict[tuple[int, int], tuple[int, int]] = {}
        self.parity: dict[tuple[int, int], int] = {}
        self.edges: dict[tuple[int, int], list] = {}

    def add(self, p: tuple[int, int]) -> None:
        if p not in self.parent:
            self.parent[p] = p
            self.parity[p] = 1
            self.edges[p] = []

    def find(self, p: tuple[int, int]) -> tuple[tuple[int, int], int]:
        chain = []
        while self.parent[p] != p:
            chain.append(p)
            p = self.parent[p]
        root = p
        # compress: point every chain node at the root with its cumulative sign
        s = 1
        for q in reversed(chain):
            s = self.parity[q] * s
            self.parent[q] = root
            self.parity[q] = s
        return root, (s if chain else 1)

    def union(self, p, q, rel: int, label: str) -> bool:
        """Glue p and q with sign(p) = rel * sign(q). False on contradiction."""
        self.add(p)
        self.add(q)
        rp, sp = self.find(p)
        rq, sq = self.find(q)
        if rp == rq:
            if sp != rel * sq:
                return False
            self.edges[p].append((q, rel, label))
            self.edges[q].append((p, rel, label))
            return True
        self.parent[rp] = rq
        self.parity[rp] = rel * sp * sq
        self.edges[p].append((q, rel, label))
        self.edges[q].append((p, rel, label))
        return True

    def chain_between(self, p, q) -> list[tuple[tuple[int, int], str]]:
        """Edge path from p to q through recorded constraint edges."""
        prev: dict = {p: None}
        queue = deque([p])
        while queue:
            x = queue.popleft()
            if x == q:
                break
            for y, _rel, label in self.edges[x]:
                if y not in prev:
                    prev[y] = (x, label)
                    queue.append(y)
        out = []
        cur = q
        while prev.get(cur) is not None:
            x, label = prev[cur]
            out.append((cur, label))
            cur = x
        out.reverse()
        return out


def _canonical_pair(i: int, j: int) -> tuple[tuple[int, int], int]:
    return ((i, j), 1) if i < j else ((j, i), -1)


def search_invariant(
    f: Sequence[GroupMatrix],
    b: Ball,
    b2: Ball,
    budget: int = 500_000,
    shuffle_seed: int | None = None,
) -> SearchResult:
    """Backtracking search for an (F, b)-invariant total order on b2.

    Depth-first over pair variables in canonical order, assigning -1 before
    +1, propagating transitivity and the invariance gluing after every step.
    The returned witness is re-verified by the public checkers before it is
    handed out.  Raises SearchBudgetExhausted when the node budget runs out
    (deliberately distinct from Unsat).
    """
    for g in b.elements:
        if g not in b2:
            raise OrderingError("ball containment violated")
    size = len(b2)
    order = list(range(size))
    if shuffle_seed is not None:
        random.Random(shuffle_seed).shuffle(order)
    rank = {i: r for r, i in enumerate(order)}

    # Glue pairs related by the invariance condition.
    vars_ = _PairVars()
    for i in range(size):
        for j in range(i + 1, size):
            vars_.add((i, j))
    first_contradiction: list[TraceStep] = []
    for fm in f:
        for g in b.elements:
            ig = b2.index(g)
            for h in b.elements:
                ih = b2.index(h)
                if ig >= ih:
                    continue
                fg, fh = fm * g, fm * h
                if fg not in b2 or fh not in b2:
                    raise OrderingError("ball containment violated")
                p1, s1 = _canonical_pair(ig, ih)
                p2, s2 = _canonical_pair(b2.index(fg), b2.index(fh))
                fw = format_word(b2.word(fm)) if fm in b2 else "f"
                label = f"left multiplication by {fw}"
                if not vars_.union(p1, p2, s1 * s2, label):
                    steps = [TraceStep(p1, +1, "assume a sign for this pair")]
                    steps += [
                        TraceStep(pr, 0, f"forced equal/opposite via {lb}")
                        for pr, lb in vars_.chain_between(p1, p2)
                    ]
                    steps.append(
                        TraceStep(p2, -1, f"also forced opposite via {label}")
                    )
                    return SearchResult(
                        "unsat", None, UnsatTrace(0, tuple(steps)), 0
                    )

    # Class structure: root pair -> members with relative parity.
    members: dict[tuple[int, int], list[tuple[tuple[int, int], int]]] = {}
    for i in range(size):
        for j in range(i + 1, size):
            root, s = vars_.find((i, j))
            members.setdefault(root, []).append(((i, j), s))
    roots = sorted(members, key=lambda p: (min(rank[p[0]], rank[p[1]]),
                                           max(rank[p[0]], rank[p[1]])))

    rel = [[0] * size for _ in range(size)]  # rel[i][j] = phi(x_i, x_j)
    value: dict[tuple[int, int], int] = {}   # assigned class values by root
    trail: list = []
    stats = {"nodes": 0, "branches": 0}

    def set_rel(i: int, j: int, s: int) -> bool:
        cur = rel[i][j]
        if cur != 0:
            return cur == s
        rel[i][j] = s
        rel[j][i] = -s
        trail.append(("rel", i, j))
        return True

    def assign(root: tuple[int, int], val: int, chain: list[TraceStep]) -> bool:
        """Assign a class and propagate; records steps into chain."""
        queue: deque[tuple[tuple[int, int], int, str]] = deque()
        queue.append((root, val, "decision or forced class"))
        while queue:
            stats["nodes"] += 1
            if stats["nodes"] > budget:
                raise SearchBudgetExhausted("search budget exhausted")
            r, v, why = queue.popleft()
            if r in value:
                if value[r] != v:
                    chain.append(TraceStep(r, v, f"class already fixed opposite ({why})"))
                    return False
                continue
            value[r] = v
            trail.append(("val", r))
            chain.append(TraceStep(r, v, why))
            for (i, j), s in members[r]:
                if not set_rel(i, j, v * s):
                    chain.append(TraceStep((i, j), v * s, "pair already oriented opposite"))
                    return False
                # transitive closure through the new edge (both directions)
                a, bb = (i, j) if v * s == 1 else (j, i)  # a > b
                for k in range(size):
                    if k == a or k == bb:
                        continue
                    # k > a > b forces k > b
                    if rel[k][a] == 1 and rel[k][bb] != 1:
                        if rel[k][bb] == -1:
                            chain.append(TraceStep((k, bb), 1, "transitivity conflict"))
                            return False
                        p, s2 = _canonical_pair(k, bb)
                        r2, s3 = vars_.find(p)
                        queue.append((r2, s2 * s3, "forced by transitivity"))
                    # a > b > k forces a > k
                    if rel[bb][k] == 1 and rel[a][k] != 1:
                        if rel[a][k] == -1:
                            chain.append(TraceStep((a, k), 1, "transitivity conflict"))
                            return False
                        p, s2 = _canonical_pair(a, k)
                        r2, s3 = vars_.find(p)
                        queue.append((r2, s2 * s3, "forced by transitivity"))
        return True

    def undo(mark: int) -> None:
        while len(trail) > mark:
            kind, *payload = trail.pop()
            if kind == "rel":
                i, j = payload
                rel[i][j] = 0
                rel[j][i] = 0
            else:
                (r,) = payload
                del value[r]

    def next_pos(pos: int) -> int:
        while pos < len(roots) and roots[pos] in value:
            pos += 1
        return pos

    # iterative depth-first search; values tried -1 before +1 so the found
    # witness is the canonically least satisfying leaf
    found = False
    stack: list[list] = []  # frames [pos, values_left, mark]
    start = next_pos(0)
    if start == len(roots):
        found = True
    else:
        stack.append([start, [-1, 1], 0])
    while stack:
        frame = stack[-1]
        pos, values, _mark = frame
        if pos == len(roots):
            found = True
            break
        if values:
            val = values.pop(0)
            frame[2] = len(trail)
            stats["branches"] += 1
            chain: list[TraceStep] = []
            if assign(roots[pos], val, chain):
                stack.append([next_pos(pos + 1), [-1, 1], 0])
            else:
                if not first_contradiction:
                    first_contradiction.extend(chain)
                undo(frame[2])
        else:
            stack.pop()
            if stack:
                undo(stack[-1][2])
    if not found:
        return SearchResult(
            "unsat",
            None,
            UnsatTrace(stats["branches"], tuple(first_contradiction)),
            stats["branches"],
        )
    signs = {
        (i, j): rel[i][j]
        for i in range(size)
        for j in range(size)
        if i != j and rel[i][j] != 0
    }
    witness = OrderAssignment(b2, signs)
    # Mandatory re-verification through the public checkers.
    axioms = check_axioms(witness)
    invariance = check_invariance(witness, f, b, b2)
    if not axioms.passed or not invariance.passed:
        raise AssertionError("internal error: witness failed re-verification")
    return SearchResult("sat", witness, None, stats["branches"])


# -- compactness extraction -----------------------------------------------------


@dataclass(frozen=True)
class ExtractResult:
    assignment: OrderAssignment
    supporters: tuple[int, ...]


def compactness_extract(
    chain: Sequence[OrderAssignment], target: Ball
) -> ExtractResult:
    """Pigeonhole step: the restriction to ``target`` shared by most members.

    Each chain member that covers the target ball contributes its restriction
    signature; the most frequent signature wins (ties break to the smallest),
    together with the indices of the members that support it.
    """
    pairs = [
        (i, j) for i in range(len(target)) for j in range(len(target)) if i < j
    ]
    signatures: dict[tuple[int, ...], list[int]] = {}
    for k, phi in enumerate(chain):
        try:
            sig = tuple(
                phi.sign(target.elements[i], target.elements[j]) for i, j in pairs
            )
        except OrderingError:
            continue
        signatures.setdefault(sig, []).append(k)
    if not signatures:
        raise OrderingError("insufficient chain")
    best = max(sorted(signatures), key=lambda s: len(signatures[s]))
    signs = {p: s for p, s in zip(pairs, best)}
    return ExtractResult(OrderAssignment(target, signs), tuple(signatures[best]))


# -- orders from actions ----------------------------------------------------------


def order_from_probe_keys(
    ball: Ball, keys: Mapping[GroupMatrix, tuple]
) -> OrderAssignment:
    """Total order on the ball from per-element probe-image keys (lexicographic)."""
    elems = list(ball.elements)
    for a in range(len(elems)):
        for bb in range(a + 1, len(elems)):
            if keys[elems[a]] == keys[elems[bb]]:
                raise OrderingError(
                    "probes insufficient (action not almost free at this scale)"
                )
    ascending = sorted(elems, key=lambda g: keys[g])
    return OrderAssignment.from_total_order(ball, ascending)


def order_from_action(act, z: str, probes: Sequence[str], b: Ball) -> OrderAssignment:
    """Order ball elements by their action on probe vertices along an arc from z.

    ``act`` is a tower FiniteTreeAction; ball elements act through their
    witness words.  All probe images must stay on one arc starting at z;
    vertices are compared by distance from z along that arc.
    """
    from . import trees

    tree = act.tree
    for name, auto in act.generators.items():
        if auto(z) != z:
            raise OrderingError("every generator must fix z")
    # positions of probes: strictly increasing along an arc away from z
    if not probes:
        raise OrderingError("at least one probe required")
    far = max(probes, key=lambda v: len(trees.path(tree, z, v)))
    arc = trees.path(tree, z, far)
    pos_on_arc = {v: k for k, v in enumerate(arc)}
    last = -1
    for x in probes:
        if x not in pos_on_arc:
            raise OrderingError("probes must lie on a common arc from z")
        if pos_on_arc[x] <= last:
            raise OrderingError("probes must be ordered away from z")
        last = pos_on_arc[x]

    def automorphism_for(g: GroupMatrix):
        auto = trees.TreeAutomorphism.identity(tree.vertices)
        for name, e in b.word(g):
            step = act.generators[name]
            auto = auto * (step if e == 1 else step.inverse())
        return auto

    autos = {g: automorphism_for(g) for g in b.elements}
    images = {autos[g](x) for g in b.elements for x in probes}
    hull = trees.convex_hull(tree, images | {z})
    # the image hull must be an arc with z as an end point
    for v in hull:
        inside = sum(1 for w in tree.adjacency[v] if w in hull)
        if inside > 2 or (v == z and inside > 1):
            raise OrderingError("probe images do not lie on a common arc from z")
    dist = {v: len(trees.path(tree, z, v)) - 1 for v in images}
    keys = {
        g: tuple(dist[autos[g](x)] for x in probes) for g in b.elements
    }
    return order_from_probe_keys(b, keys)


# -- bounded domination test -------------------------------------------------------


@dataclass(eq=False)
class QuasiOrderSample:
    """Probe-based comparison oracle: elements compared by their probe images.

    ``apply(elem, point)`` must realize a left action; elements need an
    ``inverse()``.  Comparison is lexicographic over the probe list using
    ``position`` as the coordinate of a point.
    """

    probes: tuple
    apply: Callable
    position: Callable

    def key(self, elem) -> tuple:
        return tuple(self.position(self.apply(elem, x)) for x in self.probes)

    def leq(self, key_a: tuple, key_b: tuple) -> bool:
        return key_a <= key_b


@dataclass(frozen=True)
class DominationVerdict:
    """Result of a bounded check of the relation "g is dominated by h".

    ``holds`` means one alternative (h or h^-1 as the bound) survived for
    every exponent with absolute value up to the cap; this is explicitly an
    approximation truncated at the cap, never a proof.
    """

    holds: bool
    cap: int
    via: str | None           # "h" or "h-inverse" when holds
    failed_at: int | None     # smallest cap at which both alternatives break


def ll_test(sample: QuasiOrderSample, g, h, k: int) -> DominationVerdict:
    """Bounded test of g << h (all powers of g below h, or all below h^-1)."""
    if k < 1:
        raise OrderingError("power cap must be positive")
    key_h = sample.key(h)
    key_hinv = sample.key(h.inverse())
    ginv = g.inverse()
    ident = g * ginv

    def power_keys():
        # exponents ordered 0, 1, -1, 2, -2, ...: first failure index is the
        # smallest |exponent| that breaks an alternative.
        yield 0, sample.key(ident)
        cur_p, cur_m = ident, ident
        for j in range(1, k + 1):
            cur_p = cur_p * g
            yield j, sample.key(cur_p)
            cur_m = cur_m * ginv
            yield -j, sample.key(cur_m)

    fail_h: int | None = None
    fail_hinv: int | None = None
    for j, key in power_keys():
        if fail_h is None and not sample.leq(key, key_h):
            fail_h = abs(j)
        if fail_hinv is None and not sample.leq(key, key_hinv):
            fail_hinv = abs(j)
        if fail_h is not None and fail_hinv is not None:
            return DominationVerdict(False, k, None, max(fail_h, fail_hinv))
    via = "h" if fail_h is None else "h-inverse"
    return DominationVerdict(True, k, via, None)


# -- serialization ----------------------------------------------------------------


def ball_to_json(b: Ball) -> dict:
    return {
        "radius": b.radius,
        "names": list(b.names),
        "generators": [matrix_to_json(g) for g in b.generators],
        "count": len(b),
    }


def ball_from_json(obj: Mapping, cap: int = 200_000) -> Ball:
    gens = [matrix_from_json(g) for g in obj["generators"]]
    ball = ball_generate(gens, int(obj["radius"]), tuple(obj["names"]), cap=cap)
    if "count" in obj and obj["count"] != len(ball):
        raise OrderingError("ball provenance does not match regenerated ball")
    return ball


def assignment_to_json(phi: OrderAssignment) -> dict:
    triples = sorted(
        [i, j, s] for (i, j), s in phi.signs.items() if i < j
    )
    return {"ball": ball_to_json(phi.ball), "signs": triples}


def assignment_from_json(obj: Mapping) -> OrderAssignment:
    ball = ball_from_json(obj["ball"])
    signs = {(int(i), int(j)): int(s) for i, j, s in obj["signs"]}
    return OrderAssignment(ball, signs)
