"""Congruence coset trees, bonding maps, decorations, and orbit growth.

The tower at level a is the coset tree whose vertices are the reductions of
a fixed special linear quotient modulo increasing prime powers; generators
act by left translation and every bonding map collapses the newest leaves
onto their parents.  Also here: the harmonic star tree with exact symbolic
arm angles, and the pendant-arc decoration whose projection orbits grow
without bound as depth increases.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from math import cos, pi, sin
from typing import Callable, Mapping, Sequence

from .matrices import (
    CapExceeded,
    _mul_flat_mod,
    enumerate_group,
    matrix_from_json,
    matrix_to_json,
    sl_order,
    transvection_generators,
)
from .trees import (
    Tree,
    TreeAutomorphism,
    first_point_map,
    is_tree_automorphism,
    midpoint_name,
    tree_from_json,
    tree_to_json,
    validate_tree,
)


class TowerError(ValueError):
    pass


@dataclass(eq=False)
class FiniteTreeAction:
    """A tree together with named generator automorphisms."""

    tree: Tree
    generators: dict[str, TreeAutomorphism]
    context: dict | None = None   # e.g. {"n": 3, "matrices": {name: GroupMatrix}}

    def validate(self) -> None:
        ok = validate_tree(self.tree)
        if not ok:
            raise TowerError(f"invalid tree: {ok.reason}")
        for name, auto in self.generators.items():
            res = is_tree_automorphism(self.tree, auto)
            if not res:
                raise TowerError(f"generator {name}: {res.reason}")

    def apply_word(self, word: Sequence[tuple[str, int]], v: str) -> str:
        # word s1 s2 ... sk acts as the composite map of s1 after ... after sk
        for name, e in reversed(list(word)):
            auto = self.generators[name]
            v = auto(v) if e == 1 else auto.inverse()(v)
        return v


@dataclass(eq=False)
class InverseSystem:
    """Finite truncation of an inverse limit: levels plus bonding vertex maps."""

    levels: list[FiniteTreeAction]
    bonds: list[dict[str, str]]      # bonds[a]: level a+1 vertices -> level a
    provenance: dict = field(default_factory=dict)

    @property
    def depth(self) -> int:
        return len(self.levels) - 1


@dataclass(frozen=True)
class Thread:
    """One vertex per level, compatible with the bonding maps."""

    vertices: tuple[str, ...]


def is_thread(sys: InverseSystem, thread: Thread) -> bool:
    if len(thread.vertices) != len(sys.levels):
        return False
    for a, bond in enumerate(sys.bonds):
        if bond.get(thread.vertices[a + 1]) != thread.vertices[a]:
            return False
    return True


def act_on_thread(sys: InverseSystem, name: str, thread: Thread) -> Thread:
    return Thread(
        tuple(sys.levels[a].generators[name](v) for a, v in enumerate(thread.vertices))
    )


# -- congruence tower ------------------------------------------------------------


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def _vertex_id(beta: int, entries: tuple[int, ...]) -> str:
    if beta == 0:
        return "0|e"
    return f"{beta}|" + ",".join(str(e) for e in entries)


def build_congruence_tower(
    n: int, p: int, depth: int, cap: int = 2_000_000
) -> InverseSystem:
    """Coset tree of the mod p^depth quotient with left-translation action.

    Level a has one vertex per coset at each modulus p^b, b <= a; a coset is
    labelled by its canonical representative, the reduction with entries in
    [0, p^b).  New leaves attach to their mod-p^(b-1) parents, and the bond
    collapses them back onto those parents.
    """
    if n < 2:
        raise TowerError("dimension must be at least 2")
    if not _is_prime(p):
        raise TowerError("p must be prime")
    if depth < 0:
        raise TowerError("depth must be nonnegative")
    if sl_order(n, p, depth) > cap:
        raise CapExceeded("group too large for cap")

    gen_names = sorted(transvection_generators(n))
    integral = transvection_generators(n)

    # elements of the quotient at each positive level, as flat tuples
    level_elements: dict[int, list[tuple[int, ...]]] = {}
    if depth >= 1:
        top = enumerate_group(
            n, p ** depth, list(transvection_generators(n, p ** depth).values()), cap=cap
        )
        top_entries = [g.entries for g in top.elements]
        for beta in range(1, depth + 1):
            m = p ** beta
            reduced = {tuple(e % m for e in x) for x in top_entries}
            level_elements[beta] = sorted(reduced)

    levels: list[FiniteTreeAction] = []
    bonds: list[dict[str, str]] = []
    for a in range(depth + 1):
        verts = ["0|e"]
        edges = []
        for beta in range(1, a + 1):
            mprev = p ** (beta - 1)
            for x in level_elements[beta]:
                vid = _vertex_id(beta, x)
                verts.append(vid)
                parent = (
                    "0|e"
                    if beta == 1
                    else _vertex_id(beta - 1, tuple(e % mprev for e in x))
                )
                edges.append((parent, vid))
        tree = Tree(tuple(verts), tuple(edges))
        gens: dict[str, TreeAutomorphism] = {}
        for name in gen_names:
            mapping = {"0|e": "0|e"}
            for beta in range(1, a + 1):
                m = p ** beta
                u = tuple(e % m for e in integral[name].entries)
                for x in level_elements[beta]:
                    mapping[_vertex_id(beta, x)] = _vertex_id(
                        beta, _mul_flat_mod(u, x, n, m)
                    )
            gens[name] = TreeAutomorphism(mapping)
        context = {
            "n": n,
            "p": p,
            "matrices": {name: integral[name] for name in gen_names},
        }
        levels.append(FiniteTreeAction(tree, gens, context))
        if a >= 1:
            bond = {v: v for v in levels[a - 1].tree.vertices}
            mprev = p ** (a - 1)
            for x in level_elements[a]:
                parent = (
                    "0|e" if a == 1 else _vertex_id(a - 1, tuple(e % mprev for e in x))
                )
                bond[_vertex_id(a, x)] = parent
            bonds.append(bond)

    return InverseSystem(
        levels,
        bonds,
        provenance={
            "n": n,
            "p": p,
            "depth": depth,
            "representative_rule": "entries reduced to [0, p^beta)",
            "generators": gen_names,
        },
    )


@dataclass(frozen=True)
class BondReport:
    passed: bool
    checked: int
    violations: tuple[tuple[str, str], ...]   # (generator, vertex)


def verify_equivariant_bond(sys: InverseSystem, level: int) -> BondReport:
    """Exhaustively check bond(g.x) = g.bond(x) for all generators and vertices."""
    if level + 1 >= len(sys.levels):
        raise TowerError("no bond at this level")
    upper = sys.levels[level + 1]
    lower = sys.levels[level]
    bond = sys.bonds[level]
    checked = 0
    bad = []
    for name, auto in upper.generators.items():
        lower_auto = lower.generators[name]
        for v in upper.tree.vertices:
            checked += 1
            if bond[auto(v)] != lower_auto(bond[v]):
                bad.append((name, v))
    return BondReport(not bad, checked, tuple(bad))


def verify_all_bonds(sys: InverseSystem) -> BondReport:
    checked = 0
    bad: list[tuple[str, str]] = []
    for level in range(len(sys.bonds)):
        rep = verify_equivariant_bond(sys, level)
        checked += rep.checked
        bad.extend(rep.violations)
    return BondReport(not bad, checked, tuple(bad))


@dataclass(frozen=True)
class BondStructureReport:
    passed: bool
    reasons: tuple[str, ...]


def verify_bond_structure(sys: InverseSystem, level: int) -> BondStructureReport:
    """Bond must be surjective, monotone, and the identity on the lower copy."""
    if level + 1 >= len(sys.levels):
        raise TowerError("no bond at this level")
    upper = sys.levels[level + 1].tree
    lower = sys.levels[level].tree
    bond = sys.bonds[level]
    reasons = []
    if set(bond) != set(upper.vertices):
        reasons.append("bond domain mismatch")
    if set(bond.values()) != set(lower.vertices):
        reasons.append("bond not surjective")
    for v in lower.vertices:
        if bond.get(v) != v:
            reasons.append("bond not the identity on the lower copy")
            break
    # monotone: preimage of each vertex induces a connected subtree
    preimage: dict[str, set[str]] = {}
    for v, w in bond.items():
        preimage.setdefault(w, set()).add(v)
    adj = upper.adjacency
    for w, block in preimage.items():
        start = next(iter(block))
        reached = {start}
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if y in block and y not in reached:
                    reached.add(y)
                    queue.append(y)
        if len(reached) != len(block):
            reasons.append(f"preimage of {w} is disconnected")
            break
    return BondStructureReport(not reasons, tuple(reasons))


@dataclass(frozen=True)
class OrbitResult:
    vertices: tuple[str, ...]
    closed: bool

    def __len__(self) -> int:
        return len(self.vertices)


def orbit(act: FiniteTreeAction, v: str, cap: int | None = None) -> OrbitResult:
    """Closure of {v} under the generators and inverses, up to a word-length cap."""
    if v not in act.tree.adjacency:
        raise TowerError("vertex not in tree")
    steps = []
    for name in sorted(act.generators):
        auto = act.generators[name]
        steps.append(auto)
        steps.append(auto.inverse())
    seen = {v}
    frontier = [v]
    length = 0
    closed = True
    while frontier:
        if cap is not None and length >= cap:
            closed = False
            break
        new = []
        for x in frontier:
            for s in steps:
                y = s(x)
                if y not in seen:
                    seen.add(y)
                    new.append(y)
        frontier = new
        length += 1
    return OrbitResult(tuple(sorted(seen)), closed)


@dataclass(frozen=True)
class DegreeProfile:
    max_degrees: tuple[int, ...]
    expected_stable: int | None
    stabilized: bool | None


def degree_profile(sys: InverseSystem) -> DegreeProfile:
    """Per-level maximum vertex degree; checks the stable bound when known."""
    degs = []
    for act in sys.levels:
        adj = act.tree.adjacency
        degs.append(max((len(ws) for ws in adj.values()), default=0))
    expected = None
    stabilized = None
    prov = sys.provenance
    if "n" in prov and "p" in prov:
        expected = prov["p"] ** (prov["n"] ** 2 - 1) + 1
        stabilized = all(d == expected for d in degs[2:])
    return DegreeProfile(tuple(degs), expected, stabilized)


# -- star dendrite (harmonic star with exact symbolic angles) ---------------------


@dataclass(frozen=True)
class StarArm:
    index: int                # nonzero arm index
    angle_coeff: Fraction     # angle = angle_coeff * pi, exact
    length: Fraction

    @property
    def angle_float(self) -> float:
        return float(self.angle_coeff) * pi

    def tip_xy(self) -> tuple[float, float]:
        r = float(self.length)
        return (r * cos(self.angle_float), r * sin(self.angle_float))


@dataclass(eq=False)
class StarDendrite:
    tree: Tree
    arms: tuple[StarArm, ...]


def star_dendrite(count: int) -> StarDendrite:
    """Star with arms indexed +-1..+-count: angle sgn(i)(1 - 1/(2|i|))pi, length 1/|i|.

    Angles are stored exactly as rational multiples of pi; float coordinates
    are derived and labelled approximate in exports.
    """
    if count < 1:
        raise TowerError("at least one arm pair required")
    arms = []
    verts = ["o"]
    edges = []
    for i in sorted(range(-count, count + 1), key=lambda k: (abs(k), -k)):
        if i == 0:
            continue
        sign = 1 if i > 0 else -1
        coeff = sign * (1 - Fraction(1, 2 * abs(i)))
        arms.append(StarArm(i, coeff, Fraction(1, abs(i))))
        tip = f"a{i}"
        verts.append(tip)
        edges.append(("o", tip))
    return StarDendrite(Tree(tuple(verts), tuple(edges)), tuple(arms))


def star_to_json(sd: StarDendrite) -> dict:
    return {
        "tree": tree_to_json(sd.tree),
        "arms": [
            {
                "index": arm.index,
                "angle_pi_multiple": f"{arm.angle_coeff.numerator}/{arm.angle_coeff.denominator}",
                "length": f"{arm.length.numerator}/{arm.length.denominator}",
                "angle_float": arm.angle_float,
                "tip_xy_float": list(arm.tip_xy()),
                "floats_approximate": True,
            }
            for arm in sd.arms
        ],
    }


def star_to_svg(sd: StarDendrite, size: int = 400) -> str:
    half = size / 2
    scale = (size / 2 - 10)
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}">'
    ]
    for arm in sd.arms:
        x, y = arm.tip_xy()
        lines.append(
            f'  <line x1="{half:.1f}" y1="{half:.1f}" '
            f'x2="{half + scale * x:.2f}" y2="{half - scale * y:.2f}" '
            f'stroke="#1f77b4" stroke-width="1.5"/>'
        )
    lines.append(f'  <circle cx="{half:.1f}" cy="{half:.1f}" r="2.5" fill="#000"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


# -- decorations (pendant arcs over an orbit of leaves) ---------------------------


@dataclass(frozen=True)
class Pendant:
    anchor: str
    mid: str
    tip: str
    length: Fraction


@dataclass(eq=False)
class DecoratedAction:
    action: FiniteTreeAction
    pendants: tuple[Pendant, ...]
    base_vertices: frozenset[str]


def attach_decorations(
    sys: InverseSystem,
    seed: str,
    lengths: Callable[[int], Fraction] | None = None,
) -> DecoratedAction:
    """Attach a subdivided pendant arc over each vertex in the orbit of seed.

    The orbit is enumerated from the seed in breadth-first order; the arc
    over the i-th orbit vertex carries length label 1/i (or ``lengths(i)``).
    Every generator extends to permute the pendant arcs with the orbit.
    """
    act = sys.levels[-1]
    tree = act.tree
    if seed not in tree.adjacency:
        raise TowerError("seed not in deepest tree")
    if len(tree.vertices) > 1 and tree.degree(seed) != 1:
        raise TowerError("seed must be a leaf")
    if lengths is None:
        lengths = lambda i: Fraction(1, i)

    # BFS enumeration of the orbit, deterministic: sorted generator names,
    # generator before inverse.
    steps = []
    for name in sorted(act.generators):
        steps.append(act.generators[name])
        steps.append(act.generators[name].inverse())
    order = [seed]
    seen = {seed}
    queue = deque([seed])
    while queue:
        x = queue.popleft()
        for s in steps:
            y = s(x)
            if y not in seen:
                seen.add(y)
                order.append(y)
                queue.append(y)

    pendants = []
    verts = list(tree.vertices)
    edges = list(tree.edges)
    index_of = {}
    for i, anchor in enumerate(order, start=1):
        mid = f"pend{i}m"
        tip = f"pend{i}t"
        verts.extend([mid, tip])
        edges.append((anchor, mid))
        edges.append((mid, tip))
        pendants.append(Pendant(anchor, mid, tip, lengths(i)))
        index_of[anchor] = i
    new_tree = Tree(tuple(verts), tuple(edges))

    gens: dict[str, TreeAutomorphism] = {}
    for name, auto in act.generators.items():
        mapping = auto.mapping
        for i, anchor in enumerate(order, start=1):
            j = index_of[auto(anchor)]
            mapping[f"pend{i}m"] = f"pend{j}m"
            mapping[f"pend{i}t"] = f"pend{j}t"
        gens[name] = TreeAutomorphism(mapping)
    return DecoratedAction(
        FiniteTreeAction(new_tree, gens, act.context),
        tuple(pendants),
        frozenset(tree.vertices),
    )


@dataclass(frozen=True)
class ProjectionGrowth:
    sizes: tuple[int, ...]
    closed: tuple[bool, ...]

    def strictly_increasing(self) -> bool:
        return all(a < b for a, b in zip(self.sizes, self.sizes[1:]))


def projection_orbit_growth(
    sys: InverseSystem,
    decorated: DecoratedAction,
    x: str,
    cap: int | None = None,
) -> ProjectionGrowth:
    """Orbit size of the first-point projection of x into each level subtree."""
    tree = decorated.action.tree
    if x not in tree.adjacency:
        raise TowerError("vertex not in decorated tree")
    sizes = []
    closed = []
    for act in sys.levels:
        level_set = frozenset(act.tree.vertices)
        r = first_point_map(tree, level_set, x)
        res = orbit(decorated.action, r, cap)
        sizes.append(len(res))
        closed.append(res.closed)
    return ProjectionGrowth(tuple(sizes), tuple(closed))


# -- geometric realization (edge subdivision) for whole actions -------------------


def subdivide_action(act: FiniteTreeAction) -> FiniteTreeAction:
    """Subdivide every edge once and extend the generators over midpoints."""
    from .trees import subdivide_tree

    new_tree = subdivide_tree(act.tree)
    gens = {}
    for name, auto in act.generators.items():
        mapping = auto.mapping
        for u, v in act.tree.edges:
            mapping[midpoint_name(u, v)] = midpoint_name(auto(u), auto(v))
        gens[name] = TreeAutomorphism(mapping)
    return FiniteTreeAction(new_tree, gens, act.context)


# -- serialization ----------------------------------------------------------------


def system_to_json(sys: InverseSystem) -> dict:
    matrices = {}
    levels = []
    for act in sys.levels:
        gens = {
            name: [auto(v) for v in act.tree.vertices]
            for name, auto in sorted(act.generators.items())
        }
        levels.append({"tree": tree_to_json(act.tree), "generators": gens})
        if act.context and "matrices" in act.context:
            matrices = {
                name: matrix_to_json(m) for name, m in act.context["matrices"].items()
            }
    return {
        "provenance": sys.provenance,
        "generator_matrices": matrices,
        "levels": levels,
        "bonds": [
            {v: bond[v] for v in sorted(bond)} for bond in sys.bonds
        ],
    }


def system_from_json(obj: Mapping) -> InverseSystem:
    matrices = {
        name: matrix_from_json(m)
        for name, m in obj.get("generator_matrices", {}).items()
    }
    levels = []
    for lv in obj["levels"]:
        tree = tree_from_json(lv["tree"])
        gens = {
            name: TreeAutomorphism(dict(zip(tree.vertices, images)))
            for name, images in lv["generators"].items()
        }
        context = {"matrices": matrices} if matrices else None
        levels.append(FiniteTreeAction(tree, gens, context))
    bonds = [dict(b) for b in obj["bonds"]]
    return InverseSystem(levels, bonds, dict(obj.get("provenance", {})))
