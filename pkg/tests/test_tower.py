"""Coset towers: construction counts, equivariance, decorations, star geometry.

Leaf counts are checked against the exhaustive determinant-filter oracle,
never against the builder's own enumeration.
"""

import json
from fractions import Fraction
from math import isclose, pi

import pytest

import oracles
from treeact.matrices import CapExceeded, sl_order
from treeact.tower import (
    InverseSystem,
    Thread,
    TowerError,
    act_on_thread,
    attach_decorations,
    build_congruence_tower,
    degree_profile,
    is_thread,
    orbit,
    projection_orbit_growth,
    star_dendrite,
    star_to_json,
    star_to_svg,
    subdivide_action,
    system_from_json,
    system_to_json,
    verify_all_bonds,
    verify_bond_structure,
    verify_equivariant_bond,
)
from treeact.trees import validate_tree


@pytest.fixture(scope="module")
def tower321():
    return build_congruence_tower(3, 2, 1)


def trivial_system():
    return build_congruence_tower(3, 2, 0)


class TestBuild:
    def test_depth_zero(self):
        sys_ = trivial_system()
        assert len(sys_.levels) == 1
        assert sys_.levels[0].tree.vertices == ("0|e",)
        assert not sys_.bonds

    def test_depth_one_counts_match_det_oracle(self, tower321):
        count, _ = oracles.sl_by_det_filter(3, 2)
        tree = tower321.levels[1].tree
        assert count == 168
        assert len(tree.leaves()) == count
        assert len(tree.vertices) == count + 1

    def test_trees_valid_and_actions_are_automorphisms(self, tower321):
        for act in tower321.levels:
            assert validate_tree(act.tree).ok
            act.validate()

    def test_root_fixed_at_every_level(self, tower321):
        for act in tower321.levels:
            for auto in act.generators.values():
                assert auto("0|e") == "0|e"

    def test_sampled_relations(self, tower321):
        # words that agree as matrices in the quotient agree as tree maps;
        # mod 2 every transvection squares to the identity, a relation the
        # integral matrices do not satisfy
        act = tower321.levels[1]
        mats = {name: m.reduce_mod(2) for name, m in act.context["matrices"].items()}
        names = sorted(mats)
        found_nontrivial = 0
        for x in names:
            for y in names:
                m1 = mats[x] * mats[y]
                for z in names:
                    if m1 == mats[z] and (x, y) != (z,):
                        found_nontrivial += 1
                        for v in act.tree.vertices:
                            assert act.apply_word([(x, 1), (y, 1)], v) == act.generators[z](v)
                if m1.is_identity():
                    found_nontrivial += 1
                    for v in act.tree.vertices:
                        assert act.apply_word([(x, 1), (y, 1)], v) == v
        assert found_nontrivial > 0

    def test_action_is_left_translation(self, tower321):
        # vertex labels are reduced matrices; the generator u must send the
        # vertex of M to the vertex of u*M (not M*u)
        act = tower321.levels[1]
        for name, u in act.context["matrices"].items():
            auto = act.generators[name]
            for vid in list(act.tree.vertices)[1:10]:
                entries = tuple(int(x) for x in vid.split("|")[1].split(","))
                m = [list(entries[k * 3:(k + 1) * 3]) for k in range(3)]
                left = oracles.mat_mul(u.rows(), m, 2)
                expect = "1|" + ",".join(str(x) for row in left for x in row)
                assert auto(vid) == expect

    def test_not_prime_rejected(self):
        with pytest.raises(TowerError, match="prime"):
            build_congruence_tower(3, 4, 1)

    def test_cap_exceeded(self):
        with pytest.raises(CapExceeded):
            build_congruence_tower(3, 2, 3)  # 11M elements > default cap


class TestBonds:
    def test_equivariance_passes(self, tower321):
        rep = verify_equivariant_bond(tower321, 0)
        assert rep.passed
        assert rep.checked == 6 * 169

    def test_structure(self, tower321):
        rep = verify_bond_structure(tower321, 0)
        assert rep.passed

    def test_depth_zero_vacuous(self):
        rep = verify_all_bonds(trivial_system())
        assert rep.passed and rep.checked == 0

    def test_scrambled_bond_fails_with_witness(self):
        # depth 2 so that different leaves have different parents
        sys_ = build_congruence_tower(2, 2, 2)
        assert verify_equivariant_bond(sys_, 1).passed
        bond = dict(sys_.bonds[1])
        leaves = sys_.levels[2].tree.leaves()
        a = leaves[0]
        b = next(v for v in leaves if bond[v] != bond[a])
        bond[a], bond[b] = bond[b], bond[a]
        broken = InverseSystem(sys_.levels, [sys_.bonds[0], bond], sys_.provenance)
        rep = verify_equivariant_bond(broken, 1)
        assert not rep.passed
        assert rep.violations

    def test_missing_level_rejected(self):
        with pytest.raises(TowerError):
            verify_equivariant_bond(trivial_system(), 0)


class TestThreads:
    def test_root_to_leaf_thread(self, tower321):
        leaf = tower321.levels[1].tree.leaves()[0]
        th = Thread(("0|e", leaf))
        assert is_thread(tower321, th)
        for name in tower321.levels[0].generators:
            assert is_thread(tower321, act_on_thread(tower321, name, th))

    def test_constant_root_thread(self, tower321):
        assert is_thread(tower321, Thread(("0|e", "0|e")))

    def test_wrong_length_thread(self, tower321):
        assert not is_thread(tower321, Thread(("0|e",)))

    def test_parent_mismatch_thread(self):
        sys_ = build_congruence_tower(2, 2, 2)
        leaf = sys_.levels[2].tree.leaves()[0]
        wrong_parent = next(
            v for v in sys_.levels[1].tree.leaves() if sys_.bonds[1][leaf] != v
        )
        assert not is_thread(sys_, Thread(("0|e", wrong_parent, leaf)))
        assert is_thread(sys_, Thread(("0|e", sys_.bonds[1][leaf], leaf)))


class TestOrbit:
    def test_root_orbit(self, tower321):
        res = orbit(tower321.levels[1], "0|e")
        assert res.vertices == ("0|e",) and res.closed

    def test_leaf_orbit_is_all_leaves(self, tower321):
        leaf = tower321.levels[1].tree.leaves()[0]
        res = orbit(tower321.levels[1], leaf)
        assert len(res) == 168 and res.closed

    def test_trivial_action(self):
        sys_ = trivial_system()
        res = orbit(sys_.levels[0], "0|e")
        assert res.vertices == ("0|e",)

    def test_word_length_cap(self, tower321):
        leaf = tower321.levels[1].tree.leaves()[0]
        res = orbit(tower321.levels[1], leaf, cap=1)
        assert not res.closed
        assert 1 < len(res) < 168


class TestDegreeProfile:
    def test_depth_zero(self):
        assert degree_profile(trivial_system()).max_degrees == (0,)

    def test_depth_one(self, tower321):
        dp = degree_profile(tower321)
        assert dp.max_degrees == (0, 168)
        assert dp.expected_stable == 2 ** 8 + 1
        assert dp.stabilized is True  # vacuous below level 2


class TestStarDendrite:
    def test_arm_one(self):
        sd = star_dendrite(1)
        arm = next(a for a in sd.arms if a.index == 1)
        assert arm.angle_coeff == Fraction(1, 2)
        assert arm.length == 1
        assert isclose(arm.angle_float, pi / 2, abs_tol=1e-12)

    def test_arm_minus_two(self):
        sd = star_dendrite(2)
        arm = next(a for a in sd.arms if a.index == -2)
        assert arm.angle_coeff == Fraction(-3, 4)
        assert arm.length == Fraction(1, 2)

    def test_count_one_is_path(self):
        sd = star_dendrite(1)
        assert validate_tree(sd.tree).ok
        assert len(sd.tree.vertices) == 3
        assert max(len(ws) for ws in sd.tree.adjacency.values()) == 2

    def test_json_marks_floats_approximate(self):
        payload = star_to_json(star_dendrite(3))
        assert all(arm["floats_approximate"] for arm in payload["arms"])
        assert payload["arms"][0]["angle_pi_multiple"].count("/") == 1

    def test_svg(self):
        svg = star_to_svg(star_dendrite(4))
        assert svg.count("<line") == 8


class TestDecorations:
    def test_trivial_action_single_pendant(self):
        sys_ = trivial_system()
        dec = attach_decorations(sys_, "0|e")
        assert len(dec.pendants) == 1
        assert dec.pendants[0].length == 1
        assert validate_tree(dec.action.tree).ok
        dec.action.validate()

    def test_full_orbit_pendants(self, tower321):
        leaf = tower321.levels[1].tree.leaves()[0]
        dec = attach_decorations(tower321, leaf)
        assert len(dec.pendants) == 168
        assert [p.length for p in dec.pendants[:3]] == [
            Fraction(1, 1), Fraction(1, 2), Fraction(1, 3),
        ]
        dec.action.validate()
        # generators permute pendant tips transitively with the leaf orbit
        res = orbit(dec.action, dec.pendants[0].tip)
        assert len(res) == 168

    def test_seed_must_be_leaf(self, tower321):
        with pytest.raises(TowerError, match="leaf"):
            attach_decorations(tower321, "0|e")


class TestProjectionGrowth:
    def test_depth_zero(self):
        sys_ = trivial_system()
        dec = attach_decorations(sys_, "0|e")
        growth = projection_orbit_growth(sys_, dec, dec.pendants[0].tip)
        assert growth.sizes == (1,)

    def test_depth_one(self, tower321):
        leaf = tower321.levels[1].tree.leaves()[0]
        dec = attach_decorations(tower321, leaf)
        growth = projection_orbit_growth(tower321, dec, dec.pendants[0].tip)
        assert growth.sizes == (1, 168)
        assert growth.strictly_increasing()


class TestSubdivideAction:
    def test_midpoints_follow_generators(self, tower321):
        act = subdivide_action(tower321.levels[1])
        act.validate()
        assert len(act.tree.vertices) == 169 + 168


class TestDepthTwoCounts:
    def test_vertex_count_is_sum_of_quotient_orders(self, tower322):
        sys_, _ = tower322
        for a, act in enumerate(sys_.levels):
            assert len(act.tree.vertices) == sum(sl_order(3, 2, b) for b in range(a + 1))

    def test_level_indexing_by_prefix(self, tower322):
        sys_, _ = tower322
        tree = sys_.levels[2].tree
        by_level = {}
        for v in tree.vertices:
            by_level[v.split("|")[0]] = by_level.get(v.split("|")[0], 0) + 1
        assert by_level == {"0": 1, "1": 168, "2": 43008}

    def test_root_and_internal_degrees(self, tower322):
        sys_, _ = tower322
        adj = sys_.levels[2].tree.adjacency
        assert len(adj["0|e"]) == 168
        lvl1_degrees = {len(adj[v]) for v in adj if v.startswith("1|")}
        assert lvl1_degrees == {257}


class TestSerialization:
    def test_round_trip_depth_one(self, tower321):
        payload = system_to_json(tower321)
        again = system_from_json(payload)
        assert again.provenance["p"] == 2
        rep = verify_all_bonds(again)
        assert rep.passed
        assert [a.tree.vertices for a in again.levels] == [
            a.tree.vertices for a in tower321.levels
        ]

    def test_json_is_deterministic(self, tower321):
        a = json.dumps(system_to_json(tower321), sort_keys=True)
        b = json.dumps(system_to_json(build_congruence_tower(3, 2, 1)), sort_keys=True)
        assert a == b
