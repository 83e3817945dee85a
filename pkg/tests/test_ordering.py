"""Ball generation, order axioms, the invariant-order search, extraction.

Core claims:
    - balls contain the identity, close under inverses, and match word
      enumeration oracles;
    - the checkers catch exactly the planted violations;
    - the search returns Unsat on torsion (stably under reordering), Sat
      with re-verified witnesses on orderable instances, and a distinct
      budget-exhausted outcome;
    - compactness extraction picks the majority restriction;
    - the bounded domination test matches hand-computed verdicts.
"""

import json

import pytest
import oracles
from treeact.matrices import GroupMatrix, elementary
from treeact.ordering import (
    OrderAssignment,
    OrderingError,
    QuasiOrderSample,
    SearchBudgetExhausted,
    assignment_from_json,
    assignment_to_json,
    ball_from_json,
    ball_generate,
    ball_to_json,
    check_axioms,
    check_invariance,
    compactness_extract,
    format_word,
    ll_test,
    search_invariant,
)
from treeact.matrices import CapExceeded


def z_gen():
    return elementary(2, 1, 2, 1)


def z_ball(radius):
    return ball_generate([z_gen()], radius, ["g"])


def natural_order(ball):
    ascending = sorted(ball.elements, key=lambda m: m.entries[1])
    return OrderAssignment.from_total_order(ball, ascending)


class TestBallGenerate:
    def test_radius_zero(self):
        b = ball_generate([z_gen()], 0, ["g"])
        assert len(b) == 1 and b.elements[0].is_identity()

    def test_z_radius_two(self):
        assert len(z_ball(2)) == 5

    def test_identity_and_inverse_closure(self):
        a, c = elementary(3, 1, 2, 1), elementary(3, 2, 3, 1)
        b = ball_generate([a, c], 3, ["a", "b"])
        assert GroupMatrix.identity(3) in b
        for g in b.elements:
            assert g.inverse() in b

    def test_heisenberg_commutator_depth(self):
        a, c = elementary(3, 1, 2, 1), elementary(3, 2, 3, 1)
        u13 = elementary(3, 1, 3, 1)
        b2 = ball_generate([a, c], 2, ["a", "b"])
        b4 = ball_generate([a, c], 4, ["a", "b"])
        assert u13 not in b2
        assert u13 in b4
        # word-enumeration oracle agrees on both counts
        gens = [oracles.unipotent(3, 1, 2, 1), oracles.unipotent(3, 2, 3, 1)]
        assert len(oracles.words_up_to(gens, 2)) == len(b2)
        assert len(oracles.words_up_to(gens, 4)) == len(b4)

    def test_words_recover_elements(self):
        b = z_ball(3)
        for g in b.elements:
            acc = GroupMatrix.identity(2)
            for name, e in b.word(g):
                acc = acc * (z_gen() if e == 1 else z_gen().inverse())
            assert acc == g

    def test_cap(self):
        with pytest.raises(CapExceeded, match="ball exceeds cap"):
            ball_generate([elementary(3, 1, 2, 1), elementary(3, 2, 3, 1)], 5, cap=10)


class TestCheckAxioms:
    def test_total_order_passes(self):
        b = z_ball(2)
        assert check_axioms(natural_order(b)).passed

    def test_transitivity_violation(self):
        b = z_ball(1)  # 3 elements
        signs = {(0, 1): 1, (1, 2): 1, (0, 2): -1}
        phi = OrderAssignment(b, signs)
        rep = check_axioms(phi)
        assert not rep.passed
        assert rep.transitivity_violations

    def test_antisymmetry_violation_rejected_at_construction(self):
        b = z_ball(1)
        with pytest.raises(OrderingError, match="conflicting"):
            OrderAssignment(b, {(0, 1): 1, (1, 0): 1, (0, 2): 1, (1, 2): 1})

    def test_incomplete_assignment(self):
        b = z_ball(1)
        phi = OrderAssignment(b, {(0, 1): 1})
        with pytest.raises(OrderingError, match="incomplete assignment"):
            check_axioms(phi)


class TestCheckInvariance:
    def test_natural_translation_invariant(self):
        inner, outer = z_ball(2), z_ball(3)
        phi = natural_order(outer)
        rep = check_invariance(phi, [z_gen()], inner, outer)
        assert rep.passed

    def test_torsion_obstruction(self):
        t = GroupMatrix.from_rows([[-1, 0], [0, -1]])
        b = ball_generate([t], 1, ["t"])
        phi = OrderAssignment.from_total_order(b, sorted(b.elements, key=lambda m: m.entries))
        rep = check_invariance(phi, [t], b, b)
        assert not rep.passed

    def test_identity_invariance(self):
        b = z_ball(2)
        phi = natural_order(b)
        assert check_invariance(phi, [GroupMatrix.identity(2)], b, b).passed

    def test_containment_error(self):
        inner = z_ball(3)
        phi = natural_order(inner)
        with pytest.raises(OrderingError, match="ball containment"):
            check_invariance(phi, [z_gen()], inner, inner)


class TestSearch:
    def torsion(self, rows, radius=1):
        t = GroupMatrix.from_rows(rows)
        b = ball_generate([t], radius, ["t"])
        b2 = ball_generate([t], radius + 1, ["t"])
        return t, b, b2

    @pytest.mark.parametrize(
        "rows,radius",
        [
            ([[-1, 0], [0, -1]], 1),          # order 2
            ([[0, -1], [1, -1]], 1),          # order 3
            ([[0, -1], [1, 0]], 2),           # order 4: ball must wrap the cycle
        ],
    )
    def test_torsion_unsat(self, rows, radius):
        t, b, b2 = self.torsion(rows, radius)
        res = search_invariant([t], b, b2)
        assert res.status == "unsat"
        assert res.trace is not None
        assert res.trace.forcing_chain

    def test_order_four_small_ball_is_genuinely_sat(self):
        # with the radius-1 ball {e, t, t^3} the invariance constraints do
        # not wrap the 4-cycle, and a consistent order exists; the torsion
        # obstruction needs the whole cyclic subgroup inside the inner ball
        t, b, b2 = self.torsion([[0, -1], [1, 0]], 1)
        res = search_invariant([t], b, b2)
        assert res.is_sat

    @pytest.mark.parametrize("seed", [None, 1, 7, 1234])
    def test_torsion_unsat_stable_under_reordering(self, seed):
        t, b, b2 = self.torsion([[-1, 0], [0, -1]])
        res = search_invariant([t], b, b2, shuffle_seed=seed)
        assert res.status == "unsat"

    def test_z_sat_natural_witness(self):
        inner, outer = z_ball(3), z_ball(4)
        f = [z_gen(), z_gen().inverse()]
        res = search_invariant(f, inner, outer)
        assert res.is_sat
        assert check_axioms(res.witness).passed
        assert check_invariance(res.witness, f, inner, outer).passed
        exponents = [m.entries[1] for m in res.witness.ascending()]
        assert exponents == sorted(exponents)

    def test_z2_sat(self):
        a, c = elementary(3, 1, 2, 1), elementary(3, 1, 3, 1)
        inner = ball_generate([a, c], 1, ["a", "b"])
        outer = ball_generate([a, c], 2, ["a", "b"])
        res = search_invariant([a, c], inner, outer)
        assert res.is_sat
        assert check_invariance(res.witness, [a, c], inner, outer).passed

    def test_empty_invariance_set_sat(self):
        inner, outer = z_ball(1), z_ball(2)
        res = search_invariant([], inner, outer)
        assert res.is_sat
        assert check_axioms(res.witness).passed

    def test_deterministic_bytes(self):
        def run():
            inner, outer = z_ball(3), z_ball(4)
            res = search_invariant([z_gen(), z_gen().inverse()], inner, outer)
            return json.dumps(assignment_to_json(res.witness), sort_keys=True)

        assert run() == run()

    def test_trace_deterministic(self):
        t, b, b2 = self.torsion([[-1, 0], [0, -1]])
        one = json.dumps(search_invariant([t], b, b2).trace.to_json(), sort_keys=True)
        two = json.dumps(search_invariant([t], b, b2).trace.to_json(), sort_keys=True)
        assert one == two

    def test_budget_exhaustion_is_not_unsat(self):
        inner, outer = z_ball(3), z_ball(4)
        with pytest.raises(SearchBudgetExhausted, match="search budget exhausted"):
            search_invariant([z_gen()], inner, outer, budget=1)

    def test_heisenberg_sat(self):
        a, c = elementary(3, 1, 2, 1), elementary(3, 2, 3, 1)
        inner = ball_generate([a, c], 1, ["a", "b"])
        outer = ball_generate([a, c], 2, ["a", "b"])
        res = search_invariant([a, c], inner, outer)
        assert res.is_sat


class TestCompactnessExtract:
    def test_constant_chain(self):
        target = z_ball(1)
        chain = [natural_order(z_ball(r)) for r in (1, 2, 3)]
        res = compactness_extract(chain, target)
        assert res.supporters == (0, 1, 2)
        assert res.assignment.sign(z_gen(), GroupMatrix.identity(2)) == 1

    def test_majority_wins(self):
        target = z_ball(1)
        nat = natural_order(z_ball(2))
        rev = OrderAssignment.from_total_order(
            z_ball(2), list(reversed(natural_order(z_ball(2)).ascending()))
        )
        res = compactness_extract([nat, rev, nat], target)
        assert res.supporters == (0, 2)

    def test_tie_breaks_to_canonically_smallest(self):
        target = z_ball(1)
        nat = natural_order(z_ball(2))
        rev = OrderAssignment.from_total_order(
            z_ball(2), list(reversed(natural_order(z_ball(2)).ascending()))
        )
        res = compactness_extract([rev, nat], target)
        # one supporter each; the all-(-1) signature sorts first
        assert res.supporters == (1,)
        assert res.assignment.signs == natural_order(target).signs

    def test_restriction_to_smaller_ball(self):
        target = z_ball(1)
        chain = [natural_order(z_ball(r)) for r in range(1, 7)]
        res = compactness_extract(chain, target)
        assert len(res.supporters) == 6
        asc = res.assignment.ascending()
        assert [m.entries[1] for m in asc] == [-1, 0, 1]

    def test_insufficient_chain(self):
        target = z_ball(3)
        chain = [natural_order(z_ball(1))]
        with pytest.raises(OrderingError, match="insufficient chain"):
            compactness_extract(chain, target)

    def test_agreement_with_supporters(self):
        target = z_ball(1)
        chain = [natural_order(z_ball(r)) for r in (2, 3)]
        res = compactness_extract(chain, target)
        for k in res.supporters:
            for i in range(len(target)):
                for j in range(len(target)):
                    if i != j:
                        g, h = target.elements[i], target.elements[j]
                        assert res.assignment.sign(g, h) == chain[k].sign(g, h)


class TestOrderFromAction:
    @staticmethod
    def arc_action():
        from treeact.tower import FiniteTreeAction
        from treeact.trees import Tree, TreeAutomorphism

        tree = Tree(("z", "p1", "p2"), (("z", "p1"), ("p1", "p2")))
        gens = {"t": TreeAutomorphism.identity(tree.vertices)}
        return FiniteTreeAction(tree, gens)

    def test_identity_ball_gives_empty_assignment(self):
        from treeact.ordering import order_from_action

        t = GroupMatrix.from_rows([[-1, 0], [0, -1]])
        b = ball_generate([t], 0, ["t"])
        phi = order_from_action(self.arc_action(), "z", ["p1", "p2"], b)
        assert phi.signs == {}

    def test_trivial_action_cannot_separate(self):
        from treeact.ordering import order_from_action

        t = GroupMatrix.from_rows([[-1, 0], [0, -1]])
        b = ball_generate([t], 1, ["t"])
        with pytest.raises(OrderingError, match="probes insufficient"):
            order_from_action(self.arc_action(), "z", ["p1", "p2"], b)

    def test_generator_must_fix_z(self):
        from treeact.tower import FiniteTreeAction
        from treeact.trees import Tree, TreeAutomorphism
        from treeact.ordering import order_from_action

        tree = Tree(("z", "c", "w"), (("z", "c"), ("c", "w")))
        flip = TreeAutomorphism({"z": "w", "c": "c", "w": "z"})
        act = FiniteTreeAction(tree, {"t": flip})
        t = GroupMatrix.from_rows([[-1, 0], [0, -1]])
        b = ball_generate([t], 1, ["t"])
        with pytest.raises(OrderingError, match="fix z"):
            order_from_action(act, "z", ["c"], b)

    def test_images_leaving_the_arc_are_rejected(self):
        # an arm swap fixes z but throws probe images onto a branch
        from treeact.tower import FiniteTreeAction
        from treeact.trees import Tree, TreeAutomorphism
        from treeact.ordering import order_from_action

        tree = Tree(
            ("z", "c", "a1", "b1"),
            (("z", "c"), ("c", "a1"), ("c", "b1")),
        )
        swap = TreeAutomorphism({"z": "z", "c": "c", "a1": "b1", "b1": "a1"})
        act = FiniteTreeAction(tree, {"t": swap})
        t = GroupMatrix.from_rows([[-1, 0], [0, -1]])
        b = ball_generate([t], 1, ["t"])
        with pytest.raises(OrderingError, match="common arc"):
            order_from_action(act, "z", ["a1"], b)


class TestDominationTest:
    @staticmethod
    def shift_sample():
        # elements are 2x2 unipotent powers acting on integer probes by
        # adding their upper-right entry
        return QuasiOrderSample(
            probes=(0, 5),
            apply=lambda g, x: x + g.entries[1],
            position=lambda x: x,
        )

    def test_fixed_below_moving(self):
        s = self.shift_sample()
        verdict = ll_test(s, GroupMatrix.identity(2), z_gen(), 25)
        assert verdict.holds and verdict.via == "h"

    def test_two_translations_fail_at_two(self):
        s = self.shift_sample()
        verdict = ll_test(s, z_gen(), z_gen(), 3)
        assert not verdict.holds
        assert verdict.failed_at == 2

    def test_self_comparison_fails_at_two(self):
        s = self.shift_sample()
        verdict = ll_test(s, z_gen(), z_gen(), 5)
        assert verdict.failed_at == 2

    def test_power_cap_validation(self):
        with pytest.raises(OrderingError):
            ll_test(self.shift_sample(), z_gen(), z_gen(), 0)


class TestSerialization:
    def test_ball_round_trip(self):
        b = z_ball(2)
        again = ball_from_json(ball_to_json(b))
        assert again.elements == b.elements
        assert again.names == b.names

    def test_assignment_round_trip(self):
        phi = natural_order(z_ball(2))
        again = assignment_from_json(assignment_to_json(phi))
        assert again.signs == phi.signs

    def test_format_word(self):
        b = z_ball(2)
        words = {format_word(b.word(g)) for g in b.elements}
        assert "e" in words and "g" in words and "g^-1" in words
