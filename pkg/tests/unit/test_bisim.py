import pytest

from src import corpus
from src.engine.bisim import (
    BisimVerdict,
    Partition,
    PartitionRefinement,
    bisim,
    coarsest_partition,
    distinguishing_formula,
    formula_basis,
    gst_formula_basis,
    level_at,
    minimize,
    naive_bisimulation,
    quotient,
    refinement_levels,
    simulate,
    stratified,
    strong_bisim_discrete,
    weak_bisim_gst,
)
from src.engine.ghml import format_formula, mc_gst, mc_gst_batch, mc_kripke, satisfying_states
from src.engine.gst_model import from_discrete_st
from src.engine.lazy import Family, LazyKripke
from src.engine.surrogate import build_surrogate, sampled_surrogate
from src.models.exec_words import dense, word
from src.models.formula import TRUE, Diamond, modal_depth
from src.models.kripke import KripkeStructure, disjoint_union, kripke, tag_state
from src.random_models import random_discrete_gst, random_gst, random_kripke
from src.utils.errors import BisimilarPairError, UnknownStateError, UnsupportedModelError

DA = word(dense("a"))


class TestPartitionRefinement:
    """Test the splitter-driven block refinement."""

    def test_split_keeps_untouched_blocks(self):
        refinement = PartitionRefinement([{"a", "b", "c"}, {"d"}])
        changed = refinement.refine({"a", "d"})
        assert len(changed) == 1
        assert sorted(map(sorted, refinement.blocks.values())) == [["a"], ["b", "c"], ["d"]]

    def test_whole_block_hit_is_not_split(self):
        refinement = PartitionRefinement([{"a", "b"}])
        assert refinement.refine({"a", "b"}) == []


class TestMinimize:
    """Test coarsest partitions and quotient structures."""

    def test_unit_surrogate(self, g_unit):
        partition, q = minimize(build_surrogate(g_unit))
        assert partition.blocks == (frozenset({"r", "e1.int"}), frozenset({"t"}))
        assert q.states == ("B0", "B1")
        assert q.initial == "B0"

    def test_single_state(self, deadlock: KripkeStructure):
        partition, _ = minimize(deadlock)
        assert len(partition) == 1

    def test_dense_attachment_surrogate(self, g_dense):
        ks = build_surrogate(g_dense)
        partition, _ = minimize(ks)
        assert len(partition) == 3
        assert partition.same_block("e1.att0/u", "t")
        assert not partition.same_block("e1.att0", "e1.int")
        assert naive_bisimulation(ks) == partition

    def test_m_is_already_minimal(self, m_structure: KripkeStructure):
        partition, q = minimize(m_structure)
        assert len(partition) == 2
        assert len(q.transitions) == len(m_structure.transitions)

    def test_valuation_separates_blocks(self):
        ks = kripke(["x", "y"], [], {"p": ["x"]})
        assert len(coarsest_partition(ks)) == 2

    def test_quotient_keeps_valuation(self):
        ks = kripke(["x", "y", "z"], [("x", DA, "z"), ("y", DA, "z")], {"p": ["x", "y"]}, "x")
        partition = coarsest_partition(ks)
        q = quotient(ks, partition)
        assert q.valuation["p"] == frozenset({"B0"})

    def test_agrees_with_naive_refinement(self, rng):
        for _ in range(100):
            ks = random_kripke(rng)
            assert coarsest_partition(ks) == naive_bisimulation(ks)


class TestBisim:
    """Test bisimilarity across two structures."""

    def test_unit_surrogate_and_m(self, g_unit, m_structure):
        verdict = bisim(build_surrogate(g_unit), "r", m_structure, "s0")
        assert verdict.equivalent
        assert ("r", "s0") in verdict.relation
        assert ("t", "s1") in verdict.relation

    def test_m_and_deadlock(self, m_structure, deadlock):
        verdict = bisim(m_structure, "s0", deadlock, "d")
        assert not verdict.equivalent
        assert format_formula(verdict.formula) == "<D a> true"

    def test_root_and_interior(self, g_unit):
        ks = build_surrogate(g_unit)
        assert bisim(ks, "r", ks, "e1.int").equivalent

    def test_unknown_state(self, m_structure):
        with pytest.raises(UnknownStateError):
            bisim(m_structure, "nope", m_structure, "s0")


class TestSimulate:
    """Test the simulation preorder."""

    def test_deadlock_is_simulated(self, deadlock, m_structure):
        assert simulate(deadlock, "d", m_structure, "s0")

    def test_moves_need_matching(self, m_structure, deadlock):
        assert not simulate(m_structure, "s0", deadlock, "d")

    def test_prefix_is_simulated(self):
        short = build_surrogate(corpus.gst("point"))
        longer = build_surrogate(corpus.gst("chain"))
        assert simulate(short, "r", longer, "r")
        assert not simulate(longer, "r", short, "r")

    def test_bisimilar_states_simulate_each_other(self, rng):
        for _ in range(20):
            ks = random_kripke(rng)
            partition = coarsest_partition(ks)
            for s in ks.states:
                for t in ks.states:
                    if partition.same_block(s, t):
                        assert simulate(ks, s, ks, t)


class TestStratified:
    """Test depth-bounded equivalence on finite and lazy structures."""

    def test_deadlock_splits_at_first_step(self, m_structure):
        result = stratified(m_structure, "s0", "s1", 3)
        assert result.depth == 0
        assert not result.agrees

    def test_bisimilar_pair_agrees_everywhere(self, g_unit):
        result = stratified(build_surrogate(g_unit), "r", "e1.int", 5)
        assert result.depth == 5
        assert result.agrees

    def test_valuations_differ(self):
        ks = kripke(["x", "y"], [], {"p": ["x"]})
        assert stratified(ks, "x", "y", 3).depth == -1

    def test_fig3_pair(self, fig3):
        for k in range(9):
            assert stratified(fig3.structure, fig3.u, fig3.v, k).agrees

    def test_gx_branch_points_separate(self, gx):
        result = stratified(gx, "A2", "A3", 8)
        assert result.depth == 2
        assert not result.agrees

    def test_exhausted_hint_reports_unknown(self):
        family = Family("f", lambda n: f"x{n}", lambda d: None)

        def successors(state: str):
            if state == "s":
                return [(DA, family)]
            if state == "t":
                return [(DA, "x0")]
            return []

        lz = LazyKripke("partial", ("s",), successors)
        result = stratified(lz, "s", "t", 3)
        assert result.depth == 0
        assert result.unknown_beyond == 0

    def test_levels_stop_once_stable(self, m_structure):
        levels = refinement_levels(m_structure, 10)
        assert len(levels) == 3
        assert level_at(levels, 0)["s0"] == level_at(levels, 0)["s1"]
        assert level_at(levels, 7)["s0"] != level_at(levels, 7)["s1"]

    def test_negative_depth(self, m_structure):
        with pytest.raises(ValueError):
            stratified(m_structure, "s0", "s1", -1)

    def test_state_count_depth_decides_bisimilarity(self, rng):
        for _ in range(100):
            ks1 = random_kripke(rng, props=("p",), name="first")
            ks2 = random_kripke(rng, props=("p",), name="second")
            union = disjoint_union(ks1, ks2)
            bound = len(ks1.states) + len(ks2.states)
            agrees = stratified(union, tag_state("L:", ks1.initial), tag_state("R:", ks2.initial), bound).agrees
            assert agrees == bisim(ks1, ks1.initial, ks2, ks2.initial).equivalent


class TestDistinguishingFormula:
    """Test formulas separating non-bisimilar states."""

    def test_m_and_deadlock(self, m_structure, deadlock):
        f = distinguishing_formula(m_structure, "s0", deadlock, "d")
        assert format_formula(f) == "<D a> true"

    def test_inside_m(self, m_structure):
        f = distinguishing_formula(m_structure, "s0", m_structure, "s1")
        assert format_formula(f) == "<D a> true"

    def test_attach_point_against_interior(self, g_dense):
        ks = build_surrogate(g_dense)
        f = distinguishing_formula(ks, "e1.att0", ks, "e1.int")
        assert format_formula(f) == "<P b> true"
        assert mc_kripke(ks, "e1.att0", f)
        assert not mc_kripke(ks, "e1.int", f)

    def test_bisimilar_pair_rejected(self, g_unit):
        ks = build_surrogate(g_unit)
        with pytest.raises(BisimilarPairError):
            distinguishing_formula(ks, "r", ks, "e1.int")

    def test_random_pairs(self, rng):
        checked = 0
        while checked < 100:
            ks1 = random_kripke(rng, props=("p", "q"), name="first")
            ks2 = random_kripke(rng, props=("p", "q"), name="second")
            if bisim(ks1, ks1.initial, ks2, ks2.initial).equivalent:
                continue
            f = distinguishing_formula(ks1, ks1.initial, ks2, ks2.initial)
            assert mc_kripke(ks1, ks1.initial, f)
            assert not mc_kripke(ks2, ks2.initial, f)
            checked += 1


class TestFormulaBasis:
    """Test the depth-bounded formula basis."""

    def test_m_and_deadlock(self, m_structure, deadlock):
        assert formula_basis(disjoint_union(m_structure, deadlock)) == [Diamond(DA, TRUE)]

    def test_single_class_has_empty_basis(self):
        assert formula_basis(kripke(["x", "y"], [])) == []

    def test_depth_bounds_the_formulas(self, rng):
        for _ in range(30):
            ks = random_kripke(rng, props=("p",))
            for depth in (0, 1, 2):
                assert all(modal_depth(f) <= depth for f in formula_basis(ks, depth))

    def test_agreement_on_basis_is_depth_agreement(self, rng):
        for _ in range(50):
            ks = random_kripke(rng, props=("p",))
            for depth in (0, 1, 2, len(ks.states)):
                level = level_at(refinement_levels(ks, depth), depth)
                basis = formula_basis(ks, depth)
                truth = {s: tuple(s in satisfying_states(ks, f) for f in basis) for s in ks.states}
                for s in ks.states:
                    for t in ks.states:
                        assert (truth[s] == truth[t]) == (level[s] == level[t])

    def test_negative_depth(self, m_structure):
        with pytest.raises(ValueError):
            formula_basis(m_structure, -1)

    def test_gst_pair_separated_by_basis(self, g_unit):
        g2 = corpus.gst("unit_b")
        basis = gst_formula_basis(g_unit, g2)
        assert any(mc_gst(g_unit, f) != mc_gst(g2, f) for f in basis)

    def test_weak_bisimilarity_is_ghml_agreement(self, rng):
        pairs = [(corpus.gst("unit"), corpus.gst("unit_two")), (corpus.gst("denseattach"), corpus.gst("denseattach_alt"))]
        pairs += [(random_gst(rng), random_gst(rng)) for _ in range(50)]
        for g1, g2 in pairs:
            basis = gst_formula_basis(g1, g2)
            agree = mc_gst_batch(g1, basis) == mc_gst_batch(g2, basis)
            assert weak_bisim_gst(g1, g2).equivalent == agree


class TestWeakBisimGst:
    """Test weak bisimilarity of GSTs through their surrogates."""

    def test_relabelled_edge(self, g_unit):
        verdict = weak_bisim_gst(g_unit, corpus.gst("unit_b"))
        assert not verdict.equivalent
        assert format_formula(verdict.formula) == "<D a> true"

    def test_attachment_choice_is_irrelevant(self, g_dense):
        assert weak_bisim_gst(g_dense, corpus.gst("denseattach_alt")).equivalent

    def test_two_dense_edges_merge(self, g_unit):
        verdict = weak_bisim_gst(g_unit, corpus.gst("unit_two"))
        assert isinstance(verdict, BisimVerdict)
        assert verdict.equivalent

    def test_matches_sampled_quotients(self, rng):
        for _ in range(100):
            g1, g2 = random_gst(rng), random_gst(rng)
            _, q1 = minimize(sampled_surrogate(g1, 2))
            _, q2 = minimize(sampled_surrogate(g2, 2))
            sampled = bisim(q1, q1.initial, q2, q2.initial).equivalent
            assert weak_bisim_gst(g1, g2).equivalent == sampled


class TestStrongBisimDiscrete:
    """Test strong bisimilarity of discrete trees."""

    def test_same_chain(self):
        g = corpus.gst("chain")
        assert strong_bisim_discrete(g, g)

    def test_prefix_differs(self):
        assert not strong_bisim_discrete(corpus.gst("point"), corpus.gst("chain"))

    def test_duplicate_children_collapse(self):
        two = from_discrete_st("r", [("r", "a", "x"), ("r", "a", "y")])
        one = from_discrete_st("r", [("r", "a", "x")])
        assert strong_bisim_discrete(two, one)

    def test_dense_rejected(self, g_unit):
        with pytest.raises(UnsupportedModelError, match="only for discrete GSTs"):
            strong_bisim_discrete(g_unit, g_unit)

    def test_strong_implies_weak_on_random_trees(self, rng):
        for _ in range(50):
            g1, g2 = random_discrete_gst(rng, max_edges=3), random_discrete_gst(rng, max_edges=3)
            assert strong_bisim_discrete(g1, g1)
            if strong_bisim_discrete(g1, g2):
                assert weak_bisim_gst(g1, g2).equivalent


def test_partition_lookup():
    partition = Partition((frozenset({"a", "b"}), frozenset({"c"})))
    assert partition.block_of("c") == 1
    assert partition.same_block("a", "b")
    assert len(partition) == 2
