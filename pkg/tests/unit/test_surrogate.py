import pytest

from src import corpus
from src.engine.bisim import bisim, minimize
from src.engine.hm_classes import schemata_check
from src.engine.surrogate import build_surrogate, sample_points, sampled_surrogate
from src.models.exec_words import dense, point, word
from src.models.gst import SymbolicGst
from src.random_models import random_gst
from src.utils.errors import InvalidModelError

DA = word(dense("a"))
PB = word(point("b"))
DA_PB = word(dense("a"), point("b"))


class TestBuildSurrogate:
    """Test the cut-class surrogate construction."""

    def test_unit(self, g_unit: SymbolicGst):
        ks = build_surrogate(g_unit)
        assert ks.states == ("r", "e1.int", "t")
        assert ks.initial == "r"
        assert set(ks.transitions) == {
            ("r", DA, "e1.int"),
            ("r", DA, "t"),
            ("e1.int", DA, "e1.int"),
            ("e1.int", DA, "t"),
        }

    def test_single_point_edge(self):
        ks = build_surrogate(corpus.gst("point"))
        assert ks.transitions == (("r", word(point("a")), "t"),)

    def test_dense_attachment(self, g_dense: SymbolicGst):
        ks = build_surrogate(g_dense)
        assert not ks.has_transition("e1.int", PB, "e1.att0/u")
        assert ks.has_transition("e1.att0", PB, "e1.att0/u")
        assert ks.has_transition("r", DA_PB, "e1.att0/u")

    def test_universal_valuation(self):
        g = corpus.gst("unit")
        with_props = SymbolicGst(g.vertices, g.root, g.edges, props=("p", "q"))
        ks = build_surrogate(with_props)
        assert ks.valuation["p"] == frozenset(ks.states)
        assert ks.valuation["q"] == frozenset(ks.states)

    def test_invalid_gst_rejected(self):
        with pytest.raises(InvalidModelError):
            build_surrogate(SymbolicGst(("r",), "x", ()))

    def test_unit_minimizes_to_two_states(self, g_unit: SymbolicGst):
        partition, quotient = minimize(build_surrogate(g_unit))
        assert len(quotient.states) == 2
        assert partition.same_block("r", "e1.int")

    def test_schemata_hold_on_corpus(self):
        for name in corpus.GST_NAMES:
            assert schemata_check(build_surrogate(corpus.gst(name))).passed, name

    def test_schemata_hold_on_random_gsts(self, rng):
        for _ in range(100):
            g = random_gst(rng)
            assert schemata_check(build_surrogate(g)).passed


class TestSampledSurrogate:
    """Test the sampled concrete surrogate."""

    def test_unit_one_sample(self, g_unit: SymbolicGst):
        ks = sampled_surrogate(g_unit, 1)
        assert len(ks.states) == 3
        assert {w for _, w, _ in ks.transitions} == {DA}

    def test_unit_three_samples(self, g_unit: SymbolicGst):
        ks = sampled_surrogate(g_unit, 3)
        assert len(ks.states) == 5
        _, quotient = minimize(ks)
        assert len(quotient.states) == 2

    def test_attachment_instances_get_their_own_leaves(self, g_dense: SymbolicGst):
        sample = sample_points(g_dense, 2)
        ids = [p.id for p in sample.points]
        assert ids[0] == "r"
        assert "e1.s2/u" in ids and "e1.s4/u" in ids
        assert "e1.s1/u" not in ids

    def test_rejects_non_positive_density(self, g_unit: SymbolicGst):
        with pytest.raises(ValueError):
            sampled_surrogate(g_unit, 0)

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_agrees_with_quotient_on_corpus(self, k: int):
        for name in corpus.GST_NAMES:
            g = corpus.gst(name)
            _, sampled = minimize(sampled_surrogate(g, k))
            _, symbolic = minimize(build_surrogate(g))
            assert bisim(sampled, sampled.initial, symbolic, symbolic.initial).equivalent, name

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_agrees_with_quotient_on_random_gsts(self, rng, k: int):
        for _ in range(30):
            g = random_gst(rng)
            _, sampled = minimize(sampled_surrogate(g, k))
            _, symbolic = minimize(build_surrogate(g))
            assert bisim(sampled, sampled.initial, symbolic, symbolic.initial).equivalent


def test_build_is_logged(g_unit, mocker):
    log = mocker.patch("src.engine.surrogate.logger")
    build_surrogate(g_unit)
    log.debug.assert_called_once_with("surrogate.built", states=3, transitions=4)
