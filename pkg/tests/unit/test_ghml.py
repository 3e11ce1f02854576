import pytest

from src import corpus
from src.engine.bisim import minimize
from src.engine.ghml import (
    format_formula,
    mc_gst,
    mc_gst_batch,
    mc_gst_direct,
    mc_kripke,
    parse_formula,
    satisfying_states,
    to_ghml,
    to_hml,
)
from src.engine.surrogate import build_surrogate
from src.models.exec_words import dense, point, word
from src.models.formula import (
    TRUE,
    And,
    Diamond,
    Not,
    Prop,
    box,
    conj_all,
    implies,
    modal_depth,
    variables,
)
from src.models.kripke import kripke
from src.random_models import FORMULA_WORDS, random_formula, random_gst, random_kripke
from src.utils.errors import ParseError

DA = word(dense("a"))
PA = word(point("a"))


class TestParseFormula:
    """Test formula parsing and printing."""

    def test_diamond(self):
        assert parse_formula("<D a> true") == Diamond(DA, TRUE)

    def test_box_sugar(self):
        assert parse_formula("[D a] false") == box(DA, Not(TRUE))
        assert parse_formula("[D a] false") == Not(Diamond(DA, Not(Not(TRUE))))

    def test_word_is_normalized(self):
        assert parse_formula("<D a, D a> true") == Diamond(DA, TRUE)

    def test_precedence(self):
        f = parse_formula("@p & @q | ~@r -> true")
        assert f == implies(
            Not(And(Not(And(Prop("p"), Prop("q"))), Not(Not(Prop("r"))))),
            TRUE,
        )

    def test_implication_is_right_associative(self):
        assert parse_formula("@p -> @q -> @r") == implies(Prop("p"), implies(Prop("q"), Prop("r")))

    def test_modality_binds_tighter_than_and(self):
        assert parse_formula("<D a> @p & @q") == And(Diamond(DA, Prop("p")), Prop("q"))

    def test_unexpected_end(self):
        with pytest.raises(ParseError, match="unexpected end") as exc:
            parse_formula("<D a>")
        assert exc.value.position == 5

    def test_bad_word_position(self):
        with pytest.raises(ParseError) as exc:
            parse_formula("~<Q a> true")
        assert exc.value.position == 2

    def test_unbalanced_parenthesis(self):
        with pytest.raises(ParseError):
            parse_formula("(true & true")

    def test_trailing_text(self):
        with pytest.raises(ParseError, match="unexpected"):
            parse_formula("true true")

    def test_format(self):
        f = parse_formula("@p & <D a, P b> ~true")
        assert format_formula(f) == "(@p & <D a, P b> ~true)"

    def test_format_parses_back(self, rng):
        for _ in range(30):
            f = random_formula(rng, props=("p",))
            assert parse_formula(format_formula(f)) == f


class TestFormulaHelpers:
    """Test the derived connectives and formula measures."""

    def test_modal_depth(self):
        assert modal_depth(parse_formula("<D a> (true & <P a> @p)")) == 2

    def test_variables(self):
        assert variables(parse_formula("@p & ~<D a> @q")) == {"p", "q"}

    def test_conj_all(self):
        assert conj_all([]) == TRUE
        assert conj_all([Prop("p"), Prop("p"), Prop("q")]) == And(Prop("p"), Prop("q"))


class TestMcKripke:
    """Test model checking on finite Kripke structures."""

    def test_move_available(self, m_structure):
        assert mc_kripke(m_structure, "s0", parse_formula("<D a> true"))

    def test_reach_deadlock(self, m_structure):
        assert mc_kripke(m_structure, "s0", parse_formula("<D a> ~<D a> true"))

    def test_deadlock(self, m_structure):
        assert not mc_kripke(m_structure, "s1", parse_formula("<D a> true"))

    def test_unknown_variable_is_false(self, m_structure):
        assert not mc_kripke(m_structure, "s0", Prop("missing"))

    def test_props(self):
        ks = kripke(["x", "y"], [("x", DA, "y")], {"p": ["y"]})
        assert satisfying_states(ks, parse_formula("<D a> @p")) == {"x"}

    def test_invariant_under_minimization(self, rng):
        for _ in range(30):
            ks = random_kripke(rng, props=("p",))
            partition, q = minimize(ks)
            f = random_formula(rng, 3, FORMULA_WORDS[:3], ("p",))
            for s in ks.states:
                assert mc_kripke(ks, s, f) == mc_kripke(q, f"B{partition.block_of(s)}", f)

    def test_diamond_monotonicity(self, rng):
        for _ in range(20):
            ks = random_kripke(rng, props=("p",))
            phi = random_formula(rng, 2, FORMULA_WORDS[:3], ("p",))
            psi = random_formula(rng, 2, FORMULA_WORDS[:3], ("p",))
            everywhere = frozenset(ks.states)
            if satisfying_states(ks, implies(phi, psi)) != everywhere:
                continue
            for w in FORMULA_WORDS[:3]:
                assert satisfying_states(ks, implies(Diamond(w, phi), Diamond(w, psi))) == everywhere


class TestMcGst:
    """Test model checking of GSTs through the surrogate."""

    def test_dense_move(self, g_unit):
        assert mc_gst(g_unit, parse_formula("<D a> true"))

    def test_no_immediate_successor(self, g_unit):
        assert not mc_gst(g_unit, parse_formula("<P a> true"))

    def test_density(self, g_unit):
        assert mc_gst(g_unit, parse_formula("<D a> <D a> <D a> true"))

    def test_direct_checker(self, g_unit):
        assert mc_gst_direct(g_unit, parse_formula("<D a> true"), 2)
        assert not mc_gst_direct(g_unit, parse_formula("<P a> true"), 2)
        assert mc_gst_direct(g_unit, parse_formula("<D a> <D a> <D a> true"), 2)

    def test_direct_checker_needs_two_samples(self, g_unit):
        with pytest.raises(ValueError):
            mc_gst_direct(g_unit, TRUE, 1)

    def test_checkers_agree_on_corpus(self, rng):
        words = (*FORMULA_WORDS, word(point("b")), word(dense("a"), point("b")))
        for name in corpus.GST_NAMES:
            g = corpus.gst(name)
            for _ in range(15):
                f = random_formula(rng, 3, words)
                assert mc_gst(g, f) == mc_gst_direct(g, f, 2), (name, format_formula(f))

    def test_checkers_agree_on_random_gsts(self, rng):
        for _ in range(200):
            g = random_gst(rng)
            f = random_formula(rng, 4)
            assert mc_gst(g, f) == mc_gst_direct(g, f, 2), format_formula(f)

    def test_batch_matches_single_checks(self, g_dense, rng):
        formulas = [random_formula(rng, 3) for _ in range(20)]
        assert mc_gst_batch(g_dense, formulas) == [mc_gst(g_dense, f) for f in formulas]
        assert mc_gst_batch(g_dense, []) == []


class TestTranslation:
    """Test the translation between GHML and HML formulas."""

    def test_identity_on_words(self):
        f = parse_formula("<D a> @p")
        assert to_hml(f) == f
        assert to_ghml(to_hml(f)) == f

    def test_recurses(self):
        f = Not(And(Diamond(DA, TRUE), Diamond(PA, TRUE)))
        assert to_hml(f) == f

    def test_surrogate_answers_match(self, g_unit):
        ks = build_surrogate(g_unit)
        f = parse_formula("<D a> ~<D a> true")
        assert mc_gst(g_unit, f) == mc_kripke(ks, "r", to_hml(f))


def test_unknown_variable_warns(m_structure, mocker):
    log = mocker.patch("src.engine.ghml.logger")
    satisfying_states(m_structure, Prop("missing"))
    log.warning.assert_called_once_with("ghml.unknown_variable", variable="missing", structure="m")
