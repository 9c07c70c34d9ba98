"""Tests for the powerset and counting determinizations and the classical oracle."""

import pytest

from spanauto.spans import FinSet, Span, Token
from spanauto.automata import (
    BaseGraph,
    DetAutomaton,
    SpanAutomaton,
    Word,
    accepted,
    count_paths,
    enumerate_words,
    language,
    unique_lift_check,
)
from spanauto.determinize import (
    ClassicalNFA,
    classical_subset_construction,
    det_span,
    mdet,
    mdet_accept_count,
    mdet_expand,
    mdet_run,
    prune_reachable,
    reachable_iso_check,
    rel_of,
    span_automaton_of_classical,
)
from spanauto.fixtures import two_phase_example, two_state_classical, two_state_example


class TestRelOf:
    def test_fixture_relations(self):
        r = rel_of(two_state_example())
        assert r.transitions["a"].pairs == {("1", "1"), ("1", "2")}
        assert r.transitions["b"].pairs == {("1", "2"), ("2", "2")}

    def test_doubled_tokens_collapse(self):
        base = BaseGraph(["n"], [("e", "e", "n", "n")])
        q = FinSet("Q", ["1"])
        a = SpanAutomaton(
            base, {"n": q}, {"e": Span(q, q, [Token("u", "1", "1"), Token("v", "1", "1")])}, "1", {"1"}
        )
        assert rel_of(a).transitions["e"].pairs == {("1", "1")}

    def test_language_preserved(self):
        a = two_state_example()
        r = rel_of(a)
        for w in enumerate_words(a.base, "s", 6):
            assert accepted(a, w) == accepted(r, w)


class TestDet:
    def test_fixture_exact_structure(self):
        d = det_span(two_state_example())
        assert list(d.fibers["s"]) == ["{}", "{1}", "{2}", "{1,2}"]
        assert d.transitions["a"] == {"{}": "{}", "{1}": "{1,2}", "{2}": "{}", "{1,2}": "{1,2}"}
        assert d.transitions["b"] == {"{}": "{}", "{1}": "{2}", "{2}": "{2}", "{1,2}": "{2}"}
        assert d.initial == "{1}"
        assert d.finals == {"{2}", "{1,2}"}

    def test_empty_relations_sink(self):
        base = BaseGraph(["n"], [("e", "e", "n", "n")])
        q = FinSet("Q", ["1"])
        a = SpanAutomaton(base, {"n": q}, {"e": Span(q, q, [])}, "1", {"1"})
        d = det_span(a)
        assert d.transitions["e"] == {"{}": "{}", "{1}": "{}"}

    def test_two_phase_states_stay_single_fiber(self):
        d = det_span(two_phase_example())
        assert len(d.fibers["c"]) == 4
        assert len(d.fibers["d"]) == 8
        # every determinized state is a subset of exactly one original fiber
        left = set(two_phase_example().fibers["c"].elements)
        right = set(two_phase_example().fibers["d"].elements)
        for node, original in (("c", left), ("d", right)):
            for lbl in d.fibers[node]:
                prefix, _, subset = lbl.partition(":")
                assert prefix == node
                members = set(subset.strip("{}").split(",")) - {""}
                assert members <= original

    def test_language_preserved_up_to_six(self):
        for a in (two_state_example(), two_phase_example()):
            d = det_span(a)
            for w in enumerate_words(a.base, a.initial_node, 6):
                assert accepted(a, w) == accepted(d, w)

    def test_powerset_cap(self):
        big = FinSet("Q", [f"q{i}" for i in range(6)])
        base = BaseGraph(["n"], [("e", "e", "n", "n")])
        a = SpanAutomaton(base, {"n": big}, {"e": Span(big, big, [])}, "q0", set())
        with pytest.raises(ValueError):
            det_span(a, powerset_cap=5)

    def test_passes_unique_lift(self):
        assert unique_lift_check(det_span(two_state_example()), 4)
        assert unique_lift_check(det_span(two_phase_example()), 3)

    def test_random_determinizations_pass_unique_lift(self):
        import random
        from genlib import random_span_automaton

        rng = random.Random(78)
        for _ in range(10):
            a = random_span_automaton(rng, max_nodes=2, max_states=3, word_cap=150, path_cap=300)
            assert unique_lift_check(det_span(a), 3)


class TestMDet:
    def test_fixture_matrices(self):
        m = mdet(two_state_example())
        assert m.matrices["a"].rows() == [[1, 1], [0, 0]]
        assert m.matrices["b"].rows() == [[0, 1], [0, 1]]
        assert dict(m.initial_vector.counts) == {"1": 1}

    def test_deterministic_input_gives_permutation_rows(self):
        base = BaseGraph(["n"], [("e", "e", "n", "n")])
        q = FinSet("Q", ["1", "2"])
        a = SpanAutomaton(
            base, {"n": q}, {"e": Span(q, q, [Token("u", "1", "2"), Token("v", "2", "2")])}, "1", {"2"}
        )
        rows = mdet(a).matrices["e"].rows()
        assert all(sum(row) == 1 and max(row) == 1 for row in rows)

    def test_empty_span_zero_matrix(self):
        base = BaseGraph(["n"], [("e", "e", "n", "n")])
        q = FinSet("Q", ["1"])
        a = SpanAutomaton(base, {"n": q}, {"e": Span(q, q, [])}, "1", set())
        assert mdet(a).matrices["e"].rows() == [[0]]

    def test_run_single_letter(self):
        m = mdet(two_state_example())
        assert dict(mdet_run(m, Word("s", ("a",))).counts) == {"1": 1, "2": 1}

    def test_run_empty_word(self):
        m = mdet(two_state_example())
        assert mdet_run(m, Word("s")) == m.initial_vector

    def test_run_ab_and_count(self):
        m = mdet(two_state_example())
        assert dict(mdet_run(m, Word("s", ("a", "b"))).counts) == {"2": 2}
        assert mdet_accept_count(m, Word("s", ("a", "b"))) == 2

    def test_count_examples(self):
        m = mdet(two_state_example())
        assert mdet_accept_count(m, Word("s")) == 0
        assert mdet_accept_count(m, Word("s", ("b", "b"))) == 1

    def test_counts_match_path_oracle(self):
        a = two_phase_example()
        m = mdet(a)
        for w in enumerate_words(a.base, "c", 5):
            assert mdet_accept_count(m, w) == count_paths(a, w)

    def test_ill_based_word_rejected(self):
        m = mdet(two_phase_example())
        with pytest.raises(ValueError):
            mdet_run(m, Word("d"))

    def test_run_splits_along_word_concatenation(self):
        from spanauto.spans import multiset_extend
        from spanauto.automata import run_word_span

        a = two_phase_example()
        m = mdet(a)
        u = Word("c", ("a", "b"))
        v = Word("c", ("x", "c"))
        uv = Word("c", ("a", "b", "x", "c"))
        assert mdet_run(m, uv) == multiset_extend(run_word_span(a, v), mdet_run(m, u))


class TestMDetExpand:
    def test_fixture_reaches_five_states(self):
        exp = mdet_expand(mdet(two_state_example()), max_states=64, max_len=8)
        assert not exp.truncated
        assert set(exp.fibers["s"].elements) == {"(1,0)", "(1,1)", "(0,1)", "(0,0)", "(0,2)"}
        assert exp.initial == "(1,0)"
        assert exp.finals == {"(1,1)", "(0,1)", "(0,2)"}

    def test_zero_matrices_two_states(self):
        base = BaseGraph(["n"], [("e", "e", "n", "n")])
        q = FinSet("Q", ["1"])
        a = SpanAutomaton(base, {"n": q}, {"e": Span(q, q, [])}, "1", set())
        exp = mdet_expand(mdet(a), max_states=8, max_len=4)
        assert set(exp.fibers["n"].elements) == {"(1)", "(0)"}

    def test_truncation_flag(self):
        # counts grow without bound, so a small state cap must truncate
        base = BaseGraph(["n"], [("e", "e", "n", "n")])
        q = FinSet("Q", ["1"])
        a = SpanAutomaton(
            base, {"n": q}, {"e": Span(q, q, [Token("u", "1", "1"), Token("v", "1", "1")])}, "1", {"1"}
        )
        exp = mdet_expand(mdet(a), max_states=3, max_len=10)
        assert exp.truncated

    def test_deterministic_input_matches_reachable_original(self):
        base = BaseGraph(["n"], [("e", "e", "n", "n"), ("f", "f", "n", "n")])
        q = FinSet("Q", ["1", "2", "3"])
        a = SpanAutomaton(
            base,
            {"n": q},
            {
                "e": Span(q, q, [Token("e1", "1", "2"), Token("e2", "2", "2"), Token("e3", "3", "1")]),
                "f": Span(q, q, [Token("f1", "1", "1"), Token("f2", "2", "1"), Token("f3", "3", "3")]),
            },
            "1",
            {"2"},
        )
        exp = mdet_expand(mdet(a), max_states=16, max_len=12)
        assert not exp.truncated
        from spanauto.automata import to_det_automaton

        original = to_det_automaton(rel_of(a))
        assert reachable_iso_check(exp.as_det_automaton(), original) is not None


class TestClassical:
    def test_agrees_with_categorical_on_fixture(self):
        nfa = two_state_classical()
        classical = classical_subset_construction(nfa)
        categorical = det_span(span_automaton_of_classical(nfa))
        mapping = reachable_iso_check(classical, categorical)
        assert mapping is not None

    def test_no_transitions(self):
        states = FinSet("Q", ["1"])
        nfa = ClassicalNFA(["a"], states, {}, "1", {"1"})
        d = classical_subset_construction(nfa)
        assert d.transitions["a"] == {"{}": "{}", "{1}": "{}"}

    def test_self_loop(self):
        states = FinSet("Q", ["1"])
        nfa = ClassicalNFA(["a"], states, {("1", "a"): {"1"}}, "1", {"1"})
        d = classical_subset_construction(nfa)
        assert list(d.fibers["s"]) == ["{}", "{1}"]
        assert d.transitions["a"]["{1}"] == "{1}"


class TestPrune:
    def test_fixture_keeps_all_four(self):
        d = det_span(two_state_example())
        pruned = prune_reachable(d)
        assert set(pruned.fibers["s"].elements) == {"{}", "{1}", "{2}", "{1,2}"}

    def test_disconnected_subset_removed(self):
        base = BaseGraph(["n"], [("e", "e", "n", "n")])
        q = FinSet("Q", ["x", "y", "z"])
        d = DetAutomaton(
            base, {"n": q}, {"e": {"x": "y", "y": "x", "z": "z"}}, "x", {"y"}
        )
        pruned = prune_reachable(d)
        assert set(pruned.fibers["n"].elements) == {"x", "y"}

    def test_idempotent(self):
        d = det_span(two_phase_example())
        once = prune_reachable(d)
        twice = prune_reachable(once)
        assert once.fibers == twice.fibers
        assert once.transitions == twice.transitions


class TestReachableIso:
    def test_self_identity(self):
        d = det_span(two_state_example())
        mapping = reachable_iso_check(d, d)
        assert mapping is not None
        assert all(k == v for k, v in mapping.items())

    def test_detects_language_difference(self):
        base = BaseGraph(["n"], [("a", "a", "n", "n")])
        q = FinSet("Q", ["p", "q"])
        d1 = DetAutomaton(base, {"n": q}, {"a": {"p": "q", "q": "q"}}, "p", {"q"})
        d2 = DetAutomaton(base, {"n": q}, {"a": {"p": "q", "q": "p"}}, "p", {"q"})
        assert reachable_iso_check(d1, d2) is None

    def test_respects_relabeling(self):
        base = BaseGraph(["n"], [("a", "a", "n", "n")])
        d1 = DetAutomaton(
            base, {"n": FinSet("Q", ["p", "q"])}, {"a": {"p": "q", "q": "q"}}, "p", {"q"}
        )
        d2 = DetAutomaton(
            base, {"n": FinSet("Q", ["u", "v"])}, {"a": {"u": "v", "v": "v"}}, "u", {"v"}
        )
        mapping = reachable_iso_check(d1, d2)
        assert mapping == {"p": "u", "q": "v"}


class TestLanguagePreservation:
    def test_two_phase_language_up_to_six(self):
        a = two_phase_example()
        d = det_span(a)
        words_a = [w.edges for w in language(a, 6)]
        words_d = [w.edges for w in language(d, 6)]
        assert words_a == words_d


class TestEmptyFibers:
    def automaton(self):
        base = BaseGraph(["n", "m"], [("e", "e", "n", "m"), ("f", "f", "m", "m")])
        q = FinSet("Q", ["1"])
        empty = FinSet("E", [])
        return SpanAutomaton(
            base,
            {"n": q, "m": empty},
            {"e": Span(q, empty, []), "f": Span(empty, empty, [])},
            "1",
            {"1"},
        )

    def test_language_only_empty_word(self):
        a = self.automaton()
        assert [w.edges for w in language(a, 4)] == [()]

    def test_determinization_handles_empty_fiber(self):
        a = self.automaton()
        d = det_span(a)
        # the empty fiber has exactly one subset, the empty one
        assert len(d.fibers["m"]) == 1
        assert [w.edges for w in language(d, 4)] == [()]
        assert unique_lift_check(d, 3)

    def test_mdet_handles_empty_fiber(self):
        a = self.automaton()
        m = mdet(a)
        assert mdet_accept_count(m, Word("n")) == 1
        assert mdet_accept_count(m, Word("n", ("e",))) == 0
