"""Small reference automata used across the tests, demos and goldens."""

from __future__ import annotations

from .spans import FinSet, Span, Token
from .automata import BaseGraph, SpanAutomaton
from .determinize import ClassicalNFA

__all__ = ["two_state_example", "two_phase_example", "two_state_classical"]


def two_state_example() -> SpanAutomaton:
    """Two states over a one-node base with letters a and b.

    The letter a steps 1 -> 1 and 1 -> 2, the letter b steps 1 -> 2 and
    2 -> 2; state 1 starts, state 2 accepts.  The word "ab" has two
    accepting runs, which is what makes this automaton a good probe for
    anything that claims to preserve path counts.
    """
    base = BaseGraph(["s"], [("a", "a", "s", "s"), ("b", "b", "s", "s")])
    fiber = FinSet("Q", ["1", "2"])
    spans = {
        "a": Span(fiber, fiber, [Token("a11", "1", "1"), Token("a12", "1", "2")]),
        "b": Span(fiber, fiber, [Token("b12", "1", "2"), Token("b22", "2", "2")]),
    }
    return SpanAutomaton(base, {"s": fiber}, spans, "1", {"2"})


def two_phase_example() -> SpanAutomaton:
    """Five states spread over a two-node base.

    Letters a, b loop on the first node, x crosses over, and c, d loop
    on the second node, so no word mixes the two letter groups without
    an x in the middle.  Determinizing therefore never needs subsets
    drawing from both fibers.
    """
    base = BaseGraph(
        ["c", "d"],
        [
            ("a", "a", "c", "c"),
            ("b", "b", "c", "c"),
            ("x", "x", "c", "d"),
            ("c", "c", "d", "d"),
            ("d", "d", "d", "d"),
        ],
    )
    left = FinSet("QL", ["1", "2"])
    right = FinSet("QR", ["3", "4", "5"])
    spans = {
        "a": Span(left, left, [Token("a11", "1", "1"), Token("a12", "1", "2")]),
        "b": Span(left, left, [Token("b12", "1", "2"), Token("b22", "2", "2")]),
        "x": Span(left, right, [Token("x13", "1", "3"), Token("x24", "2", "4")]),
        "c": Span(right, right, [Token("c34", "3", "4"), Token("c35", "3", "5")]),
        "d": Span(right, right, [Token("d54", "5", "4")]),
    }
    return SpanAutomaton(base, {"c": left, "d": right}, spans, "1", {"4"})


def two_state_classical() -> ClassicalNFA:
    """The two-state example as a flat five-tuple NFA."""
    states = FinSet("Q", ["1", "2"])
    delta = {
        ("1", "a"): {"1", "2"},
        ("1", "b"): {"2"},
        ("2", "b"): {"2"},
    }
    return ClassicalNFA(["a", "b"], states, delta, "1", {"2"})
