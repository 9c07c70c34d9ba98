"""Simulations between automata over a shared base, and their checks.

A simulation from automaton F to automaton F' is stored as one component
morphism per base node, pointing from the F'-fiber into the F-fiber
(that orientation is what makes the determinized machine simulate the
original).  Naturality is checked on generating edges only; over a free
base category the generator squares paste to all words.

Strength grades how strictly the squares must commute:

* ``strict``: equality of relation composites.
* ``pseudo``: the two span composites have equal counting matrices.
* ``lax``: a feet-preserving apex map exists from the composite through
  the source's transition into the composite through the target's.

``factor_det`` and ``factor_mdet`` split a simulation into a determinized
target through the canonical simulation, reporting which of the expected
properties of the factor actually hold on the given input.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Optional, Union

from .spans import (
    FinSet,
    Multiset,
    Relation,
    Span,
    Token,
    compose_relations,
    compose_spans,
    dagger_relation,
    dagger_span,
    from_relation,
    identity_relation,
    identity_span,
    image,
    matrix_compose,
    span_morphism_search,
    subsets_of,
    to_matrix,
)
from .automata import (
    DetAutomaton,
    MDetMachine,
    RelAutomaton,
    SpanAutomaton,
)
from .determinize import (
    DEFAULT_POWERSET_CAP,
    ExpandedMachine,
    det,
    det_span,
    expansion_state_label,
    mdet,
    mdet_expand,
    rel_of,
    subset_state_label,
)

__all__ = [
    "Simulation",
    "CheckResult",
    "FactorizationResult",
    "STRENGTHS",
    "identity_simulation",
    "dagger_simulation",
    "compose_simulations",
    "check_rel_simulation",
    "check_span_simulation",
    "check_simulation",
    "check_bisimulation",
    "canonical_det_simulation",
    "canonical_mdet_simulation",
    "membership_span",
    "multiplicity_span",
    "transition_span",
    "component_span",
    "factor_det",
    "factor_mdet",
]

STRENGTHS = ("strict", "pseudo", "lax")

AnyAutomaton = Union[SpanAutomaton, RelAutomaton, DetAutomaton, MDetMachine, ExpandedMachine]


@dataclass(frozen=True)
class Simulation:
    """Per-node components from target fibers into source fibers.

    Components may be given as relations, spans, or counting matrices;
    matrices are stored as their canonical spans.
    """

    source: AnyAutomaton
    target: AnyAutomaton
    components: Mapping[str, Union[Relation, Span]]
    strength: str

    def __init__(self, source, target, components, strength):
        from .spans import NatMatrix, from_matrix

        if strength not in STRENGTHS:
            raise ValueError(f"unknown strength {strength!r}")
        if source.base.nodes != target.base.nodes or source.base.edges != target.base.edges:
            raise ValueError("simulation endpoints must share the base graph")
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        stored = {
            n: from_matrix(c) if isinstance(c, NatMatrix) else c for n, c in components.items()
        }
        object.__setattr__(self, "components", stored)
        object.__setattr__(self, "strength", strength)
        for n in source.base.nodes:
            if n not in self.components:
                raise ValueError(f"missing component at node {n!r}")
            c = self.components[n]
            if c.dom != target.fibers[n] or c.cod != source.fibers[n]:
                raise ValueError(f"component at {n!r} does not run from the target fiber to the source fiber")


@dataclass(frozen=True)
class CheckResult:
    """Outcome of a naturality check, with the first failing edge if any."""

    ok: bool
    failed_edge: Optional[str] = None
    detail: str = ""
    witnesses: Mapping[str, object] = None

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class FactorizationResult:
    mate: Simulation
    composite_ok: bool
    bisim_ok: bool
    unique_ok: Optional[bool] = None


# ---------------------------------------------------------------------------
# views of transitions and components


def transition_span(a: AnyAutomaton, edge_id: str) -> Span:
    """The transition of an edge, viewed as a span."""
    if isinstance(a, SpanAutomaton):
        return a.transitions[edge_id]
    if isinstance(a, RelAutomaton):
        return from_relation(a.transitions[edge_id])
    if isinstance(a, MDetMachine):
        from .spans import from_matrix

        return from_matrix(a.matrices[edge_id])
    e = a.base.edge(edge_id)
    table = a.transitions[edge_id]
    return Span(
        a.fibers[e.src],
        a.fibers[e.dst],
        [Token(f"({q}->{t})", q, t) for q, t in table.items()],
    )


def transition_relation(a: AnyAutomaton, edge_id: str) -> Relation:
    if isinstance(a, RelAutomaton):
        return a.transitions[edge_id]
    if isinstance(a, SpanAutomaton):
        return image(a.transitions[edge_id])
    return image(transition_span(a, edge_id))


def component_span(sim: Simulation, node: str) -> Span:
    c = sim.components[node]
    return c if isinstance(c, Span) else from_relation(c)


def component_relation(sim: Simulation, node: str) -> Relation:
    c = sim.components[node]
    return image(c) if isinstance(c, Span) else c


def identity_simulation(a: AnyAutomaton, strength: str = "strict") -> Simulation:
    components = {}
    for n in a.base.nodes:
        if strength == "strict":
            components[n] = identity_relation(a.fibers[n])
        else:
            components[n] = identity_span(a.fibers[n])
    return Simulation(a, a, components, strength)


def dagger_simulation(sim: Simulation) -> Simulation:
    """Swap endpoints and take the converse of every component."""
    components = {}
    for n, c in sim.components.items():
        components[n] = dagger_span(c) if isinstance(c, Span) else dagger_relation(c)
    return Simulation(sim.target, sim.source, components, sim.strength)


def compose_simulations(first: Simulation, second: Simulation) -> Simulation:
    """Vertical composite: a simulation F -> G after one G -> H gives F -> H."""
    if second.source is not first.target and second.source != first.target:
        raise ValueError("simulations do not share the middle automaton")
    components = {}
    for n in first.source.base.nodes:
        a, b = second.components[n], first.components[n]
        if isinstance(a, Span) or isinstance(b, Span):
            a = a if isinstance(a, Span) else from_relation(a)
            b = b if isinstance(b, Span) else from_relation(b)
            components[n] = compose_spans(a, b)
        else:
            components[n] = compose_relations(a, b)
    strength = max(first.strength, second.strength, key=STRENGTHS.index)
    return Simulation(first.source, second.target, components, strength)


# ---------------------------------------------------------------------------
# naturality checks


def check_rel_simulation(sim: Simulation) -> CheckResult:
    """Strict naturality over every generating edge, at the relation level."""
    for a in (sim.source, sim.target):
        if isinstance(a, SpanAutomaton):
            raise ValueError("relation-level check requires relational or deterministic automata")
    base = sim.source.base
    for e in base.edges:
        lhs = compose_relations(component_relation(sim, e.src), transition_relation(sim.source, e.id))
        rhs = compose_relations(transition_relation(sim.target, e.id), component_relation(sim, e.dst))
        if lhs != rhs:
            only_l = sorted(lhs.pairs - rhs.pairs)
            only_r = sorted(rhs.pairs - lhs.pairs)
            return CheckResult(False, e.id, f"square at edge {e.id!r} differs: lhs-only {only_l}, rhs-only {only_r}")
    return CheckResult(True)


def _edge_row_restriction(sim: Simulation) -> dict[str, Optional[set[str]]]:
    """Rows to keep per edge when the target is a truncated expansion."""
    if isinstance(sim.target, ExpandedMachine):
        return {e.id: set(sim.target.transitions[e.id].keys()) for e in sim.target.base.edges}
    return {e.id: None for e in sim.source.base.edges}


def _restrict_rows(s: Span, rows: Optional[set[str]]) -> Span:
    if rows is None:
        return s
    return Span(s.dom, s.cod, [t for t in s.apex if t.left in rows])


def check_span_simulation(sim: Simulation, mode: str, witnesses: bool = True) -> CheckResult:
    """Span-level naturality: lax wants an apex map, pseudo wants matrix equality.

    The apex map runs from the composite through the source's transition
    to the composite through the target's.  When the target is a bounded
    expansion, rows without recorded transitions are left out of both
    sides of each square.  With ``witnesses=False`` only the counting
    matrices are compared, which decides existence without building the
    apex maps.
    """
    if mode not in ("lax", "pseudo"):
        raise ValueError(f"span check mode must be 'lax' or 'pseudo', not {mode!r}")
    base = sim.source.base
    rows_by_edge = _edge_row_restriction(sim)
    found = {}
    for e in base.edges:
        rows = rows_by_edge[e.id]
        lhs_comp = _restrict_rows(component_span(sim, e.src), rows)
        src_tr = transition_span(sim.source, e.id)
        tgt_tr = _restrict_rows(transition_span(sim.target, e.id), rows)
        dst_comp = component_span(sim, e.dst)
        if witnesses:
            lhs = compose_spans(lhs_comp, src_tr)
            rhs = compose_spans(tgt_tr, dst_comp)
            morphism = span_morphism_search(lhs, rhs, iso_required=(mode == "pseudo"))
            ok = morphism is not None
            lm, rm = to_matrix(lhs), to_matrix(rhs)
        else:
            morphism = None
            lm = matrix_compose(to_matrix(lhs_comp), to_matrix(src_tr))
            rm = matrix_compose(to_matrix(tgt_tr), to_matrix(dst_comp))
            ok = lm == rm if mode == "pseudo" else set(lm.entries) <= set(rm.entries)
        if not ok:
            diff = {
                k: (lm[k], rm[k])
                for k in set(lm.entries) | set(rm.entries)
                if lm[k] != rm[k]
            }
            return CheckResult(False, e.id, f"square at edge {e.id!r}: multiplicities differ at {sorted(diff)}")
        found[e.id] = morphism
    return CheckResult(True, witnesses=found if witnesses else None)


def check_simulation(sim: Simulation) -> CheckResult:
    """Check a simulation at its declared strength."""
    if sim.strength == "strict":
        return check_rel_simulation(sim)
    return check_span_simulation(sim, sim.strength)


def check_bisimulation(sim: Simulation) -> bool:
    """Whether both the simulation and its converse pass at the declared strength."""
    forward = _bisim_leg(sim)
    if not forward.ok:
        return False
    return _bisim_leg(dagger_simulation(sim)).ok


def _bisim_leg(sim: Simulation) -> CheckResult:
    if sim.strength == "strict" and not any(
        isinstance(a, (SpanAutomaton, MDetMachine, ExpandedMachine)) for a in (sim.source, sim.target)
    ):
        return check_rel_simulation(sim)
    mode = "lax" if sim.strength == "lax" else "pseudo"
    return check_span_simulation(sim, mode, witnesses=False)


# ---------------------------------------------------------------------------
# canonical simulations


def membership_span(power_fiber: FinSet, fiber: FinSet, node: str, multi_node: bool) -> Span:
    """The membership relation from a powerset fiber, embedded as a span."""
    apex = []
    for s in subsets_of(fiber):
        lbl = subset_state_label(node, s, multi_node)
        for q in sorted(s):
            apex.append(Token(f"({lbl},{q})", lbl, q))
    return Span(power_fiber, fiber, apex)


def canonical_det_simulation(a: SpanAutomaton, d: Optional[DetAutomaton] = None,
                             powerset_cap: int = DEFAULT_POWERSET_CAP) -> Simulation:
    """The membership simulation from an automaton to its powerset machine.

    Component at each node: the pairs (S, q) with q in S.  It always
    passes the lax check; it is pseudo only when no square composite
    carries a multiplicity above one.
    """
    if d is None:
        d = det_span(a, powerset_cap)
    multi = len(a.base.nodes) > 1
    components = {
        n: membership_span(d.fibers[n], a.fibers[n], n, multi) for n in a.base.nodes
    }
    return Simulation(a, d, components, "lax")


def multiplicity_span(exp: ExpandedMachine, node: str, fiber: FinSet) -> Span:
    """Relates each discovered multiset state to base states, with multiplicity."""
    apex = []
    for lbl in exp.fibers[node]:
        v = exp.states[lbl]
        for q in fiber:
            for i in range(v[q]):
                apex.append(Token(f"({lbl},{q})#{i + 1}", lbl, q))
    return Span(exp.fibers[node], fiber, apex)


def canonical_mdet_simulation(a: SpanAutomaton, max_len: int, max_states: int = 4096) -> Simulation:
    """The multiplicity simulation from an automaton to its counting machine.

    Checked against the bounded expansion: each discovered multiset state
    relates to an original state as many times as the state was counted.
    The squares hold with equal matrices (a forward-backward simulation),
    which check_span_simulation('pseudo') verifies on the recorded rows.
    """
    exp = mdet_expand(mdet(a), max_states, max_len)
    components = {n: multiplicity_span(exp, n, a.fibers[n]) for n in a.base.nodes}
    return Simulation(a, exp, components, "pseudo")


# ---------------------------------------------------------------------------
# universal-property factorizations


def factor_det(alpha: Simulation, powerset_cap: int = DEFAULT_POWERSET_CAP,
               attempt_unique: Optional[bool] = None) -> FactorizationResult:
    """Split a simulation into a deterministic target through the powerset machine.

    The mate sends each target state to the set of source states its
    component relates it to.  The composite against the membership
    simulation always recovers the input; whether the mate is a
    bisimulation is reported as data.
    """
    f, g = alpha.source, alpha.target
    if not isinstance(g, DetAutomaton):
        raise ValueError("factorization target must be deterministic")
    if alpha.strength != "strict":
        declared = check_span_simulation(alpha, alpha.strength)
        if not declared.ok:
            raise ValueError(f"alpha fails its declared {alpha.strength!r} check: {declared.detail}")
    rel_f = rel_of(f) if isinstance(f, SpanAutomaton) else f
    rel_alpha = Simulation(
        rel_f,
        g,
        {n: component_relation(alpha, n) for n in f.base.nodes},
        "strict",
    )
    natural = check_rel_simulation(rel_alpha)
    if not natural.ok:
        raise ValueError(f"alpha is not natural at the relation level: {natural.detail}")

    d = det_span(f, powerset_cap) if isinstance(f, SpanAutomaton) else det(f, powerset_cap)
    multi = len(f.base.nodes) > 1
    mate_components = {}
    for n in f.base.nodes:
        comp = component_relation(alpha, n)
        mate_components[n] = Relation(
            g.fibers[n],
            d.fibers[n],
            {(x, subset_state_label(n, comp(x), multi)) for x in g.fibers[n]},
        )
    mate = Simulation(d, g, mate_components, "strict")

    composite_ok = True
    for n in f.base.nodes:
        eps = _membership_relation(d.fibers[n], rel_f.fibers[n], n, multi)
        if compose_relations(mate_components[n], eps) != component_relation(alpha, n):
            composite_ok = False
            break

    bisim_ok = check_bisimulation(mate)

    unique_ok = None
    if attempt_unique is None:
        attempt_unique = (
            all(len(f.fibers[n]) <= 2 and len(g.fibers[n]) <= 2 for n in f.base.nodes)
            and len(f.base.edges) <= 2
        )
    if attempt_unique:
        unique_ok = _unique_det_factor(rel_alpha, d, g) == 1
    return FactorizationResult(mate, composite_ok, bisim_ok, unique_ok)


def _membership_relation(power_fiber: FinSet, fiber: FinSet, node: str, multi: bool) -> Relation:
    return Relation(
        power_fiber,
        fiber,
        {(subset_state_label(node, s, multi), q) for s in subsets_of(fiber) for q in s},
    )


def _unique_det_factor(rel_alpha: Simulation, d: DetAutomaton, g: DetAutomaton) -> int:
    """Count function-component bisimulations through which alpha factors."""
    f = rel_alpha.source
    nodes = list(f.base.nodes)
    multi = len(nodes) > 1
    per_node_choices = []
    for n in nodes:
        subsets = [subset_state_label(n, s, multi) for s in subsets_of(f.fibers[n])]
        per_node_choices.append(list(itertools.product(subsets, repeat=len(g.fibers[n]))))
    count = 0
    for assignment in itertools.product(*per_node_choices):
        components = {}
        for n, choice in zip(nodes, assignment):
            components[n] = Relation(
                g.fibers[n], d.fibers[n], set(zip(g.fibers[n].elements, choice))
            )
        candidate = Simulation(d, g, components, "strict")
        ok = True
        for n in nodes:
            eps = _membership_relation(d.fibers[n], f.fibers[n], n, multi)
            if compose_relations(components[n], eps) != rel_alpha.components[n]:
                ok = False
                break
        if ok and check_bisimulation(candidate):
            count += 1
    return count


def factor_mdet(alpha: Simulation, max_len: int = 4, max_states: int = 4096,
                attempt_unique: Optional[bool] = None) -> FactorizationResult:
    """Split a forward-backward simulation through the counting machine.

    Requires pseudo strength: the mate reads each component's counting
    matrix row as a multiset state, and only equal-matrix squares make
    that assignment natural.  All checks run on a bounded expansion that
    is seeded with the mate's image states.
    """
    f, g = alpha.source, alpha.target
    if not isinstance(f, SpanAutomaton):
        raise ValueError("factorization source must be a span automaton")
    if not isinstance(g, DetAutomaton):
        raise ValueError("factorization target must be deterministic")
    if alpha.strength != "pseudo":
        raise ValueError("the counting factorization needs a forward-backward (pseudo) simulation")
    declared = check_span_simulation(alpha, "pseudo")
    if not declared.ok:
        raise ValueError(f"alpha fails the pseudo check: {declared.detail}")

    machine = mdet(f)
    mate_multisets: dict[str, dict[str, Multiset]] = {}
    for n in f.base.nodes:
        matrix = to_matrix(component_span(alpha, n))
        mate_multisets[n] = {x: matrix.row(x) for x in g.fibers[n]}
    seeds = {n: [v for v in mate_multisets[n].values()] for n in f.base.nodes}
    exp = mdet_expand(machine, max_states, max_len, extra_seeds=seeds)

    multi_node = len(f.base.nodes) > 1
    mate_components = {}
    for n in f.base.nodes:
        apex = [
            Token(f"({x})", x, expansion_state_label(n, v, multi_node))
            for x, v in mate_multisets[n].items()
        ]
        mate_components[n] = Span(g.fibers[n], exp.fibers[n], apex)
    mate = Simulation(exp, g, mate_components, "pseudo")

    composite_ok = True
    for n in f.base.nodes:
        eta = multiplicity_span(exp, n, f.fibers[n])
        lhs = to_matrix(compose_spans(mate_components[n], eta))
        if lhs != to_matrix(component_span(alpha, n)):
            composite_ok = False
            break

    bisim_ok = check_bisimulation(mate)

    unique_ok = None
    total_functions = 1
    for n in f.base.nodes:
        total_functions *= max(1, len(exp.fibers[n])) ** len(g.fibers[n])
    if attempt_unique is None:
        attempt_unique = total_functions <= 4096
    if attempt_unique:
        unique_ok = _unique_mdet_factor(alpha, exp, g, mate_multisets) == 1
    return FactorizationResult(mate, composite_ok, bisim_ok, unique_ok)


def _unique_mdet_factor(alpha: Simulation, exp: ExpandedMachine, g: DetAutomaton,
                        mate_multisets) -> int:
    """Count function-component bisimulations factoring alpha through the expansion."""
    f = alpha.source
    nodes = list(f.base.nodes)
    per_node_choices = []
    for n in nodes:
        per_node_choices.append(list(itertools.product(exp.fibers[n].elements, repeat=len(g.fibers[n]))))
    count = 0
    for assignment in itertools.product(*per_node_choices):
        components = {}
        for n, choice in zip(nodes, assignment):
            apex = [Token(f"({x})", x, lbl) for x, lbl in zip(g.fibers[n].elements, choice)]
            components[n] = Span(g.fibers[n], exp.fibers[n], apex)
        candidate = Simulation(exp, g, components, "pseudo")
        ok = True
        for n in nodes:
            eta = multiplicity_span(exp, n, f.fibers[n])
            if to_matrix(compose_spans(components[n], eta)) != to_matrix(component_span(alpha, n)):
                ok = False
                break
        if ok and check_bisimulation(candidate):
            count += 1
    return count
