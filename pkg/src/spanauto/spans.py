"""Finite sets and the three morphism calculi built on them.

Three kinds of morphism between finite sets live here, together with the
translations connecting them:

* ``Span``: a finite apex of tokens with a foot in each endpoint set.
  Parallel tokens carry multiplicity, so spans count transitions.
* ``Relation``: a plain set of pairs.  ``image`` collapses a span to the
  relation it generates, forgetting multiplicities.
* ``NatMatrix``: a natural-number matrix, equivalently a map into finite
  multisets.  ``to_matrix`` / ``from_matrix`` translate spans to matrices
  and back; the round trip is the identity on matrices and an isomorphism
  on spans.

All values are immutable after construction and all operations are pure,
so everything here is safe to share across threads.  Counts use Python
integers, which never overflow.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterator, Mapping, NamedTuple, Optional

__all__ = [
    "FinSet",
    "Token",
    "Span",
    "Relation",
    "NatMatrix",
    "Multiset",
    "SpanMorphism",
    "PowersetMap",
    "POWERSET_CAP",
    "compose_spans",
    "identity_span",
    "dagger_span",
    "span_iso_eq",
    "image",
    "from_relation",
    "compose_relations",
    "identity_relation",
    "dagger_relation",
    "powerset_map",
    "subset_label",
    "subsets_of",
    "powerset_finset",
    "to_matrix",
    "from_matrix",
    "matrix_compose",
    "identity_matrix",
    "multiset_unit",
    "multiset_extend",
    "multiset_flatten",
    "rel_unit",
    "rel_counit",
    "image_unit",
    "span_morphism_search",
]

# Powerset tables above this many generators are refused rather than
# materialized; callers that only need evaluation use PowersetMap lazily.
POWERSET_CAP = 20


@dataclass(frozen=True)
class FinSet:
    """An ordered finite set of distinct string labels.

    The order is the canonical presentation order (it fixes matrix row
    and column order), but equality compares label sets only.
    """

    name: str
    elements: tuple[str, ...]

    def __init__(self, name: str, elements=()):
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "elements", tuple(elements))
        seen = set()
        for x in self.elements:
            if x in seen:
                raise ValueError(f"duplicate element {x!r} in finite set {name!r}")
            seen.add(x)

    def __contains__(self, x) -> bool:
        return x in self.elements

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[str]:
        return iter(self.elements)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FinSet):
            return NotImplemented
        return set(self.elements) == set(other.elements)

    def __hash__(self) -> int:
        return hash(frozenset(self.elements))

    def index(self, x: str) -> int:
        return self.elements.index(x)


class Token(NamedTuple):
    """One apex element of a span: a label plus its two feet."""

    label: str
    left: str
    right: str


@dataclass(frozen=True)
class Span:
    """A span between finite sets: ``dom <- apex -> cod``.

    Several tokens may share the same feet; that multiplicity is the
    whole point of working with spans instead of relations.
    """

    dom: FinSet
    cod: FinSet
    apex: tuple[Token, ...]

    def __init__(self, dom: FinSet, cod: FinSet, apex=()):
        object.__setattr__(self, "dom", dom)
        object.__setattr__(self, "cod", cod)
        object.__setattr__(self, "apex", tuple(Token(*t) for t in apex))
        by_label = {}
        for t in self.apex:
            if t.label in by_label:
                raise ValueError(f"duplicate token label {t.label!r}")
            by_label[t.label] = t
            if t.left not in dom:
                raise ValueError(f"token {t.label!r}: left foot {t.left!r} not in {dom.name!r}")
            if t.right not in cod:
                raise ValueError(f"token {t.label!r}: right foot {t.right!r} not in {cod.name!r}")
        object.__setattr__(self, "_by_label", by_label)

    def token(self, label: str) -> Token:
        return self._by_label[label]


@dataclass(frozen=True)
class Relation:
    """A set of pairs between two finite sets."""

    dom: FinSet
    cod: FinSet
    pairs: frozenset[tuple[str, str]]

    def __init__(self, dom: FinSet, cod: FinSet, pairs=()):
        object.__setattr__(self, "dom", dom)
        object.__setattr__(self, "cod", cod)
        object.__setattr__(self, "pairs", frozenset(tuple(p) for p in pairs))
        for a, b in self.pairs:
            if a not in dom:
                raise ValueError(f"pair ({a!r}, {b!r}): {a!r} not in {dom.name!r}")
            if b not in cod:
                raise ValueError(f"pair ({a!r}, {b!r}): {b!r} not in {cod.name!r}")

    def __call__(self, a: str) -> frozenset[str]:
        """Image of one element: all cod elements related to ``a``."""
        return frozenset(b for (x, b) in self.pairs if x == a)


@dataclass(frozen=True)
class NatMatrix:
    """A natural-number matrix, i.e. a map ``dom -> multisets over cod``.

    Entries are stored sparsely; absent entries are zero.  Arithmetic is
    exact (Python integers).
    """

    dom: FinSet
    cod: FinSet
    entries: Mapping[tuple[str, str], int] = field(compare=False)

    def __init__(self, dom: FinSet, cod: FinSet, entries: Mapping[tuple[str, str], int] = {}):
        object.__setattr__(self, "dom", dom)
        object.__setattr__(self, "cod", cod)
        clean = {}
        for (a, b), n in entries.items():
            if a not in dom or b not in cod:
                raise ValueError(f"entry key ({a!r}, {b!r}) outside {dom.name!r} x {cod.name!r}")
            if not isinstance(n, int) or n < 0:
                raise ValueError(f"entry ({a!r}, {b!r}) = {n!r} is not a natural number")
            if n > 0:
                clean[(a, b)] = n
        object.__setattr__(self, "entries", clean)

    def __getitem__(self, key: tuple[str, str]) -> int:
        a, b = key
        if a not in self.dom or b not in self.cod:
            raise KeyError(key)
        return self.entries.get((a, b), 0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, NatMatrix):
            return NotImplemented
        return self.dom == other.dom and self.cod == other.cod and dict(self.entries) == dict(other.entries)

    def row(self, a: str) -> "Multiset":
        """Row at ``a`` as a multiset over the codomain."""
        if a not in self.dom:
            raise KeyError(a)
        return Multiset(self.cod, {b: n for (x, b), n in self.entries.items() if x == a})

    def rows(self) -> list[list[int]]:
        """Dense row-major form, in canonical element order."""
        return [[self.entries.get((a, b), 0) for b in self.cod] for a in self.dom]


@dataclass(frozen=True)
class Multiset:
    """A finite multiset: natural-number counts over a finite base set."""

    base: FinSet
    counts: Mapping[str, int] = field(compare=False)

    def __init__(self, base: FinSet, counts: Mapping[str, int] = {}):
        object.__setattr__(self, "base", base)
        clean = {}
        for x, n in counts.items():
            if x not in base:
                raise ValueError(f"count key {x!r} not in {base.name!r}")
            if not isinstance(n, int) or n < 0:
                raise ValueError(f"count of {x!r} = {n!r} is not a natural number")
            if n > 0:
                clean[x] = n
        object.__setattr__(self, "counts", clean)

    def __getitem__(self, x: str) -> int:
        if x not in self.base:
            raise KeyError(x)
        return self.counts.get(x, 0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Multiset):
            return NotImplemented
        return self.base == other.base and dict(self.counts) == dict(other.counts)

    def __hash__(self) -> int:
        return hash((frozenset(self.base.elements), frozenset(self.counts.items())))

    def __add__(self, other: "Multiset") -> "Multiset":
        if self.base != other.base:
            raise ValueError("multiset sum over different base sets")
        keys = set(self.counts) | set(other.counts)
        return Multiset(self.base, {x: self[x] + other[x] for x in keys})

    def scale(self, n: int) -> "Multiset":
        return Multiset(self.base, {x: n * c for x, c in self.counts.items()})

    def total(self) -> int:
        return sum(self.counts.values())

    def vector(self) -> tuple[int, ...]:
        """Counts in canonical base order."""
        return tuple(self.counts.get(x, 0) for x in self.base)


@dataclass(frozen=True)
class SpanMorphism:
    """A map of apexes between two parallel spans, preserving both feet."""

    source: Span
    target: Span
    mapping: Mapping[str, str]

    def __init__(self, source: Span, target: Span, mapping: Mapping[str, str]):
        if source.dom != target.dom or source.cod != target.cod:
            raise ValueError("span morphism requires shared feet sets")
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "mapping", dict(mapping))
        for t in source.apex:
            if t.label not in self.mapping:
                raise ValueError(f"morphism misses source token {t.label!r}")
            u = target.token(self.mapping[t.label])
            if (u.left, u.right) != (t.left, t.right):
                raise ValueError(f"morphism does not preserve feet of token {t.label!r}")

    def is_iso(self) -> bool:
        return len(set(self.mapping.values())) == len(self.target.apex) == len(self.source.apex)


# ---------------------------------------------------------------------------
# spans


def compose_spans(s: Span, t: Span) -> Span:
    """Compose two spans by matching middle feet (pullback of the legs).

    The composite has one token per pair (x, y) with the right foot of x
    equal to the left foot of y, so multiplicities multiply.
    """
    if s.cod != t.dom:
        raise ValueError(f"cannot compose spans: middle sets {s.cod.name!r} and {t.dom.name!r} differ")
    apex = []
    for x in s.apex:
        for y in t.apex:
            if x.right == y.left:
                apex.append(Token(f"({x.label};{y.label})", x.left, y.right))
    return Span(s.dom, t.cod, apex)


def identity_span(a: FinSet) -> Span:
    """The identity span: one token per element, both feet equal."""
    return Span(a, a, [Token(x, x, x) for x in a])


def dagger_span(s: Span) -> Span:
    """The converse span: same apex, feet swapped."""
    return Span(s.cod, s.dom, [Token(t.label, t.right, t.left) for t in s.apex])


def span_iso_eq(s: Span, t: Span) -> bool:
    """Equality of spans up to apex relabeling: equal multiplicity matrices."""
    if s.dom != t.dom or s.cod != t.cod:
        raise ValueError("span comparison requires shared feet sets")
    return to_matrix(s) == to_matrix(t)


# ---------------------------------------------------------------------------
# relations


def image(s: Span) -> Relation:
    """The relation a span generates: pairs of feet, multiplicities dropped."""
    return Relation(s.dom, s.cod, {(t.left, t.right) for t in s.apex})


def from_relation(r: Relation) -> Span:
    """Embed a relation as a span with one token per pair."""
    pairs = sorted(r.pairs)
    return Span(r.dom, r.cod, [Token(f"({a},{b})", a, b) for a, b in pairs])


def compose_relations(r: Relation, q: Relation) -> Relation:
    """Standard relational composite, written left to right."""
    if r.cod != q.dom:
        raise ValueError(f"cannot compose relations: middle sets {r.cod.name!r} and {q.dom.name!r} differ")
    by_left: dict[str, set[str]] = {}
    for b, c in q.pairs:
        by_left.setdefault(b, set()).add(c)
    return Relation(r.dom, q.cod, {(a, c) for a, b in r.pairs for c in by_left.get(b, ())})


def identity_relation(a: FinSet) -> Relation:
    return Relation(a, a, {(x, x) for x in a})


def dagger_relation(r: Relation) -> Relation:
    """The converse relation."""
    return Relation(r.cod, r.dom, {(b, a) for a, b in r.pairs})


# ---------------------------------------------------------------------------
# powersets


def subset_label(members) -> str:
    """Canonical printable name of a subset: sorted members in braces."""
    return "{" + ",".join(sorted(members)) + "}"


def subsets_of(a: FinSet) -> list[frozenset[str]]:
    """All subsets, ordered by size then lexicographically by sorted members."""
    order = sorted(a.elements)
    out = []
    for k in range(len(order) + 1):
        out.extend(frozenset(c) for c in combinations(order, k))
    return out


def powerset_finset(a: FinSet) -> FinSet:
    """The powerset of ``a`` as a finite set of canonical subset labels."""
    if len(a) > POWERSET_CAP:
        raise ValueError(f"powerset of {a.name!r} has 2^{len(a)} elements; cap is 2^{POWERSET_CAP}")
    return FinSet(f"P({a.name})", [subset_label(s) for s in subsets_of(a)])


class PowersetMap:
    """The total function on powersets induced by a relation.

    Sends a subset S of the domain to every codomain element related to
    some member of S.  For small domains the full table is available;
    evaluation itself works at any size.
    """

    def __init__(self, r: Relation):
        self.relation = r
        self._by_left: dict[str, frozenset[str]] = {}
        for a, b in r.pairs:
            self._by_left[a] = self._by_left.get(a, frozenset()) | {b}

    def __call__(self, subset) -> frozenset[str]:
        subset = frozenset(subset)
        for x in subset:
            if x not in self.relation.dom:
                raise ValueError(f"{x!r} not in {self.relation.dom.name!r}")
        out: set[str] = set()
        for x in subset:
            out |= self._by_left.get(x, frozenset())
        return frozenset(out)

    def table(self) -> dict[frozenset[str], frozenset[str]]:
        """The explicit table over all subsets; refused above the cap."""
        if len(self.relation.dom) > POWERSET_CAP:
            raise ValueError(f"domain too large to tabulate (cap {POWERSET_CAP} generators)")
        return {s: self(s) for s in subsets_of(self.relation.dom)}


def powerset_map(r: Relation) -> PowersetMap:
    """Direct-image function P(dom) -> P(cod) of a relation."""
    return PowersetMap(r)


def rel_unit(a: FinSet) -> Relation:
    """The singleton map ``x -> {x}``, as a relation into the powerset."""
    p = powerset_finset(a)
    return Relation(a, p, {(x, subset_label({x})) for x in a})


def rel_counit(a: FinSet) -> Relation:
    """The membership relation from the powerset back to the set."""
    p = powerset_finset(a)
    return Relation(p, a, {(subset_label(s), x) for s in subsets_of(a) for x in s})


# ---------------------------------------------------------------------------
# matrices and multisets


def to_matrix(s: Span) -> NatMatrix:
    """Multiplicity matrix of a span: entry (a, b) counts tokens with those feet."""
    entries: dict[tuple[str, str], int] = {}
    for t in s.apex:
        key = (t.left, t.right)
        entries[key] = entries.get(key, 0) + 1
    return NatMatrix(s.dom, s.cod, entries)


def from_matrix(m: NatMatrix) -> Span:
    """Canonical span with m(a, b) parallel tokens over each pair of feet."""
    apex = []
    for a in m.dom:
        for b in m.cod:
            for i in range(m[a, b]):
                apex.append(Token(f"({a},{b})#{i + 1}", a, b))
    return Span(m.dom, m.cod, apex)


def matrix_compose(m: NatMatrix, n: NatMatrix) -> NatMatrix:
    """Exact natural-number matrix product (diagrammatic order)."""
    if m.cod != n.dom:
        raise ValueError(f"cannot compose matrices: middle sets {m.cod.name!r} and {n.dom.name!r} differ")
    entries: dict[tuple[str, str], int] = {}
    n_by_left: dict[str, list[tuple[str, int]]] = {}
    for (b, c), v in n.entries.items():
        n_by_left.setdefault(b, []).append((c, v))
    for (a, b), u in m.entries.items():
        for c, v in n_by_left.get(b, ()):
            entries[(a, c)] = entries.get((a, c), 0) + u * v
    return NatMatrix(m.dom, n.cod, entries)


def identity_matrix(a: FinSet) -> NatMatrix:
    return NatMatrix(a, a, {(x, x): 1 for x in a})


def multiset_unit(a: FinSet, x: str) -> Multiset:
    """The unit multiset: count 1 at ``x``, 0 elsewhere."""
    if x not in a:
        raise ValueError(f"{x!r} not in {a.name!r}")
    return Multiset(a, {x: 1})


def multiset_extend(m: NatMatrix, v: Multiset) -> Multiset:
    """Extension of a matrix along a multiset: b -> sum_a v(a) * m(a, b).

    This is vector-matrix multiplication, and the composition law of the
    matrix calculus when matrices are read as multiset-valued maps.
    """
    if v.base != m.dom:
        raise ValueError(f"multiset base {v.base.name!r} does not match matrix domain {m.dom.name!r}")
    counts: dict[str, int] = {}
    for (a, b), u in m.entries.items():
        c = v[a]
        if c:
            counts[b] = counts.get(b, 0) + c * u
    return Multiset(m.cod, counts)


def multiset_flatten(outer: Mapping[Multiset, int], base: FinSet) -> Multiset:
    """Flatten a finite-support multiset of multisets: b -> sum_w outer(w) * w(b)."""
    counts: dict[str, int] = {}
    for w, n in outer.items():
        if w.base != base:
            raise ValueError(f"inner multiset over {w.base.name!r}, expected {base.name!r}")
        if n < 0:
            raise ValueError("outer count must be a natural number")
        for x, c in w.counts.items():
            counts[x] = counts.get(x, 0) + n * c
    return Multiset(base, counts)


# ---------------------------------------------------------------------------
# 2-cells between spans


def image_unit(s: Span) -> SpanMorphism:
    """The collapse of a span onto the embedding of its image relation.

    Each token goes to the unique image token with the same feet.  It is
    an isomorphism exactly when no two tokens of ``s`` share feet.
    """
    target = from_relation(image(s))
    return SpanMorphism(s, target, {t.label: f"({t.left},{t.right})" for t in s.apex})


def span_morphism_search(s: Span, t: Span, iso_required: bool = False) -> Optional[SpanMorphism]:
    """Find a feet-preserving apex map from ``s`` to ``t``, or None.

    Morphisms over fixed feet decompose per feet pair, so existence is a
    support comparison and an isomorphism is matrix equality; the witness
    is assembled block by block.
    """
    if s.dom != t.dom or s.cod != t.cod:
        raise ValueError("span morphism search requires shared feet sets")
    blocks_s: dict[tuple[str, str], list[Token]] = {}
    for tok in s.apex:
        blocks_s.setdefault((tok.left, tok.right), []).append(tok)
    blocks_t: dict[tuple[str, str], list[Token]] = {}
    for tok in t.apex:
        blocks_t.setdefault((tok.left, tok.right), []).append(tok)
    if iso_required:
        if {k: len(v) for k, v in blocks_s.items()} != {k: len(v) for k, v in blocks_t.items()}:
            return None
        mapping = {}
        for key, toks in blocks_s.items():
            for a, b in zip(toks, blocks_t[key]):
                mapping[a.label] = b.label
        return SpanMorphism(s, t, mapping)
    mapping = {}
    for key, toks in blocks_s.items():
        if key not in blocks_t:
            return None
        for a in toks:
            mapping[a.label] = blocks_t[key][0].label
    return SpanMorphism(s, t, mapping)
