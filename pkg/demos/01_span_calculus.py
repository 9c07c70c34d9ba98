"""Walk through the three morphism calculi and the translations between them.

Run with:  python3 demos/01_span_calculus.py
"""

from spanauto import (
    FinSet,
    NatMatrix,
    Span,
    Token,
    compose_spans,
    from_matrix,
    image,
    image_unit,
    matrix_compose,
    multiset_extend,
    multiset_unit,
    span_iso_eq,
    to_matrix,
)

print("A span records *how many* transitions connect two elements,")
print("not just whether they are connected.\n")

A = FinSet("A", ["1", "2"])
s = Span(A, A, [Token("loop", "1", "1"), Token("jump", "1", "2")])
t = Span(A, A, [Token("step", "1", "2"), Token("stay", "2", "2")])

print("s has tokens", [(x.label, x.left, x.right) for x in s.apex])
print("t has tokens", [(x.label, x.left, x.right) for x in t.apex])

st = compose_spans(s, t)
print("\nComposing along the shared middle set pairs up tokens:")
for x in st.apex:
    print("  ", x.label, ":", x.left, "->", x.right)
print("Two distinct composite tokens go 1 -> 2: the multiplicity survives.")

print("\nThe counting matrix of the composite is the matrix product:")
print("  U(s;t) =", to_matrix(st).rows())
print("  U(s)U(t) =", matrix_compose(to_matrix(s), to_matrix(t)).rows())

print("\nThe image relation forgets the counts:")
print("  image(s;t) =", sorted(image(st).pairs))

print("\nMatrices and spans translate back and forth: matrix -> span -> matrix")
m = NatMatrix(A, A, {("1", "2"): 3})
print("  round trip exact:", to_matrix(from_matrix(m)) == m)
print("and span -> matrix -> span is an isomorphism:")
print("  iso:", span_iso_eq(from_matrix(to_matrix(st)), st))

print("\nMatrices also act on multisets (vector-matrix products):")
v = multiset_unit(A, "1")
print("  unit at 1, pushed through s:", dict(multiset_extend(to_matrix(s), v).counts))

print("\nCollapsing a span onto its image is a span morphism;")
doubled = Span(A, A, [Token("u", "1", "2"), Token("v", "1", "2")])
collapse = image_unit(doubled)
print("for a doubled token it cannot be a bijection:", collapse.is_iso())
