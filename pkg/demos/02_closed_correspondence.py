"""From invariant polynomials to invariant operators.

The correspondence sends a polynomial on the symmetric-plus-block slice of
the Lie algebra to a differential operator on the space itself.  Locally it
is a jet computation at one point; globally the local symbols interpolate
to a closed operator with polynomial coefficients.

Run as:  python3 demos/02_closed_correspondence.py
"""

from minkeuclid import (
    GroupElement,
    Mat,
    build_operator,
    invariant_poly_build,
    op_commutator,
    op_equal,
    sample_group_element,
    theta_closed,
    theta_local,
)
from minkeuclid.grouplie import k_sample

n, m = 1, 2

# tr(X) and the block entries (Z tZ)_kl generate the invariants here.
p = invariant_poly_build("p", n, m, (1,))
q12 = invariant_poly_build("q", n, m, (1, 2))
print("p  =", p.body)
print("q12 =", q12.body)

# Local symbol at a sampled point: derivative orders and exact values.
rep = sample_group_element(n, m, seed="demo2")
sym = theta_local(q12, rep)
print("local symbol at y =", sym.point.Y[0, 0])
for beta, value in sym.sorted_items():
    print("  orders", beta, "->", value)

# The symbol only sees the coset: multiplying the representative by an
# orthogonal element on the right changes nothing.
k = k_sample(n, seed="demo2-k", component="minus")
moved = rep.mul(GroupElement(k, Mat.zeros(m, n)))
print("coset independence:", theta_local(q12, rep) == theta_local(q12, moved))

# Closed forms, with the worked rank-one answers alongside.
tp = theta_closed(p, seed="demo2")
tq = theta_closed(q12, seed="demo2")
print("closed image of p:  ", tp)
print("closed image of q12:", tq)
print("matches the D family: ", op_equal(tp, build_operator("D:j=1", n, m)))
print("matches the Psi family:",
      op_equal(tq, build_operator("Psi:p=1,q=2", n, m)))
print("[image p, image q12] = 2 image q12:",
      op_equal(op_commutator(tp, tq), 2 * tq))
