"""Exact polynomials and differential operators, from the ground up.

Run as:  python3 demos/01_operator_algebra.py
"""

from fractions import Fraction

from minkeuclid import (
    DiffOperator,
    Polynomial,
    coordinate_table,
    op_commutator,
)

# Coordinates for 2x2 symmetric Y and a single row vector V: the table fixes
# the column order (y_1_1, y_1_2, y_2_2, v_1_1, v_1_2, then scale symbols).
table = coordinate_table(2, 1)
print("coordinates:", ", ".join(table.names))

y11 = Polynomial.variable(table, "y_1_1")
y12 = Polynomial.variable(table, "y_1_2")
y22 = Polynomial.variable(table, "y_2_2")

det = y11 * y22 - y12 * y12
print("det Y =", det)

# Operators are normal ordered: multiplication coefficients on the left,
# derivatives on the right.  Composition re-normalizes via the Leibniz rule.
dy11 = DiffOperator.partial(table, {"y_1_1": 1})
euler = DiffOperator.mult(y11) * dy11
print("euler operator:", euler)
print("euler applied to det:", euler.apply(det))

# The canonical commutation relation [d/dy, y] = 1 falls out of composition.
ymult = DiffOperator.mult(y11)
print("[d/dy11, y11] =", op_commutator(dy11, ymult))

# A second-order operator with a rational coefficient.
half = Fraction(1, 2)
op = DiffOperator.partial(table, {"y_1_1": 1, "y_2_2": 1}, half) \
    + DiffOperator.mult(det) * DiffOperator.partial(table, {"v_1_1": 2})
print("mixed operator:", op)
print("  order:", op.order(), " terms:", op.term_count())
print("  applied to det^2:", op.apply(det * det))
