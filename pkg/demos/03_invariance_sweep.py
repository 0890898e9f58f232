"""Invariance checks for the named operator families.

An operator is invariant when conjugation by the pullback of a group
element leaves it unchanged; the check compares both sides on all
monomials up to the operator order plus two.

Run as:  python3 demos/03_invariance_sweep.py
"""

from minkeuclid import (
    DiffOperator,
    action_of,
    build_operator,
    coordinate_table,
    invariance_check,
    sample_group_element,
)

n, m = 2, 1
table = coordinate_table(n, m)

elements = [sample_group_element(n, m, seed=f"demo3:{t}", height=3)
            for t in range(3)]
actions = [action_of(g, table) for g in elements]

for spec in ("D:j=1", "D:j=2", "Psi:p=1,q=1", "Delta:p=1,q=1",
             "Phi:j=2;S=[[2]]", "M;M=[[2]]", "Laplacian:A=1,B=1"):
    op = build_operator(spec, n, m, table)
    verdicts = [invariance_check(op, act) for act in actions]
    flag = "ok " if all(r.ok for r in verdicts) else "FAIL"
    print(f"[{flag}] {spec:22s} order {op.order()}, "
          f"{op.term_count()} terms, method {verdicts[0].method}")

# A bare partial derivative is not invariant; the report names the first
# monomial where conjugation disagrees.
bad = DiffOperator.partial(table, {"y_1_1": 1})
report = invariance_check(bad, actions[0])
print("bare d/dy11:", report)
