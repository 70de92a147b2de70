"""A chain of 2x2 matrix products evaluated through a balanced circuit.

Matrix multiplication does not commute, so this exercises the ordered
affine forms a.x.b + c: the balanced circuit must keep every factor on the
correct side.
"""

from treebal import (balance_semiring, eval_semiring_circuit, eval_term,
                     matmodp, parse_term)
from treebal.terms import Term

# x1 * (x2 * (... * x200)), a fully right-leaning product
t = Term("k200")
for i in range(199, 0, -1):
    t = Term("mul", (Term(f"k{i}"), t))
print(f"input: size {t.size}, height {t.height}")

C = balance_semiring(t)
print(f"circuit: {C.n} gates, depth {C.stats()['depth']}")

A = matmodp(97)
direct = eval_term(t, A)
via_circuit = eval_semiring_circuit(C, A)
print("sequential fold:", direct)
print("balanced value: ", via_circuit)
assert direct == via_circuit

# the tropical semiring has no one element; absent coefficients keep the
# transform honest
mini = parse_term("add(k3,mul(k1,add(k2,k8)))")
from treebal import minplus
print("\nmin-plus example:",
      eval_semiring_circuit(balance_semiring(mini), minplus()))
