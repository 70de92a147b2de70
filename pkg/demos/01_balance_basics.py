"""Balance a deep term into a logarithmic-depth TSLP and inspect it."""

from treebal import balance, parse_term, productions, unfold
from treebal.generators import caterpillar

t = caterpillar(41, seed=1)
print(f"input: size {t.size}, height {t.height}")

C = balance(t)
st = C.stats()
print(f"tslp: {st['size']} gates, depth {st['depth']}")
print()
print(productions(C))

assert unfold(C) == t
print("\nunfold(balance(t)) == t")

small = parse_term("f(g(a,b),h(c,f(a,b)))")
print("\nsmall example:", productions(balance(small)).replace("\n", "; "))
