"""Watch prune-and-bypass contraction shrink a full binary tree.

Each round removes about a quarter of the remaining internal leaves; the
contexts that disappear become the patterns of a width-5 hierarchical
definition.
"""

from treebal import OrderedTree, PatternTree, parse_term, tree_at_round
from treebal.contraction import ContractionRun, contraction_patterns

T = OrderedTree.from_term(parse_term(
    "a(b(c(d,e(f,g)),h(i,j)),k(l(m(n,o),p),q(r,s(t,u))))"))

run = ContractionRun(T)
print(f"{T.n} nodes, {run.n_int} internal leaves, {run.total_rounds} rounds")
for i in range(run.total_rounds + 1):
    state = tree_at_round(T, i)
    labels = "".join(sorted(T.labels[v] for v in state.leaves()))
    print(f"  T_{i}: {len(state.nodes):2d} nodes, leaves {labels}")

hd = contraction_patterns(T)
pt = PatternTree(hd)
print(f"\n{len(hd)} patterns, width {pt.width()}, depth {pt.depth()}")
for p in sorted(hd.patterns):
    if p[0] == "C":
        print(f"  context ({T.labels[p[1]]}, {T.labels[p[2]]})")
    else:
        print(f"  subtree {T.labels[p[1]]}")
